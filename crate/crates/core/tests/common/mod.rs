//! Brute-force reference implementations shared by the integration tests
//! and the acceptance runner. Everything here is written for clarity, not
//! speed, and avoids calling into the library's own helpers.
#![allow(dead_code)]

use std::f64::consts::PI;

use mtgp::imageops::params::{gabor_frequency, theta_from_index};
use mtgp::imageops::{
    elementwise, gabor, gaussian_derivative, gaussian_filter, grad_magnitude_map, hog_vec,
    laplacian, lbp_code_map, lbp_hist, log_filter, max_pool, rank_mean_filter, sift_vec, sobel,
    weighted_combine, CombineSign, Image, PointwiseKind, RankKind, SobelMode,
};
use rand::Rng;

pub fn random_image<R: Rng>(rng: &mut R, h: usize, w: usize) -> Image {
    Image::from_fn(h, w, |_, _| rng.gen::<f64>())
}

/// Mirror index without repeating the edge: -1 -> 1, n -> n - 2.
pub fn mirror(i: isize, n: usize) -> usize {
    let n = n as isize;
    if n == 1 {
        return 0;
    }
    let period = 2 * (n - 1);
    let mut i = i.rem_euclid(period);
    if i >= n {
        i = period - i;
    }
    i as usize
}

fn px(img: &Image, r: isize, c: isize) -> f64 {
    img.get(mirror(r, img.height()), mirror(c, img.width()))
}

/// True convolution (kernel flipped) with mirrored borders; `k[dy][dx]`
/// with the centre at `(kh/2, kw/2)`.
pub fn convolve(img: &Image, k: &[Vec<f64>]) -> Image {
    let (kh, kw) = (k.len() as isize, k[0].len() as isize);
    Image::from_fn(img.height(), img.width(), |r, c| {
        let mut s = 0.0;
        for i in 0..kh {
            for j in 0..kw {
                let (dy, dx) = (i - kh / 2, j - kw / 2);
                s += k[i as usize][j as usize] * px(img, r as isize - dy, c as isize - dx);
            }
        }
        s
    })
}

/// Correlation (kernel applied as written).
pub fn correlate(img: &Image, k: &[Vec<f64>]) -> Image {
    let flipped: Vec<Vec<f64>> = k.iter().rev().map(|row| row.iter().rev().copied().collect()).collect();
    convolve(img, &flipped)
}

pub fn gaussian_1d(sigma: f64) -> Vec<f64> {
    let r = (3.0 * sigma).ceil() as i64;
    let raw: Vec<f64> = (-r..=r).map(|k| (-(k * k) as f64 / (2.0 * sigma * sigma)).exp()).collect();
    let s: f64 = raw.iter().sum();
    raw.iter().map(|v| v / s).collect()
}

/// Sampled Gaussian derivative normalised by its moment so that it
/// differentiates polynomials of the matching order exactly.
pub fn gaussian_derivative_1d(sigma: f64, order: u8) -> Vec<f64> {
    let g = gaussian_1d(sigma);
    let r = (g.len() / 2) as i64;
    let s2 = sigma * sigma;
    let ks: Vec<f64> = (-r..=r).map(|k| k as f64).collect();
    match order {
        0 => g,
        1 => {
            let d: Vec<f64> = ks.iter().zip(&g).map(|(k, g)| -k / s2 * g).collect();
            // convolving x with d gives -sum(k d_k)
            let m: f64 = ks.iter().zip(&d).map(|(k, d)| -k * d).sum();
            d.iter().map(|v| v / m).collect()
        }
        _ => {
            let d: Vec<f64> = ks.iter().zip(&g).map(|(k, g)| (k * k / (s2 * s2) - 1.0 / s2) * g).collect();
            let mean = d.iter().sum::<f64>() / d.len() as f64;
            let d: Vec<f64> = d.iter().map(|v| v - mean).collect();
            let m: f64 = ks.iter().zip(&d).map(|(k, d)| k * k * d).sum();
            d.iter().map(|v| 2.0 * v / m).collect()
        }
    }
}

pub fn outer(col: &[f64], row: &[f64]) -> Vec<Vec<f64>> {
    col.iter().map(|a| row.iter().map(|b| a * b).collect()).collect()
}

pub fn gabor_2d(theta_index: u8, v: u8, cap: usize) -> Vec<Vec<f64>> {
    let theta = theta_from_index(theta_index);
    let f = gabor_frequency(v);
    let sigma = PI / f;
    let r = ((3.0 * sigma).ceil() as usize).min(cap) as i64;
    let mut k: Vec<Vec<f64>> = (-r..=r)
        .map(|y| {
            (-r..=r)
                .map(|x| {
                    let (x, y) = (x as f64, y as f64);
                    (-(x * x + y * y) / (2.0 * sigma * sigma)).exp() * (f * (x * theta.cos() + y * theta.sin())).cos()
                })
                .collect()
        })
        .collect();
    let n = ((2 * r + 1) * (2 * r + 1)) as f64;
    let mean = k.iter().flatten().sum::<f64>() / n;
    k.iter_mut().flatten().for_each(|v| *v -= mean);
    k
}

pub fn log_2d(sigma: f64) -> Vec<Vec<f64>> {
    let r = (3.0 * sigma).ceil() as i64;
    let s2 = sigma * sigma;
    let mut k: Vec<Vec<f64>> = (-r..=r)
        .map(|y| {
            (-r..=r)
                .map(|x| {
                    let q = ((x * x + y * y) as f64) / (2.0 * s2);
                    -1.0 / (PI * s2 * s2) * (1.0 - q) * (-q).exp()
                })
                .collect()
        })
        .collect();
    let n = ((2 * r + 1) * (2 * r + 1)) as f64;
    let mean = k.iter().flatten().sum::<f64>() / n;
    k.iter_mut().flatten().for_each(|v| *v -= mean);
    k
}

pub fn window_stat(img: &Image, kind: RankKind) -> Image {
    Image::from_fn(img.height(), img.width(), |r, c| {
        let mut w = Vec::new();
        for dr in -1..=1 {
            for dc in -1..=1 {
                w.push(px(img, r as isize + dr, c as isize + dc));
            }
        }
        w.sort_by(|a, b| a.partial_cmp(b).unwrap());
        match kind {
            RankKind::Median => w[4],
            RankKind::Mean => w.iter().sum::<f64>() / 9.0,
            RankKind::Min => w[0],
            RankKind::Max => w[8],
        }
    })
}

const CLOCKWISE: [(isize, isize); 8] = [(-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1)];

pub fn lbp_code(img: &Image, r: isize, c: isize) -> u8 {
    let centre = px(img, r, c);
    let mut code = 0u8;
    for (bit, (dr, dc)) in CLOCKWISE.iter().enumerate() {
        if px(img, r + dr, c + dc) >= centre {
            code += 1 << bit;
        }
    }
    code
}

fn is_uniform(code: u8) -> bool {
    let bits: Vec<u8> = (0..8).map(|i| (code >> i) & 1).collect();
    (0..8).filter(|&i| bits[i] != bits[(i + 1) % 8]).count() <= 2
}

pub fn lbp_histogram(img: &Image) -> Vec<f64> {
    let uniform: Vec<u8> = (0..=255u8).filter(|&c| is_uniform(c)).collect();
    let mut hist = vec![0.0; 59];
    let mut n = 0.0;
    for r in 1..img.height() - 1 {
        for c in 1..img.width() - 1 {
            let code = lbp_code(img, r as isize, c as isize);
            let bin = uniform.iter().position(|&u| u == code).unwrap_or(58);
            hist[bin] += 1.0;
            n += 1.0;
        }
    }
    hist.iter().map(|v| v / n).collect()
}

fn gradients(img: &Image) -> Vec<(f64, f64)> {
    let mut g = Vec::new();
    for r in 0..img.height() as isize {
        for c in 0..img.width() as isize {
            g.push((
                (px(img, r, c + 1) - px(img, r, c - 1)) / 2.0,
                (px(img, r + 1, c) - px(img, r - 1, c)) / 2.0,
            ));
        }
    }
    g
}

pub fn grad_magnitude(img: &Image) -> Image {
    let g = gradients(img);
    let mags: Vec<f64> = g.iter().map(|(x, y)| (x * x + y * y).sqrt()).collect();
    let max = mags.iter().copied().fold(0.0, f64::max);
    let w = img.width();
    Image::from_fn(img.height(), w, |r, c| if max > 0.0 { mags[r * w + c] / max } else { 0.0 })
}

/// Orientation histogram descriptor using `atan2` binning.
pub fn oriented_histogram(img: &Image, rows: usize, cols: usize) -> Vec<f64> {
    let (h, w) = (img.height(), img.width());
    let mut hist = vec![0.0; rows * cols * 8];
    for (i, (gx, gy)) in gradients(img).into_iter().enumerate() {
        let (r, c) = (i / w, i % w);
        let mag = (gx * gx + gy * gy).sqrt();
        if mag == 0.0 {
            continue;
        }
        let angle = gy.atan2(gx).rem_euclid(PI);
        let bin = ((angle / (PI / 8.0)) as usize).min(7);
        let cell = (r * rows / h) * cols + c * cols / w;
        hist[cell * 8 + bin] += mag;
    }
    let norm = hist.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return hist;
    }
    let clipped: Vec<f64> = hist.iter().map(|v| (v / norm).min(0.2)).collect();
    let norm = clipped.iter().map(|v| v * v).sum::<f64>().sqrt();
    clipped.iter().map(|v| v / norm).collect()
}

pub fn pool_windows(img: &Image, k1: usize, k2: usize) -> Image {
    let oh = img.height().div_ceil(k1);
    let ow = img.width().div_ceil(k2);
    Image::from_fn(oh, ow, |r, c| {
        let mut vals = Vec::new();
        for i in 0..img.height() {
            for j in 0..img.width() {
                if i / k1 == r && j / k2 == c {
                    vals.push(img.get(i, j));
                }
            }
        }
        vals.into_iter().fold(f64::NEG_INFINITY, f64::max)
    })
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "length mismatch");
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn image_diff(a: &Image, b: &Image) -> f64 {
    assert_eq!((a.height(), a.width()), (b.height(), b.width()), "shape mismatch");
    max_abs_diff(a.pixels(), b.pixels())
}

/// Largest deviation of every image operation from its oracle on `img`,
/// keyed by operation name.
pub fn oracle_deviations<R: Rng>(img: &Image, rng: &mut R) -> Vec<(&'static str, f64)> {
    let sigma = rng.gen_range(1.0..3.0);
    let (o1, o2) = (rng.gen_range(0..3u8), rng.gen_range(0..3u8));
    let (theta, v) = (rng.gen_range(0..8u8), rng.gen_range(0..5u8));
    let (n1, n2) = (rng.gen::<f64>(), rng.gen::<f64>());
    let (oh, ow) = (rng.gen_range(8..24), rng.gen_range(8..24));
    let other = random_image(rng, oh, ow);
    let cap = img.height().min(img.width()) / 2;
    let g = gaussian_1d(sigma);
    let lap = vec![vec![0.0, 1.0, 0.0], vec![1.0, -4.0, 1.0], vec![0.0, 1.0, 0.0]];
    let sx = vec![vec![-1.0, 0.0, 1.0], vec![-2.0, 0.0, 2.0], vec![-1.0, 0.0, 1.0]];
    let sy = vec![vec![-1.0, -2.0, -1.0], vec![0.0, 0.0, 0.0], vec![1.0, 2.0, 1.0]];
    let (ox, oy) = (correlate(img, &sx), correlate(img, &sy));
    let mag = Image::from_fn(img.height(), img.width(), |r, c| ox.get(r, c).hypot(oy.get(r, c)));
    let crop_h = img.height().min(other.height());
    let crop_w = img.width().min(other.width());
    let combine = |s: f64| Image::from_fn(crop_h, crop_w, |r, c| n1 * img.get(r, c) + s * n2 * other.get(r, c));
    let lbp_map = Image::from_fn(img.height(), img.width(), |r, c| {
        f64::from(lbp_code(img, r as isize, c as isize)) / 255.0
    });
    let mut out = vec![
        ("gaussian_filter", image_diff(&gaussian_filter(img, sigma).unwrap(), &convolve(img, &outer(&g, &g)))),
        (
            "gaussian_derivative",
            image_diff(
                &gaussian_derivative(img, sigma, o1, o2).unwrap(),
                &convolve(img, &outer(&gaussian_derivative_1d(sigma, o2), &gaussian_derivative_1d(sigma, o1))),
            ),
        ),
        ("gabor", image_diff(&gabor(img, theta, v).unwrap(), &convolve(img, &gabor_2d(theta, v, cap)))),
        ("laplacian", image_diff(&laplacian(img).unwrap(), &convolve(img, &lap))),
        ("log_filter", image_diff(&log_filter(img, 1.0).unwrap(), &convolve(img, &log_2d(1.0)))),
        ("log_filter", image_diff(&log_filter(img, 2.0).unwrap(), &convolve(img, &log_2d(2.0)))),
        ("sobel", image_diff(&sobel(img, SobelMode::X).unwrap(), &ox)),
        ("sobel", image_diff(&sobel(img, SobelMode::Y).unwrap(), &oy)),
        ("sobel", image_diff(&sobel(img, SobelMode::Magnitude).unwrap(), &mag)),
        ("lbp_code_map", image_diff(&lbp_code_map(img), &lbp_map)),
        ("grad_magnitude_map", image_diff(&grad_magnitude_map(img), &grad_magnitude(img))),
        (
            "weighted_combine",
            image_diff(&weighted_combine(img, n1, &other, n2, CombineSign::Add), &combine(1.0)),
        ),
        (
            "weighted_combine",
            image_diff(&weighted_combine(img, n1, &other, n2, CombineSign::Sub), &combine(-1.0)),
        ),
        (
            "elementwise",
            image_diff(&elementwise(img, PointwiseKind::Relu), &Image::from_fn(img.height(), img.width(), |r, c| {
                img.get(r, c).max(0.0)
            })),
        ),
        (
            "elementwise",
            image_diff(&elementwise(img, PointwiseKind::Sqrt), &Image::from_fn(img.height(), img.width(), |r, c| {
                img.get(r, c).abs().sqrt()
            })),
        ),
        ("sift_vec", max_abs_diff(sift_vec(img).unwrap().values(), &oriented_histogram(img, 4, 4))),
        ("hog_vec", max_abs_diff(hog_vec(img).unwrap().values(), &oriented_histogram(img, 2, 4))),
        ("lbp_hist", max_abs_diff(lbp_hist(img).unwrap().values(), &lbp_histogram(img))),
    ];
    for kind in [RankKind::Median, RankKind::Mean, RankKind::Min, RankKind::Max] {
        out.push(("rank_mean_filter", image_diff(&rank_mean_filter(img, kind), &window_stat(img, kind))));
    }
    for (k1, k2) in [(2u8, 2u8), (2, 4), (4, 2), (4, 4)] {
        let got = max_pool(img, k1, k2).unwrap();
        let (k1, k2) = (usize::from(k1), usize::from(k2));
        let expected = if img.height().div_ceil(k1) < 8 || img.width().div_ceil(k2) < 8 {
            img.clone()
        } else {
            pool_windows(img, k1, k2)
        };
        out.push(("max_pool", image_diff(&got, &expected)));
    }
    out
}

/// The fixed worked examples for each operation: `(name, deviation)`.
pub fn derived_examples() -> Vec<(&'static str, f64)> {
    use mtgp::imageops::{convolve2d, pool_max, Kernel};
    let mut out = Vec::new();

    let ramp4 = Image::from_fn(4, 4, |r, c| (r * 4 + c) as f64);
    let ones = Kernel::new(3, 3, vec![1.0; 9]).unwrap();
    out.push(("convolve2d 4x4 ramp", image_diff(&convolve2d(&ramp4, &ones).unwrap(), &convolve(&ramp4, &vec![vec![1.0; 3]; 3]))));

    let mut impulse = Image::zeros(15, 15);
    impulse.set(7, 7, 1.0);
    let g = gaussian_1d(1.0);
    let resp = gaussian_filter(&impulse, 1.0).unwrap();
    let dev = (0..7)
        .flat_map(|i| (0..7).map(move |j| (i, j)))
        .map(|(i, j)| (resp.get(4 + i, 4 + j) - g[i] * g[j]).abs())
        .fold(0.0, f64::max);
    out.push(("gaussian impulse response", dev));

    let ramp = Image::from_fn(24, 24, |_, c| 0.03 * c as f64);
    let d = gaussian_derivative(&ramp, 1.5, 1, 0).unwrap();
    let smooth = gaussian_filter(&ramp, 1.5).unwrap();
    let mut dev: f64 = 0.0;
    for r in 6..18 {
        for c in 6..18 {
            let fd = (smooth.get(r, c + 1) - smooth.get(r, c - 1)) / 2.0;
            dev = dev.max((d.get(r, c) - fd).abs());
        }
    }
    out.push(("gaussian_derivative ramp", dev));

    let mut impulse = Image::zeros(21, 21);
    impulse.set(10, 10, 1.0);
    let k = log_2d(2.0);
    let resp = log_filter(&impulse, 2.0).unwrap();
    let dev = (0..13)
        .flat_map(|i| (0..13).map(move |j| (i, j)))
        .map(|(i, j)| (resp.get(4 + i, 4 + j) - k[12 - i][12 - j]).abs())
        .fold(0.0, f64::max);
    out.push(("log impulse response", dev));

    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(77);
    let img5 = random_image(&mut rng, 5, 5);
    for kind in [RankKind::Median, RankKind::Mean, RankKind::Min, RankKind::Max] {
        out.push(("rank filter 5x5", image_diff(&rank_mean_filter(&img5, kind), &window_stat(&img5, kind))));
    }
    out.push(("pool 5x5 k=2", image_diff(&pool_max(&img5, 2, 2), &pool_windows(&img5, 2, 2))));

    let img4 = random_image(&mut rng, 4, 4);
    let codes = lbp_code_map(&img4);
    let dev = (0..16)
        .map(|i| (codes.get(i / 4, i % 4) * 255.0 - f64::from(lbp_code(&img4, (i / 4) as isize, (i % 4) as isize))).abs())
        .fold(0.0, f64::max);
    out.push(("lbp codes 4x4", dev));

    let ramp = Image::from_fn(10, 10, |_, c| 0.1 * c as f64);
    let gm = grad_magnitude_map(&ramp);
    let dev = (1..9).flat_map(|r| (1..9).map(move |c| (r, c))).map(|(r, c)| (gm.get(r, c) - 1.0).abs()).fold(0.0, f64::max);
    out.push(("grad magnitude ramp", dev));

    let a = random_image(&mut rng, 6, 6);
    let b = random_image(&mut rng, 4, 5);
    let wc = weighted_combine(&a, 0.3, &b, 0.6, CombineSign::Sub);
    let oracle = Image::from_fn(4, 5, |r, c| 0.3 * a.get(r, c) - 0.6 * b.get(r, c));
    out.push(("weighted_combine 6x6 with 4x5", image_diff(&wc, &oracle)));

    let img8 = random_image(&mut rng, 8, 8);
    out.push(("lbp histogram 8x8", max_abs_diff(lbp_hist(&img8).unwrap().values(), &lbp_histogram(&img8))));
    out
}

/// Exact invariants: `(name, holds)`.
pub fn trivial_invariants() -> Vec<(&'static str, bool)> {
    use mtgp::imageops::{convolve2d, gabor_kernel, Kernel};
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(78);
    let img = random_image(&mut rng, 12, 14);
    let flat = Image::filled(12, 12, 0.5);
    let zero = |i: &Image| i.pixels().iter().all(|v| v.abs() <= 1e-12);
    let same = |a: &Image, b: &Image| image_diff(a, b) <= 1e-12;
    let mut identity = vec![0.0; 9];
    identity[4] = 1.0;
    let identity = Kernel::new(3, 3, identity).unwrap();
    let box3 = Kernel::new(3, 3, vec![1.0 / 9.0; 9]).unwrap();
    let neg = img.map(|v| v - 0.5);
    let relu_sum = Image::from_fn(12, 14, |r, c| {
        elementwise(&neg.map(|v| -v), PointwiseKind::Relu).get(r, c) + elementwise(&neg, PointwiseKind::Relu).get(r, c)
    });
    let mut peak = img.clone();
    peak.set(5, 5, 2.0);
    let g0 = gabor_kernel(0, 2, 32).unwrap();
    let g90 = gabor_kernel(4, 2, 32).unwrap();
    let rank_order = {
        let (lo, mid, hi) = (
            rank_mean_filter(&img, RankKind::Min),
            rank_mean_filter(&img, RankKind::Median),
            rank_mean_filter(&img, RankKind::Max),
        );
        (0..img.pixels().len()).all(|i| lo.pixels()[i] <= mid.pixels()[i] && mid.pixels()[i] <= hi.pixels()[i])
    };
    let sift_norm = sift_vec(&img).unwrap().values().iter().map(|v| v * v).sum::<f64>().sqrt();
    vec![
        ("identity kernel", same(&convolve2d(&img, &identity).unwrap(), &img)),
        ("unit-sum kernel on constant", same(&convolve2d(&flat, &box3).unwrap(), &flat)),
        ("gaussian constant", same(&gaussian_filter(&flat, 2.0).unwrap(), &flat)),
        ("gaussian order 0", same(&gaussian_derivative(&img, 1.7, 0, 0).unwrap(), &gaussian_filter(&img, 1.7).unwrap())),
        ("derivative of constant", zero(&gaussian_derivative(&flat, 1.2, 1, 0).unwrap())),
        ("gabor constant", zero(&gabor(&flat, 3, 1).unwrap())),
        ("gabor rotation", g0.transpose().taps().iter().zip(g90.taps()).all(|(a, b)| (a - b).abs() <= 1e-12)),
        ("laplacian constant", zero(&laplacian(&flat).unwrap())),
        ("log constant", zero(&log_filter(&flat, 2.0).unwrap())),
        ("sobel constant", zero(&sobel(&flat, SobelMode::Magnitude).unwrap())),
        ("rank filters constant", same(&rank_mean_filter(&flat, RankKind::Median), &flat)),
        ("min <= median <= max", rank_order),
        ("lbp map constant", lbp_code_map(&flat).pixels().iter().all(|&v| v == 1.0)),
        ("lbp strict maximum", lbp_code_map(&peak).get(5, 5) == 0.0),
        ("grad magnitude constant", zero(&grad_magnitude_map(&flat))),
        ("grad magnitude max 1", grad_magnitude_map(&img).pixels().iter().copied().fold(0.0, f64::max) == 1.0),
        ("self-cancellation", zero(&weighted_combine(&img, 0.5, &img, 0.5, CombineSign::Sub))),
        ("relu(-x) + relu(x) = |x|", same(&relu_sum, &neg.map(f64::abs))),
        ("sqrt of -1", elementwise(&Image::filled(9, 9, -1.0), PointwiseKind::Sqrt).pixels().iter().all(|&v| v == 1.0)),
        ("pool dims", {
            let p = max_pool(&random_image(&mut rng, 32, 32), 2, 2).unwrap();
            (p.height(), p.width()) == (16, 16)
        }),
        ("sift constant", sift_vec(&flat).unwrap().values().iter().all(|&v| v == 0.0)),
        ("sift unit norm", (sift_norm - 1.0).abs() <= 1e-6),
        ("hog constant", hog_vec(&flat).unwrap().values().iter().all(|&v| v == 0.0)),
        ("lbp sums to 1", (lbp_hist(&img).unwrap().values().iter().sum::<f64>() - 1.0).abs() <= 1e-9),
    ]
}

/// Accuracy in `[0, 100]` derived from a hash of the table contents, so the
/// same features always score the same.
pub struct HashScorer;

impl mtgp::multitask::CvScorer for HashScorer {
    fn score(&self, task: usize, table: &mtgp::learners::FeatureTable) -> Result<f64, mtgp::learners::LearnError> {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        task.hash(&mut h);
        table.dim().hash(&mut h);
        for v in table.data() {
            v.to_bits().hash(&mut h);
        }
        Ok((h.finish() % 10_001) as f64 / 100.0)
    }
}

/// Small synthetic pair for quick evolutionary runs.
pub fn small_pair(test_per_class: usize) -> (mtgp::data::TaskSpec, mtgp::data::TaskSpec) {
    use mtgp::data::SynthSpec;
    let mut a = SynthSpec::orientation();
    let mut b = SynthSpec::frequency();
    a.test_per_class = test_per_class;
    b.test_per_class = test_per_class;
    (a.generate().unwrap(), b.generate().unwrap())
}

/// Two-sided rank-sum p-value by enumerating every assignment of the pooled
/// observations to a first sample of size `a.len()`.
pub fn exact_ranksum_p(a: &[f64], b: &[f64]) -> f64 {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let total = pooled.len();
    assert!(total <= 20, "enumeration is exponential");
    let rank = |x: f64| {
        let below = pooled.iter().filter(|&&y| y < x).count() as f64;
        let equal = pooled.iter().filter(|&&y| y == x).count() as f64;
        below + (equal + 1.0) / 2.0
    };
    let ranks: Vec<f64> = pooled.iter().map(|&x| rank(x)).collect();
    let n = a.len() as u32;
    let mean = f64::from(n) * (total as f64 + 1.0) / 2.0;
    let observed = (ranks[..a.len()].iter().sum::<f64>() - mean).abs();
    let (mut hits, mut all) = (0u64, 0u64);
    for mask in 0u32..(1 << total) {
        if mask.count_ones() != n {
            continue;
        }
        let w: f64 = (0..total).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
        all += 1;
        if (w - mean).abs() >= observed - 1e-9 {
            hits += 1;
        }
    }
    hits as f64 / all as f64
}
