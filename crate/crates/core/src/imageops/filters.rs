use std::f64::consts::PI;

use super::conv::{convolve2d, convolve_separable, Kernel};
use super::descriptors::{central_gradients, lbp_code_at};
use super::params::{
    check_freq_index, check_order, check_pool_size, check_sigma, check_theta_index,
    gabor_frequency, theta_from_index,
};
use super::{Image, ImageError, MIN_DESCRIPTOR_SIDE};

fn half_width(sigma: f64) -> usize {
    (3.0 * sigma).ceil() as usize
}

/// Sampled 1-D Gaussian on `[-ceil(3 sigma), ceil(3 sigma)]`, normalised to sum 1.
pub fn gaussian_taps(sigma: f64) -> Result<Vec<f64>, ImageError> {
    check_sigma(sigma)?;
    let r = half_width(sigma) as isize;
    let denom = 2.0 * sigma * sigma;
    let raw: Vec<f64> = (-r..=r).map(|k| (-((k * k) as f64) / denom).exp()).collect();
    let total: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|v| v / total).collect())
}

/// Analytic Gaussian derivative of the given order, sampled on the same
/// support as [`gaussian_taps`].
///
/// Order 1 is scaled so a unit ramp `x` maps to 1; order 2 is made zero-sum
/// and scaled so `x^2` maps to 2. Truncation would otherwise bias the
/// response away from the true derivative of the smoothed signal.
pub fn gaussian_derivative_taps(sigma: f64, order: u8) -> Result<Vec<f64>, ImageError> {
    check_order(order)?;
    let g = gaussian_taps(sigma)?;
    let r = (g.len() / 2) as isize;
    let s2 = sigma * sigma;
    match order {
        0 => Ok(g),
        1 => {
            let mut taps = vec![0.0; g.len()];
            for k in 1..=r {
                let v = -(k as f64) / s2 * g[(k + r) as usize];
                taps[(k + r) as usize] = v;
                taps[(r - k) as usize] = -v;
            }
            let moment: f64 = (-r..=r).map(|k| -(k as f64) * taps[(k + r) as usize]).sum();
            Ok(taps.into_iter().map(|v| v / moment).collect())
        }
        _ => {
            let mut taps: Vec<f64> = (-r..=r)
                .map(|k| {
                    let k2 = (k * k) as f64;
                    (k2 / (s2 * s2) - 1.0 / s2) * g[(k + r) as usize]
                })
                .collect();
            let mean = taps.iter().sum::<f64>() / taps.len() as f64;
            taps.iter_mut().for_each(|v| *v -= mean);
            let moment: f64 = (-r..=r).map(|k| ((k * k) as f64) * taps[(k + r) as usize]).sum();
            Ok(taps.into_iter().map(|v| 2.0 * v / moment).collect())
        }
    }
}

pub fn gaussian_filter(img: &Image, sigma: f64) -> Result<Image, ImageError> {
    let taps = gaussian_taps(sigma)?;
    convolve_separable(img, &taps, &taps)
}

/// `o1` is the derivative order along x (columns), `o2` along y (rows).
pub fn gaussian_derivative(img: &Image, sigma: f64, o1: u8, o2: u8) -> Result<Image, ImageError> {
    let row = gaussian_derivative_taps(sigma, o1)?;
    let col = gaussian_derivative_taps(sigma, o2)?;
    convolve_separable(img, &col, &row)
}

/// Real part of a Gabor kernel with isotropic envelope `sigma = pi / f`,
/// half-width `min(ceil(3 sigma), max_half)`, mean removed.
pub fn gabor_kernel(theta_index: u8, v: u8, max_half: usize) -> Result<Kernel, ImageError> {
    check_theta_index(theta_index)?;
    check_freq_index(v)?;
    let theta = theta_from_index(theta_index);
    let f = gabor_frequency(v);
    let sigma = PI / f;
    let r = half_width(sigma).min(max_half) as isize;
    let (sin, cos) = theta.sin_cos();
    let denom = 2.0 * sigma * sigma;
    let mut taps = Vec::with_capacity(((2 * r + 1) * (2 * r + 1)) as usize);
    for dy in -r..=r {
        for dx in -r..=r {
            let (x, y) = (dx as f64, dy as f64);
            let along = x * cos + y * sin;
            taps.push((-(x * x + y * y) / denom).exp() * (f * along).cos());
        }
    }
    let mean = taps.iter().sum::<f64>() / taps.len() as f64;
    taps.iter_mut().for_each(|v| *v -= mean);
    let side = (2 * r + 1) as usize;
    Kernel::new(side, side, taps)
}

/// Convolution with [`gabor_kernel`] capped at half the shorter image side.
///
/// The kernel is applied as three separable passes using
/// `cos(a + b) = cos a cos b - sin a sin b` plus the constant mean term.
pub fn gabor(img: &Image, theta_index: u8, v: u8) -> Result<Image, ImageError> {
    let kernel = gabor_kernel(theta_index, v, img.height().min(img.width()) / 2)?;
    let r = (kernel.width() / 2) as isize;
    let f = gabor_frequency(v);
    let sigma = PI / f;
    let (sin, cos) = theta_from_index(theta_index).sin_cos();
    let g = |t: f64| (-(t * t) / (2.0 * sigma * sigma)).exp();
    let offsets: Vec<f64> = (-r..=r).map(|d| d as f64).collect();
    let taps = |h: &dyn Fn(f64) -> f64| -> Vec<f64> { offsets.iter().map(|&t| h(t)).collect() };
    let col_cos = taps(&|y| g(y) * (f * y * sin).cos());
    let col_sin = taps(&|y| g(y) * (f * y * sin).sin());
    let row_cos = taps(&|x| g(x) * (f * x * cos).cos());
    let row_sin = taps(&|x| g(x) * (f * x * cos).sin());
    let sum = |v: &[f64]| v.iter().sum::<f64>();
    let full_mean = (sum(&col_cos) * sum(&row_cos) - sum(&col_sin) * sum(&row_sin))
        / (offsets.len() * offsets.len()) as f64;
    let ones = vec![1.0; offsets.len()];
    let a = convolve_separable(img, &col_cos, &row_cos)?;
    let b = convolve_separable(img, &col_sin, &row_sin)?;
    let m = convolve_separable(img, &ones, &ones)?;
    let pixels = a
        .pixels()
        .iter()
        .zip(b.pixels())
        .zip(m.pixels())
        .map(|((a, b), m)| a - b - full_mean * m)
        .collect();
    Image::new(img.height(), img.width(), pixels)
}

pub fn laplacian(img: &Image) -> Result<Image, ImageError> {
    let k = Kernel::from_rows([[0.0, 1.0, 0.0], [1.0, -4.0, 1.0], [0.0, 1.0, 0.0]])?;
    convolve2d(img, &k)
}

/// Sampled Laplacian-of-Gaussian with the mean removed.
pub fn log_kernel(sigma: f64) -> Result<Kernel, ImageError> {
    check_sigma(sigma)?;
    let r = half_width(sigma) as isize;
    let s2 = sigma * sigma;
    let scale = -1.0 / (PI * s2 * s2);
    let mut taps = Vec::with_capacity(((2 * r + 1) * (2 * r + 1)) as usize);
    for dy in -r..=r {
        for dx in -r..=r {
            let q = ((dx * dx + dy * dy) as f64) / (2.0 * s2);
            taps.push(scale * (1.0 - q) * (-q).exp());
        }
    }
    let mean = taps.iter().sum::<f64>() / taps.len() as f64;
    taps.iter_mut().for_each(|v| *v -= mean);
    let side = (2 * r + 1) as usize;
    Kernel::new(side, side, taps)
}

pub fn log_filter(img: &Image, sigma: f64) -> Result<Image, ImageError> {
    convolve2d(img, &log_kernel(sigma)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SobelMode {
    X,
    Y,
    Magnitude,
}

/// Sobel responses. The x (y) response is positive where intensity grows
/// towards larger column (row) indices.
pub fn sobel(img: &Image, mode: SobelMode) -> Result<Image, ImageError> {
    let kx = Kernel::from_rows([[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]])?;
    // convolve2d flips its kernel; pre-flip so the standard kernel is applied as written
    let gx = || convolve2d(img, &kx.flipped());
    let gy = || convolve2d(img, &kx.transpose().flipped());
    match mode {
        SobelMode::X => gx(),
        SobelMode::Y => gy(),
        SobelMode::Magnitude => {
            let (x, y) = (gx()?, gy()?);
            let px: Vec<f64> = x
                .pixels()
                .iter()
                .zip(y.pixels())
                .map(|(a, b)| a.hypot(*b))
                .collect();
            Image::new(img.height(), img.width(), px)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RankKind {
    Median,
    Mean,
    Min,
    Max,
}

/// 3x3 sliding-window statistic with reflect padding.
pub fn rank_mean_filter(img: &Image, kind: RankKind) -> Image {
    let mut window = [0.0f64; 9];
    Image::from_fn(img.height(), img.width(), |r, c| {
        let mut n = 0;
        for dr in -1..=1isize {
            for dc in -1..=1isize {
                window[n] = img.get_reflect(r as isize + dr, c as isize + dc);
                n += 1;
            }
        }
        match kind {
            RankKind::Mean => window.iter().sum::<f64>() / 9.0,
            RankKind::Min => window.iter().copied().fold(f64::INFINITY, f64::min),
            RankKind::Max => window.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            RankKind::Median => {
                window.sort_unstable_by(|a, b| a.total_cmp(b));
                window[4]
            }
        }
    })
}

/// 8-neighbour LBP code of every pixel scaled into `[0, 1]`.
pub fn lbp_code_map(img: &Image) -> Image {
    Image::from_fn(img.height(), img.width(), |r, c| {
        f64::from(lbp_code_at(img, r as isize, c as isize)) / 255.0
    })
}

/// Central-difference gradient magnitude divided by its global maximum.
pub fn grad_magnitude_map(img: &Image) -> Image {
    let (gx, gy) = central_gradients(img);
    let mag: Vec<f64> = gx.iter().zip(&gy).map(|(a, b)| a.hypot(*b)).collect();
    let max = mag.iter().copied().fold(0.0, f64::max);
    let px = if max > 0.0 {
        mag.into_iter().map(|v| v / max).collect()
    } else {
        vec![0.0; mag.len()]
    };
    Image::new(img.height(), img.width(), px).expect("shape preserved")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CombineSign {
    Add,
    Sub,
}

/// `n1 * a +/- n2 * b` over the overlapping top-left region.
pub fn weighted_combine(a: &Image, n1: f64, b: &Image, n2: f64, sign: CombineSign) -> Image {
    let h = a.height().min(b.height());
    let w = a.width().min(b.width());
    let s = match sign {
        CombineSign::Add => 1.0,
        CombineSign::Sub => -1.0,
    };
    Image::from_fn(h, w, |r, c| n1 * a.get(r, c) + s * n2 * b.get(r, c))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointwiseKind {
    Relu,
    /// `sqrt(|x|)`
    Sqrt,
}

pub fn elementwise(img: &Image, kind: PointwiseKind) -> Image {
    match kind {
        PointwiseKind::Relu => img.map(|v| v.max(0.0)),
        PointwiseKind::Sqrt => img.map(|v| v.abs().sqrt()),
    }
}

/// Non-overlapping `k1 x k2` max pooling (k1 rows, k2 columns); partial
/// windows at the far edges pool over the pixels they cover.
pub fn pool_max(img: &Image, k1: usize, k2: usize) -> Image {
    assert!(k1 > 0 && k2 > 0, "pool size must be positive");
    let oh = img.height().div_ceil(k1);
    let ow = img.width().div_ceil(k2);
    Image::from_fn(oh, ow, |r, c| {
        let mut m = f64::NEG_INFINITY;
        for sr in r * k1..((r + 1) * k1).min(img.height()) {
            for sc in c * k2..((c + 1) * k2).min(img.width()) {
                m = m.max(img.get(sr, sc));
            }
        }
        m
    })
}

/// The `MaxP` primitive: [`pool_max`], skipped (input returned unchanged)
/// when either output side would drop below the descriptor minimum.
pub fn max_pool(img: &Image, k1: u8, k2: u8) -> Result<Image, ImageError> {
    check_pool_size(k1)?;
    check_pool_size(k2)?;
    let (k1, k2) = (usize::from(k1), usize::from(k2));
    if img.height().div_ceil(k1) < MIN_DESCRIPTOR_SIDE || img.width().div_ceil(k2) < MIN_DESCRIPTOR_SIDE
    {
        return Ok(img.clone());
    }
    Ok(pool_max(img, k1, k2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp_x(h: usize, w: usize, slope: f64) -> Image {
        Image::from_fn(h, w, |_, c| slope * c as f64)
    }

    fn close(a: &Image, b: &Image, tol: f64) -> bool {
        a.height() == b.height()
            && a.width() == b.width()
            && a.pixels().iter().zip(b.pixels()).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn gaussian_taps_are_normalised_and_symmetric() {
        let t = gaussian_taps(1.3).unwrap();
        assert_eq!(t.len(), 2 * 4 + 1);
        assert!((t.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        for i in 0..t.len() {
            assert_eq!(t[i], t[t.len() - 1 - i]);
        }
    }

    #[test]
    fn derivative_taps_moments() {
        for sigma in [1.0, 1.7, 3.0] {
            let d1 = gaussian_derivative_taps(sigma, 1).unwrap();
            let r = (d1.len() / 2) as isize;
            assert!(d1.iter().sum::<f64>().abs() < 1e-15);
            let m1: f64 = (-r..=r).map(|k| -(k as f64) * d1[(k + r) as usize]).sum();
            assert!((m1 - 1.0).abs() < 1e-12);
            let d2 = gaussian_derivative_taps(sigma, 2).unwrap();
            assert!(d2.iter().sum::<f64>().abs() < 1e-14);
            let m2: f64 = (-r..=r).map(|k| (k * k) as f64 * d2[(k + r) as usize]).sum();
            assert!((m2 - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn second_derivative_of_parabola() {
        let img = Image::from_fn(24, 24, |_, c| (c as f64) * (c as f64) / 100.0);
        let out = gaussian_derivative(&img, 1.0, 2, 0).unwrap();
        for c in 4..20 {
            assert!((out.get(12, c) - 0.02).abs() < 1e-12);
        }
    }

    #[test]
    fn derivative_of_constant_vanishes() {
        let img = Image::filled(12, 12, 0.3);
        for (o1, o2) in [(1, 0), (0, 1), (2, 0), (1, 2)] {
            let out = gaussian_derivative(&img, 1.5, o1, o2).unwrap();
            assert!(out.pixels().iter().all(|v| v.abs() < 1e-14), "{o1},{o2}");
        }
    }

    #[test]
    fn derivative_order_zero_is_gaussian() {
        let img = Image::from_fn(10, 11, |r, c| ((r * 3 + c * 7) % 5) as f64);
        assert_eq!(
            gaussian_derivative(&img, 2.0, 0, 0).unwrap(),
            gaussian_filter(&img, 2.0).unwrap()
        );
    }

    #[test]
    fn gaussian_kernel_wider_than_image_is_rejected() {
        // sigma 3 needs a 19-tap kernel, more than twice an 8-pixel side
        let img = Image::filled(8, 8, 0.5);
        assert!(matches!(
            gaussian_filter(&img, 3.0),
            Err(ImageError::KernelTooLarge { .. })
        ));
        assert!(gaussian_filter(&Image::filled(10, 10, 0.5), 3.0).is_ok());
    }

    #[test]
    fn gabor_kernel_rotation_symmetry() {
        for v in 0..=4 {
            let k0 = gabor_kernel(0, v, 16).unwrap();
            let k4 = gabor_kernel(4, v, 16).unwrap();
            for (a, b) in k0.taps().iter().zip(k4.transpose().taps()) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn separable_gabor_matches_direct() {
        let img = Image::from_fn(20, 24, |r, c| ((r * 7 + c * 13) % 11) as f64 / 11.0);
        for theta in 0..8 {
            for v in 0..=4 {
                let direct = convolve2d(&img, &gabor_kernel(theta, v, 10).unwrap()).unwrap();
                let fast = gabor(&img, theta, v).unwrap();
                for (x, y) in direct.pixels().iter().zip(fast.pixels()) {
                    assert!((x - y).abs() < 1e-9, "theta {theta} v {v}: {x} vs {y}");
                }
            }
        }
    }

    #[test]
    fn gabor_half_width_is_capped() {
        let k = gabor_kernel(0, 4, 4).unwrap();
        assert_eq!(k.height(), 9);
        assert!(k.sum().abs() < 1e-12);
    }

    #[test]
    fn laplacian_impulse_and_ramp() {
        let mut img = Image::zeros(7, 7);
        img.set(3, 3, 1.0);
        let out = laplacian(&img).unwrap();
        assert_eq!(out.get(3, 3), -4.0);
        assert_eq!(out.get(2, 3), 1.0);
        assert_eq!(out.get(3, 4), 1.0);
        assert_eq!(out.get(2, 2), 0.0);
        let ramp = ramp_x(6, 6, 0.5);
        let out = laplacian(&ramp).unwrap();
        for r in 1..5 {
            for c in 1..5 {
                assert!(out.get(r, c).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn log_kernel_is_symmetric_and_zero_mean() {
        for sigma in [1.0, 2.0] {
            let k = log_kernel(sigma).unwrap();
            assert!(k.sum().abs() < 1e-14);
            assert_eq!(k.height(), 2 * (3.0 * sigma) as usize + 1);
            let n = k.height();
            for r in 0..n {
                for c in 0..n {
                    assert!((k.get(r, c) - k.get(r, n - 1 - c)).abs() < 1e-15);
                    assert!((k.get(r, c) - k.get(n - 1 - r, c)).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn sobel_step_edge() {
        let img = Image::from_fn(8, 8, |_, c| if c >= 4 { 1.0 } else { 0.0 });
        let gx = sobel(&img, SobelMode::X).unwrap();
        let gy = sobel(&img, SobelMode::Y).unwrap();
        assert!(gx.get(4, 3) > 0.0 && gx.get(4, 4) > 0.0);
        assert_eq!(gx.get(4, 1), 0.0);
        for r in 1..7 {
            for c in 0..8 {
                assert_eq!(gy.get(r, c), 0.0);
            }
        }
        let mag = sobel(&img, SobelMode::Magnitude).unwrap();
        for i in 0..64 {
            assert_eq!(mag.pixels()[i], gx.pixels()[i].hypot(gy.pixels()[i]));
        }
    }

    #[test]
    fn rank_filters_are_ordered() {
        let img = Image::from_fn(6, 5, |r, c| ((r * 17 + c * 29) % 13) as f64 / 13.0);
        let lo = rank_mean_filter(&img, RankKind::Min);
        let med = rank_mean_filter(&img, RankKind::Median);
        let hi = rank_mean_filter(&img, RankKind::Max);
        for i in 0..30 {
            assert!(lo.pixels()[i] <= med.pixels()[i] && med.pixels()[i] <= hi.pixels()[i]);
        }
        let c = Image::filled(4, 4, 0.7);
        for kind in [RankKind::Median, RankKind::Min, RankKind::Max] {
            assert_eq!(rank_mean_filter(&c, kind), c);
        }
        assert!(close(&rank_mean_filter(&c, RankKind::Mean), &c, 1e-15));
    }

    #[test]
    fn lbp_code_map_tie_rule_and_strict_max() {
        let c = Image::filled(5, 5, 0.2);
        assert!(lbp_code_map(&c).pixels().iter().all(|&v| v == 1.0));
        let mut img = Image::filled(5, 5, 0.2);
        img.set(2, 2, 0.9);
        assert_eq!(lbp_code_map(&img).get(2, 2), 0.0);
    }

    #[test]
    fn grad_map_normalised() {
        assert!(grad_magnitude_map(&Image::filled(5, 5, 0.4))
            .pixels()
            .iter()
            .all(|&v| v == 0.0));
        let img = Image::from_fn(6, 7, |r, c| ((r * 5 + c * c) % 7) as f64);
        let out = grad_magnitude_map(&img);
        let max = out.pixels().iter().copied().fold(0.0, f64::max);
        assert_eq!(max, 1.0);
    }

    #[test]
    fn weighted_combine_cases() {
        let img = Image::from_fn(5, 5, |r, c| (r + c) as f64);
        let z = weighted_combine(&img, 0.5, &img, 0.5, CombineSign::Sub);
        assert!(z.pixels().iter().all(|&v| v == 0.0));
        let eps = 1e-3;
        let out = weighted_combine(&img, 1.0 - eps, &Image::zeros(5, 5), 0.3, CombineSign::Add);
        assert_eq!(out, img.map(|v| (1.0 - eps) * v));
    }

    #[test]
    fn elementwise_rules() {
        let img = Image::from_fn(3, 3, |r, c| r as f64 - c as f64);
        let neg = img.map(|v| -v);
        let a = elementwise(&img, PointwiseKind::Relu);
        let b = elementwise(&neg, PointwiseKind::Relu);
        for i in 0..9 {
            assert_eq!(a.pixels()[i] + b.pixels()[i], img.pixels()[i].abs());
        }
        let ones = elementwise(&Image::filled(2, 2, -1.0), PointwiseKind::Sqrt);
        assert!(ones.pixels().iter().all(|&v| v == 1.0));
        let pos = Image::filled(2, 2, 0.25);
        assert_eq!(elementwise(&pos, PointwiseKind::Relu), pos);
    }

    #[test]
    fn max_pool_dims_and_skip() {
        let img = Image::from_fn(32, 32, |r, c| (r * 32 + c) as f64);
        let out = max_pool(&img, 2, 2).unwrap();
        assert_eq!((out.height(), out.width()), (16, 16));
        assert_eq!(out.get(0, 0), 33.0);
        // 32 / 4 = 8 still allowed, then 8 / 2 = 4 is skipped
        let once = max_pool(&img, 4, 4).unwrap();
        assert_eq!((once.height(), once.width()), (8, 8));
        assert_eq!(max_pool(&once, 2, 2).unwrap(), once);
        let c = Image::filled(20, 18, 0.3);
        let p = max_pool(&c, 2, 2).unwrap();
        assert_eq!((p.height(), p.width()), (10, 9));
        assert!(p.pixels().iter().all(|&v| v == 0.3));
        assert!(max_pool(&c, 3, 2).is_err());
    }

    #[test]
    fn pool_max_partial_windows() {
        let img = Image::from_fn(5, 5, |r, c| (r * 5 + c) as f64);
        let out = pool_max(&img, 2, 2);
        assert_eq!((out.height(), out.width()), (3, 3));
        assert_eq!(out.get(2, 2), 24.0);
        assert_eq!(out.get(0, 2), 9.0);
    }
}
