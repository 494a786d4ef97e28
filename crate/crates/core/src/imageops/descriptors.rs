//! Whole-image descriptors with fixed output length.
//!
//! Dimensions do not depend on the input size, so trees evolved on one image
//! size can extract features from another:
//!
//! * SIFT: 4x4 spatial grid x 8 orientation bins = 128
//! * HOG: 2 (rows) x 4 (columns) cells x 8 orientation bins = 64
//! * LBP: 58 uniform patterns + 1 non-uniform bin = 59
//!
//! Orientations are unsigned (folded into `[0, pi)`) and each pixel votes
//! its gradient magnitude into exactly one bin of exactly one cell.

use std::f64::consts::PI;
use std::sync::OnceLock;

use super::{reflect, FeatVec, Image, ImageError};

pub const SIFT_DIM: usize = 128;
pub const HOG_DIM: usize = 64;
pub const LBP_DIM: usize = 59;
pub const MIN_DESCRIPTOR_SIDE: usize = 8;

const ORIENTATION_BINS: usize = 8;
const CLIP: f64 = 0.2;

/// Neighbour offsets `(dr, dc)` clockwise from the top-left; neighbour `i`
/// sets bit `i` of the code.
pub(crate) const LBP_OFFSETS: [(isize, isize); 8] = [
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
    (1, 0),
    (1, -1),
    (0, -1),
];

fn check_size(img: &Image) -> Result<(), ImageError> {
    if img.height() < MIN_DESCRIPTOR_SIDE || img.width() < MIN_DESCRIPTOR_SIDE {
        return Err(ImageError::TooSmall {
            min: MIN_DESCRIPTOR_SIDE,
            height: img.height(),
            width: img.width(),
        });
    }
    Ok(())
}

/// Half-difference gradients with reflect padding, row-major.
pub(crate) fn central_gradients(img: &Image) -> (Vec<f64>, Vec<f64>) {
    let (h, w) = (img.height(), img.width());
    let px = img.pixels();
    let mut gx = Vec::with_capacity(h * w);
    let mut gy = Vec::with_capacity(h * w);
    let left: Vec<usize> = (0..w).map(|c| reflect(c as isize - 1, w)).collect();
    let right: Vec<usize> = (0..w).map(|c| reflect(c as isize + 1, w)).collect();
    for r in 0..h {
        let row = &px[r * w..(r + 1) * w];
        let up = &px[reflect(r as isize - 1, h) * w..][..w];
        let down = &px[reflect(r as isize + 1, h) * w..][..w];
        for c in 0..w {
            gx.push((row[right[c]] - row[left[c]]) / 2.0);
            gy.push((down[c] - up[c]) / 2.0);
        }
    }
    (gx, gy)
}

pub(crate) fn lbp_code_at(img: &Image, r: isize, c: isize) -> u8 {
    let center = img.get_reflect(r, c);
    LBP_OFFSETS
        .iter()
        .enumerate()
        .fold(0u8, |code, (bit, &(dr, dc))| {
            if img.get_reflect(r + dr, c + dc) >= center {
                code | (1 << bit)
            } else {
                code
            }
        })
}

/// Bin boundaries `k * pi / 8` for `k = 1..8` as `(cos, sin)` pairs.
fn bin_boundaries() -> &'static [(f64, f64); ORIENTATION_BINS - 1] {
    static B: OnceLock<[(f64, f64); ORIENTATION_BINS - 1]> = OnceLock::new();
    B.get_or_init(|| {
        std::array::from_fn(|k| {
            let a = (k + 1) as f64 * PI / ORIENTATION_BINS as f64;
            (a.cos(), a.sin())
        })
    })
}

/// Unsigned orientation bin: the gradient is folded into `[0, pi)` and
/// compared against each boundary with a cross product.
fn orientation_bin(gx: f64, gy: f64) -> usize {
    let (gx, gy) = if gy < 0.0 || (gy == 0.0 && gx < 0.0) {
        (-gx, -gy)
    } else {
        (gx, gy)
    };
    bin_boundaries()
        .iter()
        .take_while(|&&(c, s)| gy * c - gx * s >= 0.0)
        .count()
}

/// Votes gradient magnitudes into a `rows x cols` cell grid of orientation histograms.
fn cell_histograms(img: &Image, rows: usize, cols: usize) -> Vec<f64> {
    let (h, w) = (img.height(), img.width());
    let (gx, gy) = central_gradients(img);
    let mut hist = vec![0.0; rows * cols * ORIENTATION_BINS];
    for r in 0..h {
        let cell_r = r * rows / h;
        for c in 0..w {
            let i = r * w + c;
            let mag = (gx[i] * gx[i] + gy[i] * gy[i]).sqrt();
            if mag == 0.0 {
                continue;
            }
            let cell = cell_r * cols + c * cols / w;
            hist[cell * ORIENTATION_BINS + orientation_bin(gx[i], gy[i])] += mag;
        }
    }
    hist
}

/// L2-normalise, clip at 0.2, renormalise. The zero vector stays zero.
fn normalize_clip(v: &mut [f64]) {
    let l2 = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let n = l2(v);
    if n == 0.0 {
        return;
    }
    v.iter_mut().for_each(|x| *x = (*x / n).min(CLIP));
    let n = l2(v);
    v.iter_mut().for_each(|x| *x /= n);
}

pub fn sift_vec(img: &Image) -> Result<FeatVec, ImageError> {
    check_size(img)?;
    let mut hist = cell_histograms(img, 4, 4);
    normalize_clip(&mut hist);
    Ok(FeatVec::new(hist))
}

pub fn hog_vec(img: &Image) -> Result<FeatVec, ImageError> {
    check_size(img)?;
    let mut hist = cell_histograms(img, 2, 4);
    normalize_clip(&mut hist);
    Ok(FeatVec::new(hist))
}

fn circular_transitions(code: u8) -> u32 {
    (code ^ code.rotate_right(1)).count_ones()
}

/// Histogram bin of an 8-bit LBP code: uniform codes (at most two circular
/// bit transitions) take bins `0..58` in increasing code order, everything
/// else shares bin 58.
pub fn uniform_lbp_bin(code: u8) -> usize {
    static TABLE: OnceLock<[u8; 256]> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = [(LBP_DIM - 1) as u8; 256];
        let mut next = 0u8;
        for code in 0..=255u8 {
            if circular_transitions(code) <= 2 {
                t[code as usize] = next;
                next += 1;
            }
        }
        debug_assert_eq!(usize::from(next), LBP_DIM - 1);
        t
    });
    usize::from(table[usize::from(code)])
}

/// Uniform-LBP histogram over interior pixels, normalised to sum 1.
pub fn lbp_hist(img: &Image) -> Result<FeatVec, ImageError> {
    check_size(img)?;
    let mut hist = vec![0.0; LBP_DIM];
    let mut count = 0usize;
    let w = img.width() as isize;
    let px = img.pixels();
    let offsets: [isize; 8] = LBP_OFFSETS.map(|(dr, dc)| dr * w + dc);
    for r in 1..img.height() - 1 {
        for c in 1..img.width() - 1 {
            let i = (r * img.width() + c) as isize;
            let center = px[i as usize];
            let code = offsets.iter().enumerate().fold(0u8, |code, (bit, &o)| {
                code | (u8::from(px[(i + o) as usize] >= center) << bit)
            });
            hist[uniform_lbp_bin(code)] += 1.0;
            count += 1;
        }
    }
    let total = count as f64;
    hist.iter_mut().for_each(|v| *v /= total);
    Ok(FeatVec::new(hist))
}
