//! Image-to-image filters and image-to-vector descriptors used as GP primitives.
//!
//! Everything here is a pure function of its inputs. Borders are handled by
//! reflect padding (`d c b | a b c d | c b a`), which keeps the exact
//! constant-image behaviour of unit-sum and zero-sum kernels.

mod conv;
mod descriptors;
mod filters;
pub mod params;

pub use conv::{convolve2d, convolve_separable, Kernel};
pub use descriptors::{
    hog_vec, lbp_hist, sift_vec, uniform_lbp_bin, HOG_DIM, LBP_DIM, MIN_DESCRIPTOR_SIDE, SIFT_DIM,
};
pub use filters::{
    elementwise, gabor, gabor_kernel, gaussian_derivative, gaussian_derivative_taps,
    gaussian_filter, gaussian_taps, grad_magnitude_map, laplacian, lbp_code_map, log_filter,
    log_kernel, max_pool, pool_max, rank_mean_filter, sobel, weighted_combine, CombineSign,
    PointwiseKind, RankKind, SobelMode,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ImageError {
    #[error("image dimensions must be positive, got {height}x{width}")]
    EmptyImage { height: usize, width: usize },
    #[error("pixel buffer has {got} values, expected {expected}")]
    BufferSize { expected: usize, got: usize },
    #[error("kernel dimensions must be odd, got {height}x{width}")]
    EvenKernel { height: usize, width: usize },
    #[error("kernel {kh}x{kw} exceeds twice the image extent {height}x{width}")]
    KernelTooLarge {
        kh: usize,
        kw: usize,
        height: usize,
        width: usize,
    },
    #[error("descriptor needs at least {min}x{min} pixels, got {height}x{width}")]
    TooSmall {
        min: usize,
        height: usize,
        width: usize,
    },
    #[error("invalid filter parameter: {0}")]
    Param(String),
}

/// Grayscale image stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Image {
    height: usize,
    width: usize,
    pixels: Vec<f64>,
}

impl Image {
    pub fn new(height: usize, width: usize, pixels: Vec<f64>) -> Result<Self, ImageError> {
        if height == 0 || width == 0 {
            return Err(ImageError::EmptyImage { height, width });
        }
        if pixels.len() != height * width {
            return Err(ImageError::BufferSize {
                expected: height * width,
                got: pixels.len(),
            });
        }
        Ok(Self {
            height,
            width,
            pixels,
        })
    }

    /// Builds an image by evaluating `f(row, col)` for every pixel.
    pub fn from_fn(height: usize, width: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(height > 0 && width > 0, "image dimensions must be positive");
        let mut pixels = Vec::with_capacity(height * width);
        for r in 0..height {
            for c in 0..width {
                pixels.push(f(r, c));
            }
        }
        Self {
            height,
            width,
            pixels,
        }
    }

    pub fn filled(height: usize, width: usize, value: f64) -> Self {
        Self::from_fn(height, width, |_, _| value)
    }

    pub fn zeros(height: usize, width: usize) -> Self {
        Self::filled(height, width, 0.0)
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<f64> {
        self.pixels
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.pixels[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.pixels[row * self.width + col] = value;
    }

    /// Pixel lookup with reflect padding for out-of-range coordinates.
    #[inline]
    pub fn get_reflect(&self, row: isize, col: isize) -> f64 {
        self.get(reflect(row, self.height), reflect(col, self.width))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Image {
        Image {
            height: self.height,
            width: self.width,
            pixels: self.pixels.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn transpose(&self) -> Image {
        Image::from_fn(self.width, self.height, |r, c| self.get(c, r))
    }

    pub fn is_finite(&self) -> bool {
        self.pixels.iter().all(|v| v.is_finite())
    }
}

/// Feature vector produced by a descriptor or a whole tree.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FeatVec(Vec<f64>);

impl FeatVec {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    pub fn extend(&mut self, other: &FeatVec) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn concat<'a>(parts: impl IntoIterator<Item = &'a FeatVec>) -> FeatVec {
        let mut out = FeatVec::default();
        for p in parts {
            out.extend(p);
        }
        out
    }
}

impl From<Vec<f64>> for FeatVec {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// Maps any integer coordinate onto `[0, n)` by mirror reflection about the
/// first and last samples (the edge sample itself is not repeated).
#[inline]
pub(crate) fn reflect(i: isize, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let n = n as isize;
    if (0..n).contains(&i) {
        return i as usize;
    }
    let period = 2 * (n - 1);
    let m = i.rem_euclid(period);
    if m >= n {
        (period - m) as usize
    } else {
        m as usize
    }
}
