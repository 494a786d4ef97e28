//! Parameter ranges for the filter and pooling terminals.

use std::f64::consts::PI;

use super::ImageError;

/// Gaussian standard deviation sampled for `Gau` and `GauD`.
pub const SIGMA_MIN: f64 = 1.0;
pub const SIGMA_MAX: f64 = 3.0;
/// Highest Gaussian derivative order.
pub const MAX_DERIVATIVE_ORDER: u8 = 2;
/// Gabor orientations are `index * pi / 8`, index in `0..8`.
pub const THETA_STEPS: u8 = 8;
/// Gabor frequency index `v` in `0..=4`.
pub const MAX_FREQ_INDEX: u8 = 4;
/// `MaxP` kernel sides.
pub const POOL_SIZES: [u8; 2] = [2, 4];
/// Sigmas of the two fixed Laplacian-of-Gaussian primitives.
pub const LOG1_SIGMA: f64 = 1.0;
pub const LOG2_SIGMA: f64 = 2.0;

pub fn theta_from_index(index: u8) -> f64 {
    f64::from(index) * PI / f64::from(THETA_STEPS)
}

/// `f = (pi / 2) / sqrt(2)^v`.
pub fn gabor_frequency(v: u8) -> f64 {
    (PI / 2.0) / 2f64.sqrt().powi(i32::from(v))
}

pub fn check_sigma(sigma: f64) -> Result<(), ImageError> {
    if sigma.is_finite() && sigma > 0.0 {
        Ok(())
    } else {
        Err(ImageError::Param(format!("sigma must be positive, got {sigma}")))
    }
}

pub fn check_order(order: u8) -> Result<(), ImageError> {
    if order <= MAX_DERIVATIVE_ORDER {
        Ok(())
    } else {
        Err(ImageError::Param(format!(
            "derivative order must be in 0..=2, got {order}"
        )))
    }
}

pub fn check_theta_index(index: u8) -> Result<(), ImageError> {
    if index < THETA_STEPS {
        Ok(())
    } else {
        Err(ImageError::Param(format!(
            "orientation index must be in 0..8, got {index}"
        )))
    }
}

pub fn check_freq_index(v: u8) -> Result<(), ImageError> {
    if v <= MAX_FREQ_INDEX {
        Ok(())
    } else {
        Err(ImageError::Param(format!(
            "frequency index must be in 0..=4, got {v}"
        )))
    }
}

pub fn check_weight(w: f64) -> Result<(), ImageError> {
    if (0.0..1.0).contains(&w) {
        Ok(())
    } else {
        Err(ImageError::Param(format!("weight must be in [0, 1), got {w}")))
    }
}

pub fn check_pool_size(k: u8) -> Result<(), ImageError> {
    if POOL_SIZES.contains(&k) {
        Ok(())
    } else {
        Err(ImageError::Param(format!("pool size must be 2 or 4, got {k}")))
    }
}
