//! Per-ray weights for transmission data with Poisson counts.

use crate::error::{Error, Result};

/// Largest exponent `c·yᵢ` allowed in the Beer–Lambert attenuation.
pub const MAX_ATTENUATION: f64 = 10.0;

/// Scale `c = 1 / max(y)` that maps the largest ray sum to unit optical
/// depth; `1` when no ray sum is positive.
pub fn attenuation_scale(y: &[f64]) -> f64 {
    let ymax = y.iter().fold(0.0_f64, |m, v| m.max(*v));
    if ymax > 0.0 {
        1.0 / ymax
    } else {
        1.0
    }
}

/// `Λᵢ = I0·exp(−min(c·yᵢ, 10))` with `c` from [`attenuation_scale`]: the
/// expected photon count of each ray.
pub fn build_poisson_weights(y: &[f64], i0: f64) -> Result<Vec<f64>> {
    poisson_weights_with_scale(y, i0, attenuation_scale(y))
}

/// As [`build_poisson_weights`] with a given attenuation scale.
pub fn poisson_weights_with_scale(y: &[f64], i0: f64, scale: f64) -> Result<Vec<f64>> {
    if !(i0 > 0.0 && i0.is_finite()) {
        return Err(Error::InvalidArgument(format!("incident count must be positive, got {i0}")));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidArgument(format!("attenuation scale must be positive, got {scale}")));
    }
    Ok(y.iter().map(|&v| i0 * (-(scale * v).min(MAX_ATTENUATION)).exp()).collect())
}
