//! Primal images from dual multipliers.

use crate::error::{Error, Result};
use crate::image::{BinaryImage, Completion, Ternary, TernaryImage};

use super::GreyLevels;

#[derive(Debug, Clone, PartialEq)]
pub struct Recovered {
    pub ternary: TernaryImage,
    /// The ternary image with undetermined pixels set to the lower level.
    pub completed: BinaryImage,
}

/// Maps `νᵢ > t` to the upper level, `νᵢ < −t` to the lower level and the
/// rest to [`Ternary::Undetermined`]. `ν` must hold a square image.
pub fn recover_primal(nu: &[f64], levels: GreyLevels, zero_threshold: f64) -> Result<Recovered> {
    if !(zero_threshold >= 0.0) {
        return Err(Error::InvalidArgument("zero threshold must be nonnegative".into()));
    }
    let n = (nu.len() as f64).sqrt().round() as usize;
    if n * n != nu.len() {
        return Err(Error::InvalidArgument(format!("{} values do not form a square image", nu.len())));
    }
    let pixels = nu
        .iter()
        .map(|&v| {
            if v > zero_threshold {
                Ternary::Upper
            } else if v < -zero_threshold {
                Ternary::Lower
            } else {
                Ternary::Undetermined
            }
        })
        .collect();
    let ternary = TernaryImage::new(n, levels, pixels)?;
    let completed = ternary.complete(Completion::Lower);
    Ok(Recovered { ternary, completed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds_signs() {
        let r = recover_primal(&[0.3, -0.2, 1e-12, -5.0], GreyLevels::SYMMETRIC, 1e-9).unwrap();
        assert_eq!(r.ternary.pixels(), &[Ternary::Upper, Ternary::Lower, Ternary::Undetermined, Ternary::Lower]);
        assert_eq!(r.completed.values(), vec![1.0, -1.0, -1.0, -1.0]);
    }

    #[test]
    fn heaviside_levels() {
        let r = recover_primal(&[0.3, -0.2, 0.0, 0.0], GreyLevels::UNIT, 1e-9).unwrap();
        assert_eq!(&r.completed.values()[..2], &[1.0, 0.0]);
    }

    #[test]
    fn rejects_non_square() {
        assert!(recover_primal(&[0.0; 3], GreyLevels::UNIT, 0.0).is_err());
    }
}
