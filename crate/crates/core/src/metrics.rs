//! Reconstruction quality measures.

use crate::error::{check_len, Error, Result};
use crate::image::BinaryImage;
use crate::linalg::norm2;
use crate::operator::SparseOperator;

/// Residual norm `‖Ax − y‖` (not divided by the number of rays).
pub fn rms(a: &SparseOperator, x: &[f64], y: &[f64]) -> Result<f64> {
    check_len(a.rows(), y.len())?;
    let ax = a.apply_forward(x)?;
    Ok(norm2(&ax.iter().zip(y).map(|(p, q)| p - q).collect::<Vec<_>>()))
}

/// Pixel agreement between a reconstruction and the ground truth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelAgreement {
    /// `1 − (missing + over)/N`.
    pub ji: f64,
    /// Pixels reconstructed at the lower level where the truth is upper.
    pub missing: usize,
    /// Pixels reconstructed at the upper level where the truth is lower.
    pub over: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsReport {
    pub rms: f64,
    pub ji: f64,
    pub missing: usize,
    pub over: usize,
}

/// The accuracy index `1 − Σ(αᵢ + βᵢ)/N`.
pub fn jaccard(x_star: &BinaryImage, x_true: &BinaryImage) -> Result<PixelAgreement> {
    check_len(x_true.len(), x_star.len())?;
    if x_star.levels() != x_true.levels() {
        return Err(Error::InvalidArgument(format!(
            "images use different grey levels {} and {}",
            x_star.levels(),
            x_true.levels()
        )));
    }
    let (mut missing, mut over) = (0, 0);
    for (&got, &want) in x_star.flags().iter().zip(x_true.flags()) {
        match (got, want) {
            (false, true) => missing += 1,
            (true, false) => over += 1,
            _ => {}
        }
    }
    let n = x_true.len().max(1) as f64;
    Ok(PixelAgreement { ji: 1.0 - (missing + over) as f64 / n, missing, over })
}

/// Residual and pixel agreement of a binary reconstruction.
pub fn evaluate(a: &SparseOperator, x_star: &BinaryImage, x_true: &BinaryImage, y: &[f64]) -> Result<MetricsReport> {
    let agreement = jaccard(x_star, x_true)?;
    Ok(MetricsReport {
        rms: rms(a, &x_star.values(), y)?,
        ji: agreement.ji,
        missing: agreement.missing,
        over: agreement.over,
    })
}
