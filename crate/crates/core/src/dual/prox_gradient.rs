//! Iterative shrinkage on `½‖ν − Aᵀy‖²_{(AᵀA)⁻¹} + ‖ν‖₁` for square invertible `A`.

use nalgebra::{DMatrix, DVector};

use crate::error::{check_len, Error, Result};
use crate::operator::SparseOperator;

use super::objective::{duality_gap, kkt_from_parts};
use super::prox::soft_threshold;
use super::{DualSolution, GreyLevels, SolverConfig};

/// Reciprocal condition number below which `A` is treated as singular.
const MIN_RCOND: f64 = 1e-12;

/// Runs `ν ← S_{1/L}(ν − L⁻¹(AᵀA)⁻¹(ν − Aᵀy))` from `ν = 0` with
/// `L = ‖(AᵀA)⁻¹‖`, for the levels `−1, +1`.
pub fn prox_gradient_invertible(a: &SparseOperator, y: &[f64], cfg: &SolverConfig) -> Result<DualSolution> {
    cfg.validate()?;
    if a.rows() != a.cols() {
        return Err(Error::InvalidOperator(format!("expected a square operator, got {}×{}", a.rows(), a.cols())));
    }
    check_len(a.rows(), y.len())?;
    let n = a.cols();
    let dense = a.to_dense();
    let svd = dense.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if n == 0 || !(smin > MIN_RCOND * smax) {
        return Err(Error::Singular);
    }
    let (u, vt) = (svd.u.as_ref().ok_or(Error::Singular)?, svd.v_t.as_ref().ok_or(Error::Singular)?);
    // (AᵀA)⁻¹ = V Σ⁻² Vᵀ
    let inv_sq = DMatrix::from_diagonal(&svd.singular_values.map(|s| 1.0 / (s * s)));
    let gram_inv = vt.transpose() * inv_sq * vt;
    let lip = 1.0 / (smin * smin);

    let yv = DVector::from_column_slice(y);
    let aty = dense.tr_mul(&yv);
    let mut nu = DVector::zeros(n);
    let mut iterations = 0;
    let mut converged = false;
    let certificate = |nu: &DVector<f64>| {
        // μ = A⁻ᵀν = U Σ⁻¹ Vᵀ ν and x = (AᵀA)⁻¹(Aᵀy − ν)
        let mu = u * DMatrix::from_diagonal(&svd.singular_values.map(|s| 1.0 / s)) * (vt * nu);
        let x = &gram_inv * (&aty - nu);
        (mu.as_slice().to_vec(), x.as_slice().to_vec())
    };
    while iterations < cfg.max_iters {
        iterations += 1;
        let step = &nu - (&gram_inv * (&nu - &aty)) / lip;
        nu = step.map(|t| soft_threshold(t, 1.0 / lip));
        let (mu, x) = certificate(&nu);
        if kkt_from_parts(a, y, &mu, nu.as_slice(), &x, GreyLevels::SYMMETRIC) <= cfg.tol_kkt {
            converged = true;
            break;
        }
    }

    let (mu, x) = certificate(&nu);
    let nu = nu.as_slice().to_vec();
    let kkt = kkt_from_parts(a, y, &mu, &nu, &x, GreyLevels::SYMMETRIC);
    let (g1, g2, gap) = duality_gap(a, y, &mu, &nu, &x, GreyLevels::SYMMETRIC);
    Ok(DualSolution { mu, nu, x, objective_value: g1 + g2, g1, g2, kkt_residual: kkt, gap, iterations, converged })
}
