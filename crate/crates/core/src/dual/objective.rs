//! Dual objective, its smoothed surrogate and optimality measures.

use crate::error::{check_len, Result};
use crate::linalg::{dot, norm_inf};
use crate::operator::SparseOperator;

use super::problem::root_weights;
use super::prox::asym_penalty;
use super::GreyLevels;

/// `ν = AᵀΛ^{1/2}μ` and `Λ^{1/2}y`, without forming the weighted operator.
/// Weights are normalized as in [`super::problem::root_weights`].
fn weighted_parts(a: &SparseOperator, y: &[f64], mu: &[f64], weights: Option<&[f64]>) -> Result<(Vec<f64>, Vec<f64>)> {
    check_len(a.rows(), y.len())?;
    check_len(a.rows(), mu.len())?;
    match weights {
        None => Ok((a.adjoint(mu), y.to_vec())),
        Some(w) => {
            check_len(a.rows(), w.len())?;
            let root = root_weights(w)?;
            let scaled_mu: Vec<f64> = mu.iter().zip(&root).map(|(m, r)| m * r).collect();
            let scaled_y = y.iter().zip(&root).map(|(v, r)| v * r).collect();
            Ok((a.adjoint(&scaled_mu), scaled_y))
        }
    }
}

fn half_sq_dist(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>()
}

/// `½‖μ − Λ^{1/2}y‖² + p(AᵀΛ^{1/2}μ)`.
pub fn eval_dual_objective(a: &SparseOperator, y: &[f64], mu: &[f64], levels: GreyLevels, weights: Option<&[f64]>) -> Result<f64> {
    let (nu, wy) = weighted_parts(a, y, mu, weights)?;
    let (lo, hi) = levels.slopes();
    Ok(half_sq_dist(mu, &wy) + asym_penalty(&nu, lo, hi))
}

/// Smooth stand-in for the asymmetric penalty with matching asymptotic
/// slopes: `((b − a)/2)·ν + ((a + b)/2)·√(ν² + ε)`.
fn smoothed_penalty(nu: &[f64], lo: f64, hi: f64, eps: f64) -> f64 {
    let (odd, even) = (0.5 * (hi - lo), 0.5 * (hi + lo));
    nu.iter().map(|&v| odd * v + even * (v * v + eps).sqrt()).sum()
}

/// Derivative of the smoothed penalty, which always lies inside the box
/// `(−a, b)`.
pub(crate) fn smoothed_slope(nu: &[f64], lo: f64, hi: f64, eps: f64) -> Vec<f64> {
    let (odd, even) = (0.5 * (hi - lo), 0.5 * (hi + lo));
    nu.iter().map(|&v| odd + even * v / (v * v + eps).sqrt()).collect()
}

pub fn eval_smoothed_objective(
    a: &SparseOperator,
    y: &[f64],
    mu: &[f64],
    epsilon: f64,
    levels: GreyLevels,
    weights: Option<&[f64]>,
) -> Result<f64> {
    let (nu, wy) = weighted_parts(a, y, mu, weights)?;
    let (lo, hi) = levels.slopes();
    Ok(half_sq_dist(mu, &wy) + smoothed_penalty(&nu, lo, hi, epsilon))
}

/// Gradient `(μ − Λ^{1/2}y) + Λ^{1/2}A s` of the smoothed objective.
pub fn grad_smoothed_objective(
    a: &SparseOperator,
    y: &[f64],
    mu: &[f64],
    epsilon: f64,
    levels: GreyLevels,
    weights: Option<&[f64]>,
) -> Result<Vec<f64>> {
    let (nu, wy) = weighted_parts(a, y, mu, weights)?;
    let (lo, hi) = levels.slopes();
    let s = smoothed_slope(&nu, lo, hi, epsilon);
    let mut grad = a.forward(&s);
    if let Some(w) = weights {
        for (g, r) in grad.iter_mut().zip(root_weights(w)?) {
            *g *= r;
        }
    }
    for ((g, m), v) in grad.iter_mut().zip(mu).zip(&wy) {
        *g += m - v;
    }
    Ok(grad)
}

/// KKT residual of a pair `(μ, x)` for `min ½‖μ − b‖² + p(Kᵀμ)`.
///
/// The largest of the stationarity error `‖μ − b + Kx‖∞`, the box violation
/// of `x`, and the complementarity error `maxᵢ pᵢ(νᵢ) − xᵢνᵢ` with `ν = Kᵀμ`.
pub fn kkt_residual(k: &SparseOperator, b: &[f64], mu: &[f64], x: &[f64], levels: GreyLevels) -> Result<f64> {
    check_len(k.rows(), b.len())?;
    check_len(k.rows(), mu.len())?;
    check_len(k.cols(), x.len())?;
    let nu = k.adjoint(mu);
    Ok(kkt_from_parts(k, b, mu, &nu, x, levels))
}

pub(crate) fn kkt_from_parts(k: &SparseOperator, b: &[f64], mu: &[f64], nu: &[f64], x: &[f64], levels: GreyLevels) -> f64 {
    let (lo, hi) = levels.slopes();
    let kx = k.forward(x);
    let stationarity = mu.iter().zip(b).zip(&kx).fold(0.0_f64, |m, ((u, v), w)| m.max((u - v + w).abs()));
    let mut worst = stationarity;
    for (&v, &xi) in nu.iter().zip(x) {
        let box_violation = (xi - hi).max(-lo - xi).max(0.0);
        let pen = if v > 0.0 { hi * v } else { -lo * v };
        worst = worst.max(box_violation).max(pen - xi * v);
    }
    worst
}

/// `D(μ) − (½‖b‖² − ½‖Kx̃ − b‖²)` with `x̃` the box projection of `x`; a
/// nonnegative bound on the suboptimality of `μ`.
pub(crate) fn duality_gap(k: &SparseOperator, b: &[f64], mu: &[f64], nu: &[f64], x: &[f64], levels: GreyLevels) -> (f64, f64, f64) {
    let (lo, hi) = levels.slopes();
    let g1 = half_sq_dist(mu, b);
    let g2 = asym_penalty(nu, lo, hi);
    let clamped: Vec<f64> = x.iter().map(|v| v.clamp(-lo, hi)).collect();
    let kx = k.forward(&clamped);
    let lower = 0.5 * dot(b, b) - half_sq_dist(&kx, b);
    (g1, g2, (g1 + g2 - lower).max(0.0))
}

pub(crate) fn inf_norm(v: &[f64]) -> f64 {
    norm_inf(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn one() -> SparseOperator {
        SparseOperator::from_dense(1, 1, &[1.0]).unwrap()
    }

    #[test]
    fn objective_examples() {
        let a = one();
        assert_eq!(eval_dual_objective(&a, &[1.5], &[0.0], GreyLevels::SYMMETRIC, None).unwrap(), 1.125);
        assert_eq!(eval_dual_objective(&a, &[1.5], &[0.5], GreyLevels::SYMMETRIC, None).unwrap(), 1.0);
    }

    #[test]
    fn unit_weights_match_unweighted() {
        let a = SparseOperator::from_dense(2, 2, &[1.0, 2.0, 0.5, 1.0]).unwrap();
        let (y, mu) = ([0.4, -1.0], [0.3, 0.7]);
        let plain = eval_dual_objective(&a, &y, &mu, GreyLevels::UNIT, None).unwrap();
        let unit = eval_dual_objective(&a, &y, &mu, GreyLevels::UNIT, Some(&[1.0, 1.0])).unwrap();
        assert_eq!(plain, unit);
    }

    #[test]
    fn unit_levels_penalize_only_positive_part() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let nu: Vec<f64> = (0..20).map(|_| rng.random_range(-2.0..2.0)).collect();
        let (lo, hi) = GreyLevels::UNIT.slopes();
        let expected: f64 = nu.iter().map(|v| v.max(0.0)).sum();
        assert!((asym_penalty(&nu, lo, hi) - expected).abs() < 1e-12);
    }

    #[test]
    fn smoothed_gradient_is_zero_at_origin() {
        let a = SparseOperator::from_dense(2, 3, &[1.0, 1.0, 0.0, 0.0, 1.0, 1.0]).unwrap();
        let g = grad_smoothed_objective(&a, &[0.0, 0.0], &[0.0, 0.0], 0.1, GreyLevels::SYMMETRIC, None).unwrap();
        assert_eq!(g, vec![0.0, 0.0]);
    }

    #[test]
    fn kkt_zero_at_one_dimensional_optimum() {
        let a = one();
        let r = kkt_residual(&a, &[1.5], &[0.5], &[1.0], GreyLevels::SYMMETRIC).unwrap();
        assert_eq!(r, 0.0);
        let off = kkt_residual(&a, &[1.5], &[0.4], &[1.0], GreyLevels::SYMMETRIC).unwrap();
        assert!((off - 0.1).abs() < 1e-12);
    }
}
