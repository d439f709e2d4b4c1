//! Choice of the TV weight by the discrepancy principle.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::operator::SparseOperator;

use super::tv::{solve_tv, TvConfig, TvResult};

/// Residuals up to this multiple of the noise norm are accepted.
pub const DISCREPANCY_FACTOR: f64 = 1.05;

#[derive(Debug, Clone)]
pub struct LambdaSelection {
    pub lambda: f64,
    pub result: TvResult,
    /// `(λ, ‖Ax_λ − y‖)` over the whole grid, in grid order.
    pub residuals: Vec<(f64, f64)>,
    /// False when no grid value met the discrepancy bound.
    pub satisfied: bool,
}

/// Largest `λ` on the grid whose residual stays within
/// `DISCREPANCY_FACTOR · noise_level`, or the smallest `λ` when none does.
pub fn select_lambda_discrepancy(
    a: &SparseOperator,
    y: &[f64],
    noise_level: f64,
    grid: &[f64],
    cfg: &TvConfig,
) -> Result<LambdaSelection> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("lambda grid is empty".into()));
    }
    if !(noise_level >= 0.0 && noise_level.is_finite()) {
        return Err(Error::InvalidArgument(format!("noise level must be nonnegative, got {noise_level}")));
    }
    let runs: Vec<(f64, TvResult, f64)> = grid
        .par_iter()
        .map(|&lambda| {
            let result = solve_tv(a, y, &TvConfig { lambda, ..*cfg })?;
            let ax = a.forward(&result.x);
            let res = ax.iter().zip(y).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt();
            Ok((lambda, result, res))
        })
        .collect::<Result<_>>()?;
    let residuals = runs.iter().map(|(l, _, r)| (*l, *r)).collect();
    let bound = DISCREPANCY_FACTOR * noise_level;
    let accepted = runs
        .iter()
        .enumerate()
        .filter(|(_, (_, _, r))| *r <= bound)
        .max_by(|(_, (l1, _, _)), (_, (l2, _, _))| l1.total_cmp(l2))
        .map(|(i, _)| i);
    let (index, satisfied) = match accepted {
        Some(i) => (i, true),
        None => {
            let i = runs.iter().enumerate().min_by(|(_, p), (_, q)| p.0.total_cmp(&q.0)).map(|(i, _)| i).unwrap();
            (i, false)
        }
    };
    let (lambda, result, _) = runs.into_iter().nth(index).unwrap();
    Ok(LambdaSelection { lambda, result, residuals, satisfied })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residual_bound_picks_largest_admissible() {
        let a = SparseOperator::from_dense(4, 4, &[
            1.0, 0.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 1.0, 0.0, //
            0.0, 0.0, 0.0, 1.0,
        ])
        .unwrap();
        let y = [0.0, 1.0, 0.0, 1.0];
        let grid = [1e-3, 1e-2, 1e-1, 1.0, 10.0];
        let cfg = TvConfig { nonneg: false, tol_gap: 1e-9, max_iters: 50_000, ..Default::default() };
        let sel = select_lambda_discrepancy(&a, &y, 0.2, &grid, &cfg).unwrap();
        assert!(sel.satisfied);
        for &(l, r) in &sel.residuals {
            if l > sel.lambda {
                assert!(r > DISCREPANCY_FACTOR * 0.2);
            }
        }
        let none = select_lambda_discrepancy(&a, &y, 0.0, &[10.0, 1.0], &cfg).unwrap();
        assert!(!none.satisfied);
        assert_eq!(none.lambda, 1.0);
    }
}
