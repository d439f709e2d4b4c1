//! Reduction of a dual instance to the simple form `½‖μ − b‖² + p(Kᵀμ)`.

use crate::error::{check_len, Error, Result};
use crate::operator::SparseOperator;
use crate::range::RangeProjector;

use super::{GreyLevels, SolverConfig};

/// An instance after weighting and range projection.
#[derive(Debug, Clone)]
pub struct DualProblem {
    /// Effective operator `Λ^{1/2}A`.
    pub k: SparseOperator,
    /// Effective data.
    pub b: Vec<f64>,
    pub levels: GreyLevels,
    /// Whether `K` lacked full row rank, so `b` was projected onto its range.
    pub rank_deficient: bool,
}

impl DualProblem {
    pub fn new(a: &SparseOperator, y: &[f64], levels: GreyLevels, weights: Option<&[f64]>, cfg: &SolverConfig) -> Result<Self> {
        cfg.validate()?;
        check_len(a.rows(), y.len())?;
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("data must be finite".into()));
        }
        let (k, b) = weighted(a, y, weights)?;
        let projector = RangeProjector::new(&k, cfg.range);
        let rank_deficient = !projector.has_full_row_rank(cfg.rank_threshold)?;
        let b = prepare_data(b, rank_deficient.then_some(&projector))?;
        Ok(Self { k, b, levels, rank_deficient })
    }
}

/// Projects the data onto the range of `K` when a projector is given.
pub(crate) fn prepare_data(b: Vec<f64>, projector: Option<&RangeProjector>) -> Result<Vec<f64>> {
    match projector {
        Some(p) => p.project(&b),
        None => Ok(b),
    }
}

/// `Λ^{1/2}` for `Λ = W / max W`. Only weight ratios matter for the primal
/// problem; the rescaling keeps photon counts of any magnitude at the scale
/// of unweighted data.
pub(crate) fn root_weights(w: &[f64]) -> Result<Vec<f64>> {
    if let Some(bad) = w.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidArgument(format!("weights must be positive, got {bad}")));
    }
    let top = w.iter().fold(0.0_f64, |m, v| m.max(*v));
    Ok(w.iter().map(|v| (v / top).sqrt()).collect())
}

/// `(Λ^{1/2}A, Λ^{1/2}y)`, or clones when unweighted.
pub(crate) fn weighted(a: &SparseOperator, y: &[f64], weights: Option<&[f64]>) -> Result<(SparseOperator, Vec<f64>)> {
    match weights {
        None => Ok((a.clone(), y.to_vec())),
        Some(w) => {
            check_len(a.rows(), w.len())?;
            let root = root_weights(w)?;
            let k = a.scale_rows(&root)?;
            let b = y.iter().zip(&root).map(|(v, r)| v * r).collect();
            Ok((k, b))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deficient_data_is_projected() {
        // two identical rays: only the mean of the data is in the range
        let a = SparseOperator::from_dense(2, 1, &[1.0, 1.0]).unwrap();
        let p = DualProblem::new(&a, &[1.0, 3.0], GreyLevels::SYMMETRIC, None, &SolverConfig::default()).unwrap();
        assert!(p.rank_deficient);
        assert!((p.b[0] - 2.0).abs() < 1e-12 && (p.b[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn unit_weights_change_nothing() {
        let a = SparseOperator::from_dense(2, 3, &[1.0, 0.5, 0.0, 0.0, 1.0, 2.0]).unwrap();
        let y = [0.3, -1.7];
        let cfg = SolverConfig::default();
        let plain = DualProblem::new(&a, &y, GreyLevels::SYMMETRIC, None, &cfg).unwrap();
        let unit = DualProblem::new(&a, &y, GreyLevels::SYMMETRIC, Some(&[1.0, 1.0]), &cfg).unwrap();
        assert_eq!(plain.k, unit.k);
        assert_eq!(plain.b, unit.b);
        assert!(!plain.rank_deficient);
        let scaled = DualProblem::new(&a, &y, GreyLevels::SYMMETRIC, Some(&[1e6, 1e6]), &cfg).unwrap();
        assert_eq!(plain.b, scaled.b);
    }
}
