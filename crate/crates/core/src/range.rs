//! Orthogonal projection onto the range of `A`, i.e. application of `A A†`.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_len, Error, Result};
use crate::linalg::{norm2, sub};
use crate::lsqr::{lsqr, LsqrOptions};
use crate::operator::SparseOperator;

/// Operators with at most this many dense entries use a thin SVD.
pub const DEFAULT_DENSE_THRESHOLD: usize = 1_000_000;

/// Relative singular value cutoff for the numerical rank.
const RANK_RTOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeOptions {
    pub dense_threshold: usize,
    pub lsqr_tol: f64,
    pub lsqr_max_iters: usize,
}

impl Default for RangeOptions {
    fn default() -> Self {
        Self { dense_threshold: DEFAULT_DENSE_THRESHOLD, lsqr_tol: 1e-13, lsqr_max_iters: 20_000 }
    }
}

/// Reusable `A A†` applicator. The dense variant caches an orthonormal
/// basis of the range.
#[derive(Debug, Clone)]
pub struct RangeProjector<'a> {
    op: &'a SparseOperator,
    basis: Option<DMatrix<f64>>,
    opts: RangeOptions,
}

impl<'a> RangeProjector<'a> {
    pub fn new(op: &'a SparseOperator, opts: RangeOptions) -> Self {
        let basis = (op.rows() * op.cols() <= opts.dense_threshold).then(|| range_basis(op));
        Self { op, basis, opts }
    }

    pub fn is_dense(&self) -> bool {
        self.basis.is_some()
    }

    /// Numerical rank, available for the dense variant.
    pub fn rank(&self) -> Option<usize> {
        self.basis.as_ref().map(|b| b.ncols())
    }

    pub fn project(&self, r: &[f64]) -> Result<Vec<f64>> {
        check_len(self.op.rows(), r.len())?;
        match &self.basis {
            Some(u) => {
                let rv = DVector::from_column_slice(r);
                let coeffs = u.tr_mul(&rv);
                Ok((u * coeffs).as_slice().to_vec())
            }
            None => {
                let res = lsqr(self.op, r, LsqrOptions { max_iters: self.opts.lsqr_max_iters, tol: self.opts.lsqr_tol });
                if !res.converged && res.relative_normal_residual > 1e3 * self.opts.lsqr_tol {
                    return Err(Error::NotConverged { what: "range projection", iterations: res.iterations });
                }
                Ok(self.op.forward(&res.x))
            }
        }
    }

    /// Probes whether `A` has full row rank by projecting seeded random
    /// vectors: any loss of more than `threshold` relative norm means part of
    /// the data space lies outside the range.
    pub fn has_full_row_rank(&self, threshold: f64) -> Result<bool> {
        if self.op.rows() > self.op.cols() {
            return Ok(false);
        }
        if let Some(rank) = self.rank() {
            return Ok(rank == self.op.rows());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..2 {
            let r: Vec<f64> = (0..self.op.rows()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let p = self.project(&r)?;
            if norm2(&sub(&p, &r)) > threshold * norm2(&r) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// `A A† r` with default options.
pub fn project_onto_range(a: &SparseOperator, r: &[f64]) -> Result<Vec<f64>> {
    RangeProjector::new(a, RangeOptions::default()).project(r)
}

fn range_basis(op: &SparseOperator) -> DMatrix<f64> {
    let svd = op.to_dense().svd(true, false);
    let u = svd.u.expect("left singular vectors were requested");
    let s_max = svd.singular_values.iter().fold(0.0_f64, |m, v| m.max(*v));
    let cutoff = RANK_RTOL * s_max.max(f64::MIN_POSITIVE);
    let keep: Vec<usize> = (0..svd.singular_values.len()).filter(|&k| svd.singular_values[k] > cutoff).collect();
    DMatrix::from_fn(op.rows(), keep.len(), |i, k| u[(i, keep[k])])
}
