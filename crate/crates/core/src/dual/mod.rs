//! The convex dual of binary tomography and its solvers.
//!
//! For grey levels `u0 < u1` the dual reads
//!
//! ```text
//! min_μ  ½‖μ − y‖² + p(Aᵀμ),   p(ν) = Σ |u0|·max(−νᵢ, 0) + |u1|·max(νᵢ, 0)
//! ```
//!
//! where `y` is replaced by its projection onto the range of `A` when `A`
//! lacks full row rank, and `A`, `y` by `Λ^{1/2}A`, `Λ^{1/2}y` for weighted
//! data, with `Λ` the weights divided by their maximum. `p` is the support function of the box `[−|u0|, |u1|]ᴺ`, so the
//! solvers also carry a box-constrained image `x` with `μ = y − Ax` at the
//! optimum. Pixels with `νᵢ > 0` sit at the upper level and pixels with
//! `νᵢ < 0` at the lower level.

mod central;
mod objective;
mod primal_dual;
mod problem;
mod prox;
mod prox_gradient;
mod recovery;
mod smoothed;
mod weights;

use std::fmt;
use std::io::Write;

use crate::error::{Error, Result};
use crate::range::RangeOptions;

pub use objective::{eval_dual_objective, eval_smoothed_objective, grad_smoothed_objective, kkt_residual};
pub use primal_dual::solve_dual_primal_dual;
pub use problem::DualProblem;
pub use prox::{asym_penalty, asym_soft_threshold, soft_threshold};
pub use prox_gradient::prox_gradient_invertible;
pub use recovery::{recover_primal, Recovered};
pub use smoothed::solve_dual_smoothed;
pub(crate) use primal_dual::solve_problem;
pub(crate) use problem::prepare_data;
pub use weights::{attenuation_scale, build_poisson_weights, poisson_weights_with_scale, MAX_ATTENUATION};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreyLevels {
    pub u0: f64,
    pub u1: f64,
}

impl GreyLevels {
    /// The levels `−1, +1`.
    pub const SYMMETRIC: GreyLevels = GreyLevels { u0: -1.0, u1: 1.0 };
    /// The levels `0, 1`.
    pub const UNIT: GreyLevels = GreyLevels { u0: 0.0, u1: 1.0 };

    pub fn new(u0: f64, u1: f64) -> Result<Self> {
        if !(u0.is_finite() && u1.is_finite() && u0 < u1) {
            return Err(Error::InvalidArgument(format!("grey levels must satisfy u0 < u1, got {u0}, {u1}")));
        }
        Ok(Self { u0, u1 })
    }

    /// Penalty slopes `(|u0|, |u1|)`; also the box `[−|u0|, |u1|]` of the
    /// relaxed image.
    pub fn slopes(&self) -> (f64, f64) {
        (self.u0.abs(), self.u1.abs())
    }
}

impl fmt::Display for GreyLevels {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.u0, self.u1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub max_iters: usize,
    pub tol_kkt: f64,
    pub smoothing_epsilon: f64,
    pub zero_threshold: f64,
    /// Power iterations used to estimate `‖A‖` for step sizes.
    pub power_iters: usize,
    /// Relative norm loss above which the rank probe declares `A` deficient.
    pub rank_threshold: f64,
    pub range: RangeOptions,
    /// Iterations between convergence checks in the primal-dual solver.
    pub check_every: usize,
    /// Largest `min(rows, cols)` for which the primal-dual result is refined
    /// to the central optimum with dense Newton steps.
    pub central_max_dim: usize,
    /// Smoothing level at which the central refinement stops. Multipliers
    /// of pixels that are free on the optimal face shrink like `ρ`, those of
    /// pixels pinned at a bound like `√ρ`; the KKT residual is at most `2ρ`.
    pub central_rho: f64,
    /// L-BFGS history length.
    pub lbfgs_memory: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iters: 500,
            tol_kkt: 1e-6,
            smoothing_epsilon: 1e-1,
            zero_threshold: 1e-9,
            power_iters: 50,
            rank_threshold: 1e-8,
            range: RangeOptions::default(),
            check_every: 25,
            central_max_dim: 2000,
            central_rho: 1e-13,
            lbfgs_memory: 10,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("tol_kkt", self.tol_kkt),
            ("smoothing_epsilon", self.smoothing_epsilon),
            ("rank_threshold", self.rank_threshold),
            ("central_rho", self.central_rho),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.zero_threshold >= 0.0) {
            return Err(Error::InvalidArgument("zero_threshold must be nonnegative".into()));
        }
        if self.max_iters == 0 || self.check_every == 0 || self.power_iters == 0 || self.lbfgs_memory == 0 {
            return Err(Error::InvalidArgument("iteration counts must be at least one".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualSolution {
    pub mu: Vec<f64>,
    /// `Kᵀμ` for the effective operator `K = Λ^{1/2}A`.
    pub nu: Vec<f64>,
    /// Relaxed image in `[−|u0|, |u1|]ᴺ` paired with `μ`; certifies optimality.
    pub x: Vec<f64>,
    pub objective_value: f64,
    /// Data term `½‖μ − y‖²`.
    pub g1: f64,
    /// Penalty term `p(ν)`.
    pub g2: f64,
    /// For the exact solvers the KKT residual of `(μ, x)`; for the smoothed
    /// solver the largest gradient entry of the smoothed objective.
    pub kkt_residual: f64,
    /// Gap between the dual objective and the relaxed least-squares bound.
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl DualSolution {
    /// Plain-text report: objective, KKT residual and iteration count, then
    /// one `ν` entry per line.
    pub fn write_report<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "objective {:e}", self.objective_value)?;
        writeln!(w, "kkt_residual {:e}", self.kkt_residual)?;
        writeln!(w, "iterations {}", self.iterations)?;
        for v in &self.nu {
            writeln!(w, "{v:e}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn levels_and_config_validation() {
        assert!(GreyLevels::new(1.0, 1.0).is_err());
        assert_eq!(GreyLevels::new(-2.0, 3.0).unwrap().slopes(), (2.0, 3.0));
        assert!(SolverConfig::default().validate().is_ok());
        assert!(SolverConfig { tol_kkt: 0.0, ..Default::default() }.validate().is_err());
        assert!(SolverConfig { max_iters: 0, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn report_layout() {
        let sol = DualSolution {
            mu: vec![0.5],
            nu: vec![0.5, -0.25],
            x: vec![1.0, -1.0],
            objective_value: 1.0,
            g1: 0.5,
            g2: 0.5,
            kkt_residual: 0.0,
            gap: 0.0,
            iterations: 3,
            converged: true,
        };
        let mut buf = Vec::new();
        sol.write_report(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines, ["objective 1e0", "kkt_residual 0e0", "iterations 3", "5e-1", "-2.5e-1"]);
    }
}
