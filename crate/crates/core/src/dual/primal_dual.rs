//! Accelerated primal-dual (Chambolle–Pock) solver for the exact dual.
//!
//! The saddle form `min_μ max_{x ∈ B} ½‖μ − b‖² + ⟨Kx, μ⟩` has a 1-strongly
//! convex `μ` part, so the step sizes follow the accelerated schedule. When
//! the smaller side of the operator fits a dense factorization, the result is
//! then moved to the central optimum (see [`super::central`]), which decides
//! pixels on degenerate optimal faces the way interior-point solvers do.

use crate::error::Result;
use crate::operator::SparseOperator;

use super::central::central_refinement;
use super::objective::{duality_gap, kkt_from_parts};
use super::problem::DualProblem;
use super::{DualSolution, GreyLevels, SolverConfig};

/// Solves the dual with primal-dual splitting, projecting the data onto the
/// range of `A` when `A` lacks full row rank.
pub fn solve_dual_primal_dual(
    a: &SparseOperator,
    y: &[f64],
    levels: GreyLevels,
    weights: Option<&[f64]>,
    cfg: &SolverConfig,
) -> Result<DualSolution> {
    let problem = DualProblem::new(a, y, levels, weights, cfg)?;
    Ok(solve_problem(&problem, cfg))
}

struct Candidate {
    mu: Vec<f64>,
    x: Vec<f64>,
    nu: Vec<f64>,
    kkt: f64,
    iterations: usize,
}

pub(crate) fn solve_problem(p: &DualProblem, cfg: &SolverConfig) -> DualSolution {
    let k = &p.k;
    let (lo, hi) = p.levels.slopes();
    let (m, n) = (k.rows(), k.cols());

    let norm = k.norm_estimate(cfg.power_iters);
    // power iteration approaches ‖K‖ from below
    let lip = if norm > 0.0 { 1.01 * norm } else { 1.0 };
    let (mut tau, mut sigma) = (1.0 / lip, 1.0 / lip);

    let mut x = vec![0.0; n];
    let mut mu = p.b.clone();
    let mut mu_bar = mu.clone();
    let mut nu_bar = vec![0.0; n];
    let mut kx = vec![0.0; m];

    let mut best: Option<Candidate> = None;
    let mut converged = false;

    let mut it = 0;
    while it < cfg.max_iters {
        it += 1;
        k.adjoint_into(&mu_bar, &mut nu_bar);
        for (xi, v) in x.iter_mut().zip(&nu_bar) {
            *xi = (*xi + sigma * v).clamp(-lo, hi);
        }
        k.forward_into(&x, &mut kx);
        let mu_old = std::mem::take(&mut mu);
        mu = mu_old.iter().zip(&kx).zip(&p.b).map(|((u, w), v)| (u - tau * w + tau * v) / (1.0 + tau)).collect();
        let theta = 1.0 / (1.0 + 2.0 * tau).sqrt();
        tau *= theta;
        sigma /= theta;
        for ((bar, u), old) in mu_bar.iter_mut().zip(&mu).zip(&mu_old) {
            *bar = u + theta * (u - old);
        }

        if it % cfg.check_every != 0 && it != cfg.max_iters {
            continue;
        }
        let nu = k.adjoint(&mu);
        let kkt = kkt_from_parts(k, &p.b, &mu, &nu, &x, p.levels);
        let candidate = Candidate { mu: mu.clone(), x: x.clone(), nu, kkt, iterations: it };
        let done = kkt <= cfg.tol_kkt;
        if best.as_ref().is_none_or(|b| candidate.kkt <= b.kkt) {
            best = Some(candidate);
        }
        if done {
            converged = true;
            break;
        }
    }

    let mut best = best.expect("at least one checkpoint is always recorded");
    if m.min(n) <= cfg.central_max_dim {
        if let Some(c) = central_refinement(p, &best.mu, cfg.central_rho) {
            let kkt = kkt_from_parts(k, &p.b, &c.mu, &c.nu, &c.x, p.levels);
            if kkt <= cfg.tol_kkt || kkt < best.kkt {
                converged = kkt <= cfg.tol_kkt;
                best = Candidate { mu: c.mu, x: c.x, nu: c.nu, kkt, iterations: best.iterations + c.newton_steps };
            }
        }
    }
    let (g1, g2, gap) = duality_gap(k, &p.b, &best.mu, &best.nu, &best.x, p.levels);
    DualSolution {
        mu: best.mu,
        nu: best.nu,
        x: best.x,
        objective_value: g1 + g2,
        g1,
        g2,
        kkt_residual: best.kkt,
        gap,
        iterations: best.iterations,
        converged,
    }
}
