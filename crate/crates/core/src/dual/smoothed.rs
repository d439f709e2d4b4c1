//! L-BFGS on the smoothed dual `½‖μ − b‖² + Σ p_ε((Kᵀμ)ᵢ)`.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, norm2};
use crate::operator::SparseOperator;

use super::objective::{duality_gap, inf_norm, smoothed_slope};
use super::problem::DualProblem;
use super::{DualSolution, GreyLevels, SolverConfig};

pub fn solve_dual_smoothed(
    a: &SparseOperator,
    y: &[f64],
    levels: GreyLevels,
    weights: Option<&[f64]>,
    cfg: &SolverConfig,
) -> Result<DualSolution> {
    let problem = DualProblem::new(a, y, levels, weights, cfg)?;
    solve_smoothed_problem(&problem, cfg)
}

struct Smoothed<'a> {
    p: &'a DualProblem,
    lo: f64,
    hi: f64,
    eps: f64,
}

impl Smoothed<'_> {
    /// Value, gradient and penalty slopes at `mu`.
    fn eval(&self, mu: &[f64]) -> (f64, Vec<f64>, Vec<f64>) {
        let nu = self.p.k.adjoint(mu);
        let (odd, even) = (0.5 * (self.hi - self.lo), 0.5 * (self.hi + self.lo));
        let penalty: f64 = nu.iter().map(|&v| odd * v + even * (v * v + self.eps).sqrt()).sum();
        let s = smoothed_slope(&nu, self.lo, self.hi, self.eps);
        let mut grad = self.p.k.forward(&s);
        let mut data = 0.0;
        for ((g, m), b) in grad.iter_mut().zip(mu).zip(&self.p.b) {
            *g += m - b;
            data += 0.5 * (m - b) * (m - b);
        }
        (data + penalty, grad, s)
    }
}

pub(crate) fn solve_smoothed_problem(p: &DualProblem, cfg: &SolverConfig) -> Result<DualSolution> {
    let (lo, hi) = p.levels.slopes();
    let f = Smoothed { p, lo, hi, eps: cfg.smoothing_epsilon };
    let target = cfg.tol_kkt * (1.0 + norm2(&p.b));

    let mut mu = vec![0.0; p.k.rows()];
    let (mut val, mut grad, mut slope) = f.eval(&mu);
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(cfg.lbfgs_memory);
    let mut iterations = 0;
    let mut converged = norm2(&grad) <= target;

    while !converged && iterations < cfg.max_iters {
        iterations += 1;
        let mut dir = two_loop(&grad, &history);
        let mut slope_along = dot(&dir, &grad);
        if !(slope_along < 0.0) {
            // history lost positive definiteness numerically; restart
            history.clear();
            dir = grad.iter().map(|g| -g).collect();
            slope_along = -dot(&grad, &grad);
        }

        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let mut trial = mu.clone();
            axpy(step, &dir, &mut trial);
            let eval = f.eval(&trial);
            if eval.0 <= val + 1e-4 * step * slope_along {
                accepted = Some((trial, eval));
                break;
            }
            step *= 0.5;
        }
        let Some((next, (next_val, next_grad, next_slope))) = accepted else { break };

        let s: Vec<f64> = next.iter().zip(&mu).map(|(a, b)| a - b).collect();
        let yv: Vec<f64> = next_grad.iter().zip(&grad).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &yv);
        if sy > 1e-16 * norm2(&s) * norm2(&yv) {
            if history.len() == cfg.lbfgs_memory {
                history.pop_front();
            }
            history.push_back((s, yv, 1.0 / sy));
        }
        mu = next;
        val = next_val;
        grad = next_grad;
        slope = next_slope;
        converged = norm2(&grad) <= target;
    }

    if mu.iter().any(|v| !v.is_finite()) {
        return Err(Error::NotConverged { what: "smoothed dual solve", iterations });
    }
    let nu = p.k.adjoint(&mu);
    let (g1, g2, gap) = duality_gap(&p.k, &p.b, &mu, &nu, &slope, p.levels);
    Ok(DualSolution {
        kkt_residual: inf_norm(&grad),
        mu,
        nu,
        x: slope,
        objective_value: g1 + g2,
        g1,
        g2,
        gap,
        iterations,
        converged,
    })
}

/// L-BFGS two-loop recursion returning the search direction `−H g`.
fn two_loop(grad: &[f64], history: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q = grad.to_vec();
    let mut alphas = Vec::with_capacity(history.len());
    for (s, y, rho) in history.iter().rev() {
        let alpha = rho * dot(s, &q);
        axpy(-alpha, y, &mut q);
        alphas.push(alpha);
    }
    if let Some((s, y, _)) = history.back() {
        let gamma = dot(s, y) / dot(y, y);
        q.iter_mut().for_each(|v| *v *= gamma);
    }
    for ((s, y, rho), alpha) in history.iter().zip(alphas.iter().rev()) {
        let beta = rho * dot(y, &q);
        axpy(alpha - beta, s, &mut q);
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}
