//! `min ‖Ax − y‖² + λ‖Dx‖₁` by the Chambolle–Pock method.
//!
//! `D` stacks forward differences along rows and columns with Neumann
//! boundaries and the penalty is the anisotropic one-norm. Both blocks are
//! scaled to unit norm inside the stacked operator `K = [A/‖A‖; D/‖D‖]`.

use crate::error::{check_len, Error, Result};
use crate::linalg::dot;
use crate::operator::SparseOperator;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TvConfig {
    pub lambda: f64,
    /// Relative duality gap at which iterations stop.
    pub tol_gap: f64,
    pub nonneg: bool,
    pub max_iters: usize,
    /// Iterations between gap evaluations.
    pub check_every: usize,
}

impl Default for TvConfig {
    fn default() -> Self {
        Self { lambda: 1.0, tol_gap: 1e-4, nonneg: true, max_iters: 5000, check_every: 50 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TvResult {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub relative_gap: f64,
    pub converged: bool,
    /// `(iteration, objective, relative gap)` at every gap evaluation.
    pub history: Vec<(usize, f64, f64)>,
}

/// Forward differences `(∂_col x, ∂_row x)` of an `n × n` image.
fn gradient(n: usize, x: &[f64], out: &mut [f64]) {
    let npix = n * n;
    for r in 0..n {
        for c in 0..n {
            let i = r * n + c;
            out[i] = if c + 1 < n { x[i + 1] - x[i] } else { 0.0 };
            out[npix + i] = if r + 1 < n { x[i + n] - x[i] } else { 0.0 };
        }
    }
}

/// Adjoint of [`gradient`].
fn gradient_adjoint(n: usize, g: &[f64], out: &mut [f64]) {
    let npix = n * n;
    out.iter_mut().for_each(|v| *v = 0.0);
    for r in 0..n {
        for c in 0..n {
            let i = r * n + c;
            if c + 1 < n {
                out[i + 1] += g[i];
                out[i] -= g[i];
            }
            if r + 1 < n {
                out[i + n] += g[npix + i];
                out[i] -= g[npix + i];
            }
        }
    }
}

fn gradient_norm(n: usize) -> f64 {
    // ‖D‖² = 4 sin²(π(n−1)/(2n)) · 2 for the Neumann difference stencil
    let s = (std::f64::consts::PI * (n as f64 - 1.0) / (2.0 * n as f64)).sin();
    (8.0 * s * s).sqrt()
}

fn objective(a: &SparseOperator, y: &[f64], n: usize, lambda: f64, x: &[f64]) -> f64 {
    let ax = a.forward(x);
    let data: f64 = ax.iter().zip(y).map(|(p, q)| (p - q) * (p - q)).sum();
    let mut g = vec![0.0; 2 * n * n];
    gradient(n, x, &mut g);
    data + lambda * g.iter().map(|v| v.abs()).sum::<f64>()
}

/// Total-variation reconstruction of a square image.
pub fn solve_tv(a: &SparseOperator, y: &[f64], cfg: &TvConfig) -> Result<TvResult> {
    check_len(a.rows(), y.len())?;
    if !(cfg.lambda >= 0.0 && cfg.lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("lambda must be nonnegative, got {}", cfg.lambda)));
    }
    if !(cfg.tol_gap > 0.0) || cfg.max_iters == 0 || cfg.check_every == 0 {
        return Err(Error::InvalidArgument("TV needs a positive gap tolerance and iteration counts".into()));
    }
    let npix = a.cols();
    let n = (npix as f64).sqrt().round() as usize;
    if n * n != npix {
        return Err(Error::InvalidArgument(format!("{npix} unknowns do not form a square image")));
    }
    let an = a.norm_estimate(100) * 1.01;
    if an == 0.0 {
        return Err(Error::InvalidOperator("TV needs a nonzero operator".into()));
    }
    let dn = gradient_norm(n).max(f64::MIN_POSITIVE);
    let step = 0.99 / 2f64.sqrt();
    let (tau, sigma) = (step, step);
    let lambda = cfg.lambda;
    let y_norm_sq = dot(y, y);

    let mut x = vec![0.0; npix];
    let mut x_bar = x.clone();
    let mut p = vec![0.0; a.rows()];
    let mut q = vec![0.0; 2 * npix];
    let mut ax = vec![0.0; a.rows()];
    let mut dx = vec![0.0; 2 * npix];
    let mut atp = vec![0.0; npix];
    let mut dtq = vec![0.0; npix];
    let mut history = Vec::new();
    let mut relative_gap = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < cfg.max_iters {
        iterations += 1;
        a.forward_into(&x_bar, &mut ax);
        for ((pi, axi), yi) in p.iter_mut().zip(&ax).zip(y) {
            // prox of σF₁* with F₁(z) = ‖‖A‖z − y‖²
            let v = *pi + sigma * axi / an;
            *pi = (v - sigma * yi / an) / (1.0 + sigma / (2.0 * an * an));
        }
        gradient(n, &x_bar, &mut dx);
        let bound = lambda * dn;
        for (qi, di) in q.iter_mut().zip(&dx) {
            *qi = (*qi + sigma * di / dn).clamp(-bound, bound);
        }
        a.adjoint_into(&p, &mut atp);
        gradient_adjoint(n, &q, &mut dtq);
        for i in 0..npix {
            let old = x[i];
            let mut v = old - tau * (atp[i] / an + dtq[i] / dn);
            if cfg.nonneg {
                v = v.max(0.0);
            }
            x[i] = v;
            x_bar[i] = 2.0 * v - old;
        }

        if iterations % cfg.check_every == 0 || iterations == cfg.max_iters {
            let primal = objective(a, y, n, lambda, &x);
            // dual value over the box [0, B] (or [−B, B]) containing the iterate
            let radius = (2.0 * x.iter().fold(0.0_f64, |m, v| m.max(v.abs()))).max(1.0);
            let conj_f: f64 = p.iter().zip(y).map(|(pi, yi)| pi * yi / an + pi * pi / (4.0 * an * an)).sum();
            let infeasible: f64 = q.iter().map(|v| (v.abs() - lambda * dn).max(0.0)).sum();
            a.adjoint_into(&p, &mut atp);
            gradient_adjoint(n, &q, &mut dtq);
            let conj_g: f64 = atp
                .iter()
                .zip(&dtq)
                .map(|(u, v)| {
                    let s = -(u / an + v / dn);
                    if cfg.nonneg {
                        radius * s.max(0.0)
                    } else {
                        radius * s.abs()
                    }
                })
                .sum();
            let dual = -conj_f - conj_g - if infeasible > 0.0 { f64::INFINITY } else { 0.0 };
            let gap = (primal - dual).max(0.0);
            relative_gap = gap / primal.max(1e-6 * y_norm_sq).max(f64::MIN_POSITIVE);
            history.push((iterations, primal, relative_gap));
            if relative_gap <= cfg.tol_gap {
                converged = true;
                break;
            }
        }
    }
    Ok(TvResult { x, iterations, relative_gap, converged, history })
}

/// Logarithmic `λ` grid, relative to the data scale `‖y‖²/N`.
pub fn default_lambda_grid(y: &[f64], npix: usize) -> Vec<f64> {
    let base = (dot(y, y) / npix.max(1) as f64).max(f64::MIN_POSITIVE);
    (0..13).map(|k| base * 10f64.powf(-4.0 + 0.5 * k as f64)).collect()
}
