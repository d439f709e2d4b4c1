//! Central refinement of a dual solution.
//!
//! On consistent data the exact optimum is `μ = 0` and decides no pixel; more
//! generally every pixel whose relaxed value is interior to the optimal face
//! has `νᵢ = 0`. Interior-point methods approach such an optimum along the
//! central path, and the signs of `ν` along the way are the useful output.
//! This module follows that path explicitly: it minimizes the
//! barrier-smoothed dual
//!
//! `½‖μ − b‖² + Σ φ_ρ(νᵢ)`,  `φ_ρ(ν) = max_{x ∈ (−a, b)} xν + ρ log((x + a)(b − x)/h²)`
//!
//! with `h = (a + b)/2`, by damped Newton steps for a decreasing sequence of
//! `ρ`. The maximizing `x` is the relaxed image paired with `μ`, and the KKT
//! residual of the pair is at most `2ρ`.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::linalg::norm_inf;
use crate::operator::SparseOperator;

use super::problem::DualProblem;
use super::GreyLevels;

/// Ratio between consecutive smoothing levels.
const RHO_FACTOR: f64 = 0.1;
const MAX_NEWTON_STEPS: usize = 60;

/// `φ_ρ` for the interval `[−a, b]`, written around its center `c`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Barrier {
    c: f64,
    h: f64,
    rho: f64,
}

impl Barrier {
    pub(crate) fn new(levels: GreyLevels, rho: f64) -> Self {
        let (a, b) = levels.slopes();
        Self { c: 0.5 * (b - a), h: 0.5 * (a + b), rho }
    }

    /// `(φ_ρ(ν), φ_ρ'(ν), φ_ρ''(ν))`; the derivative is the relaxed pixel.
    #[cfg(test)]
    pub(crate) fn eval(&self, nu: f64) -> (f64, f64, f64) {
        let (phi, x, d, _) = self.eval_with_scale(nu);
        (phi, x, d)
    }

    /// [`Self::eval`] plus the summed magnitude of the terms of `φ_ρ`.
    fn eval_with_scale(&self, nu: f64) -> (f64, f64, f64, f64) {
        let (h, rho) = (self.h, self.rho);
        let u = nu.abs() * h;
        let r = rho.hypot(u);
        let s = rho + r;
        let z = nu * h * h / s;
        // h − |z| without cancellation
        let inner = h * (rho + rho * rho / (r + u)) / s;
        let outer = h + z.abs();
        let width = inner * outer;
        let log_term = rho * (width / (h * h)).ln();
        let phi = self.c * nu + z * nu + log_term;
        let curvature = width * width / (2.0 * rho * (h * h + z * z));
        let scale = (self.c * nu).abs() + (z * nu).abs() + log_term.abs();
        (phi, self.c + z, curvature, scale)
    }
}

/// Column-compressed copy of `K` and, for tall operators, `KᵀK`.
struct Factors {
    cols: Vec<Vec<(usize, f64)>>,
    gram: Option<DMatrix<f64>>,
}

impl Factors {
    fn new(k: &SparseOperator) -> Self {
        let mut cols = vec![Vec::new(); k.cols()];
        for (i, j, v) in k.triplets() {
            cols[j].push((i, v));
        }
        let gram = (k.rows() > k.cols()).then(|| {
            let mut g = DMatrix::zeros(k.cols(), k.cols());
            for i in 0..k.rows() {
                let (idx, vals) = k.row(i);
                for (p, &jp) in idx.iter().enumerate() {
                    for (q, &jq) in idx.iter().enumerate() {
                        g[(jp, jq)] += vals[p] * vals[q];
                    }
                }
            }
            g
        });
        Self { cols, gram }
    }

    /// Solves `(I + K diag(d) Kᵀ) s = g`.
    fn solve(&self, k: &SparseOperator, d: &[f64], g: &[f64]) -> Option<Vec<f64>> {
        match &self.gram {
            None => {
                let m = k.rows();
                let mut h = DMatrix::identity(m, m);
                for (col, &dj) in self.cols.iter().zip(d) {
                    for &(p, vp) in col {
                        for &(q, vq) in col {
                            h[(p, q)] += dj * vp * vq;
                        }
                    }
                }
                let chol = Cholesky::new(h)?;
                Some(chol.solve(&DVector::from_column_slice(g)).as_slice().to_vec())
            }
            Some(gram) => {
                // Woodbury with the N × N system I + D^{1/2} KᵀK D^{1/2}
                let n = k.cols();
                let root: Vec<f64> = d.iter().map(|v| v.sqrt()).collect();
                let mut mat = DMatrix::identity(n, n);
                for q in 0..n {
                    for p in 0..n {
                        mat[(p, q)] += root[p] * gram[(p, q)] * root[q];
                    }
                }
                let chol = Cholesky::new(mat)?;
                let ktg = k.adjoint(g);
                let w = DVector::from_iterator(n, ktg.iter().zip(&root).map(|(a, r)| a * r));
                let v = chol.solve(&w);
                let scaled: Vec<f64> = v.iter().zip(&root).map(|(a, r)| a * r).collect();
                let back = k.forward(&scaled);
                Some(g.iter().zip(&back).map(|(a, c)| a - c).collect())
            }
        }
    }
}

pub(crate) struct CentralPoint {
    pub mu: Vec<f64>,
    pub nu: Vec<f64>,
    pub x: Vec<f64>,
    pub newton_steps: usize,
}

struct Evaluation {
    value: f64,
    /// Summed magnitude of the terms of `value`, which bounds its roundoff.
    scale: f64,
    nu: Vec<f64>,
    x: Vec<f64>,
    d: Vec<f64>,
}

fn objective(p: &DualProblem, barrier: &Barrier, mu: &[f64]) -> Evaluation {
    let nu = p.k.adjoint(mu);
    let mut value = 0.5 * mu.iter().zip(&p.b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>();
    let mut scale = value;
    let mut x = Vec::with_capacity(nu.len());
    let mut d = Vec::with_capacity(nu.len());
    for &v in &nu {
        let (phi, xi, di, si) = barrier.eval_with_scale(v);
        value += phi;
        scale += si;
        x.push(xi);
        d.push(di);
    }
    Evaluation { value, scale, nu, x, d }
}

/// `μ − b + Kx`.
fn gradient(p: &DualProblem, mu: &[f64], x: &[f64]) -> Vec<f64> {
    let kx = p.k.forward(x);
    mu.iter().zip(&p.b).zip(&kx).map(|((u, v), w)| u - v + w).collect()
}

/// Follows the central path from `start` down to `rho_final`. Returns `None`
/// when a Newton system cannot be factored.
///
/// A level whose Newton iteration cannot reach its gradient tolerance ends
/// the path, and the last centered level is returned instead. This happens
/// on operators with inexact entries, where roundoff in `Kᵀμ` is amplified
/// by the `1/ρ` slope of the relaxed pixels. Once the predicted decrease
/// drops below the resolution of the objective, steps are accepted on the
/// gradient norm instead.
pub(crate) fn central_refinement(p: &DualProblem, start: &[f64], rho_final: f64) -> Option<CentralPoint> {
    let k = &p.k;
    let factors = Factors::new(k);
    let (a, b) = p.levels.slopes();
    let h = 0.5 * (a + b);
    let mut rho = (h * norm_inf(&p.b).max(1.0)).max(rho_final);
    let mut mu = start.to_vec();
    let mut steps = 0;
    let scale = 1.0 + norm_inf(&p.b);
    let mut centered_at: Option<(Vec<f64>, f64)> = None;
    loop {
        let last = rho <= rho_final;
        let barrier = Barrier::new(p.levels, rho);
        // intermediate levels only need to be roughly centered
        let grad_tol = if last { 1e-13 * scale } else { 1e-2 * rho };
        let mut centered = false;
        for _ in 0..MAX_NEWTON_STEPS {
            let Evaluation { value: f, scale, x, d, .. } = objective(p, &barrier, &mu);
            let g = gradient(p, &mu, &x);
            let g_norm = norm_inf(&g);
            if g_norm <= grad_tol {
                centered = true;
                break;
            }
            let step = factors.solve(k, &d, &g)?;
            let slope: f64 = -g.iter().zip(&step).map(|(a, c)| a * c).sum::<f64>();
            // below this the objective cannot resolve the decrease
            let flat = -slope <= 1e2 * f64::EPSILON * scale;
            let mut t = 1.0;
            let mut accepted = false;
            for _ in 0..60 {
                let trial: Vec<f64> = mu.iter().zip(&step).map(|(u, s)| u - t * s).collect();
                let eval = objective(p, &barrier, &trial);
                let better = if flat {
                    norm_inf(&gradient(p, &trial, &eval.x)) < g_norm
                } else {
                    eval.value <= f + 1e-4 * t * slope + 4.0 * f64::EPSILON * f.abs()
                };
                if better {
                    mu = trial;
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            steps += 1;
            if !accepted {
                break;
            }
        }
        if !centered {
            if let Some((prev_mu, prev_rho)) = centered_at.take() {
                mu = prev_mu;
                rho = prev_rho;
            }
            break;
        }
        if last {
            break;
        }
        centered_at = Some((mu.clone(), rho));
        rho = (rho * RHO_FACTOR).max(rho_final);
    }
    let barrier = Barrier::new(p.levels, rho);
    let Evaluation { nu, x, .. } = objective(p, &barrier, &mu);
    Some(CentralPoint { mu, nu, x, newton_steps: steps })
}
