//! LSQR for sparse least squares (Paige & Saunders, 1982), without damping.

use crate::linalg::{norm2, scale};
use crate::operator::SparseOperator;

#[derive(Debug, Clone, Copy)]
pub struct LsqrOptions {
    pub max_iters: usize,
    /// Stop when `‖Aᵀr‖ ≤ tol·‖Aᵀb‖`.
    pub tol: f64,
}

impl Default for LsqrOptions {
    fn default() -> Self {
        Self { max_iters: 1000, tol: 1e-6 }
    }
}

#[derive(Debug, Clone)]
pub struct LsqrResult {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// `‖Aᵀ(Ax − b)‖ / ‖Aᵀb‖`, recomputed from the returned iterate.
    pub relative_normal_residual: f64,
    pub converged: bool,
}

/// Minimizes `‖Ax − b‖` starting from zero, which yields the minimum-norm
/// solution for rank-deficient `A`.
pub fn lsqr(a: &SparseOperator, b: &[f64], opts: LsqrOptions) -> LsqrResult {
    let n = a.cols();
    let mut x = vec![0.0; n];
    let atb_norm = norm2(&a.adjoint(b));
    if atb_norm == 0.0 {
        return LsqrResult { x, iterations: 0, relative_normal_residual: 0.0, converged: true };
    }

    let mut u = b.to_vec();
    let mut beta = norm2(&u);
    scale(1.0 / beta, &mut u);
    let mut v = a.adjoint(&u);
    let mut alpha = norm2(&v);
    scale(1.0 / alpha, &mut v);
    let mut w = v.clone();
    let mut phibar = beta;
    let mut rhobar = alpha;

    let mut iterations = 0;
    let mut av = vec![0.0; a.rows()];
    let mut atu = vec![0.0; n];
    while iterations < opts.max_iters {
        iterations += 1;

        a.forward_into(&v, &mut av);
        for (ui, avi) in u.iter_mut().zip(&av) {
            *ui = avi - alpha * *ui;
        }
        beta = norm2(&u);
        if beta > 0.0 {
            scale(1.0 / beta, &mut u);
        }
        a.adjoint_into(&u, &mut atu);
        for (vi, ai) in v.iter_mut().zip(&atu) {
            *vi = ai - beta * *vi;
        }
        alpha = norm2(&v);
        if alpha > 0.0 {
            scale(1.0 / alpha, &mut v);
        }

        let rho = rhobar.hypot(beta);
        let c = rhobar / rho;
        let s = beta / rho;
        let theta = s * alpha;
        rhobar = -c * alpha;
        let phi = c * phibar;
        phibar *= s;

        let t1 = phi / rho;
        let t2 = -theta / rho;
        for ((xi, wi), vi) in x.iter_mut().zip(w.iter_mut()).zip(&v) {
            *xi += t1 * *wi;
            *wi = vi + t2 * *wi;
        }

        // ‖Aᵀr‖ estimate from the bidiagonalization
        let normal_res = phibar * alpha * c.abs();
        if normal_res <= opts.tol * atb_norm || phibar == 0.0 || alpha == 0.0 {
            break;
        }
    }

    let relative_normal_residual = normal_residual(a, &x, b) / atb_norm;
    LsqrResult { x, iterations, relative_normal_residual, converged: relative_normal_residual <= opts.tol }
}

fn normal_residual(a: &SparseOperator, x: &[f64], b: &[f64]) -> f64 {
    let r: Vec<f64> = a.forward(x).iter().zip(b).map(|(p, q)| p - q).collect();
    norm2(&a.adjoint(&r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_converges_in_one_step() {
        let a = SparseOperator::from_dense(3, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        let res = lsqr(&a, &[1.0, -2.0, 3.0], LsqrOptions::default());
        assert_eq!(res.iterations, 1);
        for (x, y) in res.x.iter().zip([1.0, -2.0, 3.0]) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn consistent_overdetermined_system() {
        let a = SparseOperator::from_dense(4, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 2.0, 1.0]).unwrap();
        let x_true = [0.5, -1.5];
        let b = a.apply_forward(&x_true).unwrap();
        let res = lsqr(&a, &b, LsqrOptions { max_iters: 100, tol: 1e-14 });
        let r = a.apply_forward(&res.x).unwrap();
        let resid: f64 = r.iter().zip(&b).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
        assert!(resid < 1e-10, "residual {resid}");
    }

    #[test]
    fn matches_dense_normal_equations() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (m, n) = (12, 8);
        let data: Vec<f64> = (0..m * n).map(|_| rng.random_range(0.0..1.0)).collect();
        let b: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
        let a = SparseOperator::from_dense(m, n, &data).unwrap();
        let res = lsqr(&a, &b, LsqrOptions { max_iters: 1000, tol: 1e-12 });
        let dense = DMatrix::from_row_slice(m, n, &data);
        let ata = dense.transpose() * &dense;
        let atb = dense.transpose() * DVector::from_column_slice(&b);
        let oracle = ata.lu().solve(&atb).unwrap();
        for (x, o) in res.x.iter().zip(oracle.iter()) {
            assert!((x - o).abs() < 1e-6, "{x} vs {o}");
        }
    }

    #[test]
    fn zero_rhs() {
        let a = SparseOperator::from_dense(2, 2, &[1.0, 0.0, 0.0, 1.0]).unwrap();
        let res = lsqr(&a, &[0.0, 0.0], LsqrOptions::default());
        assert!(res.converged);
        assert_eq!(res.x, vec![0.0, 0.0]);
    }
}
