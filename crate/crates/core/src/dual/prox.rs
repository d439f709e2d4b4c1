//! Scalar proximal maps of the one-norm and its asymmetric variant.

/// `S_τ(t) = max(|t| − τ, 0)·sign(t)`.
pub fn soft_threshold(t: f64, tau: f64) -> f64 {
    debug_assert!(tau >= 0.0);
    if t > tau {
        t - tau
    } else if t < -tau {
        t + tau
    } else {
        0.0
    }
}

/// Minimizer of `½(x − t)² + a·max(−x, 0) + b·max(x, 0)`.
pub fn asym_soft_threshold(t: f64, a: f64, b: f64) -> f64 {
    debug_assert!(a >= 0.0 && b >= 0.0);
    if t >= b {
        t - b
    } else if t <= -a {
        t + a
    } else {
        0.0
    }
}

/// `Σ a·max(−νᵢ, 0) + b·max(νᵢ, 0)`.
pub fn asym_penalty(nu: &[f64], a: f64, b: f64) -> f64 {
    nu.iter().map(|&v| if v > 0.0 { b * v } else { -a * v }).sum()
}
