//! Seeded noise models for simulated measurements.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use crate::dual::{attenuation_scale, build_poisson_weights};
use crate::error::{Error, Result};
use crate::linalg::norm2;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianNoise {
    pub values: Vec<f64>,
    /// Realized `‖e‖`.
    pub noise_norm: f64,
}

/// Adds white noise rescaled so that `20·log10(‖y‖/‖e‖)` equals `snr_db`.
/// An infinite SNR returns the data unchanged.
pub fn add_gaussian_noise(y: &[f64], snr_db: f64, seed: u64) -> Result<GaussianNoise> {
    if snr_db == f64::INFINITY {
        return Ok(GaussianNoise { values: y.to_vec(), noise_norm: 0.0 });
    }
    if !snr_db.is_finite() {
        return Err(Error::InvalidArgument(format!("SNR must be finite or +inf, got {snr_db}")));
    }
    let signal = norm2(y);
    if signal == 0.0 {
        return Err(Error::InvalidArgument("cannot set an SNR for a zero signal".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let e: Vec<f64> = (0..y.len()).map(|_| StandardNormal.sample(&mut rng)).collect();
    let target = signal / 10f64.powf(snr_db / 20.0);
    let scale = target / norm2(&e);
    let e: Vec<f64> = e.iter().map(|v| v * scale).collect();
    let noise_norm = norm2(&e);
    Ok(GaussianNoise { values: y.iter().zip(&e).map(|(a, b)| a + b).collect(), noise_norm })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoissonData {
    /// Log-transformed noisy ray sums.
    pub values: Vec<f64>,
    /// Weights of the noiseless data, as from [`build_poisson_weights`].
    pub weights: Vec<f64>,
    /// Attenuation scale `c` mapping ray sums to optical depth.
    pub scale: f64,
    /// Realized `‖ŷ − y‖`.
    pub noise_norm: f64,
}

/// Draws counts `kᵢ ~ Poisson(I0·exp(−c·yᵢ))` and returns
/// `ŷᵢ = −ln(max(kᵢ, 1)/I0)/c`.
pub fn simulate_poisson(y: &[f64], i0: f64, seed: u64) -> Result<PoissonData> {
    let weights = build_poisson_weights(y, i0)?;
    let scale = attenuation_scale(y);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(y.len());
    for &lambda in &weights {
        let counts = Poisson::new(lambda).map_err(|e| Error::InvalidArgument(e.to_string()))?.sample(&mut rng);
        let depth = -(counts.max(1.0) / i0).ln();
        values.push(depth / scale);
    }
    let noise_norm = norm2(&values.iter().zip(y).map(|(a, b)| a - b).collect::<Vec<_>>());
    Ok(PoissonData { values, weights, scale, noise_norm })
}

/// `20·log10(‖y‖/‖ŷ − y‖)`.
pub fn empirical_snr_db(clean: &[f64], noisy: &[f64]) -> f64 {
    let diff: Vec<f64> = noisy.iter().zip(clean).map(|(a, b)| a - b).collect();
    20.0 * (norm2(clean) / norm2(&diff)).log10()
}
