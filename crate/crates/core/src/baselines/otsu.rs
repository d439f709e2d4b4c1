//! Otsu's histogram threshold.

use crate::dual::GreyLevels;
use crate::error::{Error, Result};
use crate::image::BinaryImage;

pub const OTSU_BINS: usize = 256;

fn bin_indices(x: &[f64]) -> Option<Vec<usize>> {
    let (lo, hi) = x.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    if !(hi > lo) {
        return None;
    }
    let width = hi - lo;
    Some(x.iter().map(|&v| (((v - lo) / width * OTSU_BINS as f64) as usize).min(OTSU_BINS - 1)).collect())
}

/// The first bin index `t` maximizing the between-class variance when bins
/// `< t` form the lower class; `None` for a constant image.
pub fn otsu_cut(x: &[f64]) -> Option<usize> {
    let bins = bin_indices(x)?;
    let mut hist = [0usize; OTSU_BINS];
    for &b in &bins {
        hist[b] += 1;
    }
    let total = bins.len() as f64;
    let sum_all: f64 = hist.iter().enumerate().map(|(i, &c)| i as f64 * c as f64).sum();
    let (mut w0, mut sum0) = (0.0, 0.0);
    let mut best = (f64::NEG_INFINITY, 1);
    for t in 1..OTSU_BINS {
        w0 += hist[t - 1] as f64;
        sum0 += (t - 1) as f64 * hist[t - 1] as f64;
        let w1 = total - w0;
        if w0 == 0.0 || w1 == 0.0 {
            continue;
        }
        let diff = sum0 / w0 - (sum_all - sum0) / w1;
        let between = w0 * w1 * diff * diff;
        if between > best.0 {
            best = (between, t);
        }
    }
    Some(best.1)
}

/// Segments a square grey image with Otsu's cut; a constant image maps to
/// the lower level.
pub fn otsu_threshold(x: &[f64], levels: GreyLevels) -> Result<BinaryImage> {
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("image values must be finite".into()));
    }
    let n = (x.len() as f64).sqrt().round() as usize;
    if n * n != x.len() {
        return Err(Error::InvalidArgument(format!("{} values do not form a square image", x.len())));
    }
    let flags = match (otsu_cut(x), bin_indices(x)) {
        (Some(cut), Some(bins)) => bins.iter().map(|&b| b >= cut).collect(),
        _ => vec![false; x.len()],
    };
    BinaryImage::from_flags(n, levels, flags)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn pattern() -> Vec<f64> {
        (0..64).map(|i| if (i / 8 + i % 8) % 3 == 0 { 1.0 } else { 0.0 }).collect()
    }

    #[test]
    fn bimodal_is_exact() {
        let x = pattern();
        let seg = otsu_threshold(&x, GreyLevels::UNIT).unwrap();
        assert_eq!(seg.values(), x);
    }

    #[test]
    fn small_noise_keeps_segmentation() {
        let x = pattern();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let noise = Normal::new(0.0, 0.05).unwrap();
        let noisy: Vec<f64> = x.iter().map(|v| v + noise.sample(&mut rng)).collect();
        assert_eq!(otsu_threshold(&noisy, GreyLevels::UNIT).unwrap().values(), x);
    }

    #[test]
    fn cut_matches_exhaustive_search() {
        // between-class variance computed from the pixel bins themselves
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let x: Vec<f64> = (0..100).map(|_| rng.random_range(0.0..1.0_f64).powi(2)).collect();
            let bins = bin_indices(&x).unwrap();
            let mut best = (f64::NEG_INFINITY, 0);
            for t in 1..OTSU_BINS {
                let low: Vec<f64> = bins.iter().filter(|&&b| b < t).map(|&b| b as f64).collect();
                let high: Vec<f64> = bins.iter().filter(|&&b| b >= t).map(|&b| b as f64).collect();
                if low.is_empty() || high.is_empty() {
                    continue;
                }
                let m0 = low.iter().sum::<f64>() / low.len() as f64;
                let m1 = high.iter().sum::<f64>() / high.len() as f64;
                let var = low.len() as f64 * high.len() as f64 * (m0 - m1).powi(2);
                if var > best.0 * (1.0 + 1e-12) {
                    best = (var, t);
                }
            }
            let cut = otsu_cut(&x).unwrap();
            let split = |t: usize| bins.iter().filter(|&&b| b < t).count();
            assert_eq!(split(cut), split(best.1));
        }
    }

    #[test]
    fn constant_image_is_lower() {
        let seg = otsu_threshold(&[0.3; 9], GreyLevels::UNIT).unwrap();
        assert_eq!(seg.count_upper(), 0);
    }
}
