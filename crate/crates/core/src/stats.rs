//! Small descriptive statistics shared across modules.
//!
//! Variances use the population (1/N) convention throughout the crate.

use crate::error::{Error, Result};

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population variance, two-pass.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64
}

pub fn covariance(xs: &[f64], ys: &[f64]) -> f64 {
    let mx = mean(xs);
    let my = mean(ys);
    xs.iter()
        .zip(ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum::<f64>()
        / xs.len() as f64
}

pub fn correlation(xs: &[f64], ys: &[f64]) -> f64 {
    covariance(xs, ys) / (variance(xs) * variance(ys)).sqrt()
}

/// True when every entry equals the first or the population variance is zero.
pub(crate) fn is_constant(xs: &[f64]) -> bool {
    match xs.first() {
        None => true,
        Some(&first) => xs.iter().all(|&x| x == first) || variance(xs) == 0.0,
    }
}

/// Returns `(xs - mean) / sd`.
pub fn standardized(xs: &[f64]) -> Result<Vec<f64>> {
    if is_constant(xs) {
        return Err(Error::ZeroVariance);
    }
    let m = mean(xs);
    let sd = variance(xs).sqrt();
    Ok(xs.iter().map(|x| (x - m) / sd).collect())
}

/// Folds `parts` into one seed with the splitmix64 finalizer. Stable across
/// platforms and releases, unlike `std`'s hashers.
pub fn derive_seed(parts: &[u64]) -> u64 {
    parts.iter().fold(0x9E37_79B9_7F4A_7C15, |acc, &v| splitmix64(acc ^ splitmix64(v)))
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn population_convention() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert!((mean(&xs) - 2.5).abs() < 1e-15);
        assert!((variance(&xs) - 1.25).abs() < 1e-15);
    }

    #[test]
    fn constant_detection() {
        assert!(is_constant(&[0.1, 0.1, 0.1]));
        assert!(!is_constant(&[0.1, 0.2]));
        assert_eq!(standardized(&[5.0, 5.0]), Err(Error::ZeroVariance));
    }
}
