//! Pairwise likelihood ratio built on a maximum-entropy approximation of
//! differential entropy.

use crate::error::{Error, Result};
use crate::search::SearchState;
use crate::stats;

const K1: f64 = 79.047;
const K2: f64 = 7.4129;
const GAMMA: f64 = 0.37457;

/// Entropy of a unit-variance Gaussian, `(1 + ln 2pi) / 2`.
pub(crate) fn gaussian_entropy() -> f64 {
    0.5 * (1.0 + (2.0 * std::f64::consts::PI).ln())
}

fn log_cosh(u: f64) -> f64 {
    let a = u.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// Entropy approximation of `(u - mean) / sd`; the caller has checked that
/// `sd > 0`.
fn entropy_with(u: &[f64], mean: f64, sd: f64) -> f64 {
    let n = u.len() as f64;
    let (mut lc, mut ue) = (0.0, 0.0);
    for &x in u {
        let z = (x - mean) / sd;
        lc += log_cosh(z);
        ue += z * (-0.5 * z * z).exp();
    }
    let a = lc / n - GAMMA;
    let b = ue / n;
    gaussian_entropy() - K1 * a * a - K2 * b * b
}

/// Approximate differential entropy of `u` after standardizing it.
///
/// Both correction terms enter with a negative sign, so the result never
/// exceeds the Gaussian entropy.
pub fn approx_entropy(u: &[f64]) -> Result<f64> {
    if u.len() < 2 || stats::is_constant(u) {
        return Err(Error::ZeroVariance);
    }
    Ok(entropy_with(u, stats::mean(u), stats::variance(u).sqrt()))
}

struct Prepared {
    values: Vec<f64>,
    entropy: f64,
}

fn prepare(col: &[f64]) -> Result<Prepared> {
    let values = stats::standardized(col)?;
    let entropy = entropy_with(&values, 0.0, 1.0);
    Ok(Prepared { values, entropy })
}

/// `R(x, y)` for already-prepared columns. Positive values favour `x -> y`.
fn ratio(x: &Prepared, y: &Prepared, buf: &mut Vec<f64>) -> Result<f64> {
    let n = x.values.len() as f64;
    let rho = x.values.iter().zip(&y.values).map(|(a, b)| a * b).sum::<f64>() / n;
    if 1.0 - rho * rho <= 1e-12 {
        return Err(Error::DegenerateCorrelation);
    }
    let mut residual_entropy = |u: &[f64], v: &[f64]| -> Result<f64> {
        buf.clear();
        buf.extend(u.iter().zip(v).map(|(a, b)| a - rho * b));
        if stats::is_constant(buf) {
            return Err(Error::DegenerateCorrelation);
        }
        Ok(entropy_with(buf, stats::mean(buf), stats::variance(buf).sqrt()))
    };
    // d = y - rho x, e = x - rho y
    let h_d = residual_entropy(&y.values, &x.values)?;
    let h_e = residual_entropy(&x.values, &y.values)?;
    Ok(-x.entropy - h_d + y.entropy + h_e)
}

/// Pairwise likelihood ratio between `x` and `y`. Both inputs are
/// standardized internally, so the result is invariant to positive rescaling.
pub fn plr(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { left: x.len(), right: y.len() });
    }
    let (px, py) = (prepare(x)?, prepare(y)?);
    ratio(&px, &py, &mut Vec::with_capacity(x.len()))
}

/// Antisymmetric matrix of pairwise likelihood ratios between candidates.
#[derive(Debug, Clone, PartialEq)]
pub struct PlrMatrix {
    entries: Vec<Vec<f64>>,
}

impl PlrMatrix {
    /// Evaluates every pair once; the transposed entry is its exact negation.
    pub fn from_columns<C: AsRef<[f64]>>(columns: &[C]) -> Result<Self> {
        let m = columns.len();
        let prepared = columns
            .iter()
            .map(|c| prepare(c.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        let mut entries = vec![vec![0.0; m]; m];
        let mut buf = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                let r = ratio(&prepared[i], &prepared[j], &mut buf)?;
                entries[i][j] = r;
                entries[j][i] = -r;
            }
        }
        Ok(Self { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i][j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i]
    }

    /// Normalized step cost of the candidate at local position `i`.
    pub fn step_cost(&self, i: usize) -> f64 {
        step_cost_from_row(self.row(i), i)
    }
}

/// `(1 / (m - 1)) * sum_{j != i} min(0, row[j])^2`; zero for a lone candidate.
pub fn step_cost_from_row(row: &[f64], i: usize) -> f64 {
    let m = row.len();
    if m < 2 {
        return 0.0;
    }
    let sum: f64 = row
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, &r)| r.min(0.0).powi(2))
        .sum();
    sum / (m - 1) as f64
}

/// PLR cost of choosing `candidate` next from `state`.
pub fn plr_step_cost(candidate: usize, state: &SearchState) -> Result<f64> {
    let pos = state.position_of(candidate)?;
    let m = state.residuals.len();
    if m < 2 {
        return Ok(0.0);
    }
    let prepared = state
        .residuals
        .iter()
        .map(|c| prepare(c))
        .collect::<Result<Vec<_>>>()?;
    let mut buf = Vec::new();
    let mut row = vec![0.0; m];
    for j in 0..m {
        if j != pos {
            row[j] = ratio(&prepared[pos], &prepared[j], &mut buf)?;
        }
    }
    Ok(step_cost_from_row(&row, pos))
}
