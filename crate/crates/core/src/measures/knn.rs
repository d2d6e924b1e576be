//! Kraskov k-nearest-neighbour mutual information between a block of
//! variables and a single variable, using max-norm neighbourhoods.

use super::{residual, MeasureConfig};
use crate::error::{Error, Result};
use crate::search::SearchState;
use crate::stats;

/// Digamma function for `x > 0`: upward recurrence to `x >= 6`, then the
/// asymptotic expansion (truncation error below 1e-12 there).
pub fn digamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let mut x = x;
    let mut acc = 0.0;
    while x < 6.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2
                                * (1.0 / 240.0
                                    - inv2 * (5.0 / 660.0 - inv2 * (691.0 / 32760.0 - inv2 / 12.0))))));
    acc + x.ln() - 0.5 * inv - series
}

fn scaled(col: &[f64]) -> Vec<f64> {
    let m = stats::mean(col);
    let var = stats::variance(col);
    let sd = if var > 0.0 { var.sqrt() } else { 1.0 };
    col.iter().map(|v| (v - m) / sd).collect()
}

/// `psi(k) - <psi(n_x + 1) + psi(n_y + 1)> + psi(N)`.
///
/// `x_block` holds one vector per column. Every column (and `y`) is
/// standardized before distances are taken so the max-norm compares like
/// scales.
pub fn knn_mi<C: AsRef<[f64]>>(x_block: &[C], y: &[f64], k: usize) -> Result<f64> {
    let n = y.len();
    if k < 1 || k >= n {
        return Err(Error::InvalidK { k, n });
    }
    if x_block.is_empty() {
        return Err(Error::InvalidDataset("empty regressor block".into()));
    }
    for c in x_block {
        if c.as_ref().len() != n {
            return Err(Error::LengthMismatch { left: c.as_ref().len(), right: n });
        }
    }
    let xs: Vec<Vec<f64>> = x_block.iter().map(|c| scaled(c.as_ref())).collect();
    let ys = scaled(y);
    let psi: Vec<f64> = (0..=n).map(|i| if i == 0 { 0.0 } else { digamma(i as f64) }).collect();

    let mut dx = vec![0.0; n];
    let mut dy = vec![0.0; n];
    let mut dz = Vec::with_capacity(n);
    let mut acc = 0.0;
    for i in 0..n {
        dx.iter_mut().for_each(|d| *d = 0.0);
        for col in &xs {
            let xi = col[i];
            for (d, &v) in dx.iter_mut().zip(col) {
                let a = (v - xi).abs();
                if a > *d {
                    *d = a;
                }
            }
        }
        let yi = ys[i];
        for (d, &v) in dy.iter_mut().zip(&ys) {
            *d = (v - yi).abs();
        }
        dz.clear();
        dz.extend((0..n).filter(|&j| j != i).map(|j| dx[j].max(dy[j])));
        let (_, eps, _) = dz.select_nth_unstable_by(k - 1, f64::total_cmp);
        let eps = *eps;
        let mut nx = 0;
        let mut ny = 0;
        for j in (0..n).filter(|&j| j != i) {
            if dx[j] < eps {
                nx += 1;
            }
            if dy[j] < eps {
                ny += 1;
            }
        }
        acc += psi[nx + 1] + psi[ny + 1];
    }
    Ok(psi[k] + psi[n] - acc / n as f64)
}

/// Mutual information between the candidate's residual column and the
/// remaining residuals after regressing the candidate out of them, clamped
/// at zero.
pub fn knn_step_cost(candidate: usize, state: &SearchState, config: &MeasureConfig) -> Result<f64> {
    let pos = state.position_of(candidate)?;
    knn_cost(&state.residuals, pos, config)
}

pub(crate) fn knn_cost(columns: &[Vec<f64>], pos: usize, config: &MeasureConfig) -> Result<f64> {
    if columns.len() < 2 {
        return Ok(0.0);
    }
    let y = &columns[pos];
    let block = columns
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != pos)
        .map(|(_, col)| residual(col, y))
        .collect::<Result<Vec<_>>>()?;
    let k = config.k_rule.k_for(y.len());
    Ok(knn_mi(&block, y, k)?.max(0.0))
}
