//! Edge pruning for a known causal order by adaptive-lasso regression of
//! each feature on its predecessors.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CausalOrder, Dataset};
use crate::stats;

const GRID_POINTS: usize = 50;
const GRID_RATIO: f64 = 1e-4;
const ZERO_THRESHOLD: f64 = 1e-6;
const TOL: f64 = 1e-8;
const MAX_SWEEPS: usize = 10_000;

/// `b_hat[effect][cause]` on the data scale, with the nonzero pattern
/// collected in `edges` as `(cause, effect)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedDag {
    pub b_hat: Vec<Vec<f64>>,
    pub edges: BTreeSet<(usize, usize)>,
}

impl WeightedDag {
    pub fn empty(p: usize) -> Self {
        Self { b_hat: vec![vec![0.0; p]; p], edges: BTreeSet::new() }
    }

    fn from_matrix(b_hat: Vec<Vec<f64>>) -> Self {
        let mut edges = BTreeSet::new();
        for (i, row) in b_hat.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    edges.insert((j, i));
                }
            }
        }
        Self { b_hat, edges }
    }
}

/// Standardized regression problem in Gram form.
struct Problem {
    gram: DMatrix<f64>,
    xty: DVector<f64>,
    n: f64,
}

impl Problem {
    fn new(xs: &[&[f64]], y: &[f64]) -> Self {
        let n = y.len();
        let m = xs.len();
        let gram = DMatrix::from_fn(m, m, |a, b| dot(xs[a], xs[b]) / n as f64);
        let xty = DVector::from_fn(m, |a, _| dot(xs[a], y) / n as f64);
        Self { gram, xty, n: n as f64 }
    }

    /// Residual sum of squares for coefficients `beta`, given `y'y / n = 1`.
    fn rss(&self, beta: &DVector<f64>) -> f64 {
        let fit = beta.dot(&(&self.gram * beta));
        (self.n * (1.0 - 2.0 * beta.dot(&self.xty) + fit)).max(f64::MIN_POSITIVE)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn soft(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

/// Cyclic coordinate descent for `(1/2n)|y - Xb|^2 + lambda * sum_j w_j |b_j|`
/// in Gram form, warm-started from `beta`.
fn coordinate_descent(gram: &DMatrix<f64>, xty: &DVector<f64>, penalty: &[f64], beta: &mut DVector<f64>) {
    let m = beta.len();
    for _ in 0..MAX_SWEEPS {
        let mut max_change: f64 = 0.0;
        for j in 0..m {
            let gjj = gram[(j, j)];
            if gjj <= 0.0 || !penalty[j].is_finite() {
                beta[j] = 0.0;
                continue;
            }
            let partial = xty[j] - gram.row(j).transpose().dot(beta) + gjj * beta[j];
            let next = soft(partial, penalty[j]) / gjj;
            max_change = max_change.max((next - beta[j]).abs());
            beta[j] = next;
        }
        if max_change < TOL {
            break;
        }
    }
}

fn ols(problem: &Problem, feature: usize) -> Result<DVector<f64>> {
    let eig = problem.gram.clone().symmetric_eigenvalues();
    let (lo, hi) = eig.iter().fold((f64::INFINITY, 0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if lo <= 1e-10 * hi.max(1.0) {
        return Err(Error::SingularDesign { feature });
    }
    problem
        .gram
        .clone()
        .cholesky()
        .map(|c| c.solve(&problem.xty))
        .ok_or(Error::SingularDesign { feature })
}

/// Adaptive lasso of standardized `y` on standardized `xs` at one fixed
/// penalty level. Weights come from the OLS fit; `lambda = 0` gives OLS.
/// Returns coefficients on the standardized scale.
pub fn adaptive_lasso(xs: &[&[f64]], y: &[f64], lambda: f64) -> Result<Vec<f64>> {
    let (xs_std, y_std) = standardize_problem(xs, y)?;
    let refs: Vec<&[f64]> = xs_std.iter().map(Vec::as_slice).collect();
    let problem = Problem::new(&refs, &y_std);
    let beta_ols = ols(&problem, 0)?;
    let penalty: Vec<f64> = beta_ols.iter().map(|b| lambda / b.abs()).collect();
    let mut beta = beta_ols.clone();
    coordinate_descent(&problem.gram, &problem.xty, &penalty, &mut beta);
    Ok(beta.iter().copied().collect())
}

fn standardize_problem(xs: &[&[f64]], y: &[f64]) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let xs_std = xs.iter().map(|x| stats::standardized(x)).collect::<Result<Vec<_>>>()?;
    Ok((xs_std, stats::standardized(y)?))
}

/// Adaptive lasso with the penalty chosen by BIC over a 50-point log grid.
/// Returns standardized-scale coefficients.
fn select_by_bic(problem: &Problem, feature: usize) -> Result<DVector<f64>> {
    let m = problem.xty.len();
    let beta_ols = ols(problem, feature)?;
    // absorbing the weights into the penalty: lambda / |beta_ols_j|
    let inv_w: Vec<f64> = beta_ols.iter().map(|b| 1.0 / b.abs()).collect();
    let lambda_max = (0..m)
        .filter(|&j| inv_w[j].is_finite())
        .map(|j| problem.xty[j].abs() / inv_w[j])
        .fold(0.0, f64::max);
    if lambda_max == 0.0 {
        return Ok(DVector::zeros(m));
    }
    let mut beta = DVector::zeros(m);
    let mut best: Option<(f64, DVector<f64>)> = None;
    for g in 0..GRID_POINTS {
        let frac = g as f64 / (GRID_POINTS - 1) as f64;
        let lambda = lambda_max * GRID_RATIO.powf(frac);
        let penalty: Vec<f64> = inv_w.iter().map(|w| lambda * w).collect();
        coordinate_descent(&problem.gram, &problem.xty, &penalty, &mut beta);
        let df = beta.iter().filter(|b| b.abs() >= ZERO_THRESHOLD).count() as f64;
        let bic = problem.n * (problem.rss(&beta) / problem.n).ln() + df * problem.n.ln();
        if best.as_ref().is_none_or(|(b, _)| bic < *b) {
            best = Some((bic, beta.clone()));
        }
    }
    Ok(best.map(|(_, b)| b).expect("grid is nonempty"))
}

/// Regresses every feature on its predecessors in `order` and keeps the
/// coefficients that survive the BIC-selected adaptive lasso.
pub fn estimate_adjacency(data: &Dataset, order: &CausalOrder) -> Result<WeightedDag> {
    let p = data.n_features();
    if order.order.len() != p {
        return Err(Error::LengthMismatch { left: order.order.len(), right: p });
    }
    if data.n_samples() <= p {
        return Err(Error::InvalidDataset(format!(
            "need more samples than features ({} <= {p})",
            data.n_samples()
        )));
    }
    let sds: Vec<f64> = data.columns().iter().map(|c| stats::variance(c).sqrt()).collect();
    let std_cols = data
        .columns()
        .iter()
        .enumerate()
        .map(|(j, c)| stats::standardized(c).map_err(|_| Error::ZeroVarianceColumn(j)))
        .collect::<Result<Vec<_>>>()?;

    let mut b_hat = vec![vec![0.0; p]; p];
    for (k, &target) in order.order.iter().enumerate().skip(1) {
        let preds = &order.order[..k];
        let xs: Vec<&[f64]> = preds.iter().map(|&j| std_cols[j].as_slice()).collect();
        let problem = Problem::new(&xs, &std_cols[target]);
        let beta = select_by_bic(&problem, target)?;
        for (&j, &bj) in preds.iter().zip(beta.iter()) {
            if bj.abs() >= ZERO_THRESHOLD {
                b_hat[target][j] = bj * sds[target] / sds[j];
            }
        }
    }
    Ok(WeightedDag::from_matrix(b_hat))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn uniform(rng: &mut ChaCha8Rng, n: usize, sd: f64) -> Vec<f64> {
        (0..n).map(|_| (rng.random::<f64>() - 0.5) * sd * 12f64.sqrt()).collect()
    }

    #[test]
    fn first_in_order_has_no_parents() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = uniform(&mut rng, 500, 1.0);
        let b: Vec<f64> = a.iter().zip(uniform(&mut rng, 500, 0.5)).map(|(x, e)| x + e).collect();
        let data = Dataset::with_default_names(vec![a, b]).unwrap();
        let order = CausalOrder::new(vec![1, 0], vec![0.0, 0.0]).unwrap();
        let dag = estimate_adjacency(&data, &order).unwrap();
        assert!(dag.b_hat[1].iter().all(|&v| v == 0.0));
        assert!(dag.edges.iter().all(|&(c, e)| c == 1 && e == 0));
    }

    #[test]
    fn zero_penalty_is_ols() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x1 = uniform(&mut rng, 2000, 1.0);
        let x2: Vec<f64> = x1.iter().zip(uniform(&mut rng, 2000, 1.0)).map(|(a, e)| 0.5 * a + e).collect();
        let y: Vec<f64> = (0..2000).map(|i| 0.7 * x1[i] - 0.2 * x2[i] + 0.3 * rng.random::<f64>()).collect();
        let beta = adaptive_lasso(&[&x1, &x2], &y, 0.0).unwrap();
        // OLS oracle via normal equations on standardized data
        let s1 = stats::standardized(&x1).unwrap();
        let s2 = stats::standardized(&x2).unwrap();
        let sy = stats::standardized(&y).unwrap();
        let n = 2000.0;
        let (a, b, c) = (dot(&s1, &s1) / n, dot(&s1, &s2) / n, dot(&s2, &s2) / n);
        let (u, v) = (dot(&s1, &sy) / n, dot(&s2, &sy) / n);
        let det = a * c - b * b;
        let expect = [(c * u - b * v) / det, (a * v - b * u) / det];
        for (got, want) in beta.iter().zip(expect) {
            assert!((got - want).abs() < 1e-6, "{got} vs {want}");
        }
        let heavy = adaptive_lasso(&[&x1, &x2], &y, 10.0).unwrap();
        assert!(heavy.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn collinear_predecessors_are_singular() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = uniform(&mut rng, 300, 1.0);
        let b: Vec<f64> = a.iter().map(|v| 2.0 * v).collect();
        let c: Vec<f64> = a.iter().zip(uniform(&mut rng, 300, 1.0)).map(|(x, e)| x + e).collect();
        let data = Dataset::with_default_names(vec![a, b, c]).unwrap();
        let order = CausalOrder::new(vec![0, 1, 2], vec![0.0; 3]).unwrap();
        assert_eq!(estimate_adjacency(&data, &order), Err(Error::SingularDesign { feature: 2 }));
    }

    #[test]
    fn chain_recovery_and_order_respect() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 100_000;
        let x0 = uniform(&mut rng, n, 1.0);
        let x1: Vec<f64> = x0.iter().zip(uniform(&mut rng, n, 0.1)).map(|(a, e)| a + e).collect();
        let x2: Vec<f64> = x1.iter().zip(uniform(&mut rng, n, 0.1)).map(|(a, e)| a + e).collect();
        let data = Dataset::with_default_names(vec![x2, x0, x1]).unwrap();
        let order = CausalOrder::new(vec![1, 2, 0], vec![0.0; 3]).unwrap();
        let dag = estimate_adjacency(&data, &order).unwrap();
        assert_eq!(dag.edges, BTreeSet::from([(1, 2), (2, 0)]));
        assert!((dag.b_hat[2][1] - 1.0).abs() < 0.05);
        assert!((dag.b_hat[0][2] - 1.0).abs() < 0.05);
    }

    #[test]
    fn independent_columns_mostly_empty() {
        let mut hits = 0;
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
            let cols = (0..3).map(|_| uniform(&mut rng, 10_000, 1.0)).collect();
            let data = Dataset::with_default_names(cols).unwrap();
            let order = CausalOrder::new(vec![0, 1, 2], vec![0.0; 3]).unwrap();
            if estimate_adjacency(&data, &order).unwrap().edges.is_empty() {
                hits += 1;
            }
        }
        assert!(hits >= 18, "{hits} of 20 empty");
    }
}
