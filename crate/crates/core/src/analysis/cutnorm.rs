//! Cut norm of step kernels.
//!
//! For a kernel that is constant on the cells of a uniform `K`-grid,
//! `sup_{S,T} |int_{S x T} D| = max_{s,t in {0,1}^K} |s^T D t| / K^2`: the
//! objective is bilinear in the per-block fractions of `S` and `T`, so the
//! supremum is attained at a vertex of the unit box.
//!
//! Final values are evaluated with a correctly rounded sum over the selected
//! cells, so equal cell sets give bit-equal norms no matter which routine or
//! orientation found them.

use nalgebra::DMatrix;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::rng;

use super::fsum::fsum;

pub const MAX_EXACT_CUT_K: usize = 20;

// near-ties beyond this many share the same value to ~1e-9 relative
const MAX_CANDIDATES: usize = 4096;

fn check_square(d: &DMatrix<f64>) -> Result<usize> {
    let k = d.nrows();
    if k == 0 || d.ncols() != k {
        return Err(Error::InvalidArgument(format!(
            "cut norm needs a non-empty square matrix, got {}x{}",
            d.nrows(),
            d.ncols()
        )));
    }
    Ok(k)
}

/// `|sum_{i in s, j in t} d_ij| / K^2`, correctly rounded.
fn evaluate(d: &DMatrix<f64>, s: &[bool], t: &[bool]) -> f64 {
    let k = d.nrows();
    let cells = (0..k)
        .filter(|&i| s[i])
        .flat_map(|i| (0..k).filter(|&j| t[j]).map(move |j| d[(i, j)]));
    fsum(cells).abs() / (k * k) as f64
}

/// Best response: columns whose aggregate has the requested sign.
fn best_columns(col_sums: &[f64], positive: bool) -> Vec<bool> {
    col_sums
        .iter()
        .map(|&c| if positive { c > 0.0 } else { c < 0.0 })
        .collect()
}

/// Exact cut norm by enumerating all `2^K` row sets in Gray-code order and
/// solving for the best column set in closed form.
pub fn cut_norm_exact(d: &DMatrix<f64>) -> Result<f64> {
    let k = check_square(d)?;
    if k > MAX_EXACT_CUT_K {
        return Err(Error::InvalidArgument(format!(
            "exact cut norm supports K <= {MAX_EXACT_CUT_K}, got {k}"
        )));
    }
    let mut s = vec![false; k];
    let mut cols = vec![0.0f64; k];
    let mut best = 0.0f64;
    // (row set, sign) pairs whose float estimate is near the running best
    let mut candidates: Vec<(Vec<bool>, bool)> = Vec::new();
    let slack = |b: f64| b * 1e-9 + 1e-300;
    for step in 1u64..(1u64 << k) {
        let flip = step.trailing_zeros() as usize;
        s[flip] = !s[flip];
        let sign = if s[flip] { 1.0 } else { -1.0 };
        for (j, c) in cols.iter_mut().enumerate() {
            *c += sign * d[(flip, j)];
        }
        let pos: f64 = cols.iter().filter(|&&c| c > 0.0).sum();
        let neg: f64 = -cols.iter().filter(|&&c| c < 0.0).sum::<f64>();
        for (value, positive) in [(pos, true), (neg, false)] {
            if value > best + slack(best) {
                best = value;
                candidates.clear();
            }
            if value > 0.0 && value >= best - slack(best) && candidates.len() < MAX_CANDIDATES {
                candidates.push((s.clone(), positive));
            }
        }
    }
    let mut out = 0.0f64;
    for (s, positive) in &candidates {
        let col_sums: Vec<f64> = (0..k)
            .map(|j| fsum((0..k).filter(|&i| s[i]).map(|i| d[(i, j)])))
            .collect();
        let t = best_columns(&col_sums, *positive);
        out = out.max(evaluate(d, s, &t));
    }
    Ok(out)
}

/// Local search lower bound on the cut norm: alternating best responses
/// between row and column sets from `restarts` random starting row sets,
/// for both signs of the objective.
pub fn cut_norm_lower_bound(d: &DMatrix<f64>, restarts: usize, seed: u64) -> Result<f64> {
    let k = check_square(d)?;
    if restarts == 0 {
        return Err(Error::InvalidArgument("restarts must be at least 1".into()));
    }
    let mut rng = rng::from_seed(seed);
    let mut best = 0.0f64;
    for _ in 0..restarts {
        let start: Vec<bool> = (0..k).map(|_| rng.random::<bool>()).collect();
        for positive in [true, false] {
            let mut s = start.clone();
            let mut t = vec![false; k];
            for _ in 0..(4 * k + 8) {
                let col_sums: Vec<f64> = (0..k)
                    .map(|j| (0..k).filter(|&i| s[i]).map(|i| d[(i, j)]).sum())
                    .collect();
                t = best_columns(&col_sums, positive);
                let row_sums: Vec<f64> = (0..k)
                    .map(|i| (0..k).filter(|&j| t[j]).map(|j| d[(i, j)]).sum())
                    .collect();
                let next = best_columns(&row_sums, positive);
                if next == s {
                    break;
                }
                s = next;
            }
            best = best.max(evaluate(d, &s, &t));
        }
    }
    Ok(best)
}
