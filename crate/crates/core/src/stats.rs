//! Spearman rank correlation and the Mantel permutation test.
//!
//! Ranks are carried as doubled average ranks (`lo + hi` over a tie span of
//! 1-based positions), which are integers, and the correlation is assembled
//! from exact `i128` sums. The statistic therefore does not depend on the
//! order in which the entries are visited: relabelling the nodes of both
//! matrices reproduces `r` bit for bit.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::DistanceMatrix;
use crate::rng::{derive_seed, rng_from_seed};

pub const DEFAULT_PERMUTATIONS: usize = 999;

/// Doubled average ranks (ties share the mean of their rank span).
pub fn doubled_ranks(x: &[f64]) -> Vec<i64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0i64; x.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start;
        while end + 1 < order.len() && x[order[end + 1]] == x[order[start]] {
            end += 1;
        }
        let doubled = (start + 1 + end + 1) as i64;
        for &idx in &order[start..=end] {
            ranks[idx] = doubled;
        }
        start = end + 1;
    }
    ranks
}

/// Pearson correlation of integer vectors from exact sums.
fn exact_pearson(x: &[i64], y: &[i64]) -> Option<f64> {
    let n = x.len() as i128;
    let (mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0i128, 0i128, 0i128, 0i128, 0i128);
    for (&a, &b) in x.iter().zip(y) {
        let (a, b) = (a as i128, b as i128);
        sx += a;
        sy += b;
        sxx += a * a;
        syy += b * b;
        sxy += a * b;
    }
    let vx = n * sxx - sx * sx;
    let vy = n * syy - sy * sy;
    if vx == 0 || vy == 0 {
        return None;
    }
    let cov = n * sxy - sx * sy;
    Some((cov as f64 / ((vx as f64) * (vy as f64)).sqrt()).clamp(-1.0, 1.0))
}

pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::SizeMismatch(x.len(), y.len()));
    }
    if x.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: x.len(),
        });
    }
    exact_pearson(&doubled_ranks(x), &doubled_ranks(y))
        .ok_or_else(|| Error::NonFiniteMetric("constant input to Spearman".into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tail {
    TwoSided,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MantelResult {
    pub statistic_r: f64,
    pub p_value: f64,
    pub permutations: usize,
    pub seed: u64,
    pub tail: Tail,
}

/// Mantel test with Spearman correlation of the condensed upper triangles.
///
/// The null distribution relabels the nodes of `b` (rows and columns
/// together) with a uniform random permutation; replicate `k` draws its
/// permutation from its own derived seed. The test is two-sided on `|r|`
/// with the add-one rule, so the smallest reachable p is
/// `1 / (permutations + 1)`.
pub fn mantel(
    a: &DistanceMatrix,
    b: &DistanceMatrix,
    permutations: usize,
    seed: u64,
) -> Result<MantelResult> {
    if a.size != b.size {
        return Err(Error::SizeMismatch(a.size, b.size));
    }
    if a.size < 4 {
        return Err(Error::TooFewPoints {
            needed: 4,
            got: a.size,
        });
    }
    a.validate()?;
    b.validate()?;
    let n = a.size;
    let ranks_a = doubled_ranks(&a.condensed());
    let ranks_b = doubled_ranks(&b.condensed());
    let observed = exact_pearson(&ranks_a, &ranks_b)
        .ok_or_else(|| Error::NonFiniteMetric("constant condensed distance vector".into()))?;

    // Ranks of b as a full matrix so a relabelling only re-indexes.
    let mut rank_matrix = vec![0i64; n * n];
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            rank_matrix[i * n + j] = ranks_b[k];
            rank_matrix[j * n + i] = ranks_b[k];
            k += 1;
        }
    }

    let exceed: usize = (0..permutations)
        .into_par_iter()
        .map(|rep| {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng_from_seed(derive_seed(seed, &[rep as u64])));
            let mut permuted = Vec::with_capacity(ranks_a.len());
            for i in 0..n {
                for j in i + 1..n {
                    permuted.push(rank_matrix[perm[i] * n + perm[j]]);
                }
            }
            let r = exact_pearson(&ranks_a, &permuted).expect("variance is permutation invariant");
            usize::from(r.abs() >= observed.abs())
        })
        .sum();

    Ok(MantelResult {
        statistic_r: observed,
        p_value: (1 + exceed) as f64 / (1 + permutations) as f64,
        permutations,
        seed,
        tail: Tail::TwoSided,
    })
}
