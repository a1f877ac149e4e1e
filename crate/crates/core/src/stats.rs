//! Goodness-of-fit tests and Poisson tail bounds.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Cells with fewer observations than this are pooled in homogeneity tests.
pub const MIN_CELL_COUNT: u64 = 10;
/// Cells with smaller expected count are pooled in goodness-of-fit tests.
pub const MIN_EXPECTED: f64 = 5.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    /// Number of cells after pooling.
    pub cells: usize,
}

impl ChiSquareTest {
    fn new(statistic: f64, cells: usize) -> Self {
        let dof = cells.saturating_sub(1);
        let p_value = if dof == 0 {
            1.0
        } else if !statistic.is_finite() {
            0.0
        } else {
            ChiSquared::new(dof as f64).map(|c| c.sf(statistic)).unwrap_or(0.0)
        };
        Self {
            statistic,
            dof,
            p_value,
            cells,
        }
    }

    pub fn passes(&self, significance: f64) -> bool {
        self.p_value > significance
    }
}

/// Two-sample chi-square homogeneity test on aligned count vectors.
///
/// Cells whose combined count is below [`MIN_CELL_COUNT`] are pooled into one
/// cell; if that pool is still too small it joins the smallest kept cell.
pub fn chi_square_homogeneity(a: &[u64], b: &[u64]) -> ChiSquareTest {
    assert_eq!(a.len(), b.len(), "count vectors must be aligned");
    let mut kept: Vec<(u64, u64)> = Vec::new();
    let mut pool = (0u64, 0u64);
    for (&x, &y) in a.iter().zip(b) {
        if x + y >= MIN_CELL_COUNT {
            kept.push((x, y));
        } else {
            pool.0 += x;
            pool.1 += y;
        }
    }
    if pool.0 + pool.1 >= MIN_CELL_COUNT || kept.is_empty() {
        kept.push(pool);
    } else if pool.0 + pool.1 > 0 {
        let smallest = (0..kept.len()).min_by_key(|&i| kept[i].0 + kept[i].1).unwrap();
        kept[smallest].0 += pool.0;
        kept[smallest].1 += pool.1;
    }
    kept.retain(|c| c.0 + c.1 > 0);

    let na: u64 = kept.iter().map(|c| c.0).sum();
    let nb: u64 = kept.iter().map(|c| c.1).sum();
    if na == 0 || nb == 0 {
        return ChiSquareTest::new(0.0, 1);
    }
    let n = (na + nb) as f64;
    let mut stat = 0.0;
    for &(x, y) in &kept {
        let row = (x + y) as f64;
        let ea = row * na as f64 / n;
        let eb = row * nb as f64 / n;
        stat += (x as f64 - ea).powi(2) / ea + (y as f64 - eb).powi(2) / eb;
    }
    ChiSquareTest::new(stat, kept.len())
}

/// Chi-square goodness of fit of `observed` against cell probabilities.
///
/// Adjacent cells are merged left to right until each has expected count at
/// least [`MIN_EXPECTED`]; a short final run joins the previous cell.
pub fn chi_square_gof(observed: &[u64], probs: &[f64]) -> ChiSquareTest {
    assert_eq!(observed.len(), probs.len(), "cells must be aligned");
    let n: u64 = observed.iter().sum();
    let nf = n as f64;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let mut acc = (0.0, 0.0);
    for (&o, &p) in observed.iter().zip(probs) {
        acc.0 += o as f64;
        acc.1 += p * nf;
        if acc.1 >= MIN_EXPECTED {
            cells.push(acc);
            acc = (0.0, 0.0);
        }
    }
    if acc.0 > 0.0 || acc.1 > 0.0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += acc.0;
                last.1 += acc.1;
            }
            None => cells.push(acc),
        }
    }
    let mut stat = 0.0;
    for &(o, e) in &cells {
        if e > 0.0 {
            stat += (o - e).powi(2) / e;
        } else if o > 0.0 {
            stat = f64::INFINITY;
        }
    }
    ChiSquareTest::new(stat, cells.len())
}

/// One-sample Kolmogorov–Smirnov statistic of `sample` against `cdf`, with
/// its asymptotic p-value.
pub fn ks_test(sample: &mut [f64], cdf: impl Fn(f64) -> f64) -> (f64, f64) {
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sample.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    let sn = n.sqrt();
    (d, kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d))
}

/// Survival function of the Kolmogorov distribution.
fn kolmogorov_sf(x: f64) -> f64 {
    if x < 0.2 {
        return 1.0;
    }
    let mut s = 0.0;
    for j in 1..=100 {
        let term = (-2.0 * (j * j) as f64 * x * x).exp();
        s += if j % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// Rigorous upper bound on `P[N > k]` for `N ~ Poisson(mu)`.
///
/// For `k + 2 > mu` the tail is dominated by a geometric series starting at
/// the `k + 1` term; below that the bound is the trivial 1.
pub fn poisson_upper_tail_bound(mu: f64, k: usize) -> f64 {
    if mu <= 0.0 {
        return 0.0;
    }
    let j = (k + 1) as f64;
    let ratio = mu / (j + 1.0);
    if ratio >= 1.0 {
        return 1.0;
    }
    let ln_term = -mu + j * mu.ln() - statrs::function::gamma::ln_gamma(j + 1.0);
    (ln_term.exp() / (1.0 - ratio)).min(1.0)
}

/// Smallest `k` whose Poisson(`mu`) upper tail bound is below `tol`.
pub fn poisson_truncation(mu: f64, tol: f64) -> usize {
    let mut k = 0;
    while poisson_upper_tail_bound(mu, k) >= tol {
        k += 1;
    }
    k
}
