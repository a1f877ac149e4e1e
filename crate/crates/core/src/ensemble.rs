//! Partition functions, count laws and the expected packing density.
//!
//! For a target set with proposal measure `m`, the canonical partition
//! function is `Ẑ(k) = m^k q_k / k!`, where `q_k` is the probability that `k`
//! independent proposals all land in the target and are pairwise compatible
//! (for a plain region `q_k = p_k`). The grand canonical quantities follow:
//! `Z(λ) = Σ λ^k Ẑ(k)`, `P[|X| = k] = λ^k Ẑ(k) / Z(λ)`.
//!
//! The expected density is estimated three ways: from the series, directly
//! from exact samples, and through the externally uncovered set,
//! `α = λ E[1 / Z_T(λ)]`.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::montecarlo::{run_batches, stream_count, sub_seed, zero_count_upper_bound, Estimate, Moments};
use crate::regions::{Point, Region};
use crate::sampler::{conflicts, sample_poisson_hard_core, BlockedSet, Domain, Exclusion, Fugacity};
use crate::stats::{chi_square_gof, poisson_truncation, poisson_upper_tail_bound, ChiSquareTest};

/// Admissible Poisson-majorant tail mass of a truncated series.
pub const REL_TOL: f64 = 1e-9;
/// Default rejection budget per exact sample.
pub const DEFAULT_BUDGET: u64 = 1_000_000;
/// Confidence level of the one-sided bound attached to zero estimates.
pub const ZERO_BOUND_ALPHA: f64 = 0.05;

fn trial<D: Domain, R: Rng + ?Sized>(
    domain: &D,
    exclusion: &Exclusion,
    k: usize,
    rng: &mut R,
    pts: &mut Vec<Point>,
) -> bool {
    pts.clear();
    for _ in 0..k {
        let p = domain.sample_proposal(rng);
        if !domain.accepts(&p) || conflicts(pts, &p, exclusion) {
            return false;
        }
        pts.push(p);
    }
    true
}

fn count_hits<D: Domain, R: Rng + ?Sized>(
    domain: &D,
    exclusion: &Exclusion,
    k: usize,
    n: u64,
    rng: &mut R,
) -> u64 {
    let mut pts = Vec::with_capacity(k);
    (0..n).filter(|_| trial(domain, exclusion, k, rng, &mut pts)).count() as u64
}

fn is_exact(domain: &impl Domain, k: usize) -> bool {
    k == 0 || (k == 1 && domain.accepts_all())
}

/// Estimate of `q_k`: the probability that `k` uniform proposals are all in
/// the target and pairwise compatible. `q_0` (and `q_1` on a plain region)
/// is exactly 1.
pub fn estimate_p_k<D: Domain>(domain: &D, exclusion: &Exclusion, k: usize, n: u64, seed: u64) -> Estimate {
    if is_exact(domain, k) {
        return Estimate::exact(1.0);
    }
    let hits: u64 = run_batches(seed, n, |rng, count| count_hits(domain, exclusion, k, count, rng))
        .into_iter()
        .sum();
    Estimate::proportion(hits, n, seed, stream_count(n))
}

/// One coefficient `Ẑ(k)` of the series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ZhatTerm {
    pub k: usize,
    pub value: f64,
    pub stderr: f64,
    /// One-sided 95% upper bound when nothing was observed; `value` otherwise.
    pub upper: f64,
    pub p_k: f64,
    pub n_samples: u64,
}

/// Truncated canonical partition function `(Ẑ(k))_{k ≤ truncation_k}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartitionSeries {
    pub terms: Vec<ZhatTerm>,
    pub truncation_k: usize,
    /// Proposal measure `m` (volume, or normalized spherical measure).
    pub measure: f64,
    /// Divisor turning `E|X|` into a density: the volume in `R^d`, 1 on the sphere.
    pub normalizer: f64,
    pub region: String,
    pub exclusion: Exclusion,
    pub seed: u64,
}

/// A series-derived quantity with propagated Monte Carlo error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: f64,
    pub stderr: f64,
    /// Value with every unobserved coefficient replaced by its upper bound.
    pub upper: f64,
}

/// Assembles `Ẑ(0..=k_max)`; `hits(k, n)` runs `n` trials for `q_k`.
fn build_series<D: Domain>(
    domain: &D,
    k_max: usize,
    n_of_k: impl Fn(usize) -> u64,
    mut hits: impl FnMut(usize, u64) -> u64,
) -> Vec<ZhatTerm> {
    let m = domain.proposal_measure();
    let mut terms = Vec::with_capacity(k_max + 1);
    // Once a q_k is observed as zero, q_j ≤ q_k bounds every later term.
    let mut zero_bound: Option<f64> = None;
    let mut scale = 1.0; // m^k / k!
    for k in 0..=k_max {
        if k > 0 {
            scale *= m / k as f64;
        }
        let term = if is_exact(domain, k) {
            ZhatTerm {
                k,
                value: scale,
                stderr: 0.0,
                upper: scale,
                p_k: 1.0,
                n_samples: 0,
            }
        } else if let Some(ub) = zero_bound {
            ZhatTerm {
                k,
                value: 0.0,
                stderr: 0.0,
                upper: ub * scale,
                p_k: 0.0,
                n_samples: 0,
            }
        } else {
            let n = n_of_k(k).max(1);
            let hits = hits(k, n);
            let p = hits as f64 / n as f64;
            let se = (p * (1.0 - p) / n as f64).sqrt();
            let upper = if hits == 0 {
                let ub = zero_count_upper_bound(n, ZERO_BOUND_ALPHA);
                zero_bound = Some(ub);
                ub * scale
            } else {
                p * scale
            };
            ZhatTerm {
                k,
                value: p * scale,
                stderr: se * scale,
                upper,
                p_k: p,
                n_samples: n,
            }
        };
        terms.push(term);
    }
    terms
}

/// Monte Carlo series `Ẑ(0..=k_max)` with `n_per_k` samples per coefficient.
pub fn zhat_series(
    region: &Region,
    exclusion: &Exclusion,
    k_max: usize,
    n_per_k: u64,
    seed: u64,
) -> PartitionSeries {
    zhat_series_on(region, exclusion, k_max, |_| n_per_k, seed, region.to_string(), density_normalizer(region))
}

/// Series on any [`Domain`] with a per-`k` sample schedule.
pub fn zhat_series_on<D: Domain>(
    domain: &D,
    exclusion: &Exclusion,
    k_max: usize,
    n_of_k: impl Fn(usize) -> u64,
    seed: u64,
    label: String,
    normalizer: f64,
) -> PartitionSeries {
    let terms = build_series(domain, k_max, n_of_k, |k, n| {
        run_batches(sub_seed(seed, k as u64), n, |rng, count| {
            count_hits(domain, exclusion, k, count, rng)
        })
        .into_iter()
        .sum()
    });
    PartitionSeries {
        terms,
        truncation_k: k_max,
        measure: domain.proposal_measure(),
        normalizer,
        region: label,
        exclusion: *exclusion,
        seed,
    }
}

/// Sequential series estimate drawing from a caller-supplied RNG (used inside
/// already-parallel outer loops).
fn zhat_series_seq<D: Domain, R: Rng + ?Sized>(
    domain: &D,
    exclusion: &Exclusion,
    k_max: usize,
    n_of_k: impl Fn(usize) -> u64,
    rng: &mut R,
) -> Vec<ZhatTerm> {
    build_series(domain, k_max, n_of_k, |k, n| count_hits(domain, exclusion, k, n, rng))
}

/// `E|X|` divisor: volume for Euclidean regions, 1 on the sphere.
pub fn density_normalizer(region: &Region) -> f64 {
    match region {
        Region::Euclidean(r) => r.volume(),
        Region::Spherical(_) => 1.0,
    }
}

/// Smallest truncation whose Poisson(`λ m`) majorant tail is below [`REL_TOL`].
pub fn truncation_for(lambda: Fugacity, measure: f64) -> usize {
    poisson_truncation(lambda.value() * measure, REL_TOL)
}

struct Sums {
    z: f64,
    z_var: f64,
    z_upper: f64,
    n1: f64,
}

impl PartitionSeries {
    fn check_truncation(&self, lambda: Fugacity) -> Result<()> {
        let tail = poisson_upper_tail_bound(lambda.value() * self.measure, self.truncation_k);
        if tail >= REL_TOL {
            return Err(Error::TruncationInsufficient {
                k_max: self.truncation_k,
                tail,
                rel_tol: REL_TOL,
            });
        }
        Ok(())
    }

    fn weights(&self, lambda: Fugacity) -> Vec<f64> {
        let ll = lambda.value().ln();
        self.terms.iter().map(|t| (t.k as f64 * ll).exp()).collect()
    }

    fn sums(&self, lambda: Fugacity) -> Result<Sums> {
        self.check_truncation(lambda)?;
        let w = self.weights(lambda);
        let mut s = Sums {
            z: 0.0,
            z_var: 0.0,
            z_upper: 0.0,
            n1: 0.0,
        };
        for (t, w) in self.terms.iter().zip(&w) {
            s.z += w * t.value;
            s.z_var += (w * t.stderr).powi(2);
            s.z_upper += w * t.upper;
            s.n1 += t.k as f64 * w * t.value;
        }
        Ok(s)
    }

    /// `Z(λ) = Σ λ^k Ẑ(k)`.
    pub fn z(&self, lambda: Fugacity) -> Result<SeriesValue> {
        let s = self.sums(lambda)?;
        Ok(SeriesValue {
            value: s.z,
            stderr: s.z_var.sqrt(),
            upper: s.z_upper,
        })
    }

    /// `E|X|` under the grand canonical law, `Σ k λ^k Ẑ(k) / Z(λ)`.
    pub fn mean_count(&self, lambda: Fugacity) -> Result<SeriesValue> {
        let s = self.sums(lambda)?;
        let mean = s.n1 / s.z;
        let w = self.weights(lambda);
        // Delta method: ∂mean/∂Ẑ(k) = λ^k (k − mean) / Z.
        let var: f64 = self
            .terms
            .iter()
            .zip(&w)
            .map(|(t, w)| (w * (t.k as f64 - mean) / s.z * t.stderr).powi(2))
            .sum();
        let upper_n1: f64 = self.terms.iter().zip(&w).map(|(t, w)| t.k as f64 * w * t.upper).sum();
        Ok(SeriesValue {
            value: mean,
            stderr: var.sqrt(),
            upper: upper_n1 / s.z,
        })
    }

    /// `P[|X| = k]` for `k ≤ truncation_k`.
    pub fn count_law(&self, lambda: Fugacity) -> Result<Vec<f64>> {
        let s = self.sums(lambda)?;
        let w = self.weights(lambda);
        Ok(self.terms.iter().zip(&w).map(|(t, w)| w * t.value / s.z).collect())
    }

    /// `e^{λ m}`, the Poisson majorant of `Z(λ)`.
    pub fn z_majorant(&self, lambda: Fugacity) -> f64 {
        (lambda.value() * self.measure).exp()
    }

    pub fn values(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.value).collect()
    }
}

/// `Z(λ)` from a series; fails when the series is truncated too early.
pub fn z_of_lambda(series: &PartitionSeries, lambda: Fugacity) -> Result<SeriesValue> {
    series.z(lambda)
}

/// Expected density from the series: `E|X| / normalizer`.
pub fn alpha_series(series: &PartitionSeries, lambda: Fugacity) -> Result<SeriesValue> {
    let m = series.mean_count(lambda)?;
    let s = series.normalizer;
    Ok(SeriesValue {
        value: m.value / s,
        stderr: m.stderr / s,
        upper: m.upper / s,
    })
}

/// Histogram of `|X|` over `n` exact samples.
pub fn sample_counts(
    region: &Region,
    exclusion: &Exclusion,
    lambda: Fugacity,
    n: u64,
    seed: u64,
    budget: u64,
) -> Result<Vec<u64>> {
    let parts = run_batches(seed, n, |rng, count| -> Result<Vec<u64>> {
        let mut h = Vec::new();
        for _ in 0..count {
            let x = sample_poisson_hard_core(region, exclusion, lambda, rng, budget)?;
            if h.len() <= x.len() {
                h.resize(x.len() + 1, 0);
            }
            h[x.len()] += 1;
        }
        Ok(h)
    });
    let mut hist: Vec<u64> = vec![0];
    for part in parts {
        let part = part?;
        if hist.len() < part.len() {
            hist.resize(part.len(), 0);
        }
        for (a, b) in hist.iter_mut().zip(part) {
            *a += b;
        }
    }
    Ok(hist)
}

fn histogram_moments(hist: &[u64], scale: f64) -> Moments {
    let mut m = Moments::default();
    for (k, &c) in hist.iter().enumerate() {
        let x = k as f64 / scale;
        m.n += c;
        m.sum += c as f64 * x;
        m.sum_sq += c as f64 * x * x;
    }
    m
}

/// Direct estimate of the expected density: mean of `|X| / normalizer` over
/// `n` exact samples.
pub fn alpha_direct(
    region: &Region,
    exclusion: &Exclusion,
    lambda: Fugacity,
    n: u64,
    seed: u64,
    budget: u64,
) -> Result<Estimate> {
    let hist = sample_counts(region, exclusion, lambda, n, seed, budget)?;
    Ok(histogram_moments(&hist, density_normalizer(region)).into_estimate(seed, stream_count(n)))
}

/// Empirical count law against a series prediction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountDistribution {
    pub counts: Vec<u64>,
    pub frequencies: Vec<f64>,
    pub predicted: Vec<f64>,
    pub test: ChiSquareTest,
}

/// Empirical `P[|X| = k]` from `n` exact samples, compared with the law
/// `λ^k Ẑ(k) / Z(λ)` of `series` by a chi-square goodness-of-fit test.
pub fn count_distribution(
    region: &Region,
    exclusion: &Exclusion,
    lambda: Fugacity,
    series: &PartitionSeries,
    n: u64,
    seed: u64,
    budget: u64,
) -> Result<CountDistribution> {
    let mut counts = sample_counts(region, exclusion, lambda, n, seed, budget)?;
    let mut predicted = series.count_law(lambda)?;
    let len = counts.len().max(predicted.len());
    counts.resize(len, 0);
    predicted.resize(len, 0.0);
    let total = n.max(1) as f64;
    Ok(CountDistribution {
        frequencies: counts.iter().map(|&c| c as f64 / total).collect(),
        test: chi_square_gof(&counts, &predicted),
        counts,
        predicted,
    })
}

/// Estimators built on the externally uncovered set `T(X, v)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NeighbourhoodEstimates {
    /// `λ · E[1 / Z_T(λ)]` (scaled to a density), with `Z_T` from a nested series.
    pub alpha_via_t: Estimate,
    /// `λ · P[X has no point in the open neighbourhood of v]`, the same
    /// quantity without nesting.
    pub alpha_empty_window: Estimate,
    /// `λ · E[e^{−λ t(X, v)}]`, a lower bound on the density.
    pub exp_lower_bound: Estimate,
    /// `E[E|Y_T|]`: expected count of the process on `T`, from the nested series.
    pub mean_count_in_t: Estimate,
    /// `E|X ∩ N°(v)|`, counted directly.
    pub mean_count_in_window: Estimate,
}

/// Inner sample count for `q_k` on `T`: grows like `k²` so that the
/// relative error of `Ẑ_T(k)` stays roughly level.
pub fn inner_samples(n_inner: u64, k: usize) -> u64 {
    n_inner * (k.max(1) as u64).pow(2)
}

/// Nested estimate of `α` through `T(X, v)`: `n_outer` pairs `(X, v)` with
/// `X` exact and `v` uniform on the region; for each, `Z_T(λ)` and the
/// expected count on `T` come from a series with [`inner_samples`] per term.
pub fn alpha_via_t(
    region: &Region,
    exclusion: &Exclusion,
    lambda: Fugacity,
    n_outer: u64,
    n_inner: u64,
    seed: u64,
    budget: u64,
) -> Result<NeighbourhoodEstimates> {
    let lam = lambda.value();
    let scale = region.measure() / density_normalizer(region);
    let parts = run_batches(seed, n_outer, |rng, count| -> Result<[Moments; 5]> {
        let mut acc = [Moments::default(); 5];
        for _ in 0..count {
            let x = sample_poisson_hard_core(region, exclusion, lambda, rng, budget)?;
            let v = region.sample_uniform(rng);
            let t = BlockedSet::externally_uncovered(&x, region, &v, *exclusion)?;
            let m = t.proposal_measure();
            let k_max = truncation_for(lambda, m);
            let terms = zhat_series_seq(&t, exclusion, k_max, |k| inner_samples(n_inner, k), rng);
            let (mut z, mut n1) = (0.0, 0.0);
            for term in &terms {
                let w = lam.powi(term.k as i32) * term.value;
                z += w;
                n1 += term.k as f64 * w;
            }
            let t_measure = terms.get(1).map_or(0.0, |t| t.value);
            let in_window = x.iter().filter(|y| exclusion.in_open_neighbourhood(&v, y)).count();
            acc[0].push(lam * scale / z);
            acc[1].push(if in_window == 0 { lam * scale } else { 0.0 });
            acc[2].push(lam * scale * (-lam * t_measure).exp());
            acc[3].push(n1 / z);
            acc[4].push(in_window as f64);
        }
        Ok(acc)
    });
    let mut total = [Moments::default(); 5];
    for part in parts {
        let part = part?;
        for (a, b) in total.iter_mut().zip(part) {
            *a = a.merge(b);
        }
    }
    let streams = stream_count(n_outer);
    let est = |m: Moments| m.into_estimate(seed, streams);
    Ok(NeighbourhoodEstimates {
        alpha_via_t: est(total[0]),
        alpha_empty_window: est(total[1]),
        exp_lower_bound: est(total[2]),
        mean_count_in_t: est(total[3]),
        mean_count_in_window: est(total[4]),
    })
}
