//! Reproducible parallel Monte Carlo plumbing.
//!
//! Work is cut into fixed-size batches; batch `i` of an experiment keyed by
//! `seed` draws from ChaCha8 stream `i` of that seed. Batches run on the
//! rayon pool and their partial statistics are merged in batch order, so a
//! result depends on `(seed, n)` only, never on the thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub type McRng = ChaCha8Rng;

/// Samples per RNG stream.
pub const BATCH: u64 = 2048;

/// RNG for stream `stream` of experiment `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> McRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Derives an independent experiment seed from a parent seed and a tag
/// (splitmix64 finalizer).
pub fn sub_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Number of streams used for `n` samples.
pub fn stream_count(n: u64) -> u64 {
    n.div_ceil(BATCH).max(1)
}

/// Runs `n` samples in batches; `f(rng, count)` handles one batch. Results
/// come back in batch order.
pub fn run_batches<T, F>(seed: u64, n: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut McRng, u64) -> T + Sync,
{
    let streams = stream_count(n);
    (0..streams)
        .into_par_iter()
        .map(|i| {
            let count = if n == 0 { 0 } else { BATCH.min(n - i * BATCH) };
            let mut rng = stream_rng(seed, i);
            f(&mut rng, count)
        })
        .collect()
}

/// Running first and second moments.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Moments {
    pub n: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(mut self, other: Moments) -> Moments {
        self.n += other.n;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        self
    }

    pub fn mean(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.sum / self.n as f64
        }
    }

    /// Sample variance (unbiased).
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as f64;
        ((self.sum_sq - self.sum * self.sum / n) / (n - 1.0)).max(0.0)
    }

    pub fn stderr(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            (self.variance() / self.n as f64).sqrt()
        }
    }

    pub fn into_estimate(self, seed: u64, streams: u64) -> Estimate {
        Estimate {
            value: self.mean(),
            stderr: self.stderr(),
            n_samples: self.n,
            seed,
            streams,
        }
    }
}

/// A Monte Carlo output.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub n_samples: u64,
    pub seed: u64,
    pub streams: u64,
}

impl Estimate {
    /// An exact value (zero standard error, no sampling).
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            stderr: 0.0,
            n_samples: 0,
            seed: 0,
            streams: 0,
        }
    }

    /// Binomial proportion estimate.
    pub fn proportion(hits: u64, n: u64, seed: u64, streams: u64) -> Self {
        let p = if n == 0 { 0.0 } else { hits as f64 / n as f64 };
        Self {
            value: p,
            stderr: if n == 0 { 0.0 } else { (p * (1.0 - p) / n as f64).sqrt() },
            n_samples: n,
            seed,
            streams,
        }
    }

    /// `|self - other|` in units of the joint standard error; infinite when
    /// both are exact and differ.
    pub fn z_distance(&self, other: f64, other_stderr: f64) -> f64 {
        let se = (self.stderr.powi(2) + other_stderr.powi(2)).sqrt();
        let diff = (self.value - other).abs();
        if se == 0.0 {
            if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            diff / se
        }
    }

    pub fn scaled(self, s: f64) -> Self {
        Self {
            value: self.value * s,
            stderr: self.stderr * s.abs(),
            ..self
        }
    }
}

/// One-sided upper confidence bound for a binomial proportion with zero
/// observed successes in `n` trials at level `1 - alpha` (Clopper–Pearson).
pub fn zero_count_upper_bound(n: u64, alpha: f64) -> f64 {
    if n == 0 {
        1.0
    } else {
        1.0 - alpha.powf(1.0 / n as f64)
    }
}
