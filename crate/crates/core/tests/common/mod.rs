//! Closed-form oracles for the low-dimensional testbeds.
//!
//! * Interval of length `L` with gap `g`: `k` uniform points are pairwise at
//!   distance `≥ g` with probability `((L − (k−1) g) / L)^k` (positive part).
//! * Circle of circumference `C` with gap `g`: the same event has probability
//!   `(1 − k g / C)^{k−1}` for `k ≥ 2` (circular spacings).
#![allow(dead_code)]

use hardcore::ensemble::PartitionSeries;
use hardcore::regions::{EuclideanRegion, Region, SphericalRegion};
use hardcore::Exclusion;

pub fn interval_p_k(len: f64, gap: f64, k: usize) -> f64 {
    if k <= 1 {
        return 1.0;
    }
    let free = (len - (k as f64 - 1.0) * gap) / len;
    free.max(0.0).powi(k as i32)
}

pub fn circle_p_k(gap_fraction: f64, k: usize) -> f64 {
    if k <= 1 {
        return 1.0;
    }
    (1.0 - k as f64 * gap_fraction).max(0.0).powi(k as i32 - 1)
}

/// `Ẑ(k) = m^k p_k / k!` from exact `p_k`.
pub fn zhat(measure: f64, p: impl Fn(usize) -> f64, k_max: usize) -> Vec<f64> {
    let mut scale = 1.0;
    (0..=k_max)
        .map(|k| {
            if k > 0 {
                scale *= measure / k as f64;
            }
            scale * p(k)
        })
        .collect()
}

pub fn z(zhat: &[f64], lambda: f64) -> f64 {
    zhat.iter().enumerate().map(|(k, z)| lambda.powi(k as i32) * z).sum()
}

pub fn mean_count(zhat: &[f64], lambda: f64) -> f64 {
    let n1: f64 = zhat
        .iter()
        .enumerate()
        .map(|(k, z)| k as f64 * lambda.powi(k as i32) * z)
        .sum();
    n1 / z(zhat, lambda)
}

pub fn count_law(zhat: &[f64], lambda: f64) -> Vec<f64> {
    let zz = z(zhat, lambda);
    zhat.iter()
        .enumerate()
        .map(|(k, z)| lambda.powi(k as i32) * z / zz)
        .collect()
}

/// Exact series of the interval `[0, len]` with unit-volume balls (gap 1).
pub fn interval_zhat(len: f64, k_max: usize) -> Vec<f64> {
    zhat(len, |k| interval_p_k(len, 1.0, k), k_max)
}

/// Exact series of the circle with angular exclusion `theta`.
pub fn circle_zhat(theta: f64, k_max: usize) -> Vec<f64> {
    let frac = theta / std::f64::consts::TAU;
    zhat(1.0, |k| circle_p_k(frac, k), k_max)
}

pub fn interval(len: f64) -> Region {
    Region::Euclidean(EuclideanRegion::cube_box(vec![len]).unwrap())
}

pub fn circle() -> Region {
    Region::Spherical(SphericalRegion::full_sphere(2).unwrap())
}

pub fn angle(theta: f64) -> Exclusion {
    Exclusion::angle(theta).unwrap()
}

/// `|estimate − exact| ≤ 4σ`, with a floor for exact estimates.
pub fn within_4_sigma(value: f64, stderr: f64, exact: f64) -> bool {
    (value - exact).abs() <= 4.0 * stderr + 1e-12
}

pub fn series_values(s: &PartitionSeries) -> Vec<f64> {
    s.values()
}
