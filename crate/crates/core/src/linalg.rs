//! Small dense-vector helpers on `&[f64]`.

use rand::Rng;
use rand_distr::StandardNormal;

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist2(a, b).sqrt()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

pub fn normalize(a: &[f64]) -> Vec<f64> {
    let n = norm(a);
    a.iter().map(|x| x / n).collect()
}

/// Angle between two unit vectors, clamped against rounding.
pub fn angle(a: &[f64], b: &[f64]) -> f64 {
    dot(a, b).clamp(-1.0, 1.0).acos()
}

/// `i`-th standard basis vector of `R^d`.
pub fn basis(d: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; d];
    e[i] = 1.0;
    e
}

/// Standard Gaussian vector in `R^d`.
pub fn gaussian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

/// Uniform point on the unit sphere `S^{d-1}`.
pub fn uniform_direction<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let g = gaussian(d, rng);
        let n = norm(&g);
        if n > 1e-150 {
            return g.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Uniform unit vector orthogonal to the unit vector `axis`.
pub fn uniform_orthogonal<R: Rng + ?Sized>(axis: &[f64], rng: &mut R) -> Vec<f64> {
    loop {
        let mut g = gaussian(axis.len(), rng);
        let p = dot(&g, axis);
        for (gi, ai) in g.iter_mut().zip(axis) {
            *gi -= p * ai;
        }
        let n = norm(&g);
        if n > 1e-150 {
            return g.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Point at angle `phi` from unit `axis` in the direction of unit `w ⟂ axis`.
pub fn rotate_toward(axis: &[f64], w: &[f64], phi: f64) -> Vec<f64> {
    let (s, c) = phi.sin_cos();
    axis.iter().zip(w).map(|(a, b)| c * a + s * b).collect()
}
