//! Closed-form high-dimensional geometry.
//!
//! Ball volumes and the unit-volume radius `r_d`, normalized spherical cap
//! measures `s_d(θ)`, and the angular radii that govern how two caps
//! intersect: `q(θ)`, `θ'` and `σ(τ, θ)`. Everything that can underflow in
//! large dimension has a `ln_` twin.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use statrs::function::gamma::ln_gamma;

use crate::error::{check_domain, Error, Result};
use crate::special::{ln_beta, ln_beta_reg};

/// Absolute tolerance for angle comparisons.
pub const ANGLE_TOL: f64 = 1e-12;

/// `ln` of the volume of the unit ball in `R^d`.
pub fn ln_unit_ball_volume(d: usize) -> f64 {
    let h = d as f64 / 2.0;
    h * PI.ln() - ln_gamma(h + 1.0)
}

/// Volume of the unit ball in `R^d`, `π^{d/2} / Γ(d/2 + 1)`.
///
/// Underflows to zero for very large `d`; use [`ln_unit_ball_volume`] there.
pub fn unit_ball_volume(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        2 => PI,
        _ => ln_unit_ball_volume(d).exp(),
    }
}

/// Volume of a ball of radius `r` in `R^d`.
pub fn ball_volume(d: usize, r: f64) -> f64 {
    (ln_unit_ball_volume(d) + d as f64 * r.ln()).exp()
}

/// Radius of the ball of volume one in `R^d`.
pub fn unit_volume_radius(d: usize) -> f64 {
    assert!(d >= 1, "dimension must be positive");
    match d {
        1 => 0.5,
        2 => 1.0 / PI.sqrt(),
        _ => (-ln_unit_ball_volume(d) / d as f64).exp(),
    }
}

/// Radius of the ball of volume `v` in `R^d`: `v^{1/d} r_d`.
pub fn radius_for_volume(d: usize, v: f64) -> f64 {
    v.powf(1.0 / d as f64) * unit_volume_radius(d)
}

fn check_cap(d: usize, theta: f64) -> Result<()> {
    if d < 2 {
        return Err(Error::Domain {
            what: "sphere dimension d",
            value: d as f64,
            domain: "[2, ∞)",
        });
    }
    check_domain(
        "cap radius θ",
        theta,
        theta > 0.0 && theta <= FRAC_PI_2 + ANGLE_TOL,
        "(0, π/2]",
    )
}

/// `ln s_d(θ)`, the log normalized measure of a cap of angular radius `θ`
/// on the sphere `S^{d-1}` in `R^d`.
pub fn ln_cap_measure(d: usize, theta: f64) -> Result<f64> {
    check_cap(d, theta)?;
    let theta = theta.min(FRAC_PI_2);
    let x = theta.sin().powi(2);
    Ok(ln_beta_reg((d as f64 - 1.0) / 2.0, 0.5, x) - std::f64::consts::LN_2)
}

/// Normalized measure of a cap of angular radius `θ`:
/// `s_d(θ) = ½ I_{sin²θ}((d-1)/2, 1/2)`.
pub fn cap_measure(d: usize, theta: f64) -> Result<f64> {
    ln_cap_measure(d, theta).map(f64::exp)
}

/// `ln` of the large-`d` approximation `sin^{d-1}θ / (√(2πd) cos θ)`.
pub fn ln_cap_measure_asymptotic(d: usize, theta: f64) -> Result<f64> {
    check_domain(
        "cap radius θ",
        theta,
        theta > 0.0 && theta < FRAC_PI_2,
        "(0, π/2)",
    )?;
    let d = d as f64;
    Ok((d - 1.0) * theta.sin().ln() - 0.5 * (2.0 * PI * d).ln() - theta.cos().ln())
}

/// The large-`d` approximation of [`cap_measure`].
pub fn cap_measure_asymptotic(d: usize, theta: f64) -> Result<f64> {
    ln_cap_measure_asymptotic(d, theta).map(f64::exp)
}

/// `ln` of the density of `s_d` with respect to the polar angle:
/// `sin^{d-2}φ / B((d-1)/2, 1/2)`.
fn ln_cap_measure_derivative(d: usize, phi: f64) -> f64 {
    (d as f64 - 2.0) * phi.sin().ln() - ln_beta((d as f64 - 1.0) / 2.0, 0.5)
}

/// Angular radius `φ ∈ (0, π/2]` of the cap whose log measure is `ln_m`.
pub fn cap_radius_for_ln_measure(d: usize, ln_m: f64) -> Result<f64> {
    check_cap(d, FRAC_PI_2)?;
    check_domain(
        "log cap measure",
        ln_m,
        ln_m <= -std::f64::consts::LN_2 + 1e-15,
        "(-∞, ln ½]",
    )?;
    if ln_m >= -std::f64::consts::LN_2 {
        return Ok(FRAC_PI_2);
    }
    match d {
        2 => return Ok(ln_m.exp() * PI),
        3 => return Ok((1.0 - 2.0 * ln_m.exp()).acos()),
        _ => {}
    }
    Ok(invert_ln_cap_measure(d, ln_m, 0.0, FRAC_PI_2, None))
}

/// Safeguarded Newton solve of `ln s_d(φ) = ln_m` on the bracket `[lo, hi]`.
fn invert_ln_cap_measure(d: usize, ln_m: f64, mut lo: f64, mut hi: f64, guess: Option<f64>) -> f64 {
    let mut phi = guess.unwrap_or(0.5 * (lo + hi));
    for _ in 0..200 {
        let g = ln_beta_reg((d as f64 - 1.0) / 2.0, 0.5, phi.sin().powi(2))
            - std::f64::consts::LN_2
            - ln_m;
        if g > 0.0 {
            hi = phi;
        } else {
            lo = phi;
        }
        let slope = (ln_cap_measure_derivative(d, phi) - (g + ln_m)).exp();
        let mut next = phi - g / slope;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - phi).abs() <= 1e-15 * phi.max(1e-300) || hi - lo <= 1e-16 {
            return next;
        }
        phi = next;
    }
    phi
}

/// Inverse-CDF sampler for the polar angle of a uniform point in a cap.
///
/// The polar angle `φ` of a uniform point of `C_θ(x)`, measured from `x`,
/// has density proportional to `sin^{d-2}φ` on `[0, θ]`, so its CDF is
/// `s_d(φ)/s_d(θ)`. A small table of that CDF brackets each solve.
#[derive(Clone, Debug)]
pub struct CapPolarSampler {
    d: usize,
    theta: f64,
    ln_measure: f64,
    /// `(φ_i, ln s_d(φ_i))`, increasing.
    table: Vec<(f64, f64)>,
}

impl CapPolarSampler {
    const TABLE: usize = 32;

    pub fn new(d: usize, theta: f64) -> Result<Self> {
        let ln_measure = ln_cap_measure(d, theta)?;
        let theta = theta.min(FRAC_PI_2);
        let table = if d <= 3 {
            Vec::new()
        } else {
            (1..=Self::TABLE)
                .map(|i| {
                    let phi = theta * i as f64 / Self::TABLE as f64;
                    (phi, ln_cap_measure(d, phi).unwrap_or(f64::NEG_INFINITY))
                })
                .collect()
        };
        Ok(Self {
            d,
            theta,
            ln_measure,
            table,
        })
    }

    pub fn ln_measure(&self) -> f64 {
        self.ln_measure
    }

    /// Polar angle at CDF level `u ∈ [0, 1)`.
    pub fn polar_angle(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        match self.d {
            2 => return u * self.theta,
            3 => return (1.0 - u * (1.0 - self.theta.cos())).acos(),
            _ => {}
        }
        let target = u.ln() + self.ln_measure;
        let idx = self.table.partition_point(|&(_, l)| l < target);
        let lo = if idx == 0 { 0.0 } else { self.table[idx - 1].0 };
        let hi = self.table.get(idx).map_or(self.theta, |&(p, _)| p);
        invert_ln_cap_measure(self.d, target, lo, hi, Some(hi)).min(self.theta)
    }
}

/// `q(θ) = arcsin((1 - cos θ)√(1 + 2cos θ) / sin θ)`: angular radius of the
/// smallest cap containing the intersection of two radius-`θ` caps whose
/// centres are `θ` apart.
pub fn q_of_theta(theta: f64) -> Result<f64> {
    check_domain("θ", theta, theta > 0.0 && theta < FRAC_PI_2, "(0, π/2)")?;
    let c = theta.cos();
    let s = ((1.0 - c) * (1.0 + 2.0 * c).sqrt() / theta.sin()).min(1.0);
    Ok(s.asin())
}

/// `θ' = arcsin(√2 sin(θ/2))`, the fixed point `σ(θ', θ) = θ'`.
pub fn theta_prime(theta: f64) -> Result<f64> {
    check_domain("θ", theta, theta > 0.0 && theta < FRAC_PI_2, "(0, π/2)")?;
    Ok((SQRT_2 * (theta / 2.0).sin()).asin())
}

/// Radicand of [`sigma`] in factored form, `(1 - cos θ)(1 + cos θ - 2cos²τ)`.
fn sigma_radicand(tau: f64, theta: f64) -> f64 {
    let ct = theta.cos();
    let c2 = tau.cos().powi(2);
    (1.0 - ct) * (1.0 + ct - 2.0 * c2)
}

/// `σ(τ, θ)`: angular radius of a cap containing `C_τ(x) ∩ C_θ(u)` when `x`
/// and `u` are `τ` apart, for `τ ∈ [θ', θ]`.
pub fn sigma(tau: f64, theta: f64) -> Result<f64> {
    let tp = theta_prime(theta)?;
    check_domain(
        "τ",
        tau,
        tau >= tp - ANGLE_TOL && tau <= theta + ANGLE_TOL,
        "[θ', θ]",
    )?;
    let r = sigma_radicand(tau, theta).max(0.0);
    Ok((r.sqrt() / tau.sin()).min(1.0).asin())
}

/// Ball containing the lens `B_{2r_d}(u) ∩ B_{‖u‖}(0)` for `‖u‖ = x r_d`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LensContainment {
    /// The containing ball is centred at `center_scale · u`.
    pub center_scale: f64,
    pub radius: f64,
}

/// Containing ball for the lens at `‖u‖ = x r_d`, valid for `x ≥ √2`:
/// centre `(1 - 2/x²) u`, radius `2√(1 - x^{-2}) r_d`.
pub fn euclidean_lens_containment(x: f64, d: usize) -> Result<LensContainment> {
    check_domain("x", x, x >= SQRT_2 - 1e-15, "[√2, ∞)")?;
    let x = x.max(SQRT_2);
    Ok(LensContainment {
        center_scale: 1.0 - 2.0 / (x * x),
        radius: 2.0 * (1.0 - 1.0 / (x * x)).sqrt() * unit_volume_radius(d),
    })
}

/// Derived angles for a fixed cap radius.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct CapGeometry {
    pub d: usize,
    pub theta: f64,
    pub cos_theta: f64,
    pub q_theta: f64,
    pub theta_prime: f64,
    pub ln_cap_measure: f64,
}

impl CapGeometry {
    pub fn new(d: usize, theta: f64) -> Result<Self> {
        Ok(Self {
            d,
            theta,
            cos_theta: theta.cos(),
            q_theta: q_of_theta(theta)?,
            theta_prime: theta_prime(theta)?,
            ln_cap_measure: ln_cap_measure(d, theta)?,
        })
    }

    pub fn sigma(&self, tau: f64) -> Result<f64> {
        sigma(tau, self.theta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_3;

    fn theta_grid(n: usize) -> Vec<f64> {
        (1..=n).map(|i| FRAC_PI_2 * i as f64 / (n + 1) as f64).collect()
    }

    #[test]
    fn unit_ball_volumes() {
        assert_eq!(unit_ball_volume(1), 2.0);
        assert_relative_eq!(unit_ball_volume(2), PI, epsilon = 1e-15);
        assert_relative_eq!(unit_ball_volume(3), 4.0 * PI / 3.0, max_relative = 1e-14);
        assert!(unit_ball_volume(200) > 0.0);
        assert!(ln_unit_ball_volume(10_000).is_finite());
    }

    #[test]
    fn unit_volume_radii() {
        assert_eq!(unit_volume_radius(1), 0.5);
        assert_relative_eq!(unit_volume_radius(2), 0.5641895835477563, epsilon = 1e-15);
        // mpmath, 40 digits
        assert_relative_eq!(unit_volume_radius(10), 0.9106325886214025, max_relative = 1e-13);
        for d in 1..=100 {
            let v = unit_ball_volume(d) * unit_volume_radius(d).powi(d as i32);
            assert_relative_eq!(v, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn ten_dimensional_radius_by_bisection() {
        // Invert v_10(r) = 1 without the closed form.
        let (mut lo, mut hi) = (0.1f64, 2.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if unit_ball_volume(10) * mid.powi(10) < 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert_relative_eq!(unit_volume_radius(10), lo, epsilon = 1e-12);
    }

    #[test]
    fn cap_measure_small_dimensions() {
        for th in theta_grid(40) {
            assert_relative_eq!(cap_measure(2, th).unwrap(), th / PI, max_relative = 1e-13);
            assert_relative_eq!(cap_measure(3, th).unwrap(), (1.0 - th.cos()) / 2.0, epsilon = 1e-12);
        }
        assert_relative_eq!(cap_measure(3, FRAC_PI_3).unwrap(), 0.25, epsilon = 1e-14);
        assert_relative_eq!(cap_measure(3, FRAC_PI_2).unwrap(), 0.5, epsilon = 1e-15);
        // s_4(π/3) and s_5(π/3) from mpmath quadrature
        assert_relative_eq!(cap_measure(4, FRAC_PI_3).unwrap(), 0.19550110947788532, max_relative = 1e-13);
        assert_relative_eq!(cap_measure(5, FRAC_PI_3).unwrap(), 0.15625, max_relative = 1e-13);
        assert_relative_eq!(cap_measure(10, 0.7).unwrap(), 0.003051385064485946, max_relative = 1e-12);
        assert_relative_eq!(cap_measure(50, 1.2).unwrap(), 0.004486736052970735, max_relative = 1e-12);
    }

    #[test]
    fn cap_measure_rejects_bad_angles() {
        assert!(cap_measure(3, 0.0).is_err());
        assert!(cap_measure(3, 1.6).is_err());
        assert!(cap_measure(1, 1.0).is_err());
        assert!(cap_measure_asymptotic(10, FRAC_PI_2).is_err());
    }

    #[test]
    fn cap_measure_strictly_increasing() {
        for d in [2, 3, 4, 7, 20, 100] {
            let g = theta_grid(200);
            for w in g.windows(2) {
                let a = ln_cap_measure(d, w[0]).unwrap();
                let b = ln_cap_measure(d, w[1]).unwrap();
                assert!(b > a, "d={d} θ={}", w[1]);
            }
        }
    }

    #[test]
    fn asymptotic_cap_measure() {
        // mpmath values
        assert_relative_eq!(
            cap_measure_asymptotic(3, FRAC_PI_3).unwrap(),
            0.3454941494713355,
            max_relative = 1e-13
        );
        let r500 = cap_measure(500, FRAC_PI_3).unwrap() / cap_measure_asymptotic(500, FRAC_PI_3).unwrap();
        let r2000 = (ln_cap_measure(2000, FRAC_PI_3).unwrap()
            - ln_cap_measure_asymptotic(2000, FRAC_PI_3).unwrap())
        .exp();
        assert_relative_eq!(r500, 0.994613242434325, max_relative = 1e-10);
        assert_relative_eq!(r2000, 0.998632257495028, max_relative = 1e-10);
    }

    #[test]
    fn cap_radius_inversion() {
        for d in [2, 3, 4, 6, 12, 60] {
            for th in theta_grid(15) {
                let l = ln_cap_measure(d, th).unwrap();
                let back = cap_radius_for_ln_measure(d, l).unwrap();
                assert_relative_eq!(back, th, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn polar_sampler_quantiles() {
        for d in [2, 3, 4, 5, 9, 30] {
            let s = CapPolarSampler::new(d, 1.1).unwrap();
            for &u in &[1e-9, 0.01, 0.3, 0.5, 0.77, 0.999999] {
                let phi = s.polar_angle(u);
                let level = (ln_cap_measure(d, phi).unwrap() - s.ln_measure()).exp();
                assert_relative_eq!(level, u, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn q_values() {
        assert_relative_eq!(q_of_theta(FRAC_PI_3).unwrap(), 0.9553166181245093, epsilon = 1e-14);
        assert_relative_eq!(
            q_of_theta(FRAC_PI_3).unwrap(),
            sigma(FRAC_PI_3, FRAC_PI_3).unwrap(),
            epsilon = 1e-12
        );
        // The containing radius sits between the fixed point θ' and θ itself.
        for i in 0..8 {
            let th = 0.1 + 0.2 * i as f64;
            let q = q_of_theta(th).unwrap();
            assert!(q < th);
            assert!(q > theta_prime(th).unwrap());
        }
        assert!(q_of_theta(FRAC_PI_2).is_err());
    }

    #[test]
    fn theta_prime_values() {
        let tp = theta_prime(FRAC_PI_3).unwrap();
        assert_relative_eq!(tp, std::f64::consts::FRAC_PI_4, epsilon = 1e-15);
        assert_relative_eq!(tp.sin(), SQRT_2 / 2.0, epsilon = 1e-15);
        assert_relative_eq!(theta_prime(0.2).unwrap(), 0.14165908242815493, epsilon = 1e-15);
        for th in theta_grid(50) {
            let tp = theta_prime(th).unwrap();
            assert!(tp <= th);
            assert_relative_eq!(tp.sin(), SQRT_2 * (th / 2.0).sin(), epsilon = 1e-12);
        }
    }

    #[test]
    fn sigma_fixed_point_and_monotonicity() {
        for th in theta_grid(50) {
            let tp = theta_prime(th).unwrap();
            assert_relative_eq!(sigma(tp, th).unwrap(), tp, epsilon = 1e-10);
            assert_relative_eq!(sigma(th, th).unwrap(), q_of_theta(th).unwrap(), epsilon = 1e-12);
            let taus: Vec<f64> = (0..=20).map(|i| tp + (th - tp) * i as f64 / 20.0).collect();
            for w in taus.windows(2) {
                assert!(sigma(w[0], th).unwrap() < sigma(w[1], th).unwrap());
            }
        }
    }

    #[test]
    fn sigma_domain() {
        let tp = theta_prime(1.0).unwrap();
        assert!(sigma(tp - 1e-3, 1.0).is_err());
        assert!(sigma(1.0 + 1e-3, 1.0).is_err());
        assert!(sigma(1.0, 1.0).is_ok());
    }

    #[test]
    fn sigma_identity_grid() {
        for th in theta_grid(25) {
            let tp = theta_prime(th).unwrap();
            for i in 0..=10 {
                let tau = tp + (th - tp) * i as f64 / 10.0;
                let s = sigma(tau, th).unwrap();
                let st2 = tau.sin().powi(2);
                let lhs = st2 * (st2 - s.sin().powi(2));
                let rhs = (st2 - 2.0 * (th / 2.0).sin().powi(2)).powi(2);
                assert!((lhs - rhs).abs() < 1e-10);
                // raw radicand agrees with the factored one
                let ct = th.cos();
                let c2 = tau.cos().powi(2);
                let raw = 1.0 + 2.0 * c2 * ct - 2.0 * c2 - ct * ct;
                assert!((raw - sigma_radicand(tau, th)).abs() < 1e-14);
                assert!(s.sin() <= tau.sin() + 1e-12);
            }
        }
    }

    #[test]
    fn lens_containment_values() {
        let l = euclidean_lens_containment(SQRT_2, 5).unwrap();
        assert!(l.center_scale.abs() < 1e-15);
        assert_relative_eq!(l.radius, SQRT_2 * unit_volume_radius(5), max_relative = 1e-14);
        let l = euclidean_lens_containment(2.0, 3).unwrap();
        assert_relative_eq!(l.center_scale, 0.5, epsilon = 1e-15);
        assert_relative_eq!(l.radius, 3f64.sqrt() * unit_volume_radius(3), max_relative = 1e-14);
        assert!(euclidean_lens_containment(1.3, 3).is_err());
    }

    #[test]
    fn cap_geometry_bundle() {
        let g = CapGeometry::new(4, FRAC_PI_3).unwrap();
        assert!(g.theta_prime <= g.theta);
        assert!(g.q_theta < g.theta && g.q_theta > g.theta_prime);
        assert_relative_eq!(g.cos_theta, 0.5, epsilon = 1e-15);
    }
}
