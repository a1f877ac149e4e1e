//! Closed-form kissing-number, spherical-code and packing-density bounds.
//!
//! All formulas are the leading asymptotic terms with their `(1 + o(1))`
//! factors dropped, so a row is the value of the formula at `d`, not a
//! proved bound at that `d`. Everything is evaluated in log space.

use std::f64::consts::{LN_2, PI, SQRT_2};

use serde::Serialize;

use crate::error::{check_domain, Result};
use crate::geometry::{ln_cap_measure, ln_cap_measure_asymptotic, q_of_theta};

/// Largest `|log_value|` for which the linear value is reported.
pub const LINEAR_LIMIT: f64 = 700.0;

/// Kissing exponent `K(d) ≤ 2^{0.4041 d}` (truncated decimals).
pub const KL_KISSING_EXPONENT: f64 = 0.4041;
/// Packing exponent `θ(d) ≤ 2^{-0.5990 d}` (truncated decimals).
pub const KL_PACKING_EXPONENT: f64 = 0.5990;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundRow {
    pub d: usize,
    pub theta: Option<f64>,
    pub bound_name: String,
    pub log_value: f64,
    pub value: Option<f64>,
}

impl BoundRow {
    fn new(d: usize, theta: Option<f64>, name: &str, log_value: f64) -> Self {
        debug_assert!(log_value.is_finite(), "{name} at d = {d}");
        Self {
            d,
            theta,
            bound_name: name.to_string(),
            log_value,
            value: (log_value.abs() < LINEAR_LIMIT).then(|| log_value.exp()),
        }
    }
}

fn check_dim(d: usize) -> Result<()> {
    check_domain("d", d as f64, d >= 1, "[1, ∞)")
}

fn check_code_angle(theta: f64) -> Result<()> {
    check_domain("θ", theta, theta > 0.0 && theta < PI / 2.0, "(0, π/2)")
}

/// `√(3π)/(4√2) · log(3/2) ≈ 0.2200`.
pub fn kissing_constant_new() -> f64 {
    (3.0 * PI).sqrt() / (4.0 * SQRT_2) * 1.5f64.ln()
}

/// `√(3π)/(2√2) · log(3/(2√2)) ≈ 0.0639`.
pub fn kissing_constant_jjp() -> f64 {
    (3.0 * PI).sqrt() / (2.0 * SQRT_2) * (3.0 / (2.0 * SQRT_2)).ln()
}

/// `√(3π)/(2√2) ≈ 1.0854`.
pub fn kissing_constant_csw() -> f64 {
    (3.0 * PI).sqrt() / (2.0 * SQRT_2)
}

/// `log(3/2) / log(9/8) ≈ 3.442`, the improvement over the previous kissing
/// bound. Equals the ratio of the two kissing constants since
/// `(3/(2√2))² = 9/8`.
pub fn kissing_improvement_ratio() -> f64 {
    1.5f64.ln() / (9.0f64 / 8.0).ln()
}

/// `log 2 / log(4/3) ≈ 2.409`, the improvement in packing density.
pub fn packing_improvement_ratio() -> f64 {
    LN_2 / (4.0f64 / 3.0).ln()
}

fn ln_two_over_sqrt3() -> f64 {
    (2.0 / 3f64.sqrt()).ln()
}

/// `ln(c · d^{3/2} · (2/√3)^d)`.
fn ln_kissing_shape(c: f64, d: usize, power: f64) -> f64 {
    let df = d as f64;
    c.ln() + power * df.ln() + df * ln_two_over_sqrt3()
}

/// `√(3π)/(4√2) · log(3/2) · d^{3/2} · (2/√3)^d`.
pub fn kissing_lower_new(d: usize) -> Result<BoundRow> {
    check_dim(d)?;
    Ok(BoundRow::new(d, None, "kissing_new", ln_kissing_shape(kissing_constant_new(), d, 1.5)))
}

/// `√(3π)/(2√2) · log(3/(2√2)) · d^{3/2} · (2/√3)^d`.
pub fn kissing_lower_jjp(d: usize) -> Result<BoundRow> {
    check_dim(d)?;
    Ok(BoundRow::new(d, None, "kissing_jjp", ln_kissing_shape(kissing_constant_jjp(), d, 1.5)))
}

/// `√(3πd)/(2√2) · (2/√3)^d`: the size every maximal code reaches.
pub fn kissing_lower_csw(d: usize) -> Result<BoundRow> {
    check_dim(d)?;
    Ok(BoundRow::new(d, None, "kissing_csw", ln_kissing_shape(kissing_constant_csw(), d, 0.5)))
}

/// `log(sin θ / (√2 sin(θ/2)))`, positive exactly for `θ < π/2`.
pub fn sphere_code_constant_new(theta: f64) -> Result<f64> {
    check_code_angle(theta)?;
    Ok((theta.sin() / (SQRT_2 * (theta / 2.0).sin())).ln())
}

/// `log(sin θ / sin q(θ))`.
pub fn sphere_code_constant_jjp(theta: f64) -> Result<f64> {
    Ok((theta.sin() / q_of_theta(theta)?.sin()).ln())
}

fn ln_code_bound(constant: f64, d: usize, ln_s: f64) -> f64 {
    constant.ln() + (d as f64).ln() - ln_s
}

/// `log(sin θ/(√2 sin(θ/2))) · d / s_d(θ)` with the exact cap measure.
pub fn sphere_code_lower_new(d: usize, theta: f64) -> Result<BoundRow> {
    let c = sphere_code_constant_new(theta)?;
    let ln_s = ln_cap_measure(d, theta)?;
    Ok(BoundRow::new(d, Some(theta), "sphere_code_new", ln_code_bound(c, d, ln_s)))
}

/// As [`sphere_code_lower_new`] with `s_d(θ) ≈ sin^{d-1}θ / (√(2πd) cos θ)`.
pub fn sphere_code_lower_new_asymptotic(d: usize, theta: f64) -> Result<BoundRow> {
    let c = sphere_code_constant_new(theta)?;
    let ln_s = ln_cap_measure_asymptotic(d, theta)?;
    Ok(BoundRow::new(d, Some(theta), "sphere_code_new_asymptotic_s", ln_code_bound(c, d, ln_s)))
}

/// `log(sin θ / sin q(θ)) · d / s_d(θ)`.
pub fn sphere_code_lower_jjp(d: usize, theta: f64) -> Result<BoundRow> {
    let c = sphere_code_constant_jjp(theta)?;
    let ln_s = ln_cap_measure(d, theta)?;
    Ok(BoundRow::new(d, Some(theta), "sphere_code_jjp", ln_code_bound(c, d, ln_s)))
}

/// `1 / s_d(θ)`: the size of any maximal code.
pub fn sphere_code_covering(d: usize, theta: f64) -> Result<BoundRow> {
    check_code_angle(theta)?;
    let ln_s = ln_cap_measure(d, theta)?;
    Ok(BoundRow::new(d, Some(theta), "sphere_code_covering", -ln_s))
}

/// `log(√2) · d · 2^{-d}`.
pub fn packing_density_lower_new(d: usize) -> Result<BoundRow> {
    check_dim(d)?;
    let df = d as f64;
    Ok(BoundRow::new(d, None, "packing_new", SQRT_2.ln().ln() + df.ln() - df * LN_2))
}

/// `log(2/√3) · d · 2^{-d}`.
pub fn packing_density_lower_jjp(d: usize) -> Result<BoundRow> {
    check_dim(d)?;
    let df = d as f64;
    Ok(BoundRow::new(d, None, "packing_jjp", ln_two_over_sqrt3().ln() + df.ln() - df * LN_2))
}

/// Upper bounds for comparison: Rankin `√π/(2√2) · d^{3/2} · 2^{d/2}`, and the
/// linear-programming exponents `2^{0.4041 d}` (kissing) and `2^{-0.5990 d}`
/// (packing density).
pub fn comparison_upper_bounds(d: usize) -> Result<Vec<BoundRow>> {
    check_dim(d)?;
    let df = d as f64;
    let rankin = (PI.sqrt() / (2.0 * SQRT_2)).ln() + 1.5 * df.ln() + 0.5 * df * LN_2;
    Ok(vec![
        BoundRow::new(d, None, "rankin", rankin),
        BoundRow::new(d, None, "kl_kissing", KL_KISSING_EXPONENT * df * LN_2),
        BoundRow::new(d, None, "kl_packing", -KL_PACKING_EXPONENT * df * LN_2),
    ])
}

/// Log fugacity thresholds above which the bounds hold, each with `δ = 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FugacityThresholds {
    pub d: usize,
    pub theta: f64,
    /// `ln (√2 sin(θ/2))^{-d}`.
    pub ln_spherical_new: f64,
    /// `ln 1/(d · s_d(q(θ)))`.
    pub ln_spherical_jjp: f64,
    /// `ln (1/√2)^d`.
    pub ln_euclidean_new: f64,
    /// `ln 3^{-d/2}`.
    pub ln_euclidean_jjp: f64,
}

pub fn fugacity_thresholds(d: usize, theta: f64) -> Result<FugacityThresholds> {
    check_code_angle(theta)?;
    let df = d as f64;
    let ln_s_q = ln_cap_measure(d, q_of_theta(theta)?)?;
    Ok(FugacityThresholds {
        d,
        theta,
        ln_spherical_new: -df * (SQRT_2 * (theta / 2.0).sin()).ln(),
        ln_spherical_jjp: -df.ln() - ln_s_q,
        ln_euclidean_new: -0.5 * df * LN_2,
        ln_euclidean_jjp: -0.5 * df * 3f64.ln(),
    })
}

/// Smallest `d` in `dims` from which `lower(d) > covering(d)` holds for every
/// remaining dimension of the range.
pub fn crossover<F, G>(lower: F, covering: G, dims: std::ops::RangeInclusive<usize>) -> Result<Option<usize>>
where
    F: Fn(usize) -> Result<BoundRow>,
    G: Fn(usize) -> Result<BoundRow>,
{
    let mut start = None;
    for d in dims {
        if lower(d)?.log_value > covering(d)?.log_value {
            start.get_or_insert(d);
        } else {
            start = None;
        }
    }
    Ok(start)
}

/// Dimension from which the kissing bound with constant `c` beats the
/// covering bound: `c d^{3/2} > 1.0854 d^{1/2}` iff `d > 1.0854 / c`.
pub fn kissing_crossover(constant: f64) -> usize {
    (kissing_constant_csw() / constant).floor() as usize + 1
}

/// Every bound at `d` (spherical ones at `theta`), in a fixed order.
pub fn table_rows(d: usize, theta: f64) -> Result<Vec<BoundRow>> {
    let mut rows = vec![
        kissing_lower_new(d)?,
        kissing_lower_jjp(d)?,
        kissing_lower_csw(d)?,
        sphere_code_lower_new(d, theta)?,
        sphere_code_lower_new_asymptotic(d, theta)?,
        sphere_code_lower_jjp(d, theta)?,
        sphere_code_covering(d, theta)?,
        packing_density_lower_new(d)?,
        packing_density_lower_jjp(d)?,
    ];
    rows.extend(comparison_upper_bounds(d)?);
    Ok(rows)
}

/// Number of rows [`table_rows`] produces per dimension.
pub const ROWS_PER_DIM: usize = 12;

/// Rows for each `d` in `dims`.
pub fn bound_table(dims: impl IntoIterator<Item = usize>, theta: f64) -> Result<Vec<BoundRow>> {
    let mut rows = Vec::new();
    for d in dims {
        rows.extend(table_rows(d, theta)?);
    }
    Ok(rows)
}
