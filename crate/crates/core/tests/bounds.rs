use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI, SQRT_2};

use approx::assert_relative_eq;
use hardcore::bounds::*;
use hardcore::geometry::{q_of_theta, theta_prime};

// Reference values computed at 40 significant digits with mpmath.
const NEW_24: f64 = 816.7624511245056;
const JJP_8: f64 = 4.571231805826494;
const CSW_3: f64 = 2.894405018233071;
const CODE_NEW_05_10: f64 = 16388.32701684146;
const CODE_JJP_05_10: f64 = 6412.222153919457;
const PACK_NEW_8: f64 = 0.010830424696249145;
const PACK_JJP_24: f64 = 2.057662528408391e-7;
const RANKIN_24: f64 = 301791.3260939148;
const LN_JJP_THRESHOLD_PI3_10: f64 = 1.1567313309824957;

fn value(r: BoundRow) -> f64 {
    r.value.unwrap()
}

#[test]
fn headline_constants() {
    assert_relative_eq!(kissing_constant_new(), 0.2200462956800035, max_relative = 1e-14);
    assert!((kissing_constant_new() - 0.2200).abs() < 1e-4);
    assert_relative_eq!(kissing_constant_jjp(), 0.06392096427498018, max_relative = 1e-14);
    assert_relative_eq!(kissing_constant_csw(), 1.085401881837401, max_relative = 1e-14);
    assert_relative_eq!(kissing_improvement_ratio(), 3.442474596180859, max_relative = 1e-14);
    assert!((kissing_improvement_ratio() - 3.442).abs() < 1e-3);
    assert_relative_eq!(packing_improvement_ratio(), 2.409420839653209, max_relative = 1e-14);
    assert!((packing_improvement_ratio() - 2.409).abs() < 1e-3);
}

#[test]
fn constant_ratio_is_the_log_ratio() {
    // (3/(2√2))² = 9/8.
    let r = 3.0 / (2.0 * SQRT_2);
    assert_relative_eq!(r * r, 9.0 / 8.0, max_relative = 1e-15);
    assert_relative_eq!(2.0 * r.ln(), (9.0f64 / 8.0).ln(), max_relative = 1e-14);
    assert_relative_eq!(
        kissing_constant_new() / kissing_constant_jjp(),
        kissing_improvement_ratio(),
        max_relative = 1e-13
    );
}

#[test]
fn kissing_rows_at_fixed_dimensions() {
    assert_relative_eq!(value(kissing_lower_new(24).unwrap()), NEW_24, max_relative = 1e-12);
    assert_relative_eq!(value(kissing_lower_jjp(8).unwrap()), JJP_8, max_relative = 1e-12);
    assert_relative_eq!(value(kissing_lower_csw(3).unwrap()), CSW_3, max_relative = 1e-12);
    for d in 1..100 {
        let ratio = value(kissing_lower_new(d).unwrap()) / value(kissing_lower_jjp(d).unwrap());
        assert_relative_eq!(ratio, kissing_improvement_ratio(), max_relative = 1e-12);
    }
}

#[test]
fn new_over_covering_grows_linearly() {
    let slope = kissing_constant_new() / kissing_constant_csw();
    for d in [10, 100, 1000] {
        let r = (kissing_lower_new(d).unwrap().log_value - kissing_lower_csw(d).unwrap().log_value).exp();
        assert_relative_eq!(r / d as f64, slope, max_relative = 1e-12);
    }
}

#[test]
fn sphere_code_rows() {
    assert_relative_eq!(value(sphere_code_lower_new(10, 0.5).unwrap()), CODE_NEW_05_10, max_relative = 1e-10);
    assert_relative_eq!(value(sphere_code_lower_jjp(10, 0.5).unwrap()), CODE_JJP_05_10, max_relative = 1e-10);
    assert_relative_eq!(
        sphere_code_constant_jjp(FRAC_PI_3).unwrap(),
        0.05889151782819173,
        max_relative = 1e-13
    );
    assert_relative_eq!(
        sphere_code_constant_new(FRAC_PI_3).unwrap() / sphere_code_constant_jjp(FRAC_PI_3).unwrap(),
        kissing_improvement_ratio(),
        max_relative = 1e-12
    );
}

#[test]
fn asymptotic_code_bound_is_the_kissing_bound_at_sixty_degrees() {
    for d in [50, 500, 5000] {
        let code = sphere_code_lower_new_asymptotic(d, FRAC_PI_3).unwrap().log_value;
        let kiss = kissing_lower_new(d).unwrap().log_value;
        assert!((code - kiss).abs() < 1e-9, "d={d}: {code} vs {kiss}");
    }
}

#[test]
fn prefactor_positive_exactly_below_right_angle() {
    for i in 1..200 {
        let theta = FRAC_PI_2 * i as f64 / 200.0;
        assert!(theta.sin() > SQRT_2 * (theta / 2.0).sin());
        assert!(sphere_code_constant_new(theta).unwrap() > 0.0);
    }
    assert!((FRAC_PI_2.sin() - SQRT_2 * (FRAC_PI_2 / 2.0).sin()).abs() < 1e-15);
    assert!(sphere_code_constant_new(FRAC_PI_2).is_err());
}

#[test]
fn new_code_constant_exceeds_jjp_on_grid() {
    for i in 1..100 {
        let theta = FRAC_PI_2 * i as f64 / 100.0;
        assert!(q_of_theta(theta).unwrap() > theta_prime(theta).unwrap());
        assert!(sphere_code_constant_new(theta).unwrap() > sphere_code_constant_jjp(theta).unwrap());
        for d in [3, 10, 40] {
            assert!(sphere_code_lower_new(d, theta).unwrap().log_value > sphere_code_lower_jjp(d, theta).unwrap().log_value);
        }
    }
}

#[test]
fn packing_rows() {
    assert_relative_eq!(SQRT_2.ln(), 0.3465735903, epsilon = 1e-10);
    assert_relative_eq!(value(packing_density_lower_new(8).unwrap()), PACK_NEW_8, max_relative = 1e-12);
    assert_relative_eq!(value(packing_density_lower_jjp(24).unwrap()), PACK_JJP_24, max_relative = 1e-12);
    for d in 1..60 {
        let n = packing_density_lower_new(d).unwrap().log_value;
        let j = packing_density_lower_jjp(d).unwrap().log_value;
        assert!(j.exp() > 0.0);
        assert_relative_eq!((n - j).exp(), packing_improvement_ratio(), max_relative = 1e-12);
    }
}

#[test]
fn upper_bounds() {
    let rows = comparison_upper_bounds(24).unwrap();
    assert_relative_eq!(value(rows[0].clone()), RANKIN_24, max_relative = 1e-12);
    for d in [10, 100, 1000] {
        let rows = comparison_upper_bounds(d).unwrap();
        assert_relative_eq!(rows[1].log_value / std::f64::consts::LN_2 / d as f64, 0.4041, max_relative = 1e-14);
        assert_relative_eq!(-rows[2].log_value / std::f64::consts::LN_2 / d as f64, 0.5990, max_relative = 1e-14);
    }
}

#[test]
fn lower_bounds_stay_below_upper_bounds() {
    // Below d = 24 the kissing formulas exceed the linear-programming
    // exponent, whose o(1) matters there; Rankin is the sharper comparison.
    for d in (4..=200).step_by(4) {
        let up = comparison_upper_bounds(d).unwrap();
        let rankin = up[0].log_value;
        let kl_pack = up[2].log_value;
        for r in [kissing_lower_new(d), kissing_lower_jjp(d), kissing_lower_csw(d)] {
            assert!(r.unwrap().log_value < rankin, "d={d}");
        }
        for r in [packing_density_lower_new(d), packing_density_lower_jjp(d)] {
            assert!(r.unwrap().log_value < kl_pack.max(0.0), "d={d}");
        }
    }
}

#[test]
fn crossover_with_covering_bound() {
    assert_eq!(kissing_crossover(kissing_constant_jjp()), 17);
    assert_eq!(crossover(kissing_lower_jjp, kissing_lower_csw, 1..=300).unwrap(), Some(17));
    assert_eq!(crossover(kissing_lower_new, kissing_lower_csw, 1..=300).unwrap(), Some(5));
    let code_new = |d| sphere_code_lower_new(d, FRAC_PI_3);
    let cover = |d| sphere_code_covering(d, FRAC_PI_3);
    let c = sphere_code_constant_new(FRAC_PI_3).unwrap();
    assert_eq!(crossover(code_new, cover, 2..=300).unwrap(), Some((1.0 / c).floor() as usize + 1));
}

#[test]
fn fugacity_threshold_values() {
    let t = fugacity_thresholds(10, FRAC_PI_3).unwrap();
    assert_relative_eq!(t.ln_spherical_new, 5.0 * std::f64::consts::LN_2, max_relative = 1e-13);
    assert_relative_eq!(t.ln_euclidean_new.exp(), 1.0 / 32.0, max_relative = 1e-13);
    assert_relative_eq!(t.ln_euclidean_jjp.exp(), 3f64.powi(-5), max_relative = 1e-13);
    assert_relative_eq!(t.ln_spherical_jjp, LN_JJP_THRESHOLD_PI3_10, max_relative = 1e-10);
}

#[test]
fn log_and_linear_agree() {
    for d in [1usize, 2, 5, 12, 40, 90] {
        let df = d as f64;
        let lin_new = kissing_constant_new() * df.powf(1.5) * (2.0 / 3f64.sqrt()).powf(df);
        assert_relative_eq!(value(kissing_lower_new(d).unwrap()), lin_new, max_relative = 1e-10);
        let lin_pack = 0.5 * 2f64.ln() * df * 2f64.powf(-df);
        assert_relative_eq!(value(packing_density_lower_new(d).unwrap()), lin_pack, max_relative = 1e-10);
        let rankin = PI.sqrt() / (2.0 * SQRT_2) * df.powf(1.5) * 2f64.powf(df / 2.0);
        assert_relative_eq!(value(comparison_upper_bounds(d).unwrap()[0].clone()), rankin, max_relative = 1e-10);
    }
}

#[test]
fn rows_survive_huge_dimensions() {
    let rows = table_rows(20_000, 1.0).unwrap();
    assert_eq!(rows.len(), ROWS_PER_DIM);
    for r in rows {
        assert!(r.log_value.is_finite(), "{r:?}");
        assert_eq!(r.value.is_some(), r.log_value.abs() < 700.0);
    }
}

#[test]
fn table_row_count() {
    let rows = bound_table((4..=48).step_by(4), FRAC_PI_3).unwrap();
    assert_eq!(rows.len(), 12 * ROWS_PER_DIM);
}

#[test]
fn rejects_bad_inputs() {
    assert!(kissing_lower_new(0).is_err());
    assert!(sphere_code_lower_new(1, 0.5).is_err());
    assert!(sphere_code_lower_jjp(5, 0.0).is_err());
    assert!(fugacity_thresholds(5, 2.0).is_err());
}
