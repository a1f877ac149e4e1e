//! Exact samplers for the hard sphere and hard cap models.
//!
//! All samplers are rejection samplers: the grand canonical process draws a
//! Poisson number of uniform points and keeps the configuration only if no
//! two points conflict; the canonical one does the same with a fixed count.
//! Both stop at the first conflict, which leaves the accepted law unchanged.
//!
//! Target sets are described by a [`Domain`]: a proposal region that can be
//! sampled uniformly plus a membership predicate. Points that fail the
//! predicate are thinned away, so a Poisson process on the proposal becomes
//! a Poisson process on the target. This is what lets the same code sample
//! on implicit sets such as the externally uncovered set **T**(X, v).

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::Serialize;

use crate::error::{check_domain, Error, Result};
use crate::geometry::{self, ANGLE_TOL};
use crate::linalg;
use crate::montecarlo::{run_batches, stream_count, Estimate};
use crate::regions::{EuclideanRegion, Point, Region, SphericalRegion};

/// Hard-core exclusion rule between two points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Exclusion {
    /// Euclidean distance at least `min_dist`.
    MinDist { min_dist: f64 },
    /// Angle at least `theta`, i.e. `⟨x, y⟩ ≤ cos θ` on the unit sphere.
    Angle { theta: f64 },
}

impl Exclusion {
    pub fn min_dist(min_dist: f64) -> Result<Self> {
        check_domain("min_dist", min_dist, min_dist > 0.0 && min_dist.is_finite(), "(0, ∞)")?;
        Ok(Self::MinDist { min_dist })
    }

    /// Unit-volume balls in `R^d`: centres at distance at least `2 r_d`.
    pub fn hard_sphere(d: usize) -> Self {
        Self::MinDist {
            min_dist: 2.0 * geometry::unit_volume_radius(d),
        }
    }

    pub fn angle(theta: f64) -> Result<Self> {
        check_domain("θ", theta, theta > 0.0 && theta <= std::f64::consts::PI, "(0, π]")?;
        Ok(Self::Angle { theta })
    }

    /// The natural rule for a region: `2 r_d` in space, `θ` on the sphere.
    pub fn default_for(region: &Region, theta: Option<f64>) -> Result<Self> {
        match (region, theta) {
            (Region::Euclidean(r), None) => Ok(Self::hard_sphere(r.dim())),
            (Region::Euclidean(_), Some(_)) => Err(Error::Parse {
                input: "theta".into(),
                reason: "an angle constraint needs a spherical region".into(),
            }),
            (Region::Spherical(_), Some(t)) => Self::angle(t),
            (Region::Spherical(_), None) => Err(Error::Parse {
                input: "theta".into(),
                reason: "a spherical region needs an angle θ".into(),
            }),
        }
    }

    /// Exclusion radius: the distance (or angle) a neighbourhood must span.
    pub fn radius(&self) -> f64 {
        match *self {
            Self::MinDist { min_dist } => min_dist,
            Self::Angle { theta } => theta,
        }
    }

    /// Closed constraint: `d(a, b) ≥ min_dist` or `⟨a, b⟩ ≤ cos θ`.
    #[inline]
    pub fn compatible(&self, a: &[f64], b: &[f64]) -> bool {
        match *self {
            Self::MinDist { min_dist } => linalg::dist2(a, b) >= min_dist * min_dist,
            Self::Angle { theta } => linalg::dot(a, b) <= theta.cos(),
        }
    }

    /// Whether `p` lies in the open exclusion neighbourhood of `center`
    /// (`B°_{min_dist}(center)` or `C°_θ(center)`).
    #[inline]
    pub fn in_open_neighbourhood(&self, center: &[f64], p: &[f64]) -> bool {
        !self.compatible(center, p)
    }

    /// Whether the whole configuration satisfies the constraint, allowing
    /// 1e-12 of rounding.
    pub fn is_valid(&self, points: &[Point]) -> bool {
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                let ok = match *self {
                    Self::MinDist { min_dist } => {
                        linalg::dist(&points[i], &points[j]) >= min_dist - 1e-12
                    }
                    Self::Angle { theta } => {
                        linalg::dot(&points[i], &points[j]) <= theta.cos() + 1e-12
                    }
                };
                if !ok {
                    return false;
                }
            }
        }
        true
    }
}

/// Positive intensity of a Poisson process.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize)]
pub struct Fugacity(f64);

impl Fugacity {
    pub fn new(lambda: f64) -> Result<Self> {
        check_domain("fugacity λ", lambda, lambda > 0.0 && lambda.is_finite(), "(0, ∞)")?;
        Ok(Self(lambda))
    }

    pub fn from_ln(ln_lambda: f64) -> Result<Self> {
        Self::new(ln_lambda.exp())
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// A set sampled through a proposal region and a membership test.
pub trait Domain: Sync {
    fn dim(&self) -> usize;

    /// Measure of the proposal region.
    fn proposal_measure(&self) -> f64;

    fn sample_proposal<R: Rng + ?Sized>(&self, rng: &mut R) -> Point;

    /// Membership of a proposal sample in the target set.
    fn accepts(&self, p: &[f64]) -> bool;

    /// True when every proposal is accepted (the target is the proposal).
    fn accepts_all(&self) -> bool {
        false
    }
}

impl Domain for Region {
    fn dim(&self) -> usize {
        Region::dim(self)
    }

    fn proposal_measure(&self) -> f64 {
        self.measure()
    }

    fn sample_proposal<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        self.sample_uniform(rng)
    }

    fn accepts(&self, _p: &[f64]) -> bool {
        true
    }

    fn accepts_all(&self) -> bool {
        true
    }
}

pub(crate) fn conflicts(points: &[Point], p: &[f64], exclusion: &Exclusion) -> bool {
    points.iter().any(|q| !exclusion.compatible(q, p))
}

/// Exact sample of the hard-core process of intensity `lambda` (w.r.t. the
/// domain's measure) on `domain`, by rejection with at most `budget` attempts.
pub fn sample_poisson_hard_core<D: Domain, R: Rng + ?Sized>(
    domain: &D,
    exclusion: &Exclusion,
    lambda: Fugacity,
    rng: &mut R,
    budget: u64,
) -> Result<Vec<Point>> {
    let mean = lambda.value() * domain.proposal_measure();
    let poisson = Poisson::new(mean).map_err(|_| Error::Domain {
        what: "Poisson mean λ·vol",
        value: mean,
        domain: "(0, ∞)",
    })?;
    let mut points = Vec::new();
    'attempt: for _ in 0..budget.max(1) {
        points.clear();
        let n = poisson.sample(rng) as u64;
        for _ in 0..n {
            let p = domain.sample_proposal(rng);
            if !domain.accepts(&p) {
                continue;
            }
            if conflicts(&points, &p, exclusion) {
                continue 'attempt;
            }
            points.push(p);
        }
        return Ok(points);
    }
    Err(Error::BudgetExceeded {
        attempts: budget.max(1),
        acceptance_rate: 0.0,
    })
}

/// Uniform sample of `k` pairwise compatible points of the target set.
pub fn sample_canonical_hard_core<D: Domain, R: Rng + ?Sized>(
    domain: &D,
    exclusion: &Exclusion,
    k: usize,
    rng: &mut R,
    budget: u64,
) -> Result<Vec<Point>> {
    let mut points = Vec::with_capacity(k);
    'attempt: for _ in 0..budget.max(1) {
        points.clear();
        for _ in 0..k {
            let p = domain.sample_proposal(rng);
            if !domain.accepts(&p) || conflicts(&points, &p, exclusion) {
                continue 'attempt;
            }
            points.push(p);
        }
        return Ok(points);
    }
    Err(Error::BudgetExceeded {
        attempts: budget.max(1),
        acceptance_rate: 0.0,
    })
}

/// A sphere packing: centres in `region`, pairwise at distance `≥ min_dist`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Packing {
    pub points: Vec<Point>,
    pub region: EuclideanRegion,
    pub min_dist: f64,
}

impl Packing {
    pub fn is_valid(&self) -> bool {
        self.points.iter().all(|p| self.region.contains(p))
            && Exclusion::MinDist {
                min_dist: self.min_dist,
            }
            .is_valid(&self.points)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn exclusion(&self) -> Exclusion {
        Exclusion::MinDist {
            min_dist: self.min_dist,
        }
    }
}

/// A spherical code: unit vectors with pairwise angle `≥ theta`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SphericalCode {
    pub points: Vec<Point>,
    pub theta: f64,
    pub d: usize,
}

impl SphericalCode {
    pub fn is_valid(&self) -> bool {
        self.points
            .iter()
            .all(|p| p.len() == self.d && (linalg::norm(p) - 1.0).abs() <= 1e-12)
            && Exclusion::Angle { theta: self.theta }.is_valid(&self.points)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Smallest pairwise angle (`π` for fewer than two points).
    pub fn min_angle(&self) -> f64 {
        let mut best = std::f64::consts::PI;
        for i in 0..self.points.len() {
            for j in i + 1..self.points.len() {
                best = best.min(linalg::angle(&self.points[i], &self.points[j]));
            }
        }
        best
    }
}

/// Grand canonical hard sphere model on `region` with unit-volume balls.
pub fn sample_hard_sphere<R: Rng + ?Sized>(
    region: &EuclideanRegion,
    lambda: Fugacity,
    rng: &mut R,
    budget: u64,
) -> Result<Packing> {
    let exclusion = Exclusion::hard_sphere(region.dim());
    sample_hard_sphere_with(region, exclusion.radius(), lambda, rng, budget)
}

/// Grand canonical hard sphere model with an explicit minimum distance.
pub fn sample_hard_sphere_with<R: Rng + ?Sized>(
    region: &EuclideanRegion,
    min_dist: f64,
    lambda: Fugacity,
    rng: &mut R,
    budget: u64,
) -> Result<Packing> {
    let exclusion = Exclusion::min_dist(min_dist)?;
    let domain = Region::Euclidean(region.clone());
    let points = sample_poisson_hard_core(&domain, &exclusion, lambda, rng, budget)?;
    Ok(Packing {
        points,
        region: region.clone(),
        min_dist,
    })
}

/// Canonical hard sphere model: a uniform packing of exactly `k` unit-volume balls.
pub fn sample_canonical<R: Rng + ?Sized>(
    region: &EuclideanRegion,
    k: usize,
    rng: &mut R,
    budget: u64,
) -> Result<Packing> {
    let min_dist = Exclusion::hard_sphere(region.dim()).radius();
    sample_canonical_with(region, min_dist, k, rng, budget)
}

pub fn sample_canonical_with<R: Rng + ?Sized>(
    region: &EuclideanRegion,
    min_dist: f64,
    k: usize,
    rng: &mut R,
    budget: u64,
) -> Result<Packing> {
    let exclusion = Exclusion::min_dist(min_dist)?;
    let domain = Region::Euclidean(region.clone());
    let points = sample_canonical_hard_core(&domain, &exclusion, k, rng, budget)?;
    Ok(Packing {
        points,
        region: region.clone(),
        min_dist,
    })
}

/// Grand canonical hard cap model on a spherical region. The intensity is
/// relative to the normalized measure, so the unconditioned count has mean
/// `λ · s(region)`.
pub fn sample_hard_cap<R: Rng + ?Sized>(
    region: &SphericalRegion,
    theta: f64,
    lambda: Fugacity,
    rng: &mut R,
    budget: u64,
) -> Result<SphericalCode> {
    let exclusion = Exclusion::angle(theta)?;
    let domain = Region::Spherical(region.clone());
    let points = sample_poisson_hard_core(&domain, &exclusion, lambda, rng, budget)?;
    Ok(SphericalCode {
        points,
        theta,
        d: region.dim(),
    })
}

/// Canonical hard cap model: a uniform code of exactly `k` points.
pub fn sample_canonical_cap<R: Rng + ?Sized>(
    region: &SphericalRegion,
    theta: f64,
    k: usize,
    rng: &mut R,
    budget: u64,
) -> Result<SphericalCode> {
    let exclusion = Exclusion::angle(theta)?;
    let domain = Region::Spherical(region.clone());
    let points = sample_canonical_hard_core(&domain, &exclusion, k, rng, budget)?;
    Ok(SphericalCode {
        points,
        theta,
        d: region.dim(),
    })
}

/// The part of a window region that a configuration leaves free.
///
/// Two instances matter: the externally uncovered set
/// `T(X, v) = {x ∈ N°(v) ∩ S : x compatible with every y ∈ X \ N°(v)}`,
/// where `N°(v)` is the open exclusion neighbourhood of `v`, and the
/// resampling window `T_A(X) = {x ∈ A : x compatible with every y ∈ X \ A}`.
#[derive(Clone, Debug)]
pub struct BlockedSet {
    proposal: Region,
    open_center: Option<Point>,
    host: Option<Region>,
    blockers: Vec<Point>,
    exclusion: Exclusion,
}

impl BlockedSet {
    /// `T(X, v)` for a configuration `points` on `host`.
    pub fn externally_uncovered(
        points: &[Point],
        host: &Region,
        v: &[f64],
        exclusion: Exclusion,
    ) -> Result<Self> {
        if v.len() != host.dim() {
            return Err(Error::DimensionMismatch {
                expected: host.dim(),
                got: v.len(),
            });
        }
        let proposal = match exclusion {
            Exclusion::MinDist { min_dist } => {
                Region::Euclidean(EuclideanRegion::ball(v.to_vec(), min_dist)?)
            }
            Exclusion::Angle { theta } => Region::Spherical(SphericalRegion::cap(v.to_vec(), theta)?),
        };
        let blockers = points
            .iter()
            .filter(|y| !exclusion.in_open_neighbourhood(v, y))
            .cloned()
            .collect();
        let host = match host {
            Region::Spherical(SphericalRegion::FullSphere { .. }) => None,
            other => Some(other.clone()),
        };
        Ok(Self {
            proposal,
            open_center: Some(v.to_vec()),
            host,
            blockers,
            exclusion,
        })
    }

    /// `T_A(X)`: the points of `area` compatible with `X \ area`.
    pub fn markov_window(points: &[Point], area: &Region, exclusion: Exclusion) -> Self {
        let blockers = points.iter().filter(|y| !area.contains(y)).cloned().collect();
        Self {
            proposal: area.clone(),
            open_center: None,
            host: None,
            blockers,
            exclusion,
        }
    }

    pub fn proposal(&self) -> &Region {
        &self.proposal
    }

    pub fn blockers(&self) -> &[Point] {
        &self.blockers
    }

    pub fn exclusion(&self) -> Exclusion {
        self.exclusion
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        if let Some(c) = &self.open_center {
            if !self.exclusion.in_open_neighbourhood(c, p) {
                return false;
            }
        } else if !self.proposal.contains(p) {
            return false;
        }
        if let Some(h) = &self.host {
            if !h.contains(p) {
                return false;
            }
        }
        self.blockers.iter().all(|y| self.exclusion.compatible(p, y))
    }

    /// Hit-or-miss estimate of the measure of the set from `n` uniform
    /// proposal points.
    pub fn measure_estimate(&self, n: u64, seed: u64) -> Estimate {
        let hits: u64 = run_batches(seed, n, |rng, count| {
            (0..count)
                .filter(|_| {
                    let p = self.proposal.sample_uniform(rng);
                    self.contains(&p)
                })
                .count() as u64
        })
        .into_iter()
        .sum();
        Estimate::proportion(hits, n, seed, stream_count(n)).scaled(self.proposal.measure())
    }
}

impl Domain for BlockedSet {
    fn dim(&self) -> usize {
        self.proposal.dim()
    }

    fn proposal_measure(&self) -> f64 {
        self.proposal.measure()
    }

    fn sample_proposal<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        self.proposal.sample_uniform(rng)
    }

    fn accepts(&self, p: &[f64]) -> bool {
        self.contains(p)
    }
}

/// `T(X, v)` for a packing, with the open ball `B°_{min_dist}(v)` as window.
pub fn externally_uncovered(packing: &Packing, v: &[f64]) -> Result<BlockedSet> {
    BlockedSet::externally_uncovered(
        &packing.points,
        &Region::Euclidean(packing.region.clone()),
        v,
        packing.exclusion(),
    )
}

/// `T(X, v)` for a spherical code on the full sphere, window `C°_θ(v)`.
pub fn externally_uncovered_cap(code: &SphericalCode, v: &[f64], theta: f64) -> Result<BlockedSet> {
    let host = Region::Spherical(SphericalRegion::full_sphere(code.d)?);
    BlockedSet::externally_uncovered(&code.points, &host, v, Exclusion::angle(theta)?)
}

/// Stall window of the greedy code builder at the current code size.
pub fn greedy_stall_window(size: usize) -> u64 {
    10_000u64.max(100 * size as u64)
}

/// Random greedy spherical code: draw uniform points and keep those at angle
/// `≥ θ` from all kept points, stopping after [`greedy_stall_window`]
/// consecutive rejections.
pub fn greedy_maximal_code<R: Rng + ?Sized>(d: usize, theta: f64, rng: &mut R) -> Result<SphericalCode> {
    check_domain("d", d as f64, d >= 2, "[2, ∞)")?;
    check_domain(
        "θ",
        theta,
        theta > 0.0 && theta < std::f64::consts::FRAC_PI_2 + ANGLE_TOL,
        "(0, π/2)",
    )?;
    let exclusion = Exclusion::Angle { theta };
    let mut points: Vec<Point> = Vec::new();
    let mut stall = 0u64;
    while stall < greedy_stall_window(points.len()) {
        let p = linalg::uniform_direction(d, rng);
        if conflicts(&points, &p, &exclusion) {
            stall += 1;
        } else {
            points.push(p);
            stall = 0;
        }
    }
    Ok(SphericalCode { points, theta, d })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::stream_rng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

    #[test]
    fn exclusion_rules() {
        let e = Exclusion::min_dist(1.0).unwrap();
        assert!(e.compatible(&[0.0], &[1.0]));
        assert!(!e.compatible(&[0.0], &[0.999]));
        let a = Exclusion::angle(FRAC_PI_2).unwrap();
        assert!(a.compatible(&[1.0, 0.0], &[0.0, 1.0]));
        assert!(!a.compatible(&[1.0, 0.0], &[0.1, 0.995]));
        assert!(Exclusion::min_dist(0.0).is_err());
        assert!(Fugacity::new(0.0).is_err());
        assert!(Fugacity::new(-1.0).is_err());
    }

    #[test]
    fn hard_sphere_outputs_are_valid() {
        let region = EuclideanRegion::cube_box(vec![3.0, 3.0]).unwrap();
        let mut rng = stream_rng(3, 0);
        for _ in 0..500 {
            let p = sample_hard_sphere(&region, Fugacity::new(0.5).unwrap(), &mut rng, 10_000).unwrap();
            assert!(p.is_valid());
        }
    }

    #[test]
    fn dense_regime_exceeds_budget() {
        let region = EuclideanRegion::cube_box(vec![10.0, 10.0]).unwrap();
        let mut rng = stream_rng(3, 0);
        let r = sample_hard_sphere(&region, Fugacity::new(5.0).unwrap(), &mut rng, 50);
        assert!(matches!(r, Err(Error::BudgetExceeded { attempts: 50, .. })));
    }

    #[test]
    fn canonical_zero_and_one() {
        let region = EuclideanRegion::cube_box(vec![2.0]).unwrap();
        let mut rng = stream_rng(4, 0);
        assert!(sample_canonical(&region, 0, &mut rng, 1).unwrap().is_empty());
        let p = sample_canonical(&region, 1, &mut rng, 1).unwrap();
        assert_eq!(p.len(), 1);
        assert!(p.is_valid());
    }

    #[test]
    fn hard_cap_outputs_are_valid() {
        let region = SphericalRegion::full_sphere(3).unwrap();
        let mut rng = stream_rng(5, 0);
        for _ in 0..300 {
            let c = sample_hard_cap(&region, FRAC_PI_3, Fugacity::new(4.0).unwrap(), &mut rng, 100_000).unwrap();
            assert!(c.is_valid());
        }
    }

    #[test]
    fn uncovered_interval_example() {
        // S = [0, 10], v = 5, a blocker at 6.5: T = (4, 5.5].
        let region = EuclideanRegion::cube_box(vec![10.0]).unwrap();
        let packing = Packing {
            points: vec![vec![6.5]],
            region,
            min_dist: 1.0,
        };
        let t = externally_uncovered(&packing, &[5.0]).unwrap();
        assert!(t.contains(&[4.2]));
        assert!(t.contains(&[5.5]));
        assert!(!t.contains(&[5.6]));
        assert!(!t.contains(&[4.0]));
        let est = t.measure_estimate(200_000, 9);
        assert!(est.z_distance(1.5, 0.0) < 4.0, "{est:?}");
    }

    #[test]
    fn uncovered_without_blockers() {
        let region = EuclideanRegion::cube_box(vec![20.0, 20.0, 20.0]).unwrap();
        let packing = Packing {
            points: vec![],
            region,
            min_dist: 2.0 * geometry::unit_volume_radius(3),
        };
        let t = externally_uncovered(&packing, &[10.0, 10.0, 10.0]).unwrap();
        let est = t.measure_estimate(10_000, 1);
        assert!((est.value - 8.0).abs() < 1e-12);
    }

    #[test]
    fn points_inside_window_do_not_block() {
        let code = SphericalCode {
            points: vec![vec![1.0, 0.0, 0.0]],
            theta: FRAC_PI_3,
            d: 3,
        };
        let t = externally_uncovered_cap(&code, &[1.0, 0.0, 0.0], FRAC_PI_3).unwrap();
        assert!(t.blockers().is_empty());
    }

    #[test]
    fn greedy_codes_valid_and_saturated() {
        let mut rng = stream_rng(6, 0);
        let code = greedy_maximal_code(3, FRAC_PI_3, &mut rng).unwrap();
        assert!(code.is_valid());
        assert!(code.len() >= 4);
        assert!(code.min_angle() >= FRAC_PI_3 - 1e-12);
    }
}
