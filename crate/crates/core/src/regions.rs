//! Bounded simulation domains.
//!
//! Euclidean regions (boxes, balls, unions of disjoint boxes) carry Lebesgue
//! measure; spherical regions (the whole sphere, caps, unions of disjoint
//! caps) carry the normalized surface measure `s`. Every region offers exact
//! measure, closed membership and a uniform sampler.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::Serialize;

use crate::error::{check_domain, Error, Result};
use crate::geometry::{self, CapPolarSampler, ANGLE_TOL};
use crate::linalg;

pub type Point = Vec<f64>;

/// Axis-aligned box `Π [lower_i, lower_i + sides_i]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxisBox {
    pub lower: Vec<f64>,
    pub sides: Vec<f64>,
}

impl AxisBox {
    pub fn new(lower: Vec<f64>, sides: Vec<f64>) -> Result<Self> {
        if lower.len() != sides.len() {
            return Err(Error::DimensionMismatch {
                expected: sides.len(),
                got: lower.len(),
            });
        }
        for &s in &sides {
            check_domain("box side", s, s > 0.0 && s.is_finite(), "(0, ∞)")?;
        }
        Ok(Self { lower, sides })
    }

    /// Box with its lower corner at the origin.
    pub fn at_origin(sides: Vec<f64>) -> Result<Self> {
        Self::new(vec![0.0; sides.len()], sides)
    }

    pub fn dim(&self) -> usize {
        self.sides.len()
    }

    pub fn volume(&self) -> f64 {
        self.sides.iter().product()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter()
            .zip(self.lower.iter().zip(&self.sides))
            .all(|(&x, (&lo, &s))| x >= lo && x <= lo + s)
    }

    /// Whether the interiors intersect.
    pub fn overlaps(&self, other: &AxisBox) -> bool {
        self.lower
            .iter()
            .zip(&self.sides)
            .zip(other.lower.iter().zip(&other.sides))
            .all(|((&a, &sa), (&b, &sb))| a < b + sb && b < a + sa)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        self.lower
            .iter()
            .zip(&self.sides)
            .map(|(&lo, &s)| lo + s * rng.random::<f64>())
            .collect()
    }

    pub fn centroid(&self) -> Point {
        self.lower
            .iter()
            .zip(&self.sides)
            .map(|(&lo, &s)| lo + 0.5 * s)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EuclideanRegion {
    Box(AxisBox),
    Ball { center: Point, radius: f64 },
    BoxUnion { boxes: Vec<AxisBox> },
}

impl EuclideanRegion {
    /// Box `[0, s_1] × … × [0, s_d]`.
    pub fn cube_box(sides: Vec<f64>) -> Result<Self> {
        AxisBox::at_origin(sides).map(Self::Box)
    }

    pub fn ball(center: Point, radius: f64) -> Result<Self> {
        check_domain("ball radius", radius, radius > 0.0 && radius.is_finite(), "(0, ∞)")?;
        if center.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        Ok(Self::Ball { center, radius })
    }

    pub fn box_union(boxes: Vec<AxisBox>) -> Result<Self> {
        let Some(first) = boxes.first() else {
            return Err(Error::Parse {
                input: "box_union".into(),
                reason: "empty union".into(),
            });
        };
        let d = first.dim();
        for b in &boxes {
            if b.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: b.dim(),
                });
            }
        }
        for i in 0..boxes.len() {
            for j in i + 1..boxes.len() {
                if boxes[i].overlaps(&boxes[j]) {
                    return Err(Error::OverlappingBoxes(i, j));
                }
            }
        }
        Ok(Self::BoxUnion { boxes })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Box(b) => b.dim(),
            Self::Ball { center, .. } => center.len(),
            Self::BoxUnion { boxes } => boxes[0].dim(),
        }
    }

    /// Lebesgue measure.
    pub fn volume(&self) -> f64 {
        match self {
            Self::Box(b) => b.volume(),
            Self::Ball { center, radius } => geometry::ball_volume(center.len(), *radius),
            Self::BoxUnion { boxes } => boxes.iter().map(AxisBox::volume).sum(),
        }
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        match self {
            Self::Box(b) => b.contains(p),
            Self::Ball { center, radius } => linalg::dist2(p, center) <= radius * radius,
            Self::BoxUnion { boxes } => boxes.iter().any(|b| b.contains(p)),
        }
    }

    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        match self {
            Self::Box(b) => b.sample(rng),
            Self::Ball { center, radius } => {
                let d = center.len();
                let dir = linalg::uniform_direction(d, rng);
                let r = radius * rng.random::<f64>().powf(1.0 / d as f64);
                center.iter().zip(&dir).map(|(c, u)| c + r * u).collect()
            }
            Self::BoxUnion { boxes } => {
                let total = self.volume();
                let mut pick = rng.random::<f64>() * total;
                for b in boxes {
                    if pick < b.volume() {
                        return b.sample(rng);
                    }
                    pick -= b.volume();
                }
                boxes[boxes.len() - 1].sample(rng)
            }
        }
    }

    /// Centre of mass.
    pub fn centroid(&self) -> Point {
        match self {
            Self::Box(b) => b.centroid(),
            Self::Ball { center, .. } => center.clone(),
            Self::BoxUnion { boxes } => {
                let total = self.volume();
                let mut c = vec![0.0; self.dim()];
                for b in boxes {
                    let w = b.volume() / total;
                    for (ci, bi) in c.iter_mut().zip(b.centroid()) {
                        *ci += w * bi;
                    }
                }
                c
            }
        }
    }
}

/// Closed spherical cap `C_θ(x) = {y : ⟨x, y⟩ ≥ cos θ}`.
#[derive(Clone, Debug)]
pub struct Cap {
    center: Point,
    radius: f64,
    cos_radius: f64,
    polar: CapPolarSampler,
}

impl PartialEq for Cap {
    fn eq(&self, other: &Self) -> bool {
        self.center == other.center && self.radius == other.radius
    }
}

impl Serialize for Cap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Cap", 2)?;
        st.serialize_field("center", &self.center)?;
        st.serialize_field("radius", &self.radius)?;
        st.end()
    }
}

impl Cap {
    /// Cap around `center` (unit norm to 1e-9, renormalized) of angular
    /// radius in `(0, π/2]`.
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        let n = linalg::norm(&center);
        check_domain("cap centre norm", n, (n - 1.0).abs() <= 1e-9, "1 ± 1e-9")?;
        let center = linalg::scale(&center, 1.0 / n);
        let polar = CapPolarSampler::new(center.len(), radius)?;
        Ok(Self {
            cos_radius: radius.cos(),
            center,
            radius,
            polar,
        })
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn ln_measure(&self) -> f64 {
        self.polar.ln_measure()
    }

    pub fn measure(&self) -> f64 {
        self.polar.ln_measure().exp()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        linalg::dot(&self.center, p) >= self.cos_radius - ANGLE_TOL
    }

    /// Uniform point of the cap via the exact polar-angle marginal.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        let phi = self.polar.polar_angle(rng.random::<f64>());
        let w = linalg::uniform_orthogonal(&self.center, rng);
        linalg::rotate_toward(&self.center, &w, phi)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SphericalRegion {
    FullSphere { d: usize },
    Cap(Cap),
    CapUnion { caps: Vec<Cap> },
}

impl SphericalRegion {
    pub fn full_sphere(d: usize) -> Result<Self> {
        check_domain("sphere dimension d", d as f64, d >= 2, "[2, ∞)")?;
        Ok(Self::FullSphere { d })
    }

    pub fn cap(center: Point, radius: f64) -> Result<Self> {
        Cap::new(center, radius).map(Self::Cap)
    }

    /// Union of caps, which must be pairwise disjoint (centre angle strictly
    /// larger than the sum of radii).
    pub fn cap_union(caps: Vec<Cap>) -> Result<Self> {
        let Some(first) = caps.first() else {
            return Err(Error::Parse {
                input: "cap_union".into(),
                reason: "empty union".into(),
            });
        };
        let d = first.dim();
        for c in &caps {
            if c.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: c.dim(),
                });
            }
        }
        for i in 0..caps.len() {
            for j in i + 1..caps.len() {
                let a = linalg::angle(&caps[i].center, &caps[j].center);
                if a <= caps[i].radius + caps[j].radius {
                    return Err(Error::OverlappingCaps(i, j));
                }
            }
        }
        Ok(Self::CapUnion { caps })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::FullSphere { d } => *d,
            Self::Cap(c) => c.dim(),
            Self::CapUnion { caps } => caps[0].dim(),
        }
    }

    /// Normalized surface measure.
    pub fn measure(&self) -> f64 {
        match self {
            Self::FullSphere { .. } => 1.0,
            Self::Cap(c) => c.measure(),
            Self::CapUnion { caps } => caps.iter().map(Cap::measure).sum(),
        }
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        if (linalg::norm(p) - 1.0).abs() > 1e-9 {
            return false;
        }
        match self {
            Self::FullSphere { .. } => true,
            Self::Cap(c) => c.contains(p),
            Self::CapUnion { caps } => caps.iter().any(|c| c.contains(p)),
        }
    }

    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        match self {
            Self::FullSphere { d } => linalg::uniform_direction(*d, rng),
            Self::Cap(c) => c.sample(rng),
            Self::CapUnion { caps } => {
                let mut pick = rng.random::<f64>() * self.measure();
                for c in caps {
                    if pick < c.measure() {
                        return c.sample(rng);
                    }
                    pick -= c.measure();
                }
                caps[caps.len() - 1].sample(rng)
            }
        }
    }
}

/// Any simulation domain.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Region {
    Euclidean(EuclideanRegion),
    Spherical(SphericalRegion),
}

impl Region {
    pub fn dim(&self) -> usize {
        match self {
            Self::Euclidean(r) => r.dim(),
            Self::Spherical(r) => r.dim(),
        }
    }

    /// Volume for Euclidean regions, normalized surface measure for spherical ones.
    pub fn measure(&self) -> f64 {
        match self {
            Self::Euclidean(r) => r.volume(),
            Self::Spherical(r) => r.measure(),
        }
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        if p.len() != self.dim() {
            return false;
        }
        match self {
            Self::Euclidean(r) => r.contains(p),
            Self::Spherical(r) => r.contains(p),
        }
    }

    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        match self {
            Self::Euclidean(r) => r.sample_uniform(rng),
            Self::Spherical(r) => r.sample_uniform(rng),
        }
    }

    pub fn is_spherical(&self) -> bool {
        matches!(self, Self::Spherical(_))
    }

    /// Parses a region literal, using `default_d` where the literal leaves the
    /// dimension open (`ball:r=1.5`).
    pub fn parse_with_dim(s: &str, default_d: Option<usize>) -> Result<Self> {
        parse_region(s, default_d)
    }
}

impl From<EuclideanRegion> for Region {
    fn from(r: EuclideanRegion) -> Self {
        Self::Euclidean(r)
    }
}

impl From<SphericalRegion> for Region {
    fn from(r: SphericalRegion) -> Self {
        Self::Spherical(r)
    }
}

impl FromStr for Region {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_region(s, None)
    }
}

fn fmt_num(x: f64) -> String {
    format!("{x}")
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Euclidean(EuclideanRegion::Box(b)) if b.lower.iter().all(|&x| x == 0.0) => {
                let sides: Vec<String> = b.sides.iter().map(|&s| fmt_num(s)).collect();
                write!(f, "box:{}", sides.join("x"))
            }
            Self::Euclidean(EuclideanRegion::Ball { center, radius })
                if center.iter().all(|&x| x == 0.0) =>
            {
                write!(f, "ball:r={},d={}", fmt_num(*radius), center.len())
            }
            Self::Spherical(SphericalRegion::FullSphere { d }) => write!(f, "sphere:d={d}"),
            Self::Spherical(SphericalRegion::Cap(c)) if c.center == linalg::basis(c.dim(), 0) => {
                write!(f, "cap:d={},theta={}", c.dim(), fmt_num(c.radius))
            }
            Self::Euclidean(EuclideanRegion::Box(_)) => f.write_str("box:<offset>"),
            Self::Euclidean(EuclideanRegion::Ball { .. }) => f.write_str("ball:<offset>"),
            Self::Euclidean(EuclideanRegion::BoxUnion { boxes }) => {
                write!(f, "box_union:<{} boxes>", boxes.len())
            }
            Self::Spherical(SphericalRegion::Cap(_)) => f.write_str("cap:<rotated>"),
            Self::Spherical(SphericalRegion::CapUnion { caps }) => {
                write!(f, "cap_union:<{} caps>", caps.len())
            }
        }
    }
}

fn parse_err(input: &str, reason: impl Into<String>) -> Error {
    Error::Parse {
        input: input.to_string(),
        reason: reason.into(),
    }
}

fn parse_f64(input: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse::<f64>()
        .map_err(|e| parse_err(input, format!("bad number {v:?}: {e}")))
}

fn parse_params(input: &str, body: &str) -> Result<Vec<(String, String)>> {
    body.split(',')
        .filter(|kv| !kv.trim().is_empty())
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| parse_err(input, format!("expected key=value, got {kv:?}")))
        })
        .collect()
}

/// Parses `box:2x3`, `ball:r=1.5[,d=3]`, `sphere:d=4`, `cap:d=4,theta=1.0472`.
/// Balls are centred at the origin; caps at the first basis vector.
pub fn parse_region(s: &str, default_d: Option<usize>) -> Result<Region> {
    let (kind, body) = s
        .split_once(':')
        .ok_or_else(|| parse_err(s, "expected <kind>:<parameters>"))?;
    let check_d = |d: usize| -> Result<()> {
        match default_d {
            Some(dd) if dd != d => Err(Error::DimensionMismatch { expected: dd, got: d }),
            _ => Ok(()),
        }
    };
    match kind.trim() {
        "box" => {
            let sides = body
                .split('x')
                .map(|v| parse_f64(s, v))
                .collect::<Result<Vec<_>>>()?;
            check_d(sides.len())?;
            Ok(EuclideanRegion::cube_box(sides)?.into())
        }
        "ball" => {
            let mut radius = None;
            let mut d = default_d;
            for (k, v) in parse_params(s, body)? {
                match k.as_str() {
                    "r" => radius = Some(parse_f64(s, &v)?),
                    "d" => {
                        let dd = v.parse().map_err(|_| parse_err(s, "bad d"))?;
                        check_d(dd)?;
                        d = Some(dd);
                    }
                    other => return Err(parse_err(s, format!("unknown key {other:?}"))),
                }
            }
            let r = radius.ok_or_else(|| parse_err(s, "missing r"))?;
            let d = d.ok_or_else(|| parse_err(s, "missing d (pass d=… or --d)"))?;
            Ok(EuclideanRegion::ball(vec![0.0; d], r)?.into())
        }
        "sphere" | "cap" => {
            let mut theta = None;
            let mut d = default_d;
            for (k, v) in parse_params(s, body)? {
                match k.as_str() {
                    "d" => {
                        let dd = v.parse().map_err(|_| parse_err(s, "bad d"))?;
                        check_d(dd)?;
                        d = Some(dd);
                    }
                    "theta" if kind == "cap" => theta = Some(parse_f64(s, &v)?),
                    other => return Err(parse_err(s, format!("unknown key {other:?}"))),
                }
            }
            let d = d.ok_or_else(|| parse_err(s, "missing d"))?;
            if kind == "sphere" {
                Ok(SphericalRegion::full_sphere(d)?.into())
            } else {
                let theta = theta.ok_or_else(|| parse_err(s, "missing theta"))?;
                Ok(SphericalRegion::cap(linalg::basis(d, 0), theta)?.into())
            }
        }
        other => Err(parse_err(s, format!("unknown region kind {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_6};

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(11)
    }

    #[test]
    fn volumes() {
        assert_eq!(EuclideanRegion::cube_box(vec![2.0, 3.0]).unwrap().volume(), 6.0);
        for d in 1..8 {
            let b = EuclideanRegion::ball(vec![0.0; d], geometry::unit_volume_radius(d)).unwrap();
            assert_relative_eq!(b.volume(), 1.0, epsilon = 1e-12);
        }
        let u = EuclideanRegion::box_union(vec![
            AxisBox::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap(),
            AxisBox::new(vec![5.0, 0.0], vec![1.0, 1.0]).unwrap(),
        ])
        .unwrap();
        assert_eq!(u.volume(), 2.0);
    }

    #[test]
    fn overlapping_unions_rejected() {
        let r = EuclideanRegion::box_union(vec![
            AxisBox::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap(),
            AxisBox::new(vec![0.5, 0.5], vec![1.0, 1.0]).unwrap(),
        ]);
        assert_eq!(r, Err(Error::OverlappingBoxes(0, 1)));
        // touching faces are fine
        assert!(EuclideanRegion::box_union(vec![
            AxisBox::new(vec![0.0], vec![1.0]).unwrap(),
            AxisBox::new(vec![1.0], vec![1.0]).unwrap(),
        ])
        .is_ok());
        let a = Cap::new(vec![1.0, 0.0, 0.0], 0.5).unwrap();
        let b = Cap::new(vec![0.0, 1.0, 0.0], 1.2).unwrap();
        assert_eq!(
            SphericalRegion::cap_union(vec![a, b]),
            Err(Error::OverlappingCaps(0, 1))
        );
    }

    #[test]
    fn spherical_measures() {
        assert_eq!(SphericalRegion::full_sphere(3).unwrap().measure(), 1.0);
        let h = SphericalRegion::cap(vec![1.0, 0.0, 0.0], FRAC_PI_2).unwrap();
        assert_relative_eq!(h.measure(), 0.5, epsilon = 1e-15);
        let u = SphericalRegion::cap_union(vec![
            Cap::new(vec![1.0, 0.0, 0.0], FRAC_PI_6).unwrap(),
            Cap::new(vec![-1.0, 0.0, 0.0], FRAC_PI_6).unwrap(),
        ])
        .unwrap();
        assert_relative_eq!(u.measure(), 2.0 * (1.0 - FRAC_PI_6.cos()) / 2.0, epsilon = 1e-14);
    }

    #[test]
    fn closed_membership() {
        let b = EuclideanRegion::cube_box(vec![1.0, 1.0]).unwrap();
        assert!(b.contains(&[0.5, 0.5]));
        assert!(b.contains(&[1.0, 0.0]));
        assert!(!b.contains(&[1.0 + 1e-12, 0.0]));
        let ball = EuclideanRegion::ball(vec![0.0; 3], 1.0).unwrap();
        assert!(ball.contains(&[1.0, 0.0, 0.0]));
        let cap = SphericalRegion::cap(vec![1.0, 0.0, 0.0], FRAC_PI_3).unwrap();
        let p = [FRAC_PI_3.cos(), FRAC_PI_3.sin(), 0.0];
        assert!(cap.contains(&p));
        assert!(!cap.contains(&[0.0, 1.0, 0.0]));
    }

    #[test]
    fn box_sample_mean() {
        let b = Region::from(EuclideanRegion::cube_box(vec![1.0, 1.0]).unwrap());
        let mut rng = rng();
        let n = 1_000_000;
        let mut m = [0.0; 2];
        for _ in 0..n {
            let p = b.sample_uniform(&mut rng);
            assert!(b.contains(&p));
            m[0] += p[0];
            m[1] += p[1];
        }
        // Var(U) = 1/12
        let se = (1.0 / 12.0 / n as f64).sqrt();
        for mi in m {
            assert!((mi / n as f64 - 0.5).abs() < 3.0 * se);
        }
    }

    #[test]
    fn sphere_sample_mean() {
        let s = Region::from(SphericalRegion::full_sphere(3).unwrap());
        let mut rng = rng();
        let n = 200_000;
        let mut m = [0.0; 3];
        for _ in 0..n {
            let p = s.sample_uniform(&mut rng);
            assert!(s.contains(&p));
            for i in 0..3 {
                m[i] += p[i];
            }
        }
        // each coordinate has variance 1/3
        let se = (1.0 / 3.0 / n as f64).sqrt();
        for mi in m {
            assert!((mi / n as f64).abs() < 3.0 * se);
        }
    }

    #[test]
    fn cap_sub_cap_fraction() {
        let cap = Region::from(SphericalRegion::cap(vec![1.0, 0.0, 0.0], FRAC_PI_3).unwrap());
        let inner = SphericalRegion::cap(vec![1.0, 0.0, 0.0], FRAC_PI_6).unwrap();
        let expect = ((1.0 - FRAC_PI_6.cos()) / 2.0) / 0.25;
        let mut rng = rng();
        let n = 200_000;
        let mut hits = 0usize;
        for _ in 0..n {
            let p = cap.sample_uniform(&mut rng);
            assert!(cap.contains(&p));
            hits += inner.contains(&p) as usize;
        }
        let se = (expect * (1.0 - expect) / n as f64).sqrt();
        assert!((hits as f64 / n as f64 - expect).abs() < 3.0 * se);
    }

    #[test]
    fn sub_region_fractions_match_measure_ratios() {
        let mut rng = rng();
        let n = 100_000;
        let cases: Vec<(Region, Region)> = vec![
            (
                EuclideanRegion::ball(vec![0.0; 4], 1.0).unwrap().into(),
                EuclideanRegion::ball(vec![0.0; 4], 0.8).unwrap().into(),
            ),
            (
                EuclideanRegion::box_union(vec![
                    AxisBox::new(vec![0.0, 0.0], vec![1.0, 2.0]).unwrap(),
                    AxisBox::new(vec![3.0, 0.0], vec![1.0, 1.0]).unwrap(),
                ])
                .unwrap()
                .into(),
                EuclideanRegion::cube_box(vec![1.0, 2.0]).unwrap().into(),
            ),
            (
                SphericalRegion::cap(vec![0.0, 0.0, 0.0, 1.0, 0.0], 1.2).unwrap().into(),
                SphericalRegion::cap(vec![0.0, 0.0, 0.0, 1.0, 0.0], 0.7).unwrap().into(),
            ),
            (
                SphericalRegion::full_sphere(6).unwrap().into(),
                SphericalRegion::cap(linalg::basis(6, 2), 1.0).unwrap().into(),
            ),
        ];
        for (outer, inner) in cases {
            let ratio = inner.measure() / outer.measure();
            let mut hits = 0usize;
            for _ in 0..n {
                let p = outer.sample_uniform(&mut rng);
                assert!(outer.contains(&p));
                hits += inner.contains(&p) as usize;
            }
            let se = (ratio * (1.0 - ratio) / n as f64).sqrt();
            assert!(
                (hits as f64 / n as f64 - ratio).abs() < 4.0 * se,
                "{outer} vs {inner}"
            );
        }
    }

    #[test]
    fn literals() {
        let r: Region = "box:2x3".parse().unwrap();
        assert_eq!(r.measure(), 6.0);
        assert_eq!(r.to_string(), "box:2x3");
        let r = Region::parse_with_dim("ball:r=1.5", Some(3)).unwrap();
        assert_eq!(r.dim(), 3);
        assert_relative_eq!(r.measure(), 4.0 / 3.0 * std::f64::consts::PI * 1.5f64.powi(3), max_relative = 1e-13);
        let r: Region = "sphere:d=4".parse().unwrap();
        assert_eq!(r.measure(), 1.0);
        let r: Region = "cap:d=4,theta=1.0472".parse().unwrap();
        assert_eq!(r.dim(), 4);
        assert_eq!(r.to_string(), "cap:d=4,theta=1.0472");
        assert!("blob:1".parse::<Region>().is_err());
        assert!("ball:r=1".parse::<Region>().is_err());
        assert!(Region::parse_with_dim("box:2x3", Some(3)).is_err());
        assert!("cap:d=3,theta=2".parse::<Region>().is_err());
    }
}
