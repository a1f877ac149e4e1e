use std::f64::consts::FRAC_PI_3;

use clap::ValueEnum;
use hardcore::ensemble::DEFAULT_BUDGET;
use hardcore::geometry::theta_prime;
use hardcore::montecarlo::sub_seed;
use hardcore::regions::AxisBox;
use hardcore::verify::*;
use hardcore::{EuclideanRegion, Exclusion, Fugacity, Region, Result, SphericalRegion};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Markov,
    Rearrangement,
    Containment,
    Occupancy,
    Pk,
    All,
}

#[derive(Clone, Copy, Debug)]
pub struct SuiteParams {
    /// Random box unions per dimension in the rearrangement sweep.
    pub trials: usize,
    pub n: u64,
    /// Size constant `c` of the `p_k` trend (`k = ⌈c d⌉`).
    pub c: f64,
    pub seed: u64,
}

/// One merged report per lemma, in the order the lemmas first appear.
#[derive(Default)]
pub struct Reports(pub Vec<VerificationReport>);

impl Reports {
    fn add(&mut self, tag: &str, part: VerificationReport) {
        let i = match self.0.iter().position(|r| r.lemma_id == part.lemma_id) {
            Some(i) => i,
            None => {
                self.0.push(VerificationReport::new(&part.lemma_id, part.seed));
                self.0.len() - 1
            }
        };
        let total = &mut self.0[i];
        total.absorb(&part);
        for (k, v) in part.statistics {
            total.statistics.insert(format!("{tag}/{k}"), v);
        }
        for n in part.notes {
            total.notes.push(format!("{tag}: {n}"));
        }
    }
}

fn lam(x: f64) -> Fugacity {
    Fugacity::new(x).expect("positive literal")
}

fn markov(p: SuiteParams, out: &mut Reports) -> Result<()> {
    let beds = [
        (vec![4.0], AxisBox::new(vec![0.0], vec![2.0])?, 1.0, "d1"),
        (vec![3.0, 3.0], AxisBox::new(vec![0.0, 0.0], vec![1.0, 1.0])?, 0.5, "d2"),
    ];
    // Bonferroni over the testbeds.
    let sig = MARKOV_SIGNIFICANCE / beds.len() as f64;
    for (i, (sides, a, l, tag)) in beds.into_iter().enumerate() {
        let s = EuclideanRegion::cube_box(sides)?;
        let r = verify_spatial_markov(&s, &EuclideanRegion::Box(a), lam(l), p.n, sub_seed(p.seed, 100 + i as u64), sig)?;
        out.add(tag, r);
    }
    Ok(())
}

fn rearrangement(p: SuiteParams, out: &mut Reports) -> Result<()> {
    out.add("sweep", verify_rearrangement_sweep(&[2, 3], p.trials, p.n, sub_seed(p.seed, 200))?);
    let mut i = 0;
    for d in 2..=6 {
        for theta in [0.5, FRAC_PI_3, 1.3] {
            let tp = theta_prime(theta)?;
            for j in 0..4 {
                let alpha = tp + (theta - tp) * j as f64 / 3.0;
                let r = verify_cap_intersection_bound(alpha, theta, d, p.n, 2, sub_seed(p.seed, 300 + i))?;
                out.add(&format!("d{d}/theta{theta:.4}/alpha{alpha:.4}"), r);
                i += 1;
            }
        }
    }
    Ok(())
}

fn containment(p: SuiteParams, out: &mut Reports) -> Result<()> {
    for d in [2, 3, 4, 8] {
        out.add(&format!("d{d}"), verify_lens_containment(d, p.n, sub_seed(p.seed, 400 + d as u64))?);
    }
    // Each trial solves a min-norm problem, so the grid gets a fifth of the budget.
    for d in [3, 4] {
        let r = verify_cap_containment_grid(d, &[0.3, 0.5, FRAC_PI_3, 1.3], 5, (p.n / 5).max(1), sub_seed(p.seed, 410 + d as u64))?;
        out.add(&format!("d{d}"), r);
    }
    Ok(())
}

fn occupancy(p: SuiteParams, out: &mut Reports) -> Result<()> {
    let n = (p.n / 5).max(1);
    let circle = Region::Spherical(SphericalRegion::full_sphere(2)?);
    let e = Exclusion::angle(0.1)?;
    for k in 10..=15 {
        let r = verify_occupancy_bound(&circle, &e, lam(15.0), k, 0.5, n, sub_seed(p.seed, 500 + k as u64), DEFAULT_BUDGET)?;
        out.add(&format!("circle/k{k}"), r);
    }
    let line = Region::Euclidean(EuclideanRegion::cube_box(vec![24.0])?);
    for k in 10..=12 {
        let r = verify_occupancy_bound(&line, &Exclusion::hard_sphere(1), lam(0.5), k, 0.5, n, sub_seed(p.seed, 520 + k as u64), DEFAULT_BUDGET)?;
        out.add(&format!("interval/k{k}"), r);
    }
    Ok(())
}

fn pk(p: SuiteParams, out: &mut Reports) -> Result<()> {
    let dims = [4, 6, 8, 10];
    for (theta, tag) in [(None, "ball"), (Some(FRAC_PI_3), "cap")] {
        out.add(tag, verify_pk_trend(&dims, theta, p.c, p.n, sub_seed(p.seed, 600))?);
        out.add(tag, verify_pk_trend_fixed_k(&dims, theta, 2, p.n, sub_seed(p.seed, 610))?);
    }
    Ok(())
}

pub fn run(suite: Suite, p: SuiteParams) -> Result<Reports> {
    let mut out = Reports::default();
    let all = suite == Suite::All;
    if all || suite == Suite::Markov {
        markov(p, &mut out)?;
    }
    if all || suite == Suite::Rearrangement {
        rearrangement(p, &mut out)?;
    }
    if all || suite == Suite::Containment {
        containment(p, &mut out)?;
    }
    if all || suite == Suite::Occupancy {
        occupancy(p, &mut out)?;
    }
    if all || suite == Suite::Pk {
        pk(p, &mut out)?;
    }
    Ok(out)
}
