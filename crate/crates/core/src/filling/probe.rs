//! Sampled local convexity of `Y` inside one cone.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{epsilon_bound, y_membership, SubspaceDescriptor};
use crate::cone::{solve, ConePoint, ConeSpace, SampleOptions};
use crate::error::{Error, Result};
use crate::parallel;

const REJECTION_TRIES: usize = 400;
const EXITS_KEPT: usize = 10;

#[derive(Debug, Clone, Copy)]
pub struct ProbeOptions {
    /// Fraction of balls centred at the apex.
    pub tip_share: f64,
    /// Non-apex balls use this fraction of the admissible radius.
    pub radius_factor: f64,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions { tip_share: 0.5, radius_factor: 0.99 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbeExit {
    pub from: ConePoint,
    pub to: ConePoint,
    /// First sample of the geodesic outside `Y`.
    pub outside: ConePoint,
    pub through_tip: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbeReport {
    pub component: usize,
    pub pairs_tested: usize,
    pub skipped: usize,
    pub tip_pairs: usize,
    pub exits: usize,
    pub pass: bool,
    pub seed: u64,
    pub examples: Vec<ProbeExit>,
}

enum Outcome {
    Skipped,
    Tested { tip: bool, exit: Option<ProbeExit> },
}

/// Sample pairs of points of `Y` in small balls and check that the
/// geodesic between them stays in `Y`.
pub fn local_convexity_probe(
    cone: &ConeSpace,
    s: &SubspaceDescriptor,
    component: usize,
    n_pairs: usize,
    seed: u64,
    opts: ProbeOptions,
) -> Result<ProbeReport> {
    let f = cone
        .warping()
        .as_cone()
        .ok_or_else(|| Error::InvalidDescriptor("the probe needs a synthesized warping function".into()))?;
    if component >= s.levels[0].components.len() {
        return Err(Error::OutOfRange(format!("component {component} does not exist")));
    }
    if (f.b() - s.b).abs() > 1e-12 {
        return Err(Error::InvalidDescriptor(format!("cone glues at b = {}, subspace uses b = {}", f.b(), s.b)));
    }
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<u64> = (0..n_pairs).map(|_| master.random::<u64>()).collect();
    let outcomes: Vec<Outcome> = parallel::install(|| {
        seeds.par_iter().map(|&sd| probe_pair(cone, s, component, sd, opts)).collect::<Result<Vec<_>>>()
    })?;

    let mut report = ProbeReport {
        component,
        pairs_tested: 0,
        skipped: 0,
        tip_pairs: 0,
        exits: 0,
        pass: true,
        seed,
        examples: Vec::new(),
    };
    for o in outcomes {
        match o {
            Outcome::Skipped => report.skipped += 1,
            Outcome::Tested { tip, exit } => {
                report.pairs_tested += 1;
                report.tip_pairs += tip as usize;
                if let Some(e) = exit {
                    report.exits += 1;
                    if report.examples.len() < EXITS_KEPT {
                        report.examples.push(e);
                    }
                }
            }
        }
    }
    report.pass = report.exits == 0;
    Ok(report)
}

fn sample_in_arcs(s: &SubspaceDescriptor, comp: usize, length: f64, rng: &mut ChaCha8Rng) -> Option<f64> {
    let arcs = s.arcs_at(s.b, comp);
    let total: f64 = arcs.iter().map(|a| (2.0 * a.half_length).min(length)).sum();
    if total <= 0.0 {
        return None;
    }
    let mut x = total * rng.random_range(0.0..1.0);
    for a in arcs {
        let len = (2.0 * a.half_length).min(length);
        if x <= len {
            return Some((a.center - a.half_length + x).rem_euclid(length));
        }
        x -= len;
    }
    None
}

fn probe_pair(cone: &ConeSpace, s: &SubspaceDescriptor, comp: usize, seed: u64, opts: ProbeOptions) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = cone.warping().as_cone().expect("checked by caller");
    let length = cone.fiber().length;
    let t0 = cone.t0();
    let in_y = |p: &ConePoint| y_membership(s, comp, length, t0, p.t, p.theta);

    let tip = rng.random_range(0.0..1.0) < opts.tip_share;
    let (center, eps) = if tip {
        (cone.tip(), (s.b - t0) / 3.0)
    } else {
        let Some(theta) = sample_in_arcs(s, comp, length, &mut rng) else {
            return Ok(Outcome::Skipped);
        };
        let t_y = t0 + (s.b - t0) * rng.random_range(1e-3..1.0);
        let bound = epsilon_bound(t_y, f, s.b_prime, s.c, s.lcr)?;
        (ConePoint::new(t_y, theta), opts.radius_factor * bound.eps_max)
    };

    // rejection sampling of Y ∩ B_ε(center)
    let draw = |rng: &mut ChaCha8Rng| -> Option<ConePoint> {
        for _ in 0..REJECTION_TRIES {
            let p = if tip {
                ConePoint::new(t0 + eps * rng.random_range(0.0..1.0), length * rng.random_range(0.0..1.0))
            } else {
                let t = center.t + eps * rng.random_range(-1.0..1.0);
                if t <= t0 || t >= cone.t_max() {
                    continue;
                }
                // fiber window wide enough to reach the ball edge at the lowest level
                let width = (eps / cone.warping().value((center.t - eps).max(t0 + 1e-12))).min(0.5 * length);
                ConePoint::new(t, cone.fiber().reduce(center.theta + width * rng.random_range(-1.0..1.0)))
            };
            if !in_y(&p) {
                continue;
            }
            let inside = if tip { p.t - t0 < eps } else { solve(cone, center, p).map(|g| g.length < eps).unwrap_or(false) };
            if inside {
                return Some(p);
            }
        }
        None
    };
    let (Some(z), Some(w)) = (draw(&mut rng), draw(&mut rng)) else {
        return Ok(Outcome::Skipped);
    };
    let Ok(sol) = solve(cone, z, w) else {
        return Ok(Outcome::Skipped);
    };
    if sol.flagged {
        return Ok(Outcome::Skipped);
    }
    let path = sol.sample(cone, SampleOptions::coarse());
    let exit = path.samples.iter().find(|p| !in_y(p)).map(|&outside| ProbeExit {
        from: z,
        to: w,
        outside,
        through_tip: sol.through_tip,
    });
    Ok(Outcome::Tested { tip, exit })
}
