//! Geometry at the apex: directions, angles and the logarithm map.

use std::f64::consts::PI;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{solve, ConePoint, ConeSpace};
use crate::error::{Error, Result};
use crate::model::model_angle;

/// Angle at the apex between the radial directions toward fiber points
/// `p1` and `p2`, taken as `min{π, d(p1, p2) / δ}`.
pub fn tip_angle(cone: &ConeSpace, p1: f64, p2: f64) -> f64 {
    let d = cone.fiber().distance(p1, p2);
    (d / cone.warping().apex_slope()).min(PI)
}

/// `δ · d_F(p(x), p(y)) ≥ π`: the unrolled fiber separation forces the
/// shortest path through the apex.
pub fn through_tip_sufficient(cone: &ConeSpace, x: &ConePoint, y: &ConePoint) -> bool {
    cone.warping().apex_slope() * cone.fiber().distance(x.theta, y.theta) >= PI
}

/// Comparison angle at the apex of the triangle with two radial sides of
/// length `r` toward `p1` and `p2`. As `r → 0` this tends to the Alexandrov
/// angle between the two directions.
pub fn alexandrov_angle_estimate(cone: &ConeSpace, p1: f64, p2: f64, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Nonpositive { name: "r", value: r });
    }
    let t = cone.t0() + r;
    let side = solve(cone, ConePoint::new(t, p1), ConePoint::new(t, p2))?.length;
    model_angle(0.0, r, r, side.min(2.0 * r))
}

/// Smallest fiber separation at which the geodesic between two points at
/// levels `t1`, `t2` passes through the apex, found by bisection. `None` if
/// even the largest separation the fiber allows stays tip-avoiding.
pub fn empirical_tip_threshold(cone: &ConeSpace, t1: f64, t2: f64, tol: f64) -> Result<Option<f64>> {
    let fiber = cone.fiber();
    let top = match fiber.kind {
        super::FiberKind::Circle => 0.5 * fiber.length,
        super::FiberKind::Interval => fiber.length,
    };
    let through = |d: f64| -> Result<bool> {
        Ok(solve(cone, ConePoint::new(t1, 0.0), ConePoint::new(t2, d))?.through_tip)
    };
    if !through(top)? {
        return Ok(None);
    }
    let (mut lo, mut hi) = (0.0, top);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if through(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LogInjectivityReport {
    pub samples: usize,
    /// Pairs whose logarithms coincide.
    pub collisions: usize,
    /// Smallest separation `max(|d1 − d2|, angle)` over pairs.
    pub min_separation: f64,
    pub pass: bool,
}

/// `log(x) = (direction, distance)` at the apex: the fiber coordinate of the
/// radial geodesic and `t − t0`.
pub fn log_map(cone: &ConeSpace, x: &ConePoint) -> (f64, f64) {
    (cone.fiber().reduce(x.theta), x.t - cone.t0())
}

/// Pairwise comparison of apex logarithms of the given non-apex points.
pub fn log_injectivity_of(cone: &ConeSpace, points: &[ConePoint]) -> LogInjectivityReport {
    let logs: Vec<_> = points.iter().map(|p| log_map(cone, p)).collect();
    let mut collisions = 0;
    let mut min_separation = f64::INFINITY;
    for i in 0..logs.len() {
        for j in i + 1..logs.len() {
            let (a, b) = (logs[i], logs[j]);
            let sep = (a.1 - b.1).abs().max(tip_angle(cone, a.0, b.0));
            if sep == 0.0 {
                collisions += 1;
            }
            min_separation = min_separation.min(sep);
        }
    }
    LogInjectivityReport { samples: points.len(), collisions, min_separation, pass: collisions == 0 }
}

/// Sample `m` distinct points within `(b − t0)/3` of the apex and check
/// that their logarithms are distinct.
pub fn log_injectivity_check(cone: &ConeSpace, m: usize, seed: u64) -> Result<LogInjectivityReport> {
    if m < 2 {
        return Err(Error::OutOfRange(format!("log injectivity needs m >= 2, got {m}")));
    }
    let t0 = cone.t0();
    let top = cone.warping().kink().unwrap_or(cone.t_max());
    let radius = (top - t0) / 3.0;
    let span = cone.fiber().length;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<ConePoint> = Vec::with_capacity(m);
    while points.len() < m {
        let p = ConePoint::new(t0 + radius * rng.random_range(1e-6..1.0), span * rng.random_range(0.0..1.0));
        if !points.iter().any(|q| q.t == p.t && q.theta == p.theta) {
            points.push(p);
        }
    }
    Ok(log_injectivity_of(cone, &points))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::Fiber;
    use crate::warp::{synthesize, Warping};

    fn cone(delta: f64) -> ConeSpace {
        let f = synthesize(1.0, delta).unwrap();
        ConeSpace::new(Warping::Cone(f), Fiber::circle(2.0 * PI / delta * 1.05).unwrap(), 2.0).unwrap()
    }

    #[test]
    fn tip_angle_formula() {
        let c = cone(0.8);
        assert_eq!(tip_angle(&c, 1.0, 1.0), 0.0);
        assert!((tip_angle(&c, 0.0, 0.8) - 1.0).abs() < 1e-15);
        assert_eq!(tip_angle(&c, 0.0, PI * 0.8), PI);
    }

    #[test]
    fn sufficient_condition() {
        let plane = ConeSpace::euclidean_plane(3.0);
        assert!(through_tip_sufficient(&plane, &ConePoint::new(1.0, 0.0), &ConePoint::new(1.0, PI)));
        assert!(!through_tip_sufficient(&plane, &ConePoint::new(1.0, 0.0), &ConePoint::new(1.0, 3.0)));
    }

    #[test]
    fn flat_threshold_is_pi() {
        let plane = ConeSpace::euclidean_plane(3.0);
        let d = empirical_tip_threshold(&plane, 1.0, 2.0, 1e-6).unwrap().unwrap();
        // length ties within 1e-9 go through the tip, which moves the flip by O(√1e-9)
        assert!((d - PI).abs() < 1e-4, "{d}");
    }

    #[test]
    fn logs_are_injective() {
        let c = cone(0.8);
        let t0 = c.t0();
        let pair = [ConePoint::new(t0 + 0.1, 0.0), ConePoint::new(t0 + 0.1, 0.5 * c.fiber().length)];
        assert!(log_injectivity_of(&c, &pair).pass);
        let pair = [ConePoint::new(t0 + 0.1, 1.0), ConePoint::new(t0 + 0.2, 1.0)];
        assert!(log_injectivity_of(&c, &pair).pass);
        let r = log_injectivity_check(&c, 100, 7).unwrap();
        assert!(r.pass && r.samples == 100);
    }
}
