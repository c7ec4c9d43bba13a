//! Warped products `[t0, t_max) ×_f F` over one-dimensional fibers.

mod geodesic;
mod oracle;
mod tip;

pub use geodesic::{geodesic, solve, GeodesicPath, GeodesicSolution, SampleOptions};
pub use oracle::{distance_oracle, distance_oracle_with, OracleOptions};
pub use tip::{
    alexandrov_angle_estimate, empirical_tip_threshold, log_injectivity_check, log_injectivity_of, log_map, through_tip_sufficient,
    tip_angle,
    LogInjectivityReport,
};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::warp::Warping;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FiberKind {
    Circle,
    Interval,
}

/// The fiber: a circle of circumference `length` or an interval `[0, length]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fiber {
    pub kind: FiberKind,
    #[serde(rename = "L")]
    pub length: f64,
}

impl Fiber {
    pub fn circle(length: f64) -> Result<Self> {
        Self::new(FiberKind::Circle, length)
    }

    pub fn interval(length: f64) -> Result<Self> {
        Self::new(FiberKind::Interval, length)
    }

    pub fn new(kind: FiberKind, length: f64) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::Nonpositive { name: "L", value: length });
        }
        Ok(Fiber { kind, length })
    }

    /// Canonical representative of a fiber coordinate.
    pub fn reduce(&self, theta: f64) -> f64 {
        match self.kind {
            FiberKind::Circle => {
                let r = theta.rem_euclid(self.length);
                if r >= self.length { 0.0 } else { r }
            }
            FiberKind::Interval => theta,
        }
    }

    pub fn contains(&self, theta: f64) -> bool {
        match self.kind {
            FiberKind::Circle => theta.is_finite(),
            FiberKind::Interval => (0.0..=self.length).contains(&theta),
        }
    }

    pub fn distance(&self, a: f64, b: f64) -> f64 {
        match self.kind {
            FiberKind::Circle => {
                let d = (b - a).rem_euclid(self.length);
                d.min(self.length - d)
            }
            FiberKind::Interval => (b - a).abs(),
        }
    }

    /// Shortest signed displacement from `a` to `b`.
    pub fn signed_step(&self, a: f64, b: f64) -> f64 {
        match self.kind {
            FiberKind::Circle => {
                let d = (b - a).rem_euclid(self.length);
                if d > 0.5 * self.length { d - self.length } else { d }
            }
            FiberKind::Interval => b - a,
        }
    }

    /// Candidate fiber displacements `(direction, amount)` from `a` to `b`:
    /// both ways round a circle, the direct one on an interval.
    pub fn displacements(&self, a: f64, b: f64) -> Vec<(f64, f64)> {
        match self.kind {
            FiberKind::Circle => {
                let d = (b - a).rem_euclid(self.length);
                if d == 0.0 {
                    vec![(1.0, 0.0)]
                } else {
                    vec![(1.0, d), (-1.0, self.length - d)]
                }
            }
            FiberKind::Interval => {
                let d = b - a;
                vec![(if d < 0.0 { -1.0 } else { 1.0 }, d.abs())]
            }
        }
    }

    /// `L/2` for a circle, infinite for an interval.
    pub fn injectivity_radius(&self) -> f64 {
        match self.kind {
            FiberKind::Circle => 0.5 * self.length,
            FiberKind::Interval => f64::INFINITY,
        }
    }

    /// Upper curvature bound `(π / injrad)²` of the fiber.
    pub fn curvature_bound(&self) -> f64 {
        let r = self.injectivity_radius();
        if r.is_finite() { (PI / r).powi(2) } else { 0.0 }
    }
}

/// A point `(t, θ)`; `θ` is irrelevant at the apex `t = t0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConePoint {
    pub t: f64,
    pub theta: f64,
}

impl ConePoint {
    pub fn new(t: f64, theta: f64) -> Self {
        ConePoint { t, theta }
    }
}

/// The warped cone `C_f(F) = [t0, t_max) ×_f F`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeSpace {
    warping: Warping,
    fiber: Fiber,
    t_max: f64,
}

impl ConeSpace {
    pub fn new(warping: Warping, fiber: Fiber, t_max: f64) -> Result<Self> {
        let t0 = warping.apex();
        let floor = warping.kink().unwrap_or(t0);
        if !(t_max > floor) || !t_max.is_finite() {
            return Err(Error::InvalidDescriptor(format!("t_max = {t_max} must exceed {floor}")));
        }
        Ok(ConeSpace { warping, fiber, t_max })
    }

    /// The flat cone `f(t) = t` over a circle of length `2π`: the Euclidean plane.
    pub fn euclidean_plane(t_max: f64) -> Self {
        ConeSpace::new(Warping::euclidean(), Fiber::circle(2.0 * PI).unwrap(), t_max).unwrap()
    }

    pub fn warping(&self) -> &Warping {
        &self.warping
    }
    pub fn fiber(&self) -> &Fiber {
        &self.fiber
    }
    pub fn t0(&self) -> f64 {
        self.warping.apex()
    }
    pub fn t_max(&self) -> f64 {
        self.t_max
    }
    pub fn tip(&self) -> ConePoint {
        ConePoint::new(self.t0(), 0.0)
    }

    /// `(π / injrad(F))²`, the curvature bound of the fiber.
    pub fn fiber_curvature(&self) -> f64 {
        self.fiber.curvature_bound()
    }

    pub fn check_point(&self, p: &ConePoint) -> Result<()> {
        if !(p.t >= self.t0() && p.t < self.t_max) || !self.fiber.contains(p.theta) {
            return Err(Error::OutOfRange(format!(
                "({}, {}) outside [{}, {}) x fiber",
                p.t,
                p.theta,
                self.t0(),
                self.t_max
            )));
        }
        Ok(())
    }

    pub fn is_tip(&self, p: &ConePoint) -> bool {
        p.t <= self.t0()
    }

    /// Length of one coordinate segment under the midpoint rule.
    pub fn segment_length(&self, a: &ConePoint, b: &ConePoint) -> f64 {
        let dt = b.t - a.t;
        let dtheta = self.fiber.signed_step(a.theta, b.theta);
        let f = self.warping.value(0.5 * (a.t + b.t));
        (dt * dt + f * f * dtheta * dtheta).sqrt()
    }
}

/// Discrete length functional `Σ √(Δt² + f(t̄)² Δθ²)`.
pub fn path_length(cone: &ConeSpace, samples: &[ConePoint]) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::OutOfRange("a path needs at least two samples".into()));
    }
    for p in samples {
        cone.check_point(p)?;
    }
    Ok(samples.windows(2).map(|w| cone.segment_length(&w[0], &w[1])).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::warp::synthesize;

    fn synthesized() -> ConeSpace {
        let f = synthesize(1.0, 0.5).unwrap();
        ConeSpace::new(Warping::Cone(f), Fiber::circle(4.0 * PI).unwrap(), 2.0).unwrap()
    }

    #[test]
    fn radial_path_length() {
        let cone = synthesized();
        let t0 = cone.t0();
        let samples: Vec<_> = (0..=100).map(|i| ConePoint::new(t0 + (1.0 - t0) * i as f64 / 100.0, 0.3)).collect();
        assert!((path_length(&cone, &samples).unwrap() - (1.0 - t0)).abs() < 1e-12);
    }

    #[test]
    fn level_arc_length() {
        let cone = synthesized();
        let t = 0.5;
        let d = 1.25;
        let samples: Vec<_> = (0..=50).map(|i| ConePoint::new(t, d * i as f64 / 50.0)).collect();
        let expected = cone.warping().value(t) * d;
        assert!((path_length(&cone, &samples).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn small_arc_on_flat_cone() {
        let cone = ConeSpace::euclidean_plane(3.0);
        let eps = 1e-4;
        let l = path_length(&cone, &[ConePoint::new(1.0, 0.0), ConePoint::new(1.0, eps)]).unwrap();
        assert!((l - eps).abs() < 1e-12);
    }

    #[test]
    fn out_of_range_samples() {
        let cone = synthesized();
        let bad = [ConePoint::new(cone.t0() - 0.1, 0.0), ConePoint::new(0.5, 0.0)];
        assert!(matches!(path_length(&cone, &bad), Err(Error::OutOfRange(_))));
        assert!(path_length(&cone, &[ConePoint::new(0.5, 0.0)]).is_err());
        assert!(path_length(&cone, &[ConePoint::new(0.5, 0.0), ConePoint::new(2.0, 0.0)]).is_err());
    }

    #[test]
    fn circle_fiber_geometry() {
        let f = Fiber::circle(10.0).unwrap();
        assert_eq!(f.distance(1.0, 9.0), 2.0);
        assert_eq!(f.signed_step(9.0, 1.0), 2.0);
        assert_eq!(f.reduce(-1.0), 9.0);
        assert!((f.curvature_bound() - (PI / 5.0).powi(2)).abs() < 1e-15);
        let i = Fiber::interval(3.0).unwrap();
        assert_eq!(i.distance(0.5, 2.5), 2.0);
        assert_eq!(i.curvature_bound(), 0.0);
        assert!(Fiber::circle(0.0).is_err());
    }
}
