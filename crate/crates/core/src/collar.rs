//! The `cosh`-warped collar `[0, r) ×_cosh S¹` in closed form.
//!
//! Fermi coordinates about a closed geodesic in the hyperbolic plane give
//!
//! ```text
//! sinh²(d/2) = sinh²((t1 − t2)/2) + cosh t1 cosh t2 sinh²(Δ/2)
//! ```
//!
//! for the distance in the universal cover; on the annulus the fiber
//! displacement `Δ` is minimized over lifts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Collar {
    /// Circumference of the core geodesic.
    pub length: f64,
}

impl Collar {
    pub fn new(length: f64) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::Nonpositive { name: "L", value: length });
        }
        Ok(Collar { length })
    }

    /// Distance between `(t1, θ1)` and `(t2, θ2)` measured in the full
    /// hyperbolic annulus, so paths may dip through the core.
    pub fn distance(&self, t1: f64, theta1: f64, t2: f64, theta2: f64) -> f64 {
        let base = (theta2 - theta1).rem_euclid(self.length);
        let mut best = f64::INFINITY;
        for k in -1..=1 {
            let delta = base + k as f64 * self.length;
            let a = (0.5 * (t1 - t2)).sinh();
            let b = (0.5 * delta).sinh();
            let s = (a * a + t1.cosh() * t2.cosh() * b * b).sqrt();
            best = best.min(2.0 * s.asinh());
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radial_and_core() {
        let c = Collar::new(5.0).unwrap();
        assert!((c.distance(0.3, 1.0, 1.1, 1.0) - 0.8).abs() < 1e-14);
        // along the core the metric is dθ
        assert!((c.distance(0.0, 0.0, 0.0, 1.5) - 1.5).abs() < 1e-14);
        // shorter way round
        assert!((c.distance(0.0, 0.5, 0.0, 4.5) - 1.0).abs() < 1e-14);
    }
}
