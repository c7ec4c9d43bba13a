//! Trigonometry of the constant-curvature model planes `M_κ`.
//!
//! All three laws of cosines are written in the haversine form
//!
//! ```text
//! sn_κ(c/2)² = sn_κ((a-b)/2)² + sn_κ(a)·sn_κ(b)·sin²(γ/2)
//! ```
//!
//! where `sn_κ(x)` is `sin(√κ x)/√κ`, `x` or `sinh(√-κ x)/√-κ`. The form is
//! well conditioned for thin triangles, and `sn_κ` together with its inverse
//! switch to a Taylor series when `|κ|·x²` is small, so every function here is
//! continuous across `κ = 0`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SERIES_CUTOFF: f64 = 1e-3;

/// Generalized sine: `sin(√κ x)/√κ`, `x`, or `sinh(√-κ x)/√-κ`.
pub fn sn(kappa: f64, x: f64) -> f64 {
    let z = kappa * x * x;
    if z.abs() < SERIES_CUTOFF {
        // x (1 - z/6 + z²/120 - z³/5040)
        x * (1.0 - z / 6.0 * (1.0 - z / 20.0 * (1.0 - z / 42.0)))
    } else if kappa > 0.0 {
        let k = kappa.sqrt();
        (k * x).sin() / k
    } else {
        let k = (-kappa).sqrt();
        (k * x).sinh() / k
    }
}

/// Inverse of [`sn`] on its monotone branch.
pub fn asn(kappa: f64, y: f64) -> f64 {
    let z = kappa * y * y;
    if z.abs() < SERIES_CUTOFF {
        // asin/asinh series: y (1 + z/6 + 3z²/40 + 5z³/112)
        y * (1.0 + z * (1.0 / 6.0 + z * (3.0 / 40.0 + z * 5.0 / 112.0)))
    } else if kappa > 0.0 {
        let k = kappa.sqrt();
        (k * y).clamp(-1.0, 1.0).asin() / k
    } else {
        let k = (-kappa).sqrt();
        (k * y).asinh() / k
    }
}

/// Diameter `π/√κ` of the model plane, infinite for `κ ≤ 0`.
pub fn model_diameter(kappa: f64) -> f64 {
    if kappa > 0.0 {
        PI / kappa.sqrt()
    } else {
        f64::INFINITY
    }
}

/// Side lengths of a triangle in the model plane of curvature `kappa`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelTriangle {
    pub kappa: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// Which side of a [`ModelTriangle`]. Side `A` is opposite vertex `A`.
///
/// Vertices are labelled so that side `c` runs from `A` to `B`, side `b`
/// from `A` to `C` and side `a` from `B` to `C`; fractions are measured from
/// the first-named vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
    C,
}

impl ModelTriangle {
    pub fn new(kappa: f64, a: f64, b: f64, c: f64) -> Result<Self> {
        let tri = ModelTriangle { kappa, a, b, c };
        tri.validate()?;
        Ok(tri)
    }

    pub fn validate(&self) -> Result<()> {
        check_triangle(self.a, self.b, self.c)?;
        if self.kappa > 0.0 {
            let d = model_diameter(self.kappa);
            for side in [self.a, self.b, self.c] {
                if side >= d {
                    return Err(Error::DiameterExceeded { side, diameter: d });
                }
            }
            if self.a + self.b + self.c >= 2.0 * d {
                return Err(Error::DiameterExceeded {
                    side: self.a + self.b + self.c,
                    diameter: 2.0 * d,
                });
            }
        }
        Ok(())
    }

    pub fn side(&self, side: Side) -> f64 {
        match side {
            Side::A => self.a,
            Side::B => self.b,
            Side::C => self.c,
        }
    }
}

fn check_triangle(a: f64, b: f64, c: f64) -> Result<()> {
    let finite = a.is_finite() && b.is_finite() && c.is_finite();
    let slack = 1e-12 * (a + b + c).max(1e-300);
    if !finite
        || a < 0.0
        || b < 0.0
        || c < 0.0
        || a > b + c + slack
        || b > a + c + slack
        || c > a + b + slack
    {
        return Err(Error::InvalidTriangle { a, b, c });
    }
    Ok(())
}

fn check_below_diameter(kappa: f64, sides: &[f64]) -> Result<()> {
    let d = model_diameter(kappa);
    for &side in sides {
        if side >= d {
            return Err(Error::DiameterExceeded { side, diameter: d });
        }
    }
    Ok(())
}

/// Angle opposite side `c` in the model triangle with sides `a`, `b`, `c`.
pub fn model_angle(kappa: f64, a: f64, b: f64, c: f64) -> Result<f64> {
    check_triangle(a, b, c)?;
    check_below_diameter(kappa, &[a, b, c])?;
    if a == 0.0 || b == 0.0 {
        return Err(Error::DegenerateVertex);
    }
    let half_c = sn(kappa, 0.5 * c);
    let half_diff = sn(kappa, 0.5 * (a - b));
    let denom = sn(kappa, a) * sn(kappa, b);
    let s2 = ((half_c - half_diff) * (half_c + half_diff) / denom).clamp(0.0, 1.0);
    Ok(2.0 * s2.sqrt().asin())
}

/// Length of the side opposite the angle `gamma` between sides `a` and `b`.
pub fn model_chord(kappa: f64, a: f64, b: f64, gamma: f64) -> Result<f64> {
    if !(a >= 0.0 && b >= 0.0) {
        return Err(Error::OutOfRange(format!("negative side ({a}, {b})")));
    }
    if !(0.0..=PI).contains(&gamma) {
        return Err(Error::OutOfRange(format!("angle {gamma} outside [0, pi]")));
    }
    check_below_diameter(kappa, &[a, b])?;
    let half_diff = sn(kappa, 0.5 * (a - b));
    let s = (0.5 * gamma).sin();
    let rhs = half_diff * half_diff + sn(kappa, a) * sn(kappa, b) * s * s;
    let mut half = rhs.max(0.0).sqrt();
    if kappa > 0.0 {
        half = half.min(1.0 / kappa.sqrt());
    }
    Ok(2.0 * asn(kappa, half))
}

/// A point of the model plane in geodesic polar coordinates about vertex `A`
/// of an embedded comparison triangle, with side `c` along the zero ray.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelPoint {
    pub kappa: f64,
    pub radius: f64,
    pub bearing: f64,
}

impl ModelPoint {
    /// Model-plane distance to another point of the same embedding.
    pub fn distance(&self, other: &ModelPoint) -> f64 {
        if self.radius == 0.0 {
            return other.radius;
        }
        if other.radius == 0.0 {
            return self.radius;
        }
        let gamma = (self.bearing - other.bearing).abs().min(PI);
        model_chord(self.kappa, self.radius, other.radius, gamma).unwrap_or(f64::NAN)
    }
}

/// Point at arc-length fraction `s` along `side` of an isometric copy of the
/// triangle in the model plane.
pub fn comparison_point(tri: &ModelTriangle, side: Side, s: f64) -> Result<ModelPoint> {
    tri.validate()?;
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::OutOfRange(format!("fraction {s} outside [0, 1]")));
    }
    let k = tri.kappa;
    let angle_a = vertex_angle(k, tri.b, tri.c, tri.a);
    let point = match side {
        Side::C => ModelPoint { kappa: k, radius: s * tri.c, bearing: 0.0 },
        Side::B => ModelPoint { kappa: k, radius: s * tri.b, bearing: angle_a },
        Side::A => {
            // from B towards C
            let along = s * tri.a;
            let angle_b = vertex_angle(k, tri.c, tri.a, tri.b);
            let radius = model_chord(k, tri.c, along, angle_b)?;
            let bearing = if radius == 0.0 || tri.c == 0.0 {
                // collapsed onto A or the triangle is degenerate at A
                if tri.c == 0.0 { angle_a } else { 0.0 }
            } else {
                model_angle(k, tri.c, radius, along)?.min(angle_a)
            };
            ModelPoint { kappa: k, radius, bearing }
        }
    };
    Ok(point)
}

// Angle at a vertex, with degenerate adjacent sides mapped to 0.
fn vertex_angle(kappa: f64, adj1: f64, adj2: f64, opposite: f64) -> f64 {
    if adj1 == 0.0 || adj2 == 0.0 {
        0.0
    } else {
        model_angle(kappa, adj1, adj2, opposite).unwrap_or(0.0)
    }
}
