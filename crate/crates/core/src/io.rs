//! Schema-tagged JSON documents with a fixed float format.

use std::io;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::cone::{ConeSpace, Fiber};
use crate::error::{Error, Result};
use crate::filling::ManifoldDescriptor;
use crate::glue::GluedSpace;
use crate::warp::{synthesize_with, Profile, Warping};

pub const SCHEMA: &str = "warpcone/1";

/// Apex positions recomputed from `(b, δ)` must agree with a stored `t0`
/// this closely.
const T0_TOLERANCE: f64 = 1e-9;

/// Pretty printing with every float written as `{:.16e}` (17 significant
/// digits) so output is byte-stable and round-trips exactly.
struct StableFormatter(PrettyFormatter<'static>);

impl Formatter for StableFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }
    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// A document body under a `schema` key.
#[derive(Debug, Clone, Serialize)]
pub struct Tagged<'a, T> {
    pub schema: &'static str,
    #[serde(flatten)]
    pub body: &'a T,
}

/// Serialize with the stable float format; non-finite floats become `null`.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, StableFormatter(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("serde_json writes UTF-8"))
}

/// [`to_json`] of `body` tagged with [`SCHEMA`].
pub fn to_tagged_json<T: Serialize>(body: &T) -> Result<String> {
    to_json(&Tagged { schema: SCHEMA, body })
}

/// Parse a document, requiring `"schema": "warpcone/1"`.
pub fn from_tagged_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let mut value: serde_json::Value = serde_json::from_str(text)?;
    let obj = value.as_object_mut().ok_or_else(|| Error::InvalidDescriptor("document is not a JSON object".into()))?;
    match obj.remove("schema") {
        Some(serde_json::Value::String(s)) if s == SCHEMA => {}
        Some(other) => return Err(Error::InvalidDescriptor(format!("unsupported schema {other}"))),
        None => return Err(Error::InvalidDescriptor(format!("missing \"schema\": \"{SCHEMA}\""))),
    }
    Ok(serde_json::from_value(value)?)
}

/// Serialized warping function. `profile` is `"linear-derivative"`,
/// `"smooth"`, or `"flat"` for `f(t) = δ (t − t0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WarpingDoc {
    pub t0: f64,
    pub b: Option<f64>,
    pub delta: f64,
    pub mu: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub profile: String,
    /// Breakpoints of the piecewise definition.
    pub knots: Vec<f64>,
}

impl From<&Warping> for WarpingDoc {
    fn from(w: &Warping) -> Self {
        match w {
            Warping::Cone(f) => {
                let profile = match f.profile() {
                    Profile::LinearDerivative => "linear-derivative",
                    Profile::Smooth => "smooth",
                };
                WarpingDoc {
                    t0: f.t0(),
                    b: Some(f.b()),
                    delta: f.delta(),
                    mu: f.mu(),
                    k: f.k(),
                    profile: profile.into(),
                    knots: vec![f.t0(), f.b()],
                }
            }
            Warping::Linear { t0, slope } => WarpingDoc {
                t0: *t0,
                b: None,
                delta: *slope,
                mu: 0.0,
                k: 0.0,
                profile: "flat".into(),
                knots: vec![*t0],
            },
        }
    }
}

impl WarpingDoc {
    /// Rebuild the warping, re-synthesizing cone functions from `(b, δ)`.
    pub fn to_warping(&self) -> Result<Warping> {
        let profile = match self.profile.as_str() {
            "flat" => {
                if !(self.delta > 0.0) {
                    return Err(Error::Nonpositive { name: "delta", value: self.delta });
                }
                return Ok(Warping::Linear { t0: self.t0, slope: self.delta });
            }
            "linear-derivative" => Profile::LinearDerivative,
            "smooth" => Profile::Smooth,
            other => return Err(Error::InvalidDescriptor(format!("unknown profile \"{other}\""))),
        };
        let b = self.b.ok_or_else(|| Error::InvalidDescriptor("cone warping needs b".into()))?;
        let f = synthesize_with(b, self.delta, profile)?;
        if (f.t0() - self.t0).abs() > T0_TOLERANCE {
            return Err(Error::InvalidDescriptor(format!(
                "stored t0 = {} disagrees with t0 = {} implied by (b, delta)",
                self.t0,
                f.t0()
            )));
        }
        Ok(Warping::Cone(f))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeDoc {
    pub warping: WarpingDoc,
    pub fiber: Fiber,
    pub t_max: f64,
}

impl From<&ConeSpace> for ConeDoc {
    fn from(c: &ConeSpace) -> Self {
        ConeDoc { warping: c.warping().into(), fiber: *c.fiber(), t_max: c.t_max() }
    }
}

impl ConeDoc {
    pub fn to_cone(&self) -> Result<ConeSpace> {
        ConeSpace::new(self.warping.to_warping()?, self.fiber, self.t_max)
    }
}

/// Manifold plus gluing constants; the warping is synthesized with `δ = π/c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GluedDoc {
    pub manifold: ManifoldDescriptor,
    pub b: f64,
    pub b_prime: f64,
    pub c: f64,
}

impl From<&GluedSpace> for GluedDoc {
    fn from(g: &GluedSpace) -> Self {
        GluedDoc { manifold: g.manifold().clone(), b: g.b(), b_prime: g.b_prime(), c: g.c() }
    }
}

impl GluedDoc {
    pub fn to_glued(&self) -> Result<GluedSpace> {
        GluedSpace::new(self.manifold.clone(), self.b, self.b_prime, self.c)
    }
}
