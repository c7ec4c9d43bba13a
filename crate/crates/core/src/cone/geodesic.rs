//! Shortest paths in a warped cone.
//!
//! Two kinds of candidate are compared. The through-tip path runs radially
//! into the apex and out again, with length `(t(x) − t0) + (t(y) − t0)`.
//! A tip-avoiding geodesic conserves the Clairaut constant `c = f² dθ/ds`, so
//! along a leg rising from a level `a` with `f(a) ≥ c`
//!
//! ```text
//! dθ/dt = c / (f √(f² − c²)),    ds/dt = f / √(f² − c²).
//! ```
//!
//! Legs are integrated in `v = √(t − a)`, which removes the inverse square
//! root at a turning point. The shooting parameter `p ∈ [0, 2)` covers
//! monotone geodesics for `p ≤ 1`, whose continuation would turn at the virtual
//! level `t0 + p (t_lo − t0)`, and geodesics turning at
//! `t* = t_lo − (p − 1)(t_lo − t0)` for `p > 1`; the swept fiber angle rises
//! from 0 to `π/δ` as `t* → t0`, and is matched by Brent's method.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{ConePoint, ConeSpace};
use crate::error::Result;
use crate::quad::{gk15, integrate};
use crate::warp::Warping;

const ABS_TOL: f64 = 1e-14;
const REL_TOL: f64 = 1e-12;
/// Candidates closer than this count as tied; ties go through the tip.
const TIE: f64 = 1e-9;
const SHOOT_ITERS: usize = 200;
const TOP_GAP: f64 = 1e-5;
const INVERT_ITERS: usize = 200;

/// A geodesic arc with Clairaut constant `c = f(a)`, symmetric about its
/// lowest level `a` (real or virtual).
#[derive(Debug, Clone, Copy)]
struct Leg {
    c: f64,
    a: f64,
}

impl Leg {
    fn at(w: &Warping, a: f64) -> Leg {
        Leg { c: w.value(a), a }
    }

    fn v(&self, t: f64) -> f64 {
        (t - self.a).max(0.0).sqrt()
    }

    fn root_terms(&self, w: &Warping, v: f64) -> (f64, f64) {
        let t = self.a + v * v;
        let f = w.value(t);
        let mut fm = w.increment_by(self.a, v * v);
        if fm <= 0.0 {
            fm = w.slope(self.a) * v * v;
        }
        (f, (fm * (f + self.c)).sqrt())
    }

    fn dtheta_dv(&self, w: &Warping, v: f64) -> f64 {
        if self.c == 0.0 {
            return 0.0;
        }
        let (f, root) = self.root_terms(w, v);
        if root == 0.0 {
            let fa = w.value(self.a);
            return 2.0 * self.c / (fa * (w.slope(self.a) * (fa + self.c)).sqrt());
        }
        2.0 * v * self.c / (f * root)
    }

    fn ds_dv(&self, w: &Warping, v: f64) -> f64 {
        if self.c == 0.0 {
            return 2.0 * v;
        }
        let (f, root) = self.root_terms(w, v);
        if root == 0.0 {
            let fa = w.value(self.a);
            return 2.0 * fa / (w.slope(self.a) * (fa + self.c)).sqrt();
        }
        2.0 * v * f / root
    }

    // cuts of [v0, v1] at the kink of f
    fn cuts(&self, w: &Warping, v0: f64, v1: f64) -> Vec<f64> {
        let mut cuts = vec![v0];
        if let Some(k) = w.kink() {
            let vk = self.v(k);
            if k > self.a && vk > v0 && vk < v1 {
                cuts.push(vk);
            }
        }
        cuts.push(v1);
        cuts
    }

    fn integral<G: Fn(f64) -> f64>(&self, w: &Warping, g: G, v0: f64, v1: f64) -> f64 {
        let (lo, hi, sign) = if v0 <= v1 { (v0, v1, 1.0) } else { (v1, v0, -1.0) };
        let total: f64 =
            self.cuts(w, lo, hi).windows(2).map(|c| integrate(&g, c[0], c[1], ABS_TOL, REL_TOL)).sum();
        sign * total
    }

    /// Fiber angle swept between `v0` and `v1`.
    fn theta_between(&self, w: &Warping, v0: f64, v1: f64) -> f64 {
        if self.c == 0.0 {
            return 0.0;
        }
        self.integral(w, |v| self.dtheta_dv(w, v), v0, v1)
    }

    /// Arc length between `v0` and `v1`.
    fn arc_between(&self, w: &Warping, v0: f64, v1: f64) -> f64 {
        if self.c == 0.0 {
            return (self.a + v1 * v1) - (self.a + v0 * v0);
        }
        self.integral(w, |v| self.ds_dv(w, v), v0, v1)
    }

    /// `v ∈ [v_start, v(t_end)]` at arc length `s` past `v_start`, by
    /// safeguarded Newton iteration.
    fn v_at_arc(&self, w: &Warping, v_start: f64, s: f64, t_end: f64) -> f64 {
        let (mut lo, mut hi) = (v_start, self.v(t_end).max(v_start));
        if s <= 0.0 {
            return lo;
        }
        if self.c == 0.0 {
            return self.v((self.a + v_start * v_start + s).min(t_end));
        }
        let mut v = 0.5 * (lo + hi);
        let mut arc = self.arc_between(w, v_start, v);
        for _ in 0..INVERT_ITERS {
            let g = arc - s;
            if g.abs() <= 1e-14 * s {
                break;
            }
            if g > 0.0 {
                hi = v;
            } else {
                lo = v;
            }
            if hi - lo <= 1e-16 * hi.max(1e-300) {
                break;
            }
            let mut next = v - g / self.ds_dv(w, v);
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            arc += self.arc_between(w, v, next);
            v = next;
        }
        v
    }
}

#[derive(Debug, Clone, Copy)]
enum Trace {
    /// Both ends coincide.
    Point,
    /// Straight in `t` at fixed `θ`; an endpoint may be the apex.
    Radial,
    /// Radially into the apex and out along another fiber coordinate.
    ThroughTip,
    /// Tip-avoiding Clairaut geodesic, stored from its lower end.
    Clairaut {
        leg: Leg,
        t_lo: f64,
        t_hi: f64,
        theta_lo: f64,
        /// Fiber direction from the lower end to the upper end.
        dir: f64,
        /// Arc from the lower end down to the turning level (0 if monotone).
        descent: f64,
        /// Fiber angle swept on the descent.
        descent_theta: f64,
        turning: bool,
        /// `true` when `from` is the upper end.
        reversed: bool,
    },
}

/// A solved geodesic: lengths and enough structure to evaluate points on it.
#[derive(Debug, Clone)]
pub struct GeodesicSolution {
    pub from: ConePoint,
    pub to: ConePoint,
    pub length: f64,
    pub through_tip: bool,
    /// `f² dθ/ds`; `None` for paths through the apex.
    pub clairaut_constant: Option<f64>,
    /// Lowest level reached.
    pub min_depth: f64,
    /// Set when shooting could not match the fiber displacement to tolerance.
    pub flagged: bool,
    trace: Trace,
}

/// Sampling density for [`GeodesicSolution::sample`].
#[derive(Debug, Clone, Copy)]
pub struct SampleOptions {
    /// Largest fiber-coordinate step between samples.
    pub max_dtheta: f64,
    /// Largest relative change of `f` between samples.
    pub max_rel_df: f64,
    /// At least this many segments over the whole path.
    pub segments: usize,
}

impl Default for SampleOptions {
    fn default() -> Self {
        SampleOptions { max_dtheta: 2e-3, max_rel_df: 2e-3, segments: 256 }
    }
}

impl SampleOptions {
    pub fn coarse() -> Self {
        SampleOptions { max_dtheta: 2e-2, max_rel_df: 2e-2, segments: 64 }
    }
}

/// A discretized geodesic.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeodesicPath {
    pub samples: Vec<ConePoint>,
    /// Cumulative arc length at each sample.
    pub arc_lengths: Vec<f64>,
    pub length: f64,
    pub clairaut_constant: Option<f64>,
    pub through_tip: bool,
    pub flagged: bool,
}

impl GeodesicPath {
    /// Index of the apex sample pair for through-tip paths.
    pub fn tip_index(&self, t0: f64) -> Option<usize> {
        self.samples.iter().position(|p| p.t <= t0)
    }

    /// CSV polyline with header `t,theta,s`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,theta,s\n");
        for (p, s) in self.samples.iter().zip(&self.arc_lengths) {
            out.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", p.t, p.theta, s));
        }
        out
    }
}

/// Shortest path from `x` to `y`, sampled with default density.
pub fn geodesic(cone: &ConeSpace, x: ConePoint, y: ConePoint) -> Result<GeodesicPath> {
    Ok(solve(cone, x, y)?.sample(cone, SampleOptions::default()))
}

/// Solve for the shortest path from `x` to `y` without sampling it.
pub fn solve(cone: &ConeSpace, x: ConePoint, y: ConePoint) -> Result<GeodesicSolution> {
    cone.check_point(&x)?;
    cone.check_point(&y)?;
    let w = cone.warping();
    let fiber = cone.fiber();
    let t0 = cone.t0();
    let x = ConePoint::new(x.t, fiber.reduce(x.theta));
    let y = ConePoint::new(y.t, fiber.reduce(y.theta));
    let base = |length, through_tip, clairaut_constant, min_depth, trace| GeodesicSolution {
        from: x,
        to: y,
        length,
        through_tip,
        clairaut_constant,
        min_depth,
        flagged: false,
        trace,
    };

    let (x_tip, y_tip) = (cone.is_tip(&x), cone.is_tip(&y));
    if x_tip && y_tip {
        return Ok(base(0.0, true, None, t0, Trace::Point));
    }
    if x_tip || y_tip {
        return Ok(base((y.t - x.t).abs(), true, None, t0, Trace::Radial));
    }
    let d_fiber = fiber.distance(x.theta, y.theta);
    if d_fiber == 0.0 {
        if x.t == y.t {
            return Ok(base(0.0, false, Some(0.0), x.t, Trace::Point));
        }
        return Ok(base((y.t - x.t).abs(), false, Some(0.0), x.t.min(y.t), Trace::Radial));
    }

    let tip_length = (x.t - t0) + (y.t - t0);
    let delta = w.apex_slope();
    let reversed = x.t > y.t;
    let (lo, hi) = if reversed { (y, x) } else { (x, y) };

    let mut best: Option<(f64, GeodesicSolution)> = None;
    for (dir, amount) in fiber.displacements(x.theta, y.theta) {
        if delta * amount >= PI {
            continue;
        }
        // direction as seen from the lower end
        let dir_lo = if reversed { -dir } else { dir };
        let Some(shot) = shoot(w, t0, delta, lo.t, hi.t, amount) else {
            continue;
        };
        if best.as_ref().is_some_and(|(l, _)| *l <= shot.length) {
            continue;
        }
        let sol = GeodesicSolution {
            from: x,
            to: y,
            length: shot.length,
            through_tip: false,
            clairaut_constant: Some(dir * shot.leg.c),
            min_depth: shot.leg.a,
            flagged: shot.residual > 1e-9 * amount.max(1.0),
            trace: Trace::Clairaut {
                leg: shot.leg,
                t_lo: lo.t,
                t_hi: hi.t,
                theta_lo: lo.theta,
                dir: dir_lo,
                descent: shot.descent,
                descent_theta: shot.descent_theta,
                turning: shot.turning,
                reversed,
            },
        };
        best = Some((shot.length, sol));
    }

    match best {
        Some((len, sol)) if len + TIE < tip_length => Ok(sol),
        _ => Ok(base(tip_length, true, None, t0, Trace::ThroughTip)),
    }
}

struct Shot {
    leg: Leg,
    length: f64,
    descent: f64,
    descent_theta: f64,
    turning: bool,
    residual: f64,
}

/// `p ≤ 1`: monotone, lowest (virtual) level `t0 + p (t_lo − t0)`;
/// `p > 1`: turning at `t_lo − (p − 1)(t_lo − t0)`.
fn leg_for(w: &Warping, t0: f64, t_lo: f64, p: f64) -> (Leg, bool) {
    if p <= 1.0 {
        (Leg::at(w, (t0 + p * (t_lo - t0)).min(t_lo)), false)
    } else {
        (Leg::at(w, t_lo - (p - 1.0) * (t_lo - t0)), true)
    }
}

fn swept(w: &Warping, leg: &Leg, turning: bool, t_lo: f64, t_hi: f64) -> f64 {
    let (v_lo, v_hi) = (leg.v(t_lo), leg.v(t_hi));
    if turning {
        leg.theta_between(w, 0.0, v_lo) + leg.theta_between(w, 0.0, v_hi)
    } else {
        leg.theta_between(w, v_lo, v_hi)
    }
}

/// Match the swept fiber angle to `target` over the shooting parameter.
fn shoot(w: &Warping, t0: f64, delta: f64, t_lo: f64, t_hi: f64, target: f64) -> Option<Shot> {
    if target >= PI / delta {
        return None;
    }
    let miss = |p: f64| {
        let (leg, turning) = leg_for(w, t0, t_lo, p);
        swept(w, &leg, turning, t_lo, t_hi) - target
    };
    // Beyond the sweep at this depth the geodesic is within TIE of the
    // through-tip path, which wins ties anyway.
    let top = 2.0 - TOP_GAP;
    let f_top = miss(top);
    if f_top <= 0.0 {
        return None;
    }
    let p = brent(miss, 0.0, top, -target, f_top, 1e-15, 1e-14 * target).clamp(0.0, top);
    let (leg, turning) = leg_for(w, t0, t_lo, p);
    let (v_lo, v_hi) = (leg.v(t_lo), leg.v(t_hi));
    let (sweep, length, descent, descent_theta) = if turning {
        let (descent, descent_theta) = (leg.arc_between(w, 0.0, v_lo), leg.theta_between(w, 0.0, v_lo));
        let sweep = descent_theta + leg.theta_between(w, 0.0, v_hi);
        (sweep, descent + leg.arc_between(w, 0.0, v_hi), descent, descent_theta)
    } else {
        (leg.theta_between(w, v_lo, v_hi), leg.arc_between(w, v_lo, v_hi), 0.0, 0.0)
    };
    Some(Shot { leg, length, descent, descent_theta, turning, residual: (sweep - target).abs() })
}

/// Root of `f` in `[a, b]` given a sign change, by Brent's method.
fn brent<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, mut fa: f64, mut fb: f64, xtol: f64, ftol: f64) -> f64 {
    let (mut c, mut fc) = (b, fb);
    let (mut d, mut e) = (b - a, b - a);
    for _ in 0..SHOOT_ITERS {
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb.abs() <= ftol {
            return b;
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * m * s, 1.0 - s)
            } else {
                let (q0, r) = (fa / fc, fb / fc);
                (s * (2.0 * m * q0 * (q0 - r) - (b - a) * (r - 1.0)), (q0 - 1.0) * (r - 1.0) * (s - 1.0))
            };
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    b
}

impl GeodesicSolution {
    /// Point at arc length `s` from `from`, clamped to `[0, length]`.
    pub fn point_at(&self, cone: &ConeSpace, s: f64) -> ConePoint {
        let s = s.clamp(0.0, self.length);
        let fiber = cone.fiber();
        let t0 = cone.t0();
        let p = match self.trace {
            Trace::Point => self.from,
            Trace::Radial => {
                let sign = if self.to.t >= self.from.t { 1.0 } else { -1.0 };
                let theta = if cone.is_tip(&self.from) { self.to.theta } else { self.from.theta };
                ConePoint::new(self.from.t + sign * s, theta)
            }
            Trace::ThroughTip => {
                let first = self.from.t - t0;
                if s <= first {
                    ConePoint::new(self.from.t - s, self.from.theta)
                } else {
                    ConePoint::new(t0 + (s - first), self.to.theta)
                }
            }
            Trace::Clairaut { leg, t_hi, theta_lo, dir, descent, descent_theta, turning, reversed, t_lo } => {
                let w = cone.warping();
                let sigma = if reversed { self.length - s } else { s };
                if turning && sigma <= descent {
                    let v = leg.v_at_arc(w, 0.0, descent - sigma, t_lo);
                    ConePoint::new(leg.a + v * v, theta_lo + dir * (descent_theta - leg.theta_between(w, 0.0, v)))
                } else {
                    let start = if turning { 0.0 } else { leg.v(t_lo) };
                    let v = leg.v_at_arc(w, start, sigma - descent, t_hi);
                    let theta = descent_theta + leg.theta_between(w, start, v);
                    ConePoint::new(leg.a + v * v, theta_lo + dir * theta)
                }
            }
        };
        ConePoint::new(p.t, fiber.reduce(p.theta))
    }

    /// Discretize the path.
    pub fn sample(&self, cone: &ConeSpace, opts: SampleOptions) -> GeodesicPath {
        let t0 = cone.t0();
        let fiber = cone.fiber();
        let segments = opts.segments.max(2);
        let mut pts: Vec<(f64, f64, f64)> = Vec::new(); // (t, θ unreduced, s)
        match self.trace {
            Trace::Point => {
                pts.push((self.from.t, self.from.theta, 0.0));
                pts.push((self.to.t, self.to.theta, 0.0));
            }
            Trace::Radial => {
                let theta = if cone.is_tip(&self.from) { self.to.theta } else { self.from.theta };
                for i in 0..=segments {
                    let u = i as f64 / segments as f64;
                    let t = self.from.t + (self.to.t - self.from.t) * u;
                    pts.push((t, theta, self.length * u));
                }
            }
            Trace::ThroughTip => {
                let half = segments / 2;
                let first = self.from.t - t0;
                for i in 0..=half {
                    let u = i as f64 / half as f64;
                    pts.push((self.from.t - first * u, self.from.theta, first * u));
                }
                let second = self.to.t - t0;
                for i in 0..=half {
                    let u = i as f64 / half as f64;
                    pts.push((t0 + second * u, self.to.theta, first + second * u));
                }
            }
            Trace::Clairaut { leg, t_lo, t_hi, theta_lo, dir, descent, descent_theta, turning, reversed } => {
                let w = cone.warping();
                let max_ds = self.length / segments as f64;
                if turning {
                    let down = leg_samples(w, &leg, 0.0, t_lo, opts, max_ds);
                    for &(t, th, s) in down.iter().rev() {
                        pts.push((t, theta_lo + dir * (descent_theta - th), descent - s));
                    }
                    let up = leg_samples(w, &leg, 0.0, t_hi, opts, max_ds);
                    for &(t, th, s) in up.iter().skip(1) {
                        pts.push((t, theta_lo + dir * (descent_theta + th), descent + s));
                    }
                } else {
                    for (t, th, s) in leg_samples(w, &leg, leg.v(t_lo), t_hi, opts, max_ds) {
                        pts.push((t, theta_lo + dir * th, s));
                    }
                }
                if reversed {
                    pts.reverse();
                    let total = pts.first().map(|p| p.2).unwrap_or(0.0);
                    for p in &mut pts {
                        p.2 = total - p.2;
                    }
                }
                // pin the endpoints exactly
                if let Some(first) = pts.first_mut() {
                    *first = (self.from.t, self.from.theta, 0.0);
                }
            }
        }
        let samples = pts.iter().map(|&(t, th, _)| ConePoint::new(t, fiber.reduce(th))).collect();
        let arc_lengths = pts.iter().map(|p| p.2).collect();
        GeodesicPath {
            samples,
            arc_lengths,
            length: self.length,
            clairaut_constant: self.clairaut_constant,
            through_tip: self.through_tip,
            flagged: self.flagged,
        }
    }
}

/// Samples `(t, Δθ, Δs)` along a leg from `v_start` up to `t_end`.
fn leg_samples(
    w: &Warping,
    leg: &Leg,
    v_start: f64,
    t_end: f64,
    opts: SampleOptions,
    max_ds: f64,
) -> Vec<(f64, f64, f64)> {
    let mut out = vec![(leg.a + v_start * v_start, 0.0, 0.0)];
    let top = leg.v(t_end);
    if top <= v_start {
        return out;
    }
    let mut acc = (0.0, 0.0);
    for piece in leg.cuts(w, v_start, top).windows(2) {
        let n0 = 16;
        for i in 0..n0 {
            let v0 = piece[0] + (piece[1] - piece[0]) * i as f64 / n0 as f64;
            let v1 = piece[0] + (piece[1] - piece[0]) * (i + 1) as f64 / n0 as f64;
            subdivide(w, leg, v0, v1, opts, max_ds, 0, &mut acc, &mut out);
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn subdivide(
    w: &Warping,
    leg: &Leg,
    v0: f64,
    v1: f64,
    opts: SampleOptions,
    max_ds: f64,
    depth: u32,
    acc: &mut (f64, f64),
    out: &mut Vec<(f64, f64, f64)>,
) {
    let (dth, eth) = gk15(&|v| leg.dtheta_dv(w, v), v0, v1);
    let (ds, es) = gk15(&|v| leg.ds_dv(w, v), v0, v1);
    let (ta, tb) = (leg.a + v0 * v0, leg.a + v1 * v1);
    let (fa, fb) = (w.value(ta), w.value(tb));
    let rel_df = (fb - fa).abs() / fa.min(fb).max(1e-300);
    let too_big = dth.abs() > opts.max_dtheta
        || ds > max_ds
        || rel_df > opts.max_rel_df
        || eth > 1e-13 * dth.abs().max(1e-3)
        || es > 1e-13 * ds.max(1e-3);
    if too_big && depth < 40 {
        let vm = 0.5 * (v0 + v1);
        subdivide(w, leg, v0, vm, opts, max_ds, depth + 1, acc, out);
        subdivide(w, leg, vm, v1, opts, max_ds, depth + 1, acc, out);
        return;
    }
    acc.0 += dth;
    acc.1 += ds;
    out.push((tb, acc.0, acc.1));
}
