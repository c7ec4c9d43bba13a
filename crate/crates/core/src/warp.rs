//! Cone warping functions: synthesis and `F_K`-convexity certificates.
//!
//! A cone warping function with parameters `(b, δ, K)` vanishes at an apex
//! `t0 < b`, leaves the apex with slope `δ`, equals `cosh` from `b` on, and
//! satisfies `f'' + K f ≥ 0` wherever `f''` exists. On `[t0, b]` it is built
//! from a derivative profile
//!
//! ```text
//! g'(t) = δ + (sinh b − δ) σ((t − t0)/(b − t0))
//! ```
//!
//! with `σ` an increasing surjection of `[0, 1]`. Because `∫σ = 1/2` for both
//! profiles offered here, `g(b) = cosh b` fixes the apex in closed form:
//! `b − t0 = 2 cosh b / (δ + sinh b)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack used by every inequality certificate.
pub const CERT_SLACK: f64 = 1e-9;

/// Bend of the smooth profile `σ(u) = u + α u(1−u)(2u−1)`; `σ' ≥ 1 − α`.
const SMOOTH_ALPHA: f64 = 0.5;

/// Upper end of the certificate window is `b + TAIL`.
pub const TAIL: f64 = 5.0;

const MAX_DOUBLINGS: u32 = 6;

/// Shape of the derivative profile on `[t0, b]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Profile {
    /// `σ(u) = u`: `g` is quadratic and `g''` is constant.
    #[serde(rename = "linear-derivative")]
    LinearDerivative,
    /// `σ(u) = u + u(1−u)(2u−1)/2`: `g` is a quartic, smooth inside `(t0, b)`.
    #[serde(rename = "smooth")]
    Smooth,
}

impl Profile {
    fn sigma(self, u: f64) -> f64 {
        match self {
            Profile::LinearDerivative => u,
            Profile::Smooth => u + SMOOTH_ALPHA * u * (1.0 - u) * (2.0 * u - 1.0),
        }
    }

    fn sigma_prime(self, u: f64) -> f64 {
        match self {
            Profile::LinearDerivative => 1.0,
            Profile::Smooth => 1.0 + SMOOTH_ALPHA * (-6.0 * u * u + 6.0 * u - 1.0),
        }
    }

    fn sigma_prime_min(self) -> f64 {
        match self {
            Profile::LinearDerivative => 1.0,
            Profile::Smooth => 1.0 - SMOOTH_ALPHA,
        }
    }

    // Σ(v) − Σ(u) with Σ the antiderivative of σ vanishing at 0, factored
    // through (v − u) so that nearby arguments do not cancel.
    fn sigma_integral_diff(self, u: f64, v: f64) -> f64 {
        self.sigma_integral_step(u, v - u)
    }

    // Σ(u + d) − Σ(u)
    fn sigma_integral_step(self, u: f64, d: f64) -> f64 {
        let v = u + d;
        let s = u + v;
        let base = 0.5 * s;
        match self {
            Profile::LinearDerivative => d * base,
            Profile::Smooth => {
                let q = u * u + v * v;
                let cubic = u * u + u * v + v * v;
                d * (base + SMOOTH_ALPHA * (-0.5 * s * q + cubic - 0.5 * s))
            }
        }
    }
}

/// A synthesized cone warping function.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpingFunction {
    t0: f64,
    b: f64,
    delta: f64,
    mu: f64,
    k: f64,
    profile: Profile,
}

/// Build a cone warping function with gluing level `b` and apex slope `delta`.
pub fn synthesize(b: f64, delta: f64) -> Result<WarpingFunction> {
    synthesize_with(b, delta, Profile::LinearDerivative)
}

pub fn synthesize_with(b: f64, delta: f64, profile: Profile) -> Result<WarpingFunction> {
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::NonpositiveB(b));
    }
    let sinh_b = b.sinh();
    if !(delta < sinh_b) {
        return Err(Error::SlopeTooLarge { delta, sinh_b });
    }
    if !(delta > 0.0) {
        return Err(Error::Nonpositive { name: "delta", value: delta });
    }
    let cosh_b = b.cosh();
    let width = 2.0 * cosh_b / (delta + sinh_b);
    let t0 = b - width;
    let mu = (sinh_b - delta) * profile.sigma_prime_min() / width;
    let k = (-mu / cosh_b).max(-1.0);
    Ok(WarpingFunction { t0, b, delta, mu, k, profile })
}

/// Apex slope `δ = π / c` tied to the fiber constant `c`.
pub fn delta_from_c(c: f64) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::Nonpositive { name: "c", value: c });
    }
    Ok(std::f64::consts::PI / c)
}

impl WarpingFunction {
    pub fn t0(&self) -> f64 {
        self.t0
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    /// Certified lower bound on `f''` over `(t0, b)`.
    pub fn mu(&self) -> f64 {
        self.mu
    }
    /// Certified curvature bound `K = max{−1, −μ/cosh b}`.
    pub fn k(&self) -> f64 {
        self.k
    }
    pub fn profile(&self) -> Profile {
        self.profile
    }

    fn width(&self) -> f64 {
        self.b - self.t0
    }

    fn u(&self, t: f64) -> f64 {
        (t - self.t0) / self.width()
    }

    pub fn value(&self, t: f64) -> f64 {
        if t >= self.b {
            t.cosh()
        } else if t <= self.t0 {
            0.0
        } else {
            self.increment(self.t0, t)
        }
    }

    pub fn slope(&self, t: f64) -> f64 {
        if t >= self.b {
            t.sinh()
        } else {
            let u = self.u(t).max(0.0);
            self.delta + (self.b.sinh() - self.delta) * self.profile.sigma(u)
        }
    }

    /// `f''(t)`, or `None` at the gluing level where it is undefined.
    pub fn second(&self, t: f64) -> Option<f64> {
        if t == self.b {
            None
        } else if t > self.b {
            Some(t.cosh())
        } else {
            let u = self.u(t).max(0.0);
            Some((self.b.sinh() - self.delta) * self.profile.sigma_prime(u) / self.width())
        }
    }

    /// One-sided second derivatives `(f''(b⁻), f''(b⁺))`.
    pub fn second_at_b(&self) -> (f64, f64) {
        let left = (self.b.sinh() - self.delta) * self.profile.sigma_prime(1.0) / self.width();
        (left, self.b.cosh())
    }

    /// `f(t) − f(s)`, computed without cancellation for nearby arguments.
    pub fn increment(&self, s: f64, t: f64) -> f64 {
        if s > t {
            return -self.increment(t, s);
        }
        let b = self.b;
        if s >= b {
            return 2.0 * (0.5 * (s + t)).sinh() * (0.5 * (t - s)).sinh();
        }
        if t > b {
            return self.increment(s, b) + self.increment(b, t);
        }
        let s = s.max(self.t0);
        let t = t.max(self.t0);
        let (us, ut) = (self.u(s), self.u(t));
        self.width() * (self.delta * (ut - us) + (b.sinh() - self.delta) * self.profile.sigma_integral_diff(us, ut))
    }

    /// `f(s + h) − f(s)` for `s ≥ t0`, `h ≥ 0`, exact in the step `h`.
    pub fn increment_by(&self, s: f64, h: f64) -> f64 {
        let b = self.b;
        if s >= b {
            return 2.0 * (s + 0.5 * h).sinh() * (0.5 * h).sinh();
        }
        if s + h > b {
            return self.increment(s, b) + self.increment(b, s + h);
        }
        let d = h / self.width();
        self.width() * (self.delta * d + (b.sinh() - self.delta) * self.profile.sigma_integral_step(self.u(s), d))
    }
}

/// Grid certificate for `f'' + K f ≥ 0` wherever `f''` exists.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AeCertificate {
    pub k: f64,
    pub lo: f64,
    pub hi: f64,
    pub resolution: usize,
    pub min_value: f64,
    pub argmin: f64,
    pub pass: bool,
}

/// Evaluate `f'' + K f` on an `n`-point grid of `[t0, b + 5]`, skipping `b`.
pub fn check_fk_convex_ae(f: &WarpingFunction, k: f64, n: usize) -> AeCertificate {
    check_fk_convex_ae_on(f, k, n, f.t0(), f.b() + TAIL)
}

/// As [`check_fk_convex_ae`] restricted to `[lo, hi]`.
pub fn check_fk_convex_ae_on(f: &WarpingFunction, k: f64, n: usize, lo: f64, hi: f64) -> AeCertificate {
    let eval = |n: usize| {
        let n = n.max(2);
        let mut best = (f64::INFINITY, lo);
        for i in 0..n {
            let t = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            if let Some(f2) = f.second(t) {
                let v = f2 + k * f.value(t);
                if v < best.0 {
                    best = (v, t);
                }
            }
        }
        (n, best)
    };
    let (resolution, (min_value, argmin)) = refine_until_stable(n, eval, |(_, (m, _))| *m >= -CERT_SLACK);
    AeCertificate { k, lo, hi, resolution, min_value, argmin, pass: min_value >= -CERT_SLACK }
}

/// Evaluate at `n`, `2n`, ... until two successive resolutions agree on the
/// verdict.
fn refine_until_stable<T, E, P>(n: usize, eval: E, verdict: P) -> T
where
    E: Fn(usize) -> T,
    P: Fn(&T) -> bool,
{
    let mut n = n.max(2);
    let mut current = eval(n);
    for _ in 0..MAX_DOUBLINGS {
        n *= 2;
        let next = eval(n);
        let agree = verdict(&next) == verdict(&current);
        current = next;
        if agree {
            break;
        }
    }
    current
}

/// Barrier comparison on one subinterval.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BarrierInterval {
    pub p: f64,
    pub q: f64,
    /// Largest `f − g` seen on the sample grid.
    pub max_excess: f64,
    pub resolution: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BarrierCertificate {
    pub k: f64,
    pub intervals: Vec<BarrierInterval>,
    pub pass: bool,
}

/// Solution of `g'' + K g = 0` through `(p, fp)` and `(q, fq)`.
pub fn barrier(k: f64, p: f64, q: f64, fp: f64, fq: f64) -> impl Fn(f64) -> f64 {
    let rate = (-k).max(0.0).sqrt();
    let span = q - p;
    move |t: f64| {
        let x = rate * span;
        if x < 1e-6 {
            // K → 0 limit: the chord, with the leading curvature correction
            let lin = fp + (fq - fp) * (t - p) / span;
            let bump = -rate * rate * (t - p) * (q - t) / 6.0 * (fp * (2.0 * q - p - t) + fq * (q + t - 2.0 * p)) / span;
            lin + bump
        } else {
            (fp * (rate * (q - t)).sinh() + fq * (rate * (t - p)).sinh()) / x.sinh()
        }
    }
}

const BARRIER_SAMPLES: usize = 2001;

/// Verify `f ≤ g` against the `F_K` barrier on each subinterval.
pub fn check_fk_convex_barrier(f: &WarpingFunction, k: f64, subintervals: &[(f64, f64)]) -> Result<BarrierCertificate> {
    let window = (f.t0(), f.b() + TAIL);
    let mut intervals = Vec::with_capacity(subintervals.len());
    for &(p, q) in subintervals {
        if !(q > p) {
            return Err(Error::DegenerateSubinterval { p, q });
        }
        if p < window.0 - 1e-12 || q > window.1 + 1e-12 {
            return Err(Error::OutOfRange(format!("subinterval [{p}, {q}] outside [{}, {}]", window.0, window.1)));
        }
        let g = barrier(k, p, q, f.value(p), f.value(q));
        let eval = |n: usize| {
            let mut worst = f64::NEG_INFINITY;
            for i in 0..n {
                let t = p + (q - p) * i as f64 / (n - 1) as f64;
                worst = worst.max(f.value(t) - g(t));
            }
            (n, worst)
        };
        let (resolution, max_excess) = refine_until_stable(BARRIER_SAMPLES, eval, |(_, w)| *w <= CERT_SLACK);
        intervals.push(BarrierInterval { p, q, max_excess, resolution, pass: max_excess <= CERT_SLACK });
    }
    let pass = intervals.iter().all(|i| i.pass);
    Ok(BarrierCertificate { k, intervals, pass })
}

/// The warping functions a cone can carry.
#[derive(Debug, Clone, PartialEq)]
pub enum Warping {
    /// Synthesized cone warping function.
    Cone(WarpingFunction),
    /// `f(t) = slope·(t − t0)`, the flat cone of angle `slope·L`.
    Linear { t0: f64, slope: f64 },
}

impl Warping {
    pub fn euclidean() -> Self {
        Warping::Linear { t0: 0.0, slope: 1.0 }
    }

    pub fn apex(&self) -> f64 {
        match self {
            Warping::Cone(w) => w.t0(),
            Warping::Linear { t0, .. } => *t0,
        }
    }

    pub fn apex_slope(&self) -> f64 {
        match self {
            Warping::Cone(w) => w.delta(),
            Warping::Linear { slope, .. } => *slope,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            Warping::Cone(w) => w.value(t),
            Warping::Linear { t0, slope } => slope * (t - t0).max(0.0),
        }
    }

    pub fn slope(&self, t: f64) -> f64 {
        match self {
            Warping::Cone(w) => w.slope(t),
            Warping::Linear { slope, .. } => *slope,
        }
    }

    pub fn increment(&self, s: f64, t: f64) -> f64 {
        match self {
            Warping::Cone(w) => w.increment(s, t),
            Warping::Linear { t0, slope } => slope * ((t.max(*t0)) - s.max(*t0)),
        }
    }

    /// `f(s + h) − f(s)`, exact in the step `h`.
    pub fn increment_by(&self, s: f64, h: f64) -> f64 {
        match self {
            Warping::Cone(w) => w.increment_by(s, h),
            Warping::Linear { slope, .. } => slope * h,
        }
    }

    /// Levels where `f''` jumps.
    pub fn kink(&self) -> Option<f64> {
        match self {
            Warping::Cone(w) => Some(w.b()),
            Warping::Linear { .. } => None,
        }
    }

    /// Certified curvature bound: `K` for synthesized cones, 0 for flat ones.
    pub fn certified_k(&self) -> f64 {
        match self {
            Warping::Cone(w) => w.k(),
            Warping::Linear { .. } => 0.0,
        }
    }

    pub fn as_cone(&self) -> Option<&WarpingFunction> {
        match self {
            Warping::Cone(w) => Some(w),
            Warping::Linear { .. } => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_bound_enforced() {
        assert!(matches!(synthesize(1.0, 1.2), Err(Error::SlopeTooLarge { .. })));
        assert!(matches!(synthesize(0.0, 0.1), Err(Error::NonpositiveB(_))));
        assert!(matches!(synthesize(-1.0, 0.1), Err(Error::NonpositiveB(_))));
        assert!(synthesize(1.0, 0.0).is_err());
    }

    #[test]
    fn unit_example() {
        let f = synthesize(1.0, 0.5).unwrap();
        assert!(f.t0() < 1.0);
        assert_eq!(f.value(f.t0()), 0.0);
        assert!((f.slope(f.t0()) - 0.5).abs() < 1e-12);
        // C¹ gluing
        let eps = 1e-12;
        assert!((f.value(1.0 - eps) - 1f64.cosh()).abs() < 1e-9);
        assert!((f.slope(1.0 - eps) - 1f64.sinh()).abs() < 1e-9);
        assert!(f.k() >= -1.0 && f.k() < 0.0);
        assert!((f.k() - (-f.mu() / 1f64.cosh()).max(-1.0)).abs() < 1e-15);
        assert!(check_fk_convex_ae(&f, f.k(), 10_000).pass);
    }

    #[test]
    fn smooth_profile_has_same_invariants() {
        let f = synthesize_with(1.0, 0.5, Profile::Smooth).unwrap();
        assert!((f.value(1.0 - 1e-13) - 1f64.cosh()).abs() < 1e-9);
        assert!((f.slope(1.0 - 1e-13) - 1f64.sinh()).abs() < 1e-9);
        assert!((f.slope(f.t0()) - 0.5).abs() < 1e-12);
        assert!(check_fk_convex_ae(&f, f.k(), 10_000).pass);
        let cert = check_fk_convex_barrier(&f, f.k(), &[(f.t0(), f.b())]).unwrap();
        assert!(cert.pass);
        // μ is the true minimum of g'' on the grid
        let min = (0..=1000)
            .map(|i| f.second(f.t0() + (f.b() - f.t0()) * i as f64 / 1000.0 * 0.999_999).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert!((min - f.mu()).abs() < 1e-6 * f.mu());
    }

    #[test]
    fn increment_matches_difference() {
        for profile in [Profile::LinearDerivative, Profile::Smooth] {
            let f = synthesize_with(0.7, 0.3, profile).unwrap();
            for (s, t) in [(f.t0(), 0.2), (0.1, 0.6), (0.3, 1.4), (0.8, 2.0)] {
                let direct = f.value(t) - f.value(s);
                assert!((f.increment(s, t) - direct).abs() < 1e-13, "{profile:?} {s} {t}");
            }
        }
    }

    #[test]
    fn ae_certificates() {
        let f = synthesize(1.0, 0.5).unwrap();
        // tail only: cosh'' − cosh = 0
        let tail = check_fk_convex_ae_on(&f, -1.0, 10_000, f.b() + 1e-9, f.b() + TAIL);
        assert!(tail.pass);
        assert!(tail.min_value.abs() < 1e-9);
        assert!(!check_fk_convex_ae(&f, -100.0, 10_000).pass);
    }

    #[test]
    fn barrier_certificates() {
        let f = synthesize(1.0, 0.5).unwrap();
        let k = f.k();
        assert!(check_fk_convex_barrier(&f, k, &[(f.t0(), f.b())]).unwrap().pass);
        assert!(check_fk_convex_barrier(&f, k, &[(f.b(), f.b() + 1.0)]).unwrap().pass);
        assert!(check_fk_convex_barrier(&f, k / 100.0, &[(f.t0(), f.b())]).unwrap().pass);
        assert!(!check_fk_convex_barrier(&f, k * 100.0, &[(f.t0(), f.b())]).unwrap().pass);
        assert!(matches!(
            check_fk_convex_barrier(&f, k, &[(0.5, 0.5)]),
            Err(Error::DegenerateSubinterval { .. })
        ));
    }

    #[test]
    fn barrier_solves_the_ode() {
        let k = -0.3;
        let g = barrier(k, 0.0, 2.0, 1.0, 3.0);
        assert!((g(0.0) - 1.0).abs() < 1e-14 && (g(2.0) - 3.0).abs() < 1e-14);
        let h = 1e-4;
        for t in [0.3, 1.0, 1.7] {
            let g2 = (g(t + h) - 2.0 * g(t) + g(t - h)) / (h * h);
            assert!((g2 + k * g(t)).abs() < 1e-6);
        }
        // near-zero curvature falls back to the corrected chord
        let flat = barrier(-1e-16, 0.0, 2.0, 1.0, 3.0);
        assert!((flat(1.0) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn delta_from_c_values() {
        assert!((delta_from_c(std::f64::consts::PI).unwrap() - 1.0).abs() < 1e-15);
        assert!((delta_from_c(2.0 * std::f64::consts::PI).unwrap() - 0.5).abs() < 1e-15);
        assert!((delta_from_c(3.5).unwrap() - 0.8975979010256552).abs() < 1e-12);
        assert!(delta_from_c(0.0).is_err());
    }
}
