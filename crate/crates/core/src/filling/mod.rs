//! Hypotheses for negatively curved cone-offs and locally convex subsets,
//! checked on desk-scale descriptors whose boundary is a union of circles.

mod probe;

pub use probe::{local_convexity_probe, ProbeExit, ProbeOptions, ProbeReport};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::warp::WarpingFunction;

/// Slack for closed-arc containment.
const CONTAIN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceData {
    pub genus: u32,
    /// Number of boundary components.
    pub components: u32,
}

/// Stand-in for a compact hyperbolic manifold `M` with boundary circles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifoldDescriptor {
    pub dimension: u32,
    /// Circle lengths of the boundary components.
    pub boundary_components: Vec<f64>,
    /// Buffer width of the boundary.
    pub w: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surface: Option<SurfaceData>,
}

impl ManifoldDescriptor {
    pub fn new(boundary_components: Vec<f64>, w: f64) -> Result<Self> {
        let m = ManifoldDescriptor { dimension: 2, boundary_components, w, surface: None };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidDescriptor(msg));
        if self.dimension < 2 {
            return bad(format!("dimension {} < 2", self.dimension));
        }
        if self.boundary_components.is_empty() {
            return bad("no boundary components".into());
        }
        if let Some(l) = self.boundary_components.iter().find(|l| !(**l > 0.0) || !l.is_finite()) {
            return bad(format!("boundary length {l} is not positive"));
        }
        if !(self.w > 0.0) || !self.w.is_finite() {
            return bad(format!("buffer width {} is not positive", self.w));
        }
        if let Some(s) = self.surface {
            if s.components as usize != self.boundary_components.len() {
                return bad(format!(
                    "surface data lists {} components, descriptor has {}",
                    s.components,
                    self.boundary_components.len()
                ));
            }
        }
        Ok(())
    }

    /// `min L_i / 2`.
    pub fn injrad(&self) -> f64 {
        0.5 * self.boundary_components.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub b: f64,
    pub c: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionA {
    pub feasible: bool,
    pub witness: Option<Witness>,
    /// `injrad · sinh(w) − π`.
    pub margin: f64,
}

/// `injrad(∂M) · sinh(w) > π`.
pub fn check_clubsuit(m: &ManifoldDescriptor) -> bool {
    m.injrad() * m.w.sinh() > PI
}

/// Is there `b ∈ (0, w)` and `c` with `injrad ≥ c > π / sinh b`?
pub fn check_condition_a(m: &ManifoldDescriptor) -> Result<ConditionA> {
    m.validate()?;
    let c = m.injrad();
    let margin = c * m.w.sinh() - PI;
    let feasible = check_clubsuit(m);
    let witness = if feasible {
        // push b toward w until the strict inequality is visible in floating point
        [1e-6, 1e-9, 1e-12, 1e-15]
            .iter()
            .map(|e| m.w * (1.0 - e))
            .find(|&b| b > 0.0 && b < m.w && c > PI / b.sinh())
            .map(|b| Witness { b, c })
    } else {
        None
    };
    Ok(ConditionA { feasible, witness, margin })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenusReport {
    pub area: f64,
    /// `area > 2kπ`.
    pub passes_area_bound: bool,
    /// `g > 1`.
    pub genus_ok: bool,
    /// `2g + k − 2 > 0`, needed for a hyperbolic metric at all.
    pub valid_hyperbolic: bool,
}

/// Gauss–Bonnet area `2π(2g + k − 2)` against the bound `2kπ`.
pub fn genus_obstruction(m: &ManifoldDescriptor) -> Result<GenusReport> {
    let s = match m.surface {
        Some(s) if m.dimension == 2 => s,
        _ => return Err(Error::MissingSurfaceData),
    };
    let euler = 2 * s.genus as i64 + s.components as i64 - 2;
    let area = 2.0 * PI * euler as f64;
    Ok(GenusReport {
        area,
        passes_area_bound: area > 2.0 * PI * s.components as f64,
        genus_ok: s.genus > 1,
        valid_hyperbolic: euler > 0,
    })
}

/// A closed arc of a boundary circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub center: f64,
    pub half_length: f64,
}

impl Arc {
    pub fn new(center: f64, half_length: f64) -> Self {
        Arc { center, half_length }
    }

    /// The arc `[start, end]`, traversed positively.
    pub fn from_ends(start: f64, end: f64) -> Self {
        Arc { center: 0.5 * (start + end), half_length: 0.5 * (end - start) }
    }

    fn is_full(&self, length: f64) -> bool {
        2.0 * self.half_length >= length
    }

    pub fn contains(&self, length: f64, theta: f64) -> bool {
        self.is_full(length) || circle_distance(length, self.center, theta) <= self.half_length + CONTAIN_TOL
    }
}

fn circle_distance(length: f64, a: f64, b: f64) -> f64 {
    let d = (b - a).rem_euclid(length);
    d.min(length - d)
}

/// The arcs `P_t` on each boundary circle at one level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcFamily {
    pub components: Vec<Vec<Arc>>,
}

/// Arrangement of disjoint arcs on one circle.
#[derive(Debug, Clone, PartialEq)]
enum Layout {
    Empty,
    Full,
    /// `(start, length)` sorted by start in `[0, L)`, with the gap after each.
    Arcs(Vec<(f64, f64)>, Vec<f64>),
}

fn layout(length: f64, arcs: &[Arc]) -> Result<Layout> {
    if arcs.is_empty() {
        return Ok(Layout::Empty);
    }
    for a in arcs {
        if !(a.half_length >= 0.0) || !a.center.is_finite() {
            return Err(Error::InvalidDescriptor(format!("bad arc {a:?}")));
        }
    }
    if arcs.iter().any(|a| a.is_full(length)) {
        if arcs.len() > 1 {
            return Err(Error::OverlappingArcs(0.0));
        }
        return Ok(Layout::Full);
    }
    let mut spans: Vec<(f64, f64)> =
        arcs.iter().map(|a| ((a.center - a.half_length).rem_euclid(length), 2.0 * a.half_length)).collect();
    spans.sort_by(|x, y| x.0.total_cmp(&y.0));
    let n = spans.len();
    let mut gaps = Vec::with_capacity(n);
    for i in 0..n {
        let (s, l) = spans[i];
        let next = if i + 1 < n { spans[i + 1].0 } else { spans[0].0 + length };
        let gap = next - (s + l);
        if gap <= 0.0 {
            return Err(Error::OverlappingArcs(gap));
        }
        gaps.push(gap);
    }
    Ok(Layout::Arcs(spans, gaps))
}

/// Buffer width of a family of arcs in a circle of length `length`: half
/// the shortest complementary gap, infinite if the arcs are empty or cover
/// the circle.
pub fn buffer_width_arcs(length: f64, arcs: &[Arc]) -> Result<f64> {
    Ok(match layout(length, arcs)? {
        Layout::Empty | Layout::Full => f64::INFINITY,
        Layout::Arcs(_, gaps) => 0.5 * gaps.iter().copied().fold(f64::INFINITY, f64::min),
    })
}

/// Levels `P_t` of a subset `S` sampled on a grid in `[0, b′]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubspaceDescriptor {
    pub b: f64,
    pub b_prime: f64,
    pub c: f64,
    /// Local convexity radius of `S`, an input constant.
    #[serde(default = "default_lcr")]
    pub lcr: f64,
    pub grid: Vec<f64>,
    pub levels: Vec<ArcFamily>,
}

fn default_lcr() -> f64 {
    1.0
}

impl SubspaceDescriptor {
    /// The same arcs at every level of a uniform grid with `n` steps.
    pub fn constant(b: f64, b_prime: f64, c: f64, family: ArcFamily, n: usize) -> Self {
        let grid: Vec<f64> = (0..=n).map(|i| b_prime * i as f64 / n as f64).collect();
        let levels = vec![family; grid.len()];
        SubspaceDescriptor { b, b_prime, c, lcr: default_lcr(), grid, levels }
    }

    pub fn validate(&self, m: &ManifoldDescriptor) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidDescriptor(msg));
        if !(0.0 < self.b && self.b < self.b_prime && self.b_prime < m.w) {
            return bad(format!("need 0 < b < b' < w, got b = {}, b' = {}, w = {}", self.b, self.b_prime, m.w));
        }
        if !(self.c > 0.0) || !(self.lcr > 0.0) {
            return bad(format!("c = {} and lcr = {} must be positive", self.c, self.lcr));
        }
        if self.grid.len() < 2 || self.grid.len() != self.levels.len() {
            return bad(format!("{} grid values for {} levels", self.grid.len(), self.levels.len()));
        }
        if self.grid.windows(2).any(|w| !(w[1] > w[0])) {
            return bad("grid is not increasing".into());
        }
        if self.grid[0].abs() > 1e-12 || self.grid[self.grid.len() - 1] < self.b_prime - 1e-12 {
            return bad(format!("grid must cover [0, {}]", self.b_prime));
        }
        for (t, level) in self.grid.iter().zip(&self.levels) {
            if level.components.len() != m.boundary_components.len() {
                return bad(format!("level {t} has {} components", level.components.len()));
            }
            for (arcs, &l) in level.components.iter().zip(&m.boundary_components) {
                layout(l, arcs)?;
            }
        }
        Ok(())
    }

    /// Index of the grid level closest to `t`.
    pub fn nearest_level(&self, t: f64) -> usize {
        match self.grid.binary_search_by(|g| g.total_cmp(&t)) {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) if i >= self.grid.len() => self.grid.len() - 1,
            Err(i) => {
                if t - self.grid[i - 1] <= self.grid[i] - t {
                    i - 1
                } else {
                    i
                }
            }
        }
    }

    pub fn arcs_at(&self, t: f64, component: usize) -> &[Arc] {
        &self.levels[self.nearest_level(t)].components[component]
    }
}

/// Circle homeomorphisms `Φ_t` carrying `P_0` onto `P_t`, piecewise linear
/// between arc endpoints and linear in `t` between grid levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Isotopy {
    pub grid: Vec<f64>,
    pub lengths: Vec<f64>,
    /// `knots[level][component]`: arc endpoints `s0, e0, s1, e1, …` unwrapped
    /// so each knot moves continuously from level 0.
    pub knots: Vec<Vec<Vec<f64>>>,
}

impl Isotopy {
    fn knots_at(&self, t: f64, comp: usize) -> Vec<f64> {
        let g = &self.grid;
        let t = t.clamp(g[0], g[g.len() - 1]);
        let i = match g.binary_search_by(|x| x.total_cmp(&t)) {
            Ok(i) => return self.knots[i][comp].clone(),
            Err(i) => i,
        };
        let s = (t - g[i - 1]) / (g[i] - g[i - 1]);
        let (a, b) = (&self.knots[i - 1][comp], &self.knots[i][comp]);
        a.iter().zip(b).map(|(x, y)| x + s * (y - x)).collect()
    }

    /// Is `p` in the interpolated level `P_t`?
    pub fn contains(&self, t: f64, comp: usize, p: f64) -> bool {
        let length = self.lengths[comp];
        let k = self.knots_at(t, comp);
        k.chunks(2).any(|e| (p - e[0]).rem_euclid(length) <= e[1] - e[0] + 1e-12)
    }

    /// `Φ_t(p)` on boundary component `comp`.
    pub fn apply(&self, t: f64, comp: usize, p: f64) -> f64 {
        let from = &self.knots[0][comp];
        let to = self.knots_at(t, comp);
        pl_map(self.lengths[comp], from, &to, p)
    }

    /// `Φ_t⁻¹(p)` on boundary component `comp`.
    pub fn invert(&self, t: f64, comp: usize, p: f64) -> f64 {
        let from = self.knots_at(t, comp);
        let to = &self.knots[0][comp];
        pl_map(self.lengths[comp], &from, to, p)
    }
}

// Circle map sending knots `from[i]` to `to[i]`, linear in between.
fn pl_map(length: f64, from: &[f64], to: &[f64], p: f64) -> f64 {
    if from.is_empty() {
        return p.rem_euclid(length);
    }
    let n = from.len();
    let base = from[0];
    let q = base + (p - base).rem_euclid(length);
    let mut j = n - 1;
    for i in 0..n - 1 {
        if q < from[i + 1] {
            j = i;
            break;
        }
    }
    let (a0, a1) = (from[j], if j + 1 < n { from[j + 1] } else { from[0] + length });
    let (b0, b1) = (to[j], if j + 1 < n { to[j + 1] } else { to[0] + length });
    let s = if a1 > a0 { (q - a0) / (a1 - a0) } else { 0.0 };
    (b0 + s * (b1 - b0)).rem_euclid(length)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionB {
    pub b1: bool,
    pub b2: bool,
    pub b3: bool,
    pub detail: ConditionBDetail,
    #[serde(skip)]
    pub isotopy: Option<Isotopy>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionBDetail {
    pub b1_reason: Option<String>,
    /// First pair of consecutive levels where nesting fails.
    pub b2_violation: Option<(f64, f64)>,
    /// Smallest buffer width over levels below `b′`.
    pub min_buffer_width: f64,
    /// `c / 2`.
    pub b3_threshold: f64,
    pub b3_worst_level: Option<f64>,
    pub max_grid_spacing: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct ConditionBOptions {
    /// Largest admissible grid spacing; `None` means `b′ / 100`.
    pub max_spacing: Option<f64>,
}

impl Default for ConditionBOptions {
    fn default() -> Self {
        ConditionBOptions { max_spacing: None }
    }
}

pub fn check_condition_b(m: &ManifoldDescriptor, s: &SubspaceDescriptor) -> Result<ConditionB> {
    check_condition_b_with(m, s, ConditionBOptions::default())
}

/// Check B1 (isotopy), B2 (nesting) and B3 (buffer width above `c/2`).
pub fn check_condition_b_with(m: &ManifoldDescriptor, s: &SubspaceDescriptor, opts: ConditionBOptions) -> Result<ConditionB> {
    m.validate()?;
    s.validate(m)?;
    let threshold = opts.max_spacing.unwrap_or(s.b_prime / 100.0);
    let max_grid_spacing = s.grid.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    if max_grid_spacing > threshold {
        return Err(Error::GridGap { spacing: max_grid_spacing, threshold });
    }

    let (isotopy, b1_reason) = match isotopy_witness(m, s) {
        Ok(iso) => (Some(iso), None),
        Err(reason) => (None, Some(reason)),
    };

    let mut b2_violation = None;
    'outer: for (i, pair) in s.levels.windows(2).enumerate() {
        if s.grid[i] >= s.b_prime {
            break;
        }
        for (comp, &l) in m.boundary_components.iter().enumerate() {
            let (upper, lower) = (&pair[0].components[comp], &pair[1].components[comp]);
            let nested = lower.iter().all(|a| upper.iter().any(|u| arc_contains(l, u, a)));
            if !nested {
                b2_violation = Some((s.grid[i], s.grid[i + 1]));
                break 'outer;
            }
        }
    }

    let mut min_buffer_width = f64::INFINITY;
    let mut b3_worst_level = None;
    for (t, level) in s.grid.iter().zip(&s.levels) {
        if *t >= s.b_prime {
            continue;
        }
        for (arcs, &l) in level.components.iter().zip(&m.boundary_components) {
            let bw = buffer_width_arcs(l, arcs)?;
            if bw < min_buffer_width {
                min_buffer_width = bw;
                b3_worst_level = Some(*t);
            }
        }
    }
    let b3_threshold = 0.5 * s.c;

    Ok(ConditionB {
        b1: isotopy.is_some(),
        b2: b2_violation.is_none(),
        b3: min_buffer_width > b3_threshold,
        detail: ConditionBDetail {
            b1_reason,
            b2_violation,
            min_buffer_width,
            b3_threshold,
            b3_worst_level,
            max_grid_spacing,
        },
        isotopy,
    })
}

fn arc_contains(length: f64, outer: &Arc, inner: &Arc) -> bool {
    outer.is_full(length)
        || circle_distance(length, outer.center, inner.center) + inner.half_length <= outer.half_length + CONTAIN_TOL
}

/// Build the endpoint-interpolation witness for B1, or say why it fails.
fn isotopy_witness(m: &ManifoldDescriptor, s: &SubspaceDescriptor) -> std::result::Result<Isotopy, String> {
    let mut knots: Vec<Vec<Vec<f64>>> = vec![Vec::new(); s.grid.len()];
    for (comp, &l) in m.boundary_components.iter().enumerate() {
        let layouts: Vec<Layout> =
            s.levels.iter().map(|lv| layout(l, &lv.components[comp])).collect::<Result<_>>().map_err(|e| e.to_string())?;
        let first = &layouts[0];
        let mut prev: Vec<f64> = match first {
            Layout::Empty | Layout::Full => Vec::new(),
            Layout::Arcs(spans, _) => spans.iter().flat_map(|&(st, len)| [st, st + len]).collect(),
        };
        knots[0].push(prev.clone());
        for (i, lay) in layouts.iter().enumerate().skip(1) {
            let next = match (first, lay) {
                (Layout::Empty, Layout::Empty) | (Layout::Full, Layout::Full) => Vec::new(),
                (Layout::Arcs(a, _), Layout::Arcs(b, gaps)) if a.len() == b.len() => {
                    let tol = 0.5 * gaps.iter().copied().fold(f64::INFINITY, f64::min);
                    match_knots(l, &prev, b, tol).ok_or_else(|| {
                        format!("arc endpoints jump between t = {} and t = {} on component {comp}", s.grid[i - 1], s.grid[i])
                    })?
                }
                _ => {
                    return Err(format!("arc count changes at t = {} on component {comp}", s.grid[i]));
                }
            };
            knots[i].push(next.clone());
            prev = next;
        }
    }
    Ok(Isotopy { grid: s.grid.clone(), lengths: m.boundary_components.clone(), knots })
}

// Match the arcs of the next level to the previous unwrapped knots by the
// cyclic relabelling with the smallest endpoint jump; fail above `tol`.
fn match_knots(length: f64, prev: &[f64], spans: &[(f64, f64)], tol: f64) -> Option<Vec<f64>> {
    let n = spans.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for shift in 0..n {
        let mut out = Vec::with_capacity(2 * n);
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let (st, len) = spans[(i + shift) % n];
            let p = prev[2 * i];
            // unwrap the start next to its predecessor
            let st = st + ((p - st) / length).round() * length;
            worst = worst.max((st - p).abs()).max((st + len - prev[2 * i + 1]).abs());
            out.push(st);
            out.push(st + len);
        }
        if best.as_ref().is_none_or(|(w, _)| worst < *w) {
            best = Some((worst, out));
        }
    }
    best.filter(|(w, _)| *w < tol).map(|(_, k)| k)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonBound {
    pub eps_max: f64,
    /// `L̄ = (2 t_y + t0) / 3`.
    pub l_bar: f64,
    /// `(b′ − t_y)/3, (t_y − L̄)/2, c f(L̄)/2, lcr/2`.
    pub terms: [f64; 4],
}

/// Largest admissible ball radius about a point at level `t_y` of the cone.
pub fn epsilon_bound(t_y: f64, f: &WarpingFunction, b_prime: f64, c: f64, lcr: f64) -> Result<EpsilonBound> {
    let t0 = f.t0();
    if !(t_y > t0 && t_y <= f.b() && f.b() < b_prime) {
        return Err(Error::OutOfRange(format!("need t0 < t_y <= b < b', got t_y = {t_y}, t0 = {t0}, b = {}, b' = {b_prime}", f.b())));
    }
    if !(c > 0.0) {
        return Err(Error::Nonpositive { name: "c", value: c });
    }
    if !(lcr > 0.0) {
        return Err(Error::Nonpositive { name: "lcr", value: lcr });
    }
    let l_bar = (2.0 * t_y + t0) / 3.0;
    let terms = [(b_prime - t_y) / 3.0, (t_y - l_bar) / 2.0, c * f.value(l_bar) / 2.0, lcr / 2.0];
    let eps_max = terms.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(EpsilonBound { eps_max, l_bar, terms })
}

/// Membership in `Y` for a point `(t, θ)` of the cone on component `comp`:
/// below `b` the fiber coordinate must lie in `P_b`, above `b` in `P_t`.
pub fn y_membership(s: &SubspaceDescriptor, comp: usize, length: f64, t0: f64, t: f64, theta: f64) -> bool {
    let arcs = if t <= s.b { s.arcs_at(s.b, comp) } else { s.arcs_at(t, comp) };
    if t <= t0 {
        return !arcs.is_empty();
    }
    arcs.iter().any(|a| a.contains(length, theta))
}

/// Everything `check` reports for a manifold and optional subspace.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckReport {
    pub clubsuit: bool,
    pub condition_a: ConditionA,
    /// Present when the descriptor carries surface data.
    pub genus: Option<GenusReport>,
    pub condition_b: Option<ConditionB>,
    pub pass: bool,
}

/// Run conditions A and B and, for surfaces, the genus obstruction.
pub fn check_descriptors(m: &ManifoldDescriptor, s: Option<&SubspaceDescriptor>, opts: ConditionBOptions) -> Result<CheckReport> {
    let condition_a = check_condition_a(m)?;
    let genus = if m.surface.is_some() { Some(genus_obstruction(m)?) } else { None };
    let condition_b = s.map(|s| check_condition_b_with(m, s, opts)).transpose()?;
    let pass = condition_a.feasible
        && genus.is_none_or(|g| g.passes_area_bound && g.valid_hyperbolic)
        && condition_b.as_ref().is_none_or(|b| b.b1 && b.b2 && b.b3);
    Ok(CheckReport { clubsuit: check_clubsuit(m), condition_a, genus, condition_b, pass })
}
