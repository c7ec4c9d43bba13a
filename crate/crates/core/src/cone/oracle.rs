//! Brute-force distances: Dijkstra on a coordinate mesh.
//!
//! Rings are spaced uniformly in the conformal coordinate `u = ∫ dt / f`, so
//! cells are close to square in the metric and rings crowd geometrically
//! toward the apex. Edges join each vertex to every coprime offset
//! `(di, dj)` within a small window, weighted by the exact length of the
//! straight coordinate segment; the apex is one extra vertex joined radially
//! to the innermost ring. Mesh distances are lengths of actual paths and so
//! approach the true distance from above.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use super::{ConePoint, ConeSpace, FiberKind};
use crate::error::{Error, Result};
use crate::warp::Warping;

const GL5_X: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GL5_W: [f64; 5] = [
    0.236_926_885_056_189,
    0.478_628_670_499_366,
    0.568_888_888_888_889,
    0.478_628_670_499_366,
    0.236_926_885_056_189,
];

#[derive(Debug, Clone, Copy)]
pub struct OracleOptions {
    /// Stencil reach in units of the coarser mesh spacing.
    pub reach: f64,
    /// Innermost ring sits at `t0 + tip_gap · (t_top − t0)`.
    pub tip_gap: f64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { reach: 3.0, tip_gap: 1e-4 }
    }
}

/// Length of the straight coordinate segment from `(t1, θ1)` to `(t1 + dt, θ1 + dθ)`.
fn straight(w: &Warping, t1: f64, dt: f64, dtheta: f64) -> f64 {
    let half = 0.5;
    let mut acc = 0.0;
    for k in 0..5 {
        let s = half * (1.0 + GL5_X[k]);
        let f = w.value(t1 + s * dt);
        acc += GL5_W[k] * (dt * dt + f * f * dtheta * dtheta).sqrt();
    }
    half * acc
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a.abs() } else { gcd(b, a % b) }
}

struct Mesh {
    rings: Vec<f64>,
    n_theta: usize,
    dtheta: f64,
    circle: bool,
    offsets: Vec<(i64, i64)>,
    reach_t: i64,
    reach_theta: i64,
}

impl Mesh {
    fn theta(&self, j: usize) -> f64 {
        j as f64 * self.dtheta
    }

    fn node(&self, i: usize, j: usize) -> usize {
        1 + i * self.n_theta + j
    }

    fn shift_j(&self, j: usize, dj: i64) -> Option<usize> {
        let n = self.n_theta as i64;
        let k = j as i64 + dj;
        if self.circle {
            Some(k.rem_euclid(n) as usize)
        } else if (0..n).contains(&k) {
            Some(k as usize)
        } else {
            None
        }
    }

    /// Grid vertices near `p` with straight-segment weights from `p`.
    fn attach(&self, cone: &ConeSpace, p: &ConePoint) -> Vec<(usize, f64)> {
        let w = cone.warping();
        let i0 = match self.rings.binary_search_by(|r| r.partial_cmp(&p.t).unwrap()) {
            Ok(i) | Err(i) => i.min(self.rings.len() - 1) as i64,
        };
        let j0 = (cone.fiber().reduce(p.theta) / self.dtheta).round() as i64;
        let mut out = Vec::new();
        for i in (i0 - self.reach_t - 1)..=(i0 + self.reach_t) {
            if i < 0 || i >= self.rings.len() as i64 {
                continue;
            }
            for dj in -self.reach_theta - 1..=self.reach_theta + 1 {
                let Some(j) = self.shift_j(0, j0 + dj) else { continue };
                let t = self.rings[i as usize];
                let step = cone.fiber().signed_step(p.theta, self.theta(j));
                out.push((self.node(i as usize, j), straight(w, p.t, t - p.t, step)));
            }
        }
        out
    }
}

/// Mesh approximation of the distance from `x` to `y` on an `n_t × n_θ`
/// grid plus the apex.
pub fn distance_oracle(cone: &ConeSpace, x: ConePoint, y: ConePoint, resolution: (usize, usize)) -> Result<f64> {
    distance_oracle_with(cone, x, y, resolution, OracleOptions::default())
}

pub fn distance_oracle_with(
    cone: &ConeSpace,
    x: ConePoint,
    y: ConePoint,
    (n_t, n_theta): (usize, usize),
    opts: OracleOptions,
) -> Result<f64> {
    if n_t < 8 || n_theta < 8 {
        return Err(Error::ResolutionTooLow { n_t, n_theta });
    }
    cone.check_point(&x)?;
    cone.check_point(&y)?;
    let fiber = cone.fiber();
    let w = cone.warping();
    let t0 = cone.t0();
    let (x_tip, y_tip) = (cone.is_tip(&x), cone.is_tip(&y));
    if (x_tip && y_tip) || (x.t == y.t && fiber.distance(x.theta, y.theta) == 0.0) {
        return Ok(0.0);
    }

    // geodesics never rise above their higher endpoint
    let t_top = x.t.max(y.t);
    let t_low = t0 + opts.tip_gap * (t_top - t0);
    let rings = conformal_rings(w, t_low, t_top, n_t);
    let circle = fiber.kind == FiberKind::Circle;
    let dtheta = if circle { fiber.length / n_theta as f64 } else { fiber.length / (n_theta - 1) as f64 };
    let du = (conformal(w, t_low, t_top) / (n_t - 1) as f64).max(f64::MIN_POSITIVE);
    let h = du.max(dtheta);
    let reach_t = (opts.reach * h / du).ceil().max(1.0) as i64;
    let reach_theta = (opts.reach * h / dtheta).ceil().max(1.0) as i64;
    let mut offsets = Vec::new();
    for di in -reach_t..=reach_t {
        for dj in -reach_theta..=reach_theta {
            if (di, dj) != (0, 0) && gcd(di, dj) == 1 {
                offsets.push((di, dj));
            }
        }
    }
    let mesh = Mesh { rings, n_theta, dtheta, circle, offsets, reach_t, reach_theta };

    // weight per (ring, offset)
    let weights: Vec<Vec<f64>> = (0..n_t)
        .into_par_iter()
        .map(|i| {
            mesh.offsets
                .iter()
                .map(|&(di, dj)| {
                    let k = i as i64 + di;
                    if k < 0 || k >= n_t as i64 {
                        return f64::INFINITY;
                    }
                    let t1 = mesh.rings[i];
                    straight(w, t1, mesh.rings[k as usize] - t1, dj as f64 * dtheta)
                })
                .collect()
        })
        .collect();

    // node 0 is the apex, grid nodes follow, then x and y
    let n_grid = n_t * n_theta;
    let (sx, sy) = (n_grid + 1, n_grid + 2);
    let source = if x_tip { 0 } else { sx };
    let target = if y_tip { 0 } else { sy };
    let x_links = if x_tip { Vec::new() } else { mesh.attach(cone, &x) };
    let y_links = if y_tip { Vec::new() } else { mesh.attach(cone, &y) };
    let y_in: std::collections::HashMap<usize, f64> = y_links.iter().copied().collect();

    let mut dist = vec![f64::INFINITY; n_grid + 3];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Reverse((0u64, source)));
    let relax = |dist: &mut Vec<f64>, heap: &mut BinaryHeap<Reverse<(u64, usize)>>, v: usize, d: f64| {
        if d < dist[v] {
            dist[v] = d;
            heap.push(Reverse((d.to_bits(), v)));
        }
    };

    while let Some(Reverse((bits, u))) = heap.pop() {
        let d = f64::from_bits(bits);
        if d > dist[u] {
            continue;
        }
        if u == target {
            return Ok(d);
        }
        if u == 0 {
            for j in 0..n_theta {
                relax(&mut dist, &mut heap, mesh.node(0, j), d + (mesh.rings[0] - t0));
            }
            if !y_tip {
                relax(&mut dist, &mut heap, sy, d + (y.t - t0));
            }
        } else if u == sx {
            relax(&mut dist, &mut heap, 0, d + (x.t - t0));
            for &(v, wt) in &x_links {
                relax(&mut dist, &mut heap, v, d + wt);
            }
            if !y_tip {
                let direct = straight(w, x.t, y.t - x.t, fiber.signed_step(x.theta, y.theta));
                relax(&mut dist, &mut heap, sy, d + direct);
            }
        } else if u <= n_grid {
            let (i, j) = ((u - 1) / n_theta, (u - 1) % n_theta);
            if i == 0 {
                relax(&mut dist, &mut heap, 0, d + (mesh.rings[0] - t0));
            }
            for (k, &(di, dj)) in mesh.offsets.iter().enumerate() {
                let wt = weights[i][k];
                if !wt.is_finite() {
                    continue;
                }
                let Some(jj) = mesh.shift_j(j, dj) else { continue };
                relax(&mut dist, &mut heap, mesh.node((i as i64 + di) as usize, jj), d + wt);
            }
            if let Some(&wt) = y_in.get(&u) {
                relax(&mut dist, &mut heap, sy, d + wt);
            }
        }
    }
    Err(Error::NoConvergence("oracle mesh is disconnected".into()))
}

fn conformal(w: &Warping, a: f64, b: f64) -> f64 {
    crate::quad::integrate(&|t| 1.0 / w.value(t), a, b, 1e-13, 1e-11)
}

/// `n` levels in `[a, b]` equally spaced in `∫ dt / f`.
fn conformal_rings(w: &Warping, a: f64, b: f64, n: usize) -> Vec<f64> {
    // tabulate u(t) on a fine log-spaced grid and invert by interpolation
    let fine = 20 * n;
    let t0 = w.apex();
    let (la, lb) = ((a - t0).ln(), (b - t0).ln());
    let ts: Vec<f64> = (0..=fine).map(|k| t0 + (la + (lb - la) * k as f64 / fine as f64).exp()).collect();
    let mut us = vec![0.0; fine + 1];
    for k in 1..=fine {
        us[k] = us[k - 1] + conformal(w, ts[k - 1], ts[k]);
    }
    let total = us[fine];
    let mut rings = Vec::with_capacity(n);
    let mut k = 0;
    for i in 0..n {
        let target = total * i as f64 / (n - 1) as f64;
        while k + 1 < fine && us[k + 1] < target {
            k += 1;
        }
        let span = us[k + 1] - us[k];
        let s = if span > 0.0 { ((target - us[k]) / span).clamp(0.0, 1.0) } else { 0.0 };
        rings.push(ts[k] + s * (ts[k + 1] - ts[k]));
    }
    rings[0] = a;
    rings[n - 1] = b;
    rings
}
