//! Sampled CAT(K) comparison tests on warped cones.
//!
//! Random geodesic triangles are built from the solver; for points on two
//! different sides the cone distance is compared with the distance between
//! the corresponding points of the comparison triangle in the model plane of
//! curvature `K`. A CAT(K) space never exceeds the model distance.

use std::f64::consts::PI;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cone::{solve, ConePoint, ConeSpace, GeodesicSolution};
use crate::error::{Error, Result};
use crate::model::{comparison_point, ModelTriangle, Side};
use crate::parallel;
use crate::warp::{check_fk_convex_ae, check_fk_convex_barrier, AeCertificate, BarrierCertificate, TAIL};

/// Largest tolerated chord excess.
pub const CAT_TOLERANCE: f64 = 1e-4;
/// Share of vertices drawn close to the apex.
const TIP_SHARE: f64 = 0.25;
/// Triangles with a side shorter than this are skipped as degenerate.
const MIN_SIDE: f64 = 1e-6;
const WORST_KEPT: usize = 20;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CatReport {
    #[serde(rename = "K_tested")]
    pub k_tested: f64,
    pub triangles_sampled: usize,
    /// Triangles dropped for solver failure or degeneracy.
    pub skipped: usize,
    pub pairs_compared: usize,
    /// Worst `d_cone − d_model` seen.
    pub max_violation: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub seed: u64,
    pub warning: Option<String>,
    /// The worst comparisons, largest first.
    pub worst: Vec<Offender>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Offender {
    pub triangle: usize,
    pub vertices: [ConePoint; 3],
    pub sides: [f64; 3],
    pub cone_distance: f64,
    pub model_distance: f64,
    pub excess: f64,
}

impl CatReport {
    /// CSV of the worst comparisons.
    pub fn offenders_csv(&self) -> String {
        let mut out = String::from("triangle,t_a,theta_a,t_b,theta_b,t_c,theta_c,side_a,side_b,side_c,cone_distance,model_distance,excess\n");
        for o in &self.worst {
            let v = &o.vertices;
            out.push_str(&format!(
                "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                o.triangle,
                v[0].t,
                v[0].theta,
                v[1].t,
                v[1].theta,
                v[2].t,
                v[2].theta,
                o.sides[0],
                o.sides[1],
                o.sides[2],
                o.cone_distance,
                o.model_distance,
                o.excess
            ));
        }
        out
    }
}

/// `(π / injrad)²`.
pub fn kappa_from_injrad(injrad: f64) -> Result<f64> {
    if !(injrad > 0.0) {
        return Err(Error::Nonpositive { name: "injrad", value: injrad });
    }
    Ok((PI / injrad).powi(2))
}

fn sample_vertex(cone: &ConeSpace, rng: &mut ChaCha8Rng) -> ConePoint {
    let t0 = cone.t0();
    let top = cone.t_max();
    let near = cone.warping().kink().unwrap_or(top);
    let t = if rng.random_range(0.0..1.0) < TIP_SHARE {
        t0 + 0.1 * (near - t0) * rng.random_range(0.0..1.0)
    } else {
        t0 + (top - t0) * rng.random_range(0.0..1.0)
    };
    let theta = cone.fiber().length * rng.random_range(0.0..1.0);
    ConePoint::new(t.min(top * (1.0 - 1e-12)), theta)
}

struct TriangleOutcome {
    skipped: bool,
    pairs: usize,
    worst: Vec<Offender>,
}

fn test_triangle(cone: &ConeSpace, k: f64, pps: usize, index: usize, seed: u64) -> TriangleOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a, b, c) = (sample_vertex(cone, &mut rng), sample_vertex(cone, &mut rng), sample_vertex(cone, &mut rng));
    let skip = TriangleOutcome { skipped: true, pairs: 0, worst: Vec::new() };
    let sides: Vec<GeodesicSolution> = match [(a, b), (a, c), (b, c)].iter().map(|&(p, q)| solve(cone, p, q)).collect() {
        Ok(s) => s,
        Err(_) => return skip,
    };
    if sides.iter().any(|s| s.flagged || s.length < MIN_SIDE) {
        return skip;
    }
    // side c = AB, side b = AC, side a = BC
    let (ab, ac, bc) = (&sides[0], &sides[1], &sides[2]);
    let Ok(tri) = ModelTriangle::new(k, bc.length, ac.length, ab.length) else {
        return skip;
    };
    let labelled = [(Side::C, ab), (Side::B, ac), (Side::A, bc)];
    let mut points = Vec::new();
    for (side, geo) in labelled {
        for i in 1..=pps {
            let s = i as f64 / (pps + 1) as f64;
            let Ok(model) = comparison_point(&tri, side, s) else {
                return skip;
            };
            points.push((side, geo.point_at(cone, s * geo.length), model));
        }
    }
    let mut worst = Vec::new();
    let mut pairs = 0;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let (si, pi, mi) = points[i];
            let (sj, pj, mj) = points[j];
            if si == sj {
                continue;
            }
            let Ok(sol) = solve(cone, pi, pj) else {
                return skip;
            };
            let model = mi.distance(&mj);
            if !model.is_finite() {
                return skip;
            }
            pairs += 1;
            worst.push(Offender {
                triangle: index,
                vertices: [a, b, c],
                sides: [bc.length, ac.length, ab.length],
                cone_distance: sol.length,
                model_distance: model,
                excess: sol.length - model,
            });
        }
    }
    worst.sort_by(|x, y| y.excess.total_cmp(&x.excess));
    worst.truncate(WORST_KEPT);
    TriangleOutcome { skipped: false, pairs, worst }
}

/// Sample `n_triangles` geodesic triangles and compare chords against the
/// model plane of curvature `k`.
pub fn cat_test(cone: &ConeSpace, k: f64, n_triangles: usize, points_per_side: usize, seed: u64) -> Result<CatReport> {
    if k > 0.0 {
        return Err(Error::OutOfRange(format!("K = {k} must be <= 0")));
    }
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<u64> = (0..n_triangles).map(|_| master.random::<u64>()).collect();
    let pps = points_per_side.max(1);
    let outcomes: Vec<TriangleOutcome> = parallel::install(|| {
        seeds.par_iter().enumerate().map(|(i, &s)| test_triangle(cone, k, pps, i, s)).collect()
    });
    let skipped = outcomes.iter().filter(|o| o.skipped).count();
    let pairs_compared = outcomes.iter().map(|o| o.pairs).sum();
    let mut worst: Vec<Offender> = outcomes.into_iter().flat_map(|o| o.worst).collect();
    worst.sort_by(|x, y| y.excess.total_cmp(&x.excess).then(x.triangle.cmp(&y.triangle)));
    worst.truncate(WORST_KEPT);
    let max_violation = worst.first().map(|o| o.excess.max(0.0)).unwrap_or(0.0);
    let warning = if n_triangles == 0 {
        Some("no triangles requested; the test is vacuous".to_string())
    } else if skipped == n_triangles {
        Some("every triangle was skipped".to_string())
    } else {
        None
    };
    Ok(CatReport {
        k_tested: k,
        triangles_sampled: n_triangles - skipped,
        skipped,
        pairs_compared,
        max_violation,
        tolerance: CAT_TOLERANCE,
        pass: max_violation <= CAT_TOLERANCE,
        seed,
        warning,
        worst,
    })
}

/// Which hypotheses of the warped-product CAT(K) criterion a cone meets.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HypothesisAudit {
    pub delta: f64,
    /// `(π / injrad(F))²`.
    #[serde(rename = "K_F")]
    pub fiber_curvature: f64,
    /// `δ² ≥ K_F`.
    pub slope_condition: bool,
    #[serde(rename = "K")]
    pub certified_k: f64,
    pub ae_certificate: Option<AeCertificate>,
    pub barrier_certificate: Option<BarrierCertificate>,
    pub fk_convex: bool,
    pub pass: bool,
}

/// Check `δ² ≥ K_F` and rerun the `F_K` certificates at the certified `K`.
pub fn hypothesis_audit(cone: &ConeSpace) -> HypothesisAudit {
    let w = cone.warping();
    let delta = w.apex_slope();
    let fiber_curvature = cone.fiber_curvature();
    let slope_condition = delta * delta >= fiber_curvature * (1.0 - 1e-12);
    let certified_k = w.certified_k();
    let (ae, barrier) = match w.as_cone() {
        Some(f) => {
            let ae = check_fk_convex_ae(f, certified_k, 10_000);
            let spans = [(f.t0(), f.b()), (f.b(), f.b() + 1.0), (f.t0(), f.b() + TAIL)];
            (Some(ae), check_fk_convex_barrier(f, certified_k, &spans).ok())
        }
        None => (None, None),
    };
    // a linear warping is F_0-convex: it is its own barrier
    let fk_convex = match (&ae, &barrier) {
        (Some(a), Some(b)) => a.pass && b.pass,
        (None, None) => true,
        _ => false,
    };
    HypothesisAudit {
        delta,
        fiber_curvature,
        slope_condition,
        certified_k,
        ae_certificate: ae,
        barrier_certificate: barrier,
        fk_convex,
        pass: slope_condition && fk_convex,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::Fiber;
    use crate::warp::{synthesize, Warping};

    #[test]
    fn kappa_values() {
        assert!((kappa_from_injrad(PI).unwrap() - 1.0).abs() < 1e-15);
        assert!((kappa_from_injrad(PI / 2.0).unwrap() - 4.0).abs() < 1e-15);
        assert!(kappa_from_injrad(0.0).is_err());
    }

    fn cone(delta: f64, length: f64) -> ConeSpace {
        ConeSpace::new(Warping::Cone(synthesize(1.0, delta).unwrap()), Fiber::circle(length).unwrap(), 2.0).unwrap()
    }

    #[test]
    fn audit_examples() {
        assert!(!hypothesis_audit(&cone(0.5, 2.0 * PI)).slope_condition);
        assert!(hypothesis_audit(&cone(1.0, 2.0 * PI)).slope_condition);
        let a = hypothesis_audit(&cone(0.5, 8.0 * PI));
        assert!(a.slope_condition && a.fk_convex && a.pass);
    }

    #[test]
    fn plane_is_cat0_not_cat_minus_one() {
        let plane = ConeSpace::euclidean_plane(3.0);
        assert!(hypothesis_audit(&plane).pass);
        let r = cat_test(&plane, 0.0, 20, 2, 1).unwrap();
        assert!(r.pass, "{}", r.max_violation);
        let r = cat_test(&plane, -1.0, 20, 2, 1).unwrap();
        assert!(!r.pass && r.max_violation > 1e-3);
    }

    #[test]
    fn vacuous_run_warns() {
        let r = cat_test(&ConeSpace::euclidean_plane(3.0), 0.0, 0, 3, 0).unwrap();
        assert!(r.pass && r.warning.is_some());
    }
}
