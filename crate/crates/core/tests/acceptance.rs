//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the report is always printed.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use warpcone::cat::{cat_test, hypothesis_audit, CAT_TOLERANCE};
use warpcone::cone::{
    alexandrov_angle_estimate, distance_oracle, empirical_tip_threshold, log_injectivity_check, solve, tip_angle,
    ConePoint, ConeSpace, Fiber, SampleOptions,
};
use warpcone::filling::{
    check_clubsuit, check_condition_a, check_descriptors, genus_obstruction, local_convexity_probe, Arc, ArcFamily,
    ConditionBOptions, ManifoldDescriptor, ProbeOptions, SubspaceDescriptor, SurfaceData,
};
use warpcone::glue::{seam_isometry_check, GluedSpace, SEAM_TOLERANCE};
use warpcone::io::to_tagged_json;
use warpcone::warp::{check_fk_convex_ae, check_fk_convex_barrier, delta_from_c, synthesize, Warping, TAIL};

// Tolerances and budgets, as pinned by the criteria.
const C1_SLOPE: f64 = 1e-9;
const C1_GLUE: f64 = 1e-9;
const C1_BUDGET: f64 = 5.0;
const C2_REL: f64 = 1e-6;
const C2_FLIP: f64 = 1e-3;
const C2_BUDGET: f64 = 10.0;
const C3_REL: f64 = 0.02;
const C3_BUDGET: f64 = 60.0;
const C4_CLAIRAUT_REL: f64 = 1e-5;
const C5_NEGATIVE: f64 = 1e-3;
const C5_BUDGET: f64 = 120.0;
const C6_BUDGET: f64 = 1.0;
const C7_BUDGET: f64 = 1.0;
const C8_BUDGET: f64 = 60.0;
const C9_BUDGET: f64 = 60.0;
const C10_ANGLE_REL: f64 = 0.01;
const C10_FORMULA_REL: f64 = 1e-12;
const C10_BUDGET: f64 = 30.0;

/// Criteria expected to fail, with the reason; see the decisions ledger.
const KNOWN_FAILURES: &[(usize, &str)] = &[(
    10,
    "the stated apex angle min{pi, d/delta} disagrees with the geometry of the cone, whose comparison angles converge to delta*d",
)];

struct Outcome {
    pass: bool,
    detail: String,
}

fn within(elapsed: Duration, budget: f64) -> bool {
    elapsed.as_secs_f64() < budget
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Unrolled flat-cone distance.
fn unrolled(r1: f64, r2: f64, angle: f64) -> f64 {
    let angle = angle.min(PI);
    (r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * angle.cos()).max(0.0).sqrt()
}

/// Shorter arc between two angles in `[0, length)`.
fn circle_distance(a: f64, b: f64, length: f64) -> f64 {
    let d = (a - b).abs() % length;
    d.min(length - d)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1);
    let mut worst_slope: f64 = 0.0;
    let mut worst_glue: f64 = 0.0;
    let mut worst_mu: f64 = 0.0;
    let mut worst_t0: f64 = 0.0;
    let mut failures = Vec::new();
    for i in 0..50 {
        let b: f64 = r.random_range(0.2..3.0);
        let delta = b.sinh() * r.random_range(0.01..0.99);
        let f = match synthesize(b, delta) {
            Ok(f) => f,
            Err(e) => {
                failures.push(format!("#{i} synthesize: {e}"));
                continue;
            }
        };
        let t0 = f.t0();
        if f.value(t0) != 0.0 {
            failures.push(format!("#{i} f(t0) = {}", f.value(t0)));
        }
        // one-sided difference quotient at the apex, exact to O(h f'')
        let h = 1e-7;
        let fd = f.value(t0 + h) / h;
        worst_slope = worst_slope.max((f.slope(t0) - delta).abs());
        if (fd - delta).abs() > 1e-5 {
            failures.push(format!("#{i} difference quotient at the apex {fd} vs delta {delta}"));
        }
        // C^1 gluing onto cosh
        let eps = 1e-12;
        let glue = (f.value(b - eps) - b.cosh()).abs().max((f.slope(b - eps) - b.sinh()).abs());
        worst_glue = worst_glue.max(glue);
        // apex position: the integral of f' over [t0, b] reaches cosh b
        let n = 2000;
        let dt = (b - t0) / n as f64;
        let simpson: f64 = (0..n)
            .map(|k| {
                let a = t0 + k as f64 * dt;
                dt / 6.0 * (f.slope(a) + 4.0 * f.slope(a + 0.5 * dt) + f.slope(a + dt))
            })
            .sum();
        worst_t0 = worst_t0.max((simpson - b.cosh()).abs());
        // mu from centred differences of f' on (t0, b)
        let mu_fd = (1..200)
            .map(|k| {
                let t = t0 + (b - t0) * k as f64 / 200.0;
                let e = 1e-5 * (b - t0);
                (f.slope(t + e) - f.slope(t - e)) / (2.0 * e)
            })
            .fold(f64::INFINITY, f64::min);
        worst_mu = worst_mu.max((mu_fd - f.mu()).abs() / f.mu());
        let k_expect = (-f.mu() / b.cosh()).max(-1.0);
        if f.k() != k_expect || !(f.k() < 0.0) {
            failures.push(format!("#{i} K = {} vs {k_expect}", f.k()));
        }
        let ae = check_fk_convex_ae(&f, f.k(), 10_000);
        let barrier = check_fk_convex_barrier(&f, f.k(), &[(t0, b), (b, b + TAIL)]);
        if !ae.pass || !barrier.map(|c| c.pass).unwrap_or(false) {
            failures.push(format!("#{i} F_K certificate failed (b = {b}, delta = {delta})"));
        }
    }
    let elapsed = start.elapsed();
    let pass = failures.is_empty()
        && worst_slope < C1_SLOPE
        && worst_glue < C1_GLUE
        && worst_t0 < 1e-9
        && worst_mu < 1e-6
        && within(elapsed, C1_BUDGET);
    Outcome {
        pass,
        detail: format!(
            "50 warpings; |f'(t0+) - delta| <= {worst_slope:.1e}, C1 gluing <= {worst_glue:.1e}, \
             apex integral <= {worst_t0:.1e}, mu rel <= {worst_mu:.1e}, {} failures {:?}; {:.2}s",
            failures.len(),
            failures.first(),
            elapsed.as_secs_f64()
        ),
    }
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let plane = ConeSpace::euclidean_plane(3.0);
    let mut r = rng(2);
    let mut worst: f64 = 0.0;
    let mut wrong_flag = 0;
    for _ in 0..100 {
        let x = ConePoint::new(r.random_range(0.05..2.9), r.random_range(0.0..2.0 * PI));
        let y = ConePoint::new(r.random_range(0.05..2.9), r.random_range(0.0..2.0 * PI));
        let s = solve(&plane, x, y).unwrap();
        let d = circle_distance(x.theta, y.theta, 2.0 * PI);
        let exact = unrolled(x.t, y.t, d);
        worst = worst.max((s.length - exact).abs() / exact);
        // away from the flip the flag is unambiguous
        if (d - PI).abs() > C2_FLIP && s.through_tip != (d >= PI) {
            wrong_flag += 1;
        }
    }
    let mut worst_flip: f64 = 0.0;
    for (t1, t2) in [(1.0, 1.0), (0.5, 2.0), (2.5, 0.3)] {
        let th = empirical_tip_threshold(&plane, t1, t2, 1e-5).unwrap().unwrap_or(f64::INFINITY);
        worst_flip = worst_flip.max((th - PI).abs());
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: worst < C2_REL && wrong_flag == 0 && worst_flip < C2_FLIP && within(elapsed, C2_BUDGET),
        detail: format!(
            "100 pairs, worst rel error {worst:.1e}, {wrong_flag} wrong flags, flip at pi within {worst_flip:.1e}; {:.2}s",
            elapsed.as_secs_f64()
        ),
    }
}

fn oracle_cone() -> ConeSpace {
    let f = synthesize(1.0, 0.8).unwrap();
    ConeSpace::new(Warping::Cone(f), Fiber::circle(2.0 * PI / 0.8 * 1.05).unwrap(), 2.0).unwrap()
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let cone = oracle_cone();
    let (t0, top, length) = (cone.t0(), cone.t_max(), cone.fiber().length);
    let mut r = rng(3);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let x = ConePoint::new(r.random_range(t0..top), r.random_range(0.0..length));
        let y = ConePoint::new(r.random_range(t0..top), r.random_range(0.0..length));
        let s = solve(&cone, x, y).unwrap().length;
        let o = distance_oracle(&cone, x, y, (400, 800)).unwrap();
        worst = worst.max((s - o).abs() / s);
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: worst < C3_REL && within(elapsed, C3_BUDGET),
        detail: format!("20 pairs at (400, 800), worst |solver - oracle|/solver {worst:.2e}; {:.2}s", elapsed.as_secs_f64()),
    }
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let cone = oracle_cone();
    let (t0, top, length) = (cone.t0(), cone.t_max(), cone.fiber().length);
    let w = cone.warping();
    let mut r = rng(4);
    let (mut clairaut_bad, mut convex_bad, mut monotone_bad, mut tip_bad, mut through) = (0, 0, 0, 0, 0);
    let mut worst_clairaut: f64 = 0.0;
    for _ in 0..100 {
        let x = ConePoint::new(r.random_range(t0..top), r.random_range(0.0..length));
        let y = ConePoint::new(r.random_range(t0..top), r.random_range(0.0..length));
        let sol = solve(&cone, x, y).unwrap();
        let path = sol.sample(&cone, SampleOptions::default());
        let pts = &path.samples;
        if sol.through_tip {
            through += 1;
            // fiber coordinate constant on each side of the apex
            let k = pts.iter().position(|p| p.t <= t0 + 1e-12).unwrap_or(0);
            let first_ok = pts[..k].iter().all(|p| p.theta == pts[0].theta);
            let last = pts[pts.len() - 1].theta;
            let second_ok = pts[k + 1..].iter().all(|p| p.theta == last);
            tip_bad += (!first_ok || !second_ok) as usize;
        } else if let Some(c) = sol.clairaut_constant {
            // f² dθ/ds with f linear in s: Δθ/Δs ≈ c / (f_a f_b)
            let mut sign = 0.0;
            for i in 1..pts.len() {
                let ds = path.arc_lengths[i] - path.arc_lengths[i - 1];
                let mut dth = (pts[i].theta - pts[i - 1].theta).rem_euclid(length);
                if dth > 0.5 * length {
                    dth -= length;
                }
                if dth != 0.0 {
                    if sign == 0.0 {
                        sign = dth.signum();
                    } else if dth.signum() != sign {
                        monotone_bad += 1;
                        break;
                    }
                }
                if ds > 1e-9 {
                    let ci = w.value(pts[i - 1].t) * w.value(pts[i].t) * dth / ds;
                    let rel = (ci - c).abs() / c.abs().max(1e-12);
                    worst_clairaut = worst_clairaut.max(rel);
                    if rel > C4_CLAIRAUT_REL {
                        clairaut_bad += 1;
                        break;
                    }
                }
            }
        }
        // midpoint convexity of t along the geodesic
        for _ in 0..20 {
            let (a, b) = (r.random_range(0.0..sol.length), r.random_range(0.0..sol.length));
            let (pa, pb, pm) = (sol.point_at(&cone, a), sol.point_at(&cone, b), sol.point_at(&cone, 0.5 * (a + b)));
            if pm.t > 0.5 * (pa.t + pb.t) + 1e-9 {
                convex_bad += 1;
                break;
            }
        }
    }
    let elapsed = start.elapsed();
    let violations = clairaut_bad + convex_bad + monotone_bad + tip_bad;
    Outcome {
        pass: violations == 0,
        detail: format!(
            "100 geodesics ({through} through the apex): Clairaut {clairaut_bad} (worst rel {worst_clairaut:.1e}), \
             convexity {convex_bad}, monotone fiber {monotone_bad}, apex {tip_bad}; {:.2}s",
            elapsed.as_secs_f64()
        ),
    }
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut pass = true;
    let cones = [
        ConeSpace::euclidean_plane(3.0),
        ConeSpace::new(Warping::Cone(synthesize(1.0, 0.5).unwrap()), Fiber::circle(8.0 * PI).unwrap(), 2.0).unwrap(),
        ConeSpace::new(Warping::Cone(synthesize(1.2, delta_from_c(2.5).unwrap()).unwrap()), Fiber::circle(8.0).unwrap(), 1.5)
            .unwrap(),
        ConeSpace::new(Warping::Cone(synthesize(2.0, 3.0).unwrap()), Fiber::circle(2.5).unwrap(), 2.5).unwrap(),
    ];
    let mut audited = 0;
    for (i, cone) in cones.iter().enumerate() {
        let audit = hypothesis_audit(cone);
        if !audit.pass {
            lines.push(format!("cone {i} fails the audit"));
            continue;
        }
        audited += 1;
        let rep = cat_test(cone, audit.certified_k, 200, 3, 50 + i as u64).unwrap();
        pass &= rep.pass && rep.triangles_sampled > 0 && rep.max_violation <= CAT_TOLERANCE;
        lines.push(format!("cone {i} K = {:.4}: {:.1e}", audit.certified_k, rep.max_violation));
    }
    let neg = cat_test(&ConeSpace::euclidean_plane(3.0), -1.0, 200, 3, 5).unwrap();
    pass &= !neg.pass && neg.max_violation > C5_NEGATIVE && audited >= 3;
    let elapsed = start.elapsed();
    Outcome {
        pass: pass && within(elapsed, C5_BUDGET),
        detail: format!(
            "{audited} audited cones x 200 triangles [{}]; plane at K = -1 violation {:.3}; {:.2}s",
            lines.join(", "),
            neg.max_violation,
            elapsed.as_secs_f64()
        ),
    }
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut r = rng(6);
    let mut mismatches = 0;
    let mut bad_witness = 0;
    for _ in 0..1000 {
        let n = r.random_range(1..4);
        let lengths: Vec<f64> = (0..n).map(|_| r.random_range(0.5..12.0)).collect();
        let m = ManifoldDescriptor::new(lengths, r.random_range(0.05..3.0)).unwrap();
        let a = check_condition_a(&m).unwrap();
        if a.feasible != check_clubsuit(&m) {
            mismatches += 1;
        }
        if let Some(wt) = a.witness {
            if !(wt.b > 0.0 && wt.b < m.w && wt.c <= m.injrad() && wt.c > PI / wt.b.sinh()) {
                bad_witness += 1;
            }
        } else if a.feasible {
            bad_witness += 1;
        }
    }
    let m8 = check_condition_a(&ManifoldDescriptor::new(vec![8.0], 1.0).unwrap()).unwrap();
    let m5 = check_condition_a(&ManifoldDescriptor::new(vec![5.0], 1.0).unwrap()).unwrap();
    let e8 = 4.0 * 1f64.sinh() - PI;
    let e5 = 2.5 * 1f64.sinh() - PI;
    let specific = m8.feasible && !m5.feasible && (m8.margin - e8).abs() < 1e-12 && (m5.margin - e5).abs() < 1e-12;
    let elapsed = start.elapsed();
    Outcome {
        pass: mismatches == 0 && bad_witness == 0 && specific && within(elapsed, C6_BUDGET),
        detail: format!(
            "1000 descriptors, {mismatches} mismatches, {bad_witness} bad witnesses; margins {:.6} / {:.6}; {:.3}s",
            m8.margin,
            m5.margin,
            elapsed.as_secs_f64()
        ),
    }
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut bad = 0;
    for g in 0..=5u32 {
        for k in 1..=5u32 {
            let mut m = ManifoldDescriptor::new(vec![1.0; k as usize], 1.0).unwrap();
            m.surface = Some(SurfaceData { genus: g, components: k });
            let rep = genus_obstruction(&m).unwrap();
            let area = 2.0 * PI * (2.0 * g as f64 + k as f64 - 2.0);
            if (rep.area - area).abs() > 1e-12 || rep.passes_area_bound != (g > 1) || rep.genus_ok != (g > 1) {
                bad += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: bad == 0 && within(elapsed, C7_BUDGET),
        detail: format!("36 (g, k) pairs, {bad} disagreements; {:.3}s", elapsed.as_secs_f64()),
    }
}

fn probe_setup(arc: f64) -> (GluedSpace, SubspaceDescriptor) {
    let m = ManifoldDescriptor::new(vec![8.0], 1.5).unwrap();
    let g = GluedSpace::new(m, 1.2, 1.4, 2.5).unwrap();
    let family = ArcFamily { components: vec![vec![Arc::from_ends(0.0, arc)]] };
    (g, SubspaceDescriptor::constant(1.2, 1.4, 2.5, family, 200))
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let (g, good) = probe_setup(2.0);
    let check = check_descriptors(g.manifold(), Some(&good), ConditionBOptions::default()).unwrap();
    let a = &check.condition_a;
    let wit = a.witness.unwrap();
    let a_ok = a.feasible && wit.c >= 2.5 && 2.5 > PI / 1.2f64.sinh();
    let b = check.condition_b.as_ref().unwrap();
    let b_ok = b.b1 && b.b2 && b.b3;
    let good_rep = local_convexity_probe(g.cone(0).unwrap(), &good, 0, 200, 8, ProbeOptions::default()).unwrap();

    let (g, bad) = probe_setup(6.5);
    let bad_b3 = !check_descriptors(g.manifold(), Some(&bad), ConditionBOptions::default()).unwrap().condition_b.unwrap().b3;
    let bad_rep = local_convexity_probe(g.cone(0).unwrap(), &bad, 0, 200, 8, ProbeOptions::default()).unwrap();
    let near_tip = bad_rep.examples.iter().any(|e| e.outside.t < 1.2);
    let elapsed = start.elapsed();
    Outcome {
        pass: a_ok
            && b_ok
            && good_rep.pass
            && good_rep.pairs_tested == 200
            && bad_b3
            && bad_rep.exits > 0
            && near_tip
            && within(elapsed, C8_BUDGET),
        detail: format!(
            "A {a_ok}, B1-B3 {b_ok}: {} pairs, {} exits; gap < c: B3 fails {bad_b3}, {} exits, below b {near_tip}; {:.2}s",
            good_rep.pairs_tested,
            good_rep.exits,
            bad_rep.exits,
            elapsed.as_secs_f64()
        ),
    }
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let (g, _) = probe_setup(2.0);
    let rep = seam_isometry_check(&g, 0, 100, 9).unwrap();
    let elapsed = start.elapsed();
    Outcome {
        pass: rep.pairs == 100 && rep.max_relative_discrepancy < SEAM_TOLERANCE && within(elapsed, C9_BUDGET),
        detail: format!(
            "{} pairs ({} resampled), worst rel discrepancy {:.1e}; {:.2}s",
            rep.pairs,
            rep.rejected,
            rep.max_relative_discrepancy,
            elapsed.as_secs_f64()
        ),
    }
}

fn criterion_10() -> Outcome {
    let start = Instant::now();
    let mut r = rng(10);
    let mut formula_bad = 0;
    for _ in 0..1000 {
        let delta = r.random_range(0.05..1.2);
        let length = r.random_range(0.5..30.0);
        let cone = ConeSpace::new(Warping::Linear { t0: 0.0, slope: delta }, Fiber::circle(length).unwrap(), 1.0).unwrap();
        let (p1, p2) = (r.random_range(0.0..length), r.random_range(0.0..length));
        let expect = (circle_distance(p1, p2, length) / delta).min(PI);
        if (tip_angle(&cone, p1, p2) - expect).abs() > C10_FORMULA_REL * expect.max(1.0) {
            formula_bad += 1;
        }
    }

    // comparison angles at the apex of the synthesized cone
    let cone = oracle_cone();
    let mut worst: f64 = 0.0;
    let mut samples = Vec::new();
    for d in [0.5, 1.0, 2.0] {
        let formula = tip_angle(&cone, 0.0, d);
        let est = alexandrov_angle_estimate(&cone, 0.0, d, 1e-3).unwrap();
        worst = worst.max((est - formula).abs() / formula);
        samples.push(format!("d = {d}: {est:.4} vs {formula:.4}"));
    }
    let log = log_injectivity_check(&cone, 100, 10).unwrap();
    let elapsed = start.elapsed();
    Outcome {
        pass: formula_bad == 0 && worst < C10_ANGLE_REL && log.pass && within(elapsed, C10_BUDGET),
        detail: format!(
            "formula {formula_bad}/1000 mismatches; angle at r = 1e-3 [{}], worst rel {worst:.3}; log injective {}; {:.2}s",
            samples.join(", "),
            log.pass,
            elapsed.as_secs_f64()
        ),
    }
}

fn criterion_11() -> Outcome {
    let start = Instant::now();
    let run = || -> Vec<String> {
        let cone = oracle_cone();
        let (g, s) = probe_setup(6.5);
        vec![
            to_tagged_json(&cat_test(&cone, cone.warping().certified_k(), 30, 3, 11).unwrap()).unwrap(),
            to_tagged_json(&local_convexity_probe(g.cone(0).unwrap(), &s, 0, 100, 11, ProbeOptions::default()).unwrap())
                .unwrap(),
            to_tagged_json(&seam_isometry_check(&g, 0, 50, 11).unwrap()).unwrap(),
            to_tagged_json(&log_injectivity_check(&cone, 50, 11).unwrap()).unwrap(),
            to_tagged_json(&check_descriptors(g.manifold(), Some(&s), ConditionBOptions::default()).unwrap()).unwrap(),
        ]
    };
    let (a, b) = (run(), run());
    let same = a == b;
    let bytes: usize = a.iter().map(|s| s.len()).sum();
    Outcome {
        pass: same,
        detail: format!("5 reports, {bytes} bytes, identical across runs: {same}; {:.2}s", start.elapsed().as_secs_f64()),
    }
}

fn main() -> ExitCode {
    let criteria: [(usize, &str, fn() -> Outcome); 11] = [
        (1, "warping certification", criterion_1),
        (2, "flat-cone geodesic exactness", criterion_2),
        (3, "oracle agreement", criterion_3),
        (4, "Clairaut and structure invariants", criterion_4),
        (5, "CAT(K) conformance", criterion_5),
        (6, "condition A checker", criterion_6),
        (7, "Gauss-Bonnet obstruction", criterion_7),
        (8, "local convexity probe", criterion_8),
        (9, "seam isometry", criterion_9),
        (10, "tip angle and log injectivity", criterion_10),
        (11, "determinism", criterion_11),
    ];
    let mut unexpected = Vec::new();
    for (n, name, run) in criteria {
        let out = run();
        let known = KNOWN_FAILURES.iter().find(|(k, _)| *k == n);
        let verdict = if out.pass { "PASS" } else { "FAIL" };
        println!("[{verdict}] {n:>2} {name}: {}", out.detail);
        match (out.pass, known) {
            (false, Some((_, why))) => println!("       known failure: {why}"),
            (false, None) => unexpected.push(n),
            (true, Some(_)) => {
                println!("       listed as a known failure but passed");
                unexpected.push(n);
            }
            (true, None) => {}
        }
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected outcomes: {unexpected:?}");
        ExitCode::FAILURE
    }
}
