use std::f64::consts::PI;

use proptest::prelude::*;

use warpcone::collar::Collar;
use warpcone::cone::{solve, ConePoint, ConeSpace, Fiber};
use warpcone::io::{from_tagged_json, to_tagged_json, ConeDoc};
use warpcone::model::{model_angle, model_chord};
use warpcone::warp::{synthesize, Warping};

fn cone() -> ConeSpace {
    ConeSpace::new(Warping::Cone(synthesize(1.0, 0.8).unwrap()), Fiber::circle(8.0).unwrap(), 2.0).unwrap()
}

fn point(c: &ConeSpace) -> impl Strategy<Value = ConePoint> {
    let (t0, top, length) = (c.t0(), c.t_max(), c.fiber().length);
    (t0 + 1e-3..top, 0.0..length).prop_map(|(t, th)| ConePoint::new(t, th))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chord_then_angle_round_trips(kappa in -1.5f64..1.0, a in 0.1f64..1.4, b in 0.1f64..1.4, gamma in 0.05f64..3.0) {
        let c = model_chord(kappa, a, b, gamma).unwrap();
        let back = model_angle(kappa, a, b, c).unwrap();
        prop_assert!((back - gamma).abs() < 1e-7, "{back} vs {gamma}");
    }

    #[test]
    fn flat_chord_is_law_of_cosines(a in 0.0f64..5.0, b in 0.0f64..5.0, gamma in 0.0f64..PI) {
        let c = model_chord(0.0, a, b, gamma).unwrap();
        let expect = (a * a + b * b - 2.0 * a * b * gamma.cos()).max(0.0).sqrt();
        prop_assert!((c - expect).abs() < 1e-9 * (1.0 + expect));
    }

    #[test]
    fn geodesic_length_is_symmetric((x, y) in (point(&cone()), point(&cone()))) {
        let c = cone();
        let d1 = solve(&c, x, y).unwrap().length;
        let d2 = solve(&c, y, x).unwrap().length;
        prop_assert!((d1 - d2).abs() < 1e-9 * (1.0 + d1), "{d1} vs {d2}");
    }

    #[test]
    fn triangle_inequality((x, y, z) in (point(&cone()), point(&cone()), point(&cone()))) {
        let c = cone();
        let d = |p, q| solve(&c, p, q).unwrap().length;
        prop_assert!(d(x, z) <= d(x, y) + d(y, z) + 1e-9);
    }

    #[test]
    fn plane_matches_unrolling(r1 in 0.01f64..3.0, r2 in 0.01f64..3.0, a in 0.0f64..2.0 * PI, b in 0.0f64..2.0 * PI) {
        let plane = ConeSpace::euclidean_plane(3.0);
        let s = solve(&plane, ConePoint::new(r1, a), ConePoint::new(r2, b)).unwrap().length;
        let expect = (r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * (a - b).cos()).max(0.0).sqrt();
        prop_assert!((s - expect).abs() < 1e-9 * (1.0 + expect), "{s} vs {expect}");
    }

    #[test]
    fn collar_distance_is_symmetric(t1 in 0.0f64..2.0, t2 in 0.0f64..2.0, a in 0.0f64..6.0, b in 0.0f64..6.0) {
        let c = Collar::new(6.0).unwrap();
        let d1 = c.distance(t1, a, t2, b);
        let d2 = c.distance(t2, b, t1, a);
        prop_assert!((d1 - d2).abs() < 1e-12 * (1.0 + d1));
        prop_assert!(d1 >= (t1 - t2).abs() - 1e-12);
    }

    #[test]
    fn cone_document_round_trips(b in 0.3f64..2.5, frac in 0.05f64..0.95, length in 0.5f64..20.0, extra in 0.1f64..2.0) {
        let f = synthesize(b, b.sinh() * frac).unwrap();
        let c = ConeSpace::new(Warping::Cone(f), Fiber::circle(length).unwrap(), b + extra).unwrap();
        let doc: ConeDoc = from_tagged_json(&to_tagged_json(&ConeDoc::from(&c)).unwrap()).unwrap();
        prop_assert_eq!(doc.to_cone().unwrap(), c);
    }
}
