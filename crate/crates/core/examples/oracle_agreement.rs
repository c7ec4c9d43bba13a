//! The shooting solver against the mesh Dijkstra oracle on a warped cone.

use std::f64::consts::PI;

use warpcone::cone::{distance_oracle, solve, ConePoint, ConeSpace, Fiber};
use warpcone::warp::{synthesize, Warping};

fn main() -> warpcone::error::Result<()> {
    let f = synthesize(1.0, 0.8)?;
    let cone = ConeSpace::new(Warping::Cone(f), Fiber::circle(2.0 * PI / 0.8 * 1.05)?, 2.0)?;
    let t0 = cone.t0();
    for (x, y) in [
        (ConePoint::new(t0 + 0.5, 0.0), ConePoint::new(1.5, 2.0)),
        (ConePoint::new(1.2, 1.0), ConePoint::new(1.8, 4.0)),
        (ConePoint::new(t0 + 0.2, 0.0), ConePoint::new(t0 + 0.3, 3.5)),
    ] {
        let s = solve(&cone, x, y)?;
        for res in [(50, 100), (100, 200), (200, 400)] {
            let o = distance_oracle(&cone, x, y, res)?;
            println!(
                "({:.3}, {:.3}) -> ({:.3}, {:.3}) at {res:?}: solver {:.6}, oracle {o:.6}, rel {:.2e}",
                x.t,
                x.theta,
                y.t,
                y.theta,
                s.length,
                (o - s.length).abs() / s.length
            );
        }
    }
    Ok(())
}
