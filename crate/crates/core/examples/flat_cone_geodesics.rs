//! Geodesics on flat cones against the unrolled closed form.

use std::f64::consts::PI;

use warpcone::cone::{geodesic, solve, ConePoint, ConeSpace, Fiber};
use warpcone::warp::Warping;

fn unrolled(r1: f64, r2: f64, angle: f64) -> f64 {
    let angle = angle.min(PI);
    (r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * angle.cos()).sqrt()
}

fn main() -> warpcone::error::Result<()> {
    let plane = ConeSpace::euclidean_plane(3.0);
    for (r1, r2, d) in [(1.0, 2.0, 0.5), (1.0, 1.0, PI / 2.0), (0.5, 2.5, 3.0), (1.0, 1.0, PI)] {
        let s = solve(&plane, ConePoint::new(r1, 0.0), ConePoint::new(r2, d))?;
        println!(
            "plane ({r1}, 0) -> ({r2}, {d:.4}): {:.12} (unrolled {:.12}), through tip: {}",
            s.length,
            unrolled(r1, r2, d),
            s.through_tip
        );
    }

    // cone angle π: the fiber distance π unrolls to π/2
    let narrow = ConeSpace::new(Warping::Linear { t0: 0.0, slope: 0.5 }, Fiber::circle(2.0 * PI)?, 3.0)?;
    let path = geodesic(&narrow, ConePoint::new(1.0, 0.0), ConePoint::new(1.0, PI))?;
    println!("narrow cone: {:.12} (unrolled {:.12})", path.length, unrolled(1.0, 1.0, PI / 2.0));
    print!("{}", path.to_csv().lines().take(4).collect::<Vec<_>>().join("\n"));
    println!("\n... {} samples", path.samples.len());
    Ok(())
}
