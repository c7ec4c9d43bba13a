//! Angles at the apex: the formula, comparison-triangle estimates, the
//! empirical through-tip threshold and log injectivity.

use std::f64::consts::PI;

use warpcone::cone::{
    alexandrov_angle_estimate, empirical_tip_threshold, log_injectivity_check, tip_angle, ConeSpace, Fiber,
};
use warpcone::warp::{synthesize, Warping};

fn main() -> warpcone::error::Result<()> {
    let delta = 0.8;
    let cone = ConeSpace::new(Warping::Cone(synthesize(1.0, delta)?), Fiber::circle(2.0 * PI / delta * 1.05)?, 2.0)?;
    let d = 1.0;
    println!("tip_angle(0, {d}) = {:.6}", tip_angle(&cone, 0.0, d));
    for r in [1e-1, 1e-2, 1e-3] {
        println!("  comparison angle at r = {r}: {:.6}", alexandrov_angle_estimate(&cone, 0.0, d, r)?);
    }
    println!("  delta * d = {:.6}", delta * d);

    let t0 = cone.t0();
    if let Some(th) = empirical_tip_threshold(&cone, t0 + 0.3, t0 + 0.6, 1e-6)? {
        println!("empirical through-tip threshold {th:.6}, pi / delta = {:.6}", PI / delta);
    }
    let r = log_injectivity_check(&cone, 100, 5)?;
    println!("log map injective on {} samples: {}", r.samples, r.pass);
    Ok(())
}
