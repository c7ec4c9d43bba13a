//! Hypothesis audit and sampled CAT(K) comparison.

use std::f64::consts::PI;

use warpcone::cat::{cat_test, hypothesis_audit};
use warpcone::cone::{ConeSpace, Fiber};
use warpcone::warp::{synthesize, Warping};

fn main() -> warpcone::error::Result<()> {
    let f = synthesize(1.0, 0.5)?;
    let cone = ConeSpace::new(Warping::Cone(f), Fiber::circle(8.0 * PI)?, 2.0)?;
    let audit = hypothesis_audit(&cone);
    println!("audit: delta^2 >= K_F {}, F_K-convex {}, K = {:.6}", audit.slope_condition, audit.fk_convex, audit.certified_k);
    let r = cat_test(&cone, audit.certified_k, 40, 3, 7)?;
    println!("certified cone at K: max violation {:.3e} over {} pairs, pass {}", r.max_violation, r.pairs_compared, r.pass);

    let plane = ConeSpace::euclidean_plane(3.0);
    for k in [0.0, -1.0] {
        let r = cat_test(&plane, k, 40, 3, 7)?;
        println!("plane at K = {k}: max violation {:.3e}, pass {}", r.max_violation, r.pass);
    }
    Ok(())
}
