//! The cone metric above b against the closed-form cosh collar, and the
//! isotopy carrying Y onto the coned-off subset.

use warpcone::filling::{check_condition_b, Arc, ArcFamily, ManifoldDescriptor, SubspaceDescriptor};
use warpcone::glue::{psi_claims_check, seam_isometry_check, GluedSpace};

fn main() -> warpcone::error::Result<()> {
    let m = ManifoldDescriptor::new(vec![8.0, 6.0], 1.5)?;
    let g = GluedSpace::new(m.clone(), 1.2, 1.4, 2.5)?;
    for comp in 0..2 {
        let r = seam_isometry_check(&g, comp, 100, comp as u64)?;
        println!("component {comp}: {} pairs, worst relative discrepancy {:.2e}", r.pairs, r.max_relative_discrepancy);
    }

    let family = ArcFamily { components: vec![vec![Arc::from_ends(0.0, 2.0)], vec![Arc::from_ends(1.0, 2.5)]] };
    let s = SubspaceDescriptor::constant(1.2, 1.4, 2.5, family, 200);
    let iso = check_condition_b(&m, &s)?.isotopy.expect("B1 holds");
    let c = psi_claims_check(&g, &iso, 500, 3)?;
    println!("isotopy claims over {} samples: pass {}", c.samples, c.pass);
    Ok(())
}
