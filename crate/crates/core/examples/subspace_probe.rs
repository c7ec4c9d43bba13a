//! Local convexity of Y near the apex for a wide and a narrow gap.

use warpcone::filling::{local_convexity_probe, Arc, ArcFamily, ProbeOptions, SubspaceDescriptor};
use warpcone::filling::ManifoldDescriptor;
use warpcone::glue::GluedSpace;

fn main() -> warpcone::error::Result<()> {
    let g = GluedSpace::new(ManifoldDescriptor::new(vec![8.0], 1.5)?, 1.2, 1.4, 2.5)?;
    for arc in [2.0, 6.5] {
        let family = ArcFamily { components: vec![vec![Arc::from_ends(0.0, arc)]] };
        let s = SubspaceDescriptor::constant(1.2, 1.4, 2.5, family, 200);
        let r = local_convexity_probe(g.cone(0)?, &s, 0, 200, 1, ProbeOptions::default())?;
        println!("gap {:.1}: {} pairs ({} at the apex), {} exits", 8.0 - arc, r.pairs_tested, r.tip_pairs, r.exits);
        if let Some(e) = r.examples.first() {
            println!("  e.g. ({:.4}, {:.4}) -> ({:.4}, {:.4}) leaves Y at t = {:.4}", e.from.t, e.from.theta, e.to.t, e.to.theta, e.outside.t);
        }
    }
    Ok(())
}
