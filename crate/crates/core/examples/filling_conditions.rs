//! Conditions A and B, the Gauss-Bonnet obstruction and epsilon bounds.

use warpcone::filling::{
    buffer_width_arcs, check_descriptors, epsilon_bound, Arc, ArcFamily, ConditionBOptions, ManifoldDescriptor,
    SubspaceDescriptor, SurfaceData,
};
use warpcone::warp::{delta_from_c, synthesize};

fn main() -> warpcone::error::Result<()> {
    for length in [8.0, 5.0] {
        let m = ManifoldDescriptor::new(vec![length], 1.0)?;
        let r = check_descriptors(&m, None, ConditionBOptions::default())?;
        println!("w = 1, L = {length}: feasible {}, margin {:.6}", r.condition_a.feasible, r.condition_a.margin);
    }

    for (genus, components) in [(1, 2), (2, 2), (3, 1)] {
        let mut m = ManifoldDescriptor::new(vec![8.0; components as usize], 1.0)?;
        m.surface = Some(SurfaceData { genus, components });
        let g = check_descriptors(&m, None, ConditionBOptions::default())?.genus.unwrap();
        println!("g = {genus}, k = {components}: area {:.4}, area bound {}", g.area, g.passes_area_bound);
    }

    let m = ManifoldDescriptor::new(vec![8.0], 1.5)?;
    for arc in [2.0, 6.5] {
        let family = ArcFamily { components: vec![vec![Arc::from_ends(0.0, arc)]] };
        let s = SubspaceDescriptor::constant(1.2, 1.4, 2.5, family, 200);
        let b = check_descriptors(&m, Some(&s), ConditionBOptions::default())?.condition_b.unwrap();
        println!(
            "arc of length {arc}: buffer width {:.3}, B1 {} B2 {} B3 {}",
            buffer_width_arcs(8.0, &s.levels[0].components[0])?,
            b.b1,
            b.b2,
            b.b3
        );
    }

    let f = synthesize(1.2, delta_from_c(2.5)?)?;
    for t in [f.t0() + 0.1, 0.6, 1.1] {
        let e = epsilon_bound(t, &f, 1.4, 2.5, 1.0)?;
        println!("epsilon bound at t = {t:.3}: {:.6}", e.eps_max);
    }
    Ok(())
}
