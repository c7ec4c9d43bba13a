//! Synthesize cone warping functions and certify f'' + K f >= 0.

use warpcone::warp::{check_fk_convex_ae, check_fk_convex_barrier, synthesize_with, Profile, TAIL};

fn main() -> warpcone::error::Result<()> {
    for profile in [Profile::LinearDerivative, Profile::Smooth] {
        for (b, delta) in [(1.0, 0.5), (2.0, 3.0), (0.3, 0.1)] {
            let f = synthesize_with(b, delta, profile)?;
            let ae = check_fk_convex_ae(&f, f.k(), 10_000);
            let barrier = check_fk_convex_barrier(&f, f.k(), &[(f.t0(), f.b()), (f.b(), f.b() + TAIL)])?;
            let (left, right) = f.second_at_b();
            println!(
                "{profile:?} b = {b}, delta = {delta}: t0 = {:.6}, mu = {:.6}, K = {:.6}, f''(b-) = {left:.4}, f''(b+) = {right:.4}, certificates {}/{}",
                f.t0(),
                f.mu(),
                f.k(),
                ae.pass,
                barrier.pass
            );
        }
    }
    match synthesize_with(1.0, 1.2, Profile::LinearDerivative) {
        Err(e) => println!("b = 1, delta = 1.2 is rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
