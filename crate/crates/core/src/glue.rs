//! The glued space: a cone `C_f(N_i)` attached along each boundary circle,
//! its coordinate map onto the cone-off, and the isotopy `Ψ` that carries
//! `Y` onto the coned-off subset.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::collar::Collar;
use crate::cone::{solve, ConePoint, ConeSpace, Fiber};
use crate::error::{Error, Result};
use crate::filling::{Isotopy, ManifoldDescriptor};
use crate::warp::{delta_from_c, synthesize, Warping, WarpingFunction};

/// Relative agreement required between the cone and collar solvers.
pub const SEAM_TOLERANCE: f64 = 1e-4;
const RESAMPLE_LIMIT: usize = 50;

#[derive(Debug, Clone)]
pub struct GluedSpace {
    manifold: ManifoldDescriptor,
    b: f64,
    b_prime: f64,
    c: f64,
    warping: WarpingFunction,
    cones: Vec<ConeSpace>,
}

/// A point of the cone-off in its own coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "region", rename_all = "lowercase")]
pub enum ConeOffPoint {
    /// Away from the boundary collar; not modelled further.
    Interior,
    /// `(depth, p)` in the collar `[0, w) ×_cosh ∂M`.
    Collar { component: usize, depth: f64, p: f64 },
    /// `(p, ζ)` in the topological cone `∂M × [0, 1] / ∂M × {0}`; `ζ = 1`
    /// is the boundary.
    Cone { component: usize, p: f64, zeta: f64 },
}

impl ConeOffPoint {
    /// Equality up to the identifications `(p, 1) ∼ (0, p)` and the apex.
    pub fn same_as(&self, other: &ConeOffPoint, length: f64, tol: f64) -> bool {
        let close = |a: f64, b: f64| {
            let d = (b - a).rem_euclid(length);
            d.min(length - d) <= tol
        };
        use ConeOffPoint::*;
        match (*self, *other) {
            (Interior, Interior) => true,
            (Collar { component: i, depth: t, p }, Collar { component: j, depth: s, p: q }) => {
                i == j && (t - s).abs() <= tol && close(p, q)
            }
            (Cone { component: i, p, zeta: z }, Cone { component: j, p: q, zeta: y }) => {
                i == j && (z - y).abs() <= tol && (z <= tol || close(p, q))
            }
            (Cone { component: i, p, zeta }, Collar { component: j, depth, p: q })
            | (Collar { component: j, depth, p: q }, Cone { component: i, p, zeta }) => {
                i == j && (zeta - 1.0).abs() <= tol && depth.abs() <= tol && close(p, q)
            }
            _ => false,
        }
    }
}

impl GluedSpace {
    /// Glue cones with `δ = π / c` at level `b` onto every boundary circle.
    pub fn new(manifold: ManifoldDescriptor, b: f64, b_prime: f64, c: f64) -> Result<Self> {
        manifold.validate()?;
        if !(0.0 < b && b < b_prime && b_prime < manifold.w) {
            return Err(Error::InvalidDescriptor(format!(
                "need 0 < b < b' < w, got b = {b}, b' = {b_prime}, w = {}",
                manifold.w
            )));
        }
        let warping = synthesize(b, delta_from_c(c)?)?;
        let cones = manifold
            .boundary_components
            .iter()
            .map(|&l| ConeSpace::new(Warping::Cone(warping.clone()), Fiber::circle(l)?, manifold.w))
            .collect::<Result<Vec<_>>>()?;
        Ok(GluedSpace { manifold, b, b_prime, c, warping, cones })
    }

    pub fn manifold(&self) -> &ManifoldDescriptor {
        &self.manifold
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn b_prime(&self) -> f64 {
        self.b_prime
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn warping(&self) -> &WarpingFunction {
        &self.warping
    }
    pub fn cone(&self, component: usize) -> Result<&ConeSpace> {
        self.cones.get(component).ok_or_else(|| Error::OutOfRange(format!("component {component} does not exist")))
    }
    pub fn cones(&self) -> &[ConeSpace] {
        &self.cones
    }

    /// `ξ`: affine from `[b, b′]` onto `[0, b′]`, the identity above `b′`.
    pub fn xi(&self, t: f64) -> f64 {
        if t >= self.b_prime { t } else { self.b_prime * (t - self.b) / (self.b_prime - self.b) }
    }

    pub fn xi_inverse(&self, s: f64) -> f64 {
        if s >= self.b_prime { s } else { self.b + s * (self.b_prime - self.b) / self.b_prime }
    }

    /// `α`: affine from `[t0, b]` onto `[0, 1]`.
    pub fn alpha(&self, t: f64) -> f64 {
        (t - self.warping.t0()) / (self.b - self.warping.t0())
    }

    /// Cone coordinates to cone-off coordinates.
    pub fn phi(&self, component: usize, x: ConePoint) -> Result<ConeOffPoint> {
        let cone = self.cone(component)?;
        cone.check_point(&x)?;
        let p = cone.fiber().reduce(x.theta);
        Ok(if x.t < self.b {
            ConeOffPoint::Cone { component, p, zeta: self.alpha(x.t).max(0.0) }
        } else {
            ConeOffPoint::Collar { component, depth: self.xi(x.t), p }
        })
    }

    /// Inverse of [`GluedSpace::phi`] on the collar and cone regions.
    pub fn phi_inverse(&self, x: ConeOffPoint) -> Result<(usize, ConePoint)> {
        match x {
            ConeOffPoint::Interior => Err(Error::OutOfRange("interior points have no cone coordinates".into())),
            ConeOffPoint::Collar { component, depth, p } => Ok((component, ConePoint::new(self.xi_inverse(depth), p))),
            ConeOffPoint::Cone { component, p, zeta } => {
                let t0 = self.warping.t0();
                Ok((component, ConePoint::new(t0 + zeta * (self.b - t0), p)))
            }
        }
    }

    fn region_map(&self, s: f64, x: ConeOffPoint, iso: &Isotopy, forward: bool) -> Result<ConeOffPoint> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::OutOfRange(format!("isotopy parameter {s} outside [0, 1]")));
        }
        Ok(match x {
            ConeOffPoint::Interior => x,
            ConeOffPoint::Collar { depth, .. } if depth >= self.b_prime => x,
            ConeOffPoint::Collar { component, depth, p } => {
                let (outer, inner) = (s * depth, s * self.xi_inverse(depth));
                let q = if forward {
                    iso.apply(outer, component, iso.invert(inner, component, p))
                } else {
                    iso.apply(inner, component, iso.invert(outer, component, p))
                };
                ConeOffPoint::Collar { component, depth, p: q }
            }
            ConeOffPoint::Cone { component, p, zeta } => {
                let q = if forward { iso.invert(s * self.b, component, p) } else { iso.apply(s * self.b, component, p) };
                ConeOffPoint::Cone { component, p: q, zeta }
            }
        })
    }

    /// `Ψ_s`: the identity off the `b′`-collar, `(t, Φ_{st} ∘ Φ_{sξ⁻¹(t)}⁻¹(p))`
    /// in it, and `(Φ_{sb}⁻¹(p), ζ)` on the cone.
    pub fn psi(&self, s: f64, x: ConeOffPoint, iso: Option<&Isotopy>) -> Result<ConeOffPoint> {
        let iso = iso.ok_or_else(|| Error::IsotopyUndefined("condition B1 failed; no isotopy witness".into()))?;
        self.region_map(s, x, iso, true)
    }

    pub fn psi_inverse(&self, s: f64, x: ConeOffPoint, iso: Option<&Isotopy>) -> Result<ConeOffPoint> {
        let iso = iso.ok_or_else(|| Error::IsotopyUndefined("condition B1 failed; no isotopy witness".into()))?;
        self.region_map(s, x, iso, false)
    }
}

/// Is the cone-off point in the coned-off subset: `p ∈ P_t` in the collar,
/// `p ∈ P_0` on the cone?
pub fn in_coned_off_subset(x: &ConeOffPoint, iso: &Isotopy) -> bool {
    match *x {
        ConeOffPoint::Interior => false,
        ConeOffPoint::Collar { component, depth, p } => iso.contains(depth, component, p),
        ConeOffPoint::Cone { component, p, zeta } => {
            if zeta <= 0.0 {
                !iso.knots[0][component].is_empty()
            } else {
                iso.contains(0.0, component, p)
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeamReport {
    pub component: usize,
    pub pairs: usize,
    /// Pairs whose cone geodesic dipped below `b` and were resampled.
    pub rejected: usize,
    pub max_relative_discrepancy: f64,
    pub max_absolute_discrepancy: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub seed: u64,
}

/// Compare cone distances in the band `[b, w)` with the closed-form collar.
pub fn seam_isometry_check(g: &GluedSpace, component: usize, n_pairs: usize, seed: u64) -> Result<SeamReport> {
    let cone = g.cone(component)?;
    let (lo, hi) = (g.b, g.manifold.w);
    if hi - lo < 1e-6 {
        return Err(Error::BandTooThin(hi - lo));
    }
    let collar = Collar::new(cone.fiber().length)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SeamReport {
        component,
        pairs: 0,
        rejected: 0,
        max_relative_discrepancy: 0.0,
        max_absolute_discrepancy: 0.0,
        tolerance: SEAM_TOLERANCE,
        pass: true,
        seed,
    };
    let top = hi * (1.0 - 1e-12);
    let length = cone.fiber().length;
    for _ in 0..n_pairs {
        for _ in 0..RESAMPLE_LIMIT {
            let x = ConePoint::new(lo + (top - lo) * rng.random_range(0.0..1.0), length * rng.random_range(0.0..1.0));
            let y = ConePoint::new(lo + (top - lo) * rng.random_range(0.0..1.0), length * rng.random_range(0.0..1.0));
            let sol = solve(cone, x, y)?;
            if sol.through_tip || sol.min_depth < lo || sol.flagged {
                report.rejected += 1;
                continue;
            }
            let model = collar.distance(x.t, x.theta, y.t, y.theta);
            let abs = (sol.length - model).abs();
            let rel = if sol.length > 0.0 { abs / sol.length } else { abs };
            report.max_absolute_discrepancy = report.max_absolute_discrepancy.max(abs);
            report.max_relative_discrepancy = report.max_relative_discrepancy.max(rel);
            report.pairs += 1;
            break;
        }
    }
    report.pass = report.max_relative_discrepancy < SEAM_TOLERANCE;
    Ok(report)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClaimReport {
    pub samples: usize,
    /// Region seams where `Ψ_s` disagreed with a neighbouring formula.
    pub seam_mismatches: usize,
    /// Points of `Y` whose image left the coned-off subset, or the reverse.
    pub membership_mismatches: usize,
    /// `Ψ_s⁻¹ ∘ Ψ_s` not the identity.
    pub inverse_mismatches: usize,
    /// Distinct points with equal images under `φ`.
    pub phi_collisions: usize,
    pub pass: bool,
}

/// Sampled checks of the isotopy: `Ψ_0 = id`, agreement on the seams
/// `t = b′` and `t = 0`, bijectivity, and `Ψ_1 ∘ φ (Y) = Ŝ` on samples.
pub fn psi_claims_check(g: &GluedSpace, iso: &Isotopy, n: usize, seed: u64) -> Result<ClaimReport> {
    const TOL: f64 = 1e-9;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = ClaimReport {
        samples: 0,
        seam_mismatches: 0,
        membership_mismatches: 0,
        inverse_mismatches: 0,
        phi_collisions: 0,
        pass: true,
    };
    let t0 = g.warping.t0();
    let mut images: Vec<(usize, ConePoint, ConeOffPoint)> = Vec::new();
    for _ in 0..n {
        let comp = rng.random_range(0..g.cones.len());
        let length = g.manifold.boundary_components[comp];
        let p = length * rng.random_range(0.0..1.0);
        let sp = rng.random_range(0.0..1.0);
        let t = t0 + (g.manifold.w - t0) * rng.random_range(0.0..1.0);
        let x = ConePoint::new(t, p);
        let img = g.phi(comp, x)?;
        r.samples += 1;

        // Ψ_0 is the identity; Ψ_s then its inverse returns the point
        if !g.psi(0.0, img, Some(iso))?.same_as(&img, length, TOL) {
            r.inverse_mismatches += 1;
        }
        let moved = g.psi(sp, img, Some(iso))?;
        if !g.psi_inverse(sp, moved, Some(iso))?.same_as(&img, length, 1e-8) {
            r.inverse_mismatches += 1;
        }

        // seams: t = b′ fixed, and t = 0 of the collar meets ζ = 1 of the cone
        let outer = ConeOffPoint::Collar { component: comp, depth: g.b_prime, p };
        if !g.psi(sp, outer, Some(iso))?.same_as(&outer, length, TOL) {
            r.seam_mismatches += 1;
        }
        let rim = g.psi(sp, ConeOffPoint::Collar { component: comp, depth: 0.0, p }, Some(iso))?;
        let cap = g.psi(sp, ConeOffPoint::Cone { component: comp, p, zeta: 1.0 }, Some(iso))?;
        if !rim.same_as(&cap, length, 1e-8) {
            r.seam_mismatches += 1;
        }

        // Ψ_1 ∘ φ carries Y onto the coned-off subset
        if t <= g.b_prime {
            let in_y = if t <= g.b { iso.contains(g.b, comp, p) } else { iso.contains(t, comp, p) };
            let image = g.psi(1.0, img, Some(iso))?;
            if in_y != in_coned_off_subset(&image, iso) {
                r.membership_mismatches += 1;
            }
        }
        for (c2, x2, i2) in &images {
            if *c2 == comp && (x2.t != x.t || x2.theta != x.theta) && x.t > t0 && x2.t > t0 && i2.same_as(&img, length, 0.0)
            {
                r.phi_collisions += 1;
            }
        }
        if images.len() < 256 {
            images.push((comp, x, img));
        }
    }
    r.pass = r.seam_mismatches == 0 && r.membership_mismatches == 0 && r.inverse_mismatches == 0 && r.phi_collisions == 0;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filling::{check_condition_b, Arc, ArcFamily, SubspaceDescriptor};

    fn glued() -> GluedSpace {
        GluedSpace::new(ManifoldDescriptor::new(vec![8.0, 9.0], 1.5).unwrap(), 1.2, 1.4, 2.5).unwrap()
    }

    #[test]
    fn phi_at_landmarks() {
        let g = glued();
        let b = g.phi(0, ConePoint::new(1.2, 0.7)).unwrap();
        assert!(b.same_as(&ConeOffPoint::Cone { component: 0, p: 0.7, zeta: 1.0 }, 8.0, 1e-12));
        let apex = g.phi(0, ConePoint::new(g.warping().t0(), 3.0)).unwrap();
        assert!(matches!(apex, ConeOffPoint::Cone { zeta, .. } if zeta == 0.0));
        let outer = g.phi(1, ConePoint::new(1.4, 2.0)).unwrap();
        assert_eq!(outer, ConeOffPoint::Collar { component: 1, depth: 1.4, p: 2.0 });
    }

    #[test]
    fn seam_agrees_with_collar() {
        let g = glued();
        let r = seam_isometry_check(&g, 0, 20, 5).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.pairs, 20);
    }

    #[test]
    fn isotopy_claims() {
        let g = glued();
        let m = g.manifold().clone();
        let mut s = SubspaceDescriptor::constant(
            1.2,
            1.4,
            2.5,
            ArcFamily { components: vec![vec![Arc::from_ends(0.0, 2.0)], vec![Arc::from_ends(3.0, 4.0)]] },
            200,
        );
        for (t, lv) in s.grid.iter().zip(s.levels.iter_mut()) {
            lv.components[0][0] = Arc::from_ends(0.2 * t, 2.0 - 0.1 * t);
        }
        let iso = check_condition_b(&m, &s).unwrap().isotopy.unwrap();
        let r = psi_claims_check(&g, &iso, 300, 9).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(matches!(g.psi(0.5, ConeOffPoint::Interior, None), Err(Error::IsotopyUndefined(_))));
    }
}
