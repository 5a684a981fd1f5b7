use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{FunctionalCoefficients, LocalGeometry, ProfileCurve};
use crate::error::{Error, Result};
use crate::numerics::quadrature::GaussLegendre;
use crate::profile::Profile;

/// Relative agreement required between `P` and `2P` panels.
pub const QUADRATURE_TARGET: f64 = 1e-9;
const FIRST_PANELS: usize = 64;
const MAX_PANELS: usize = 16384;

/// Energies of a closed sphere from one quadrature pass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    /// `E_{α,β}` for the requested coefficients.
    #[serde(rename = "E")]
    pub e: f64,
    /// Nonnegative part of the canonical decomposition.
    pub first_summand: f64,
    /// Topological part of the canonical decomposition.
    pub second_summand: f64,
    #[serde(rename = "willmore_W")]
    pub willmore_w: f64,
    pub area: f64,
    /// Absolute difference between the last two panel counts.
    pub quadrature_error: f64,
    pub panels: usize,
}

#[derive(Default, Clone, Copy)]
struct Sums {
    e: f64,
    first: f64,
    second: f64,
    w: f64,
    area: f64,
}

fn sums<C: ProfileCurve + ?Sized>(
    curve: &C,
    coeffs: FunctionalCoefficients,
    panels: usize,
) -> Sums {
    let g = *curve.geometry();
    let gl = GaussLegendre::sixteen();
    let (t0, t1) = curve.parameter_range();
    let width = (t1 - t0) / panels as f64;
    let mut acc = Sums::default();
    for p in 0..panels {
        let a = t0 + width * p as f64;
        let b = if p + 1 == panels { t1 } else { a + width };
        for (t, w) in gl.mapped(a, b) {
            let l = curve.local(t);
            let dm = w * l.speed * g.orbit_factor(l.u);
            let h = l.mean_curvature(&g);
            let k_bar = g.sectional_curvature_unchecked(l.nu(&g));
            acc.e += (h * h + coeffs.alpha * k_bar + coeffs.beta) * dm;
            acc.first += l.first_summand_density(&g) * dm;
            acc.second += l.second_summand_density(&g) * dm;
            acc.w += (h * h + k_bar) * dm;
            acc.area += dm;
        }
    }
    let two_pi = 2.0 * PI;
    Sums {
        e: two_pi * acc.e,
        first: two_pi * acc.first,
        second: two_pi * acc.second,
        w: two_pi * acc.w,
        area: two_pi * acc.area,
    }
}

fn report(s: Sums, quadrature_error: f64, panels: usize) -> EnergyReport {
    EnergyReport {
        e: s.e,
        first_summand: s.first,
        second_summand: s.second,
        willmore_w: s.w,
        area: s.area,
        quadrature_error,
        panels,
    }
}

/// `2π ∫ f dμ` over a curve with a fixed number of 16-point panels, where
/// `f` sees the local data at each node.
pub(crate) fn integrate_density<C, F>(curve: &C, panels: usize, mut f: F) -> f64
where
    C: ProfileCurve + ?Sized,
    F: FnMut(&LocalGeometry) -> f64,
{
    let g = *curve.geometry();
    let (t0, t1) = curve.parameter_range();
    let total = GaussLegendre::sixteen().integrate_composite(t0, t1, panels, |t| {
        let l = curve.local(t);
        f(&l) * l.speed * g.orbit_factor(l.u)
    });
    2.0 * PI * total
}

/// Energies with a fixed number of 16-point Gauss–Legendre panels.
///
/// The quadrature error field is left at zero; use this when several curves
/// must share one rule (finite differences of the energy).
pub fn energy_with_panels<C: ProfileCurve + ?Sized>(
    curve: &C,
    coeffs: FunctionalCoefficients,
    panels: usize,
) -> EnergyReport {
    report(sums(curve, coeffs, panels.max(1)), 0.0, panels.max(1))
}

/// Energies with panel doubling until successive values agree to
/// [`QUADRATURE_TARGET`] relative to the larger of `|E|` and the area.
pub fn energy_of_curve<C: ProfileCurve + ?Sized>(
    curve: &C,
    coeffs: FunctionalCoefficients,
) -> Result<EnergyReport> {
    let mut panels = FIRST_PANELS;
    let mut coarse = sums(curve, coeffs, panels);
    loop {
        let fine = sums(curve, coeffs, 2 * panels);
        let diff = [
            fine.e - coarse.e,
            fine.first - coarse.first,
            fine.second - coarse.second,
            fine.w - coarse.w,
            fine.area - coarse.area,
        ]
        .iter()
        .fold(0.0f64, |m, d| m.max(d.abs()));
        let scale = fine.e.abs().max(fine.area).max(1.0);
        if diff <= QUADRATURE_TARGET * scale {
            return Ok(report(fine, diff, 2 * panels));
        }
        panels *= 2;
        if 2 * panels > MAX_PANELS {
            return Err(Error::QuadratureNonConvergence {
                target: QUADRATURE_TARGET,
                achieved: diff / scale,
            });
        }
        coarse = fine;
    }
}

/// `E_{α,β}`, `W`, area and the canonical decomposition of a closed sphere.
pub fn energy(profile: &Profile, coeffs: FunctionalCoefficients) -> Result<EnergyReport> {
    energy_of_curve(profile.dense()?, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functional::canonical_coefficients;
    use crate::geometry::GeometryParams;
    use crate::profile::{
        generate_cmc_sphere, integrate, ModulatedSphere, ProfileState, StopCondition,
    };
    use approx::assert_abs_diff_eq;

    const FOUR_PI: f64 = 4.0 * PI;

    #[test]
    fn round_spheres_have_energy_four_pi() {
        let g = GeometryParams::euclidean();
        for h in [0.5, 1.0, 2.0] {
            let p = generate_cmc_sphere(&g, h).unwrap();
            let r = energy(&p, canonical_coefficients(&g)).unwrap();
            assert_abs_diff_eq!(r.e, FOUR_PI, epsilon = 1e-9);
            assert_abs_diff_eq!(r.willmore_w, FOUR_PI, epsilon = 1e-9);
            assert_abs_diff_eq!(r.area, FOUR_PI / (h * h), epsilon = 1e-8);
        }
    }

    #[test]
    fn nil_sphere_and_its_modulations() {
        let g = GeometryParams::nil();
        let c = canonical_coefficients(&g);
        let p = generate_cmc_sphere(&g, 1.0).unwrap();
        let r = energy(&p, c).unwrap();
        assert_abs_diff_eq!(r.e, FOUR_PI, epsilon = 1e-7);
        assert_abs_diff_eq!(r.first_summand, 0.0, epsilon = 1e-9);
        let exact = ModulatedSphere::new(g, 1.0, vec![]).unwrap();
        let q = energy_of_curve(&exact, c).unwrap();
        assert_abs_diff_eq!(q.e, FOUR_PI, epsilon = 1e-12);
        assert_abs_diff_eq!(q.area, r.area, epsilon = 1e-8);

        let bumped = ModulatedSphere::new(g, 1.0, vec![(1, 0.1)]).unwrap();
        let q = energy_of_curve(&bumped, c).unwrap();
        assert!(q.e > FOUR_PI + 1e-4, "{q:?}");
        assert_abs_diff_eq!(q.second_summand, FOUR_PI, epsilon = 1e-10);
        let sampled = energy(&bumped.to_profile(2048).unwrap(), c).unwrap();
        assert_abs_diff_eq!(sampled.e, q.e, epsilon = 1e-8);
    }

    #[test]
    fn open_profiles_are_rejected() {
        let g = GeometryParams::nil();
        let p = integrate(
            &g,
            1.0,
            ProfileState::axis(0.0),
            StopCondition::ArcLength(1.0),
        )
        .unwrap();
        assert!(matches!(
            energy(&p, canonical_coefficients(&g)),
            Err(Error::OpenProfile(_))
        ));
    }
}
