use std::f64::consts::PI;

use super::energy::integrate_density;
use super::{energy, mean_curvature, FunctionalCoefficients, ProfileCurve};
use crate::error::Result;
use crate::geometry::GeometryParams;
use crate::numerics::d1_five_point;
use crate::numerics::quadrature::GaussLegendre;
use crate::numerics::stencil;
use crate::profile::Profile;

use super::residual::STENCIL_INTERVALS;

/// `|H² − [¼(σ̇ − (1/u + ku/4) sin σ)² + σ̇ sin σ/u − k sin²σ/4]|`, an exact
/// algebraic identity that should vanish to roundoff.
pub fn h_squared_identity_check(
    g: &GeometryParams,
    u: f64,
    sigma: f64,
    sigma_dot: f64,
) -> Result<f64> {
    let h = mean_curvature(g, u, sigma, sigma_dot)?;
    let k = g.k();
    let sin = sigma.sin();
    let d = sigma_dot - (1.0 / u + 0.25 * k * u) * sin;
    let rhs = 0.25 * d * d + sigma_dot * sin / u - 0.25 * k * sin * sin;
    Ok((h * h - rhs).abs())
}

/// `|E − (W + ∫(−¾K̄ + k/4 − τ²/4) dμ)|` with canonical coefficients, all
/// three integrals on the panels chosen for `E`.
pub fn willmore_relation_check(profile: &Profile) -> Result<f64> {
    let g = *profile.geometry();
    let report = energy(profile, FunctionalCoefficients::canonical(&g))?;
    let dense = profile.dense()?;
    let shift = 0.25 * g.k() - 0.25 * g.tau() * g.tau();
    let correction = integrate_density(dense, report.panels, |l| {
        -0.75 * g.sectional_curvature_unchecked(l.nu(&g)) + shift
    });
    Ok((report.e - (report.willmore_w + correction)).abs())
}

/// Largest deviation, over interior samples, between the second-summand
/// density `(σ̇ sin σ/u − k sin²σ/4 + (k/4 − τ²)ν² + k/4) μ` and a five-point
/// derivative of `−u̇ √(1+τ²u²)/(1+ku²/4)²`.
pub fn second_summand_derivative_check(profile: &Profile) -> Result<f64> {
    let dense = profile.dense()?;
    let g = *dense.geometry();
    let step = dense.length() / STENCIL_INTERVALS as f64;
    let bracket = |s: f64| {
        let d = dense.at(s);
        let a = g.conformal(d.u);
        -d.du * g.twist(d.u) / (a * a)
    };
    let samples = profile.samples();
    Ok(samples[1..samples.len() - 1]
        .iter()
        .map(|p| {
            let l = dense.local(p.s);
            let density = l.second_summand_density(&g) * g.orbit_factor(l.u);
            let derivative = d1_five_point(
                bracket(p.s - 2.0 * step),
                bracket(p.s - step),
                bracket(p.s + step),
                bracket(p.s + 2.0 * step),
                step,
            );
            (density - derivative).abs()
        })
        .fold(0.0, f64::max))
}

/// `∫ K dμ = 2π ∫ K μ ds` with `K = −μ''/μ` from five-point stencils.
pub fn gauss_bonnet(profile: &Profile) -> Result<f64> {
    let dense = profile.dense()?;
    let step = dense.length() / STENCIL_INTERVALS as f64;
    let total = GaussLegendre::sixteen().integrate_composite(0.0, dense.length(), 128, |s| {
        let (mu, _, d2mu) = stencil(|t| dense.orbit_factor(t), s, step);
        let k = -d2mu / mu;
        k * mu
    });
    Ok(2.0 * PI * total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{generate_cmc_sphere, perturbed_sphere, PerturbationSpec};
    use approx::assert_abs_diff_eq;

    #[test]
    fn h_squared_identity_on_the_pole_line() {
        let g = GeometryParams::sl2();
        assert!(h_squared_identity_check(&g, 0.7, 0.0, 2.3).unwrap() < 1e-15);
        assert!(h_squared_identity_check(&g, 1.3, 2.0, -0.4).unwrap() < 1e-14);
    }

    #[test]
    fn identities_hold_on_spheres_and_perturbations() {
        let g = GeometryParams::sl2();
        let spheres = [
            generate_cmc_sphere(&g, 0.8).unwrap(),
            perturbed_sphere(&g, 0.8, PerturbationSpec::new(0.2, 2).unwrap()).unwrap(),
        ];
        for p in &spheres {
            assert!(willmore_relation_check(p).unwrap() < 1e-8);
            assert!(second_summand_derivative_check(p).unwrap() < 1e-5);
            assert_abs_diff_eq!(gauss_bonnet(p).unwrap(), 4.0 * PI, epsilon = 1e-3);
        }
    }
}
