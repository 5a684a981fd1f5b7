use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{Check, Thresholds};
use crate::error::Result;
use crate::functional::{
    gauss_bonnet, h_squared_identity_check, second_summand_derivative_check,
    willmore_relation_check,
};
use crate::geometry::GeometryParams;
use crate::profile::{generate_cmc_sphere, perturbed_sphere, PerturbationSpec, Profile};

/// Identity values measured on one closed sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileIdentities {
    pub label: String,
    pub willmore_relation: f64,
    pub second_summand_derivative: f64,
    pub gauss_bonnet: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentitiesReport {
    pub geometry: GeometryParams,
    #[serde(rename = "H")]
    pub h: f64,
    pub h_squared_samples: usize,
    pub h_squared_max: f64,
    pub profiles: Vec<ProfileIdentities>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

const H_SQUARED_SAMPLES: usize = 10_000;

/// Fractional parts of `i·α` for three independent irrationals.
fn weyl(i: usize) -> [f64; 3] {
    const A: [f64; 3] = [
        0.754_877_666_246_692_7,
        0.569_840_290_998_053_3,
        0.618_033_988_749_895,
    ];
    A.map(|a| (0.5 + a * i as f64).fract())
}

/// The algebraic and integral identities on the CMC sphere of mean
/// curvature `h` and two of its perturbations.
pub fn verify_identities(
    g: &GeometryParams,
    h: f64,
    thresholds: &Thresholds,
) -> Result<IdentitiesReport> {
    let u_max = g.domain_radius().as_f64().min(3.0) * 0.99;
    let mut h_squared_max: f64 = 0.0;
    for i in 0..H_SQUARED_SAMPLES {
        let [x, y, z] = weyl(i);
        let u = 0.1 + (u_max - 0.1) * x;
        let sigma = PI * (2.0 * y - 1.0);
        let sigma_dot = 6.0 * z - 3.0;
        h_squared_max = h_squared_max.max(h_squared_identity_check(g, u, sigma, sigma_dot)?);
    }

    let mut spheres: Vec<(String, Profile)> = vec![("cmc".into(), generate_cmc_sphere(g, h)?)];
    for (eps, mode) in [(0.1, 1), (-0.2, 2)] {
        spheres.push((
            format!("perturbed:eps={eps},mode={mode}"),
            perturbed_sphere(g, h, PerturbationSpec::new(eps, mode)?)?,
        ));
    }

    let mut checks = vec![Check::below(
        "h_squared",
        h_squared_max,
        thresholds.algebraic,
    )];
    let mut profiles = Vec::new();
    for (label, p) in spheres {
        let item = ProfileIdentities {
            willmore_relation: willmore_relation_check(&p)?,
            second_summand_derivative: second_summand_derivative_check(&p)?,
            gauss_bonnet: gauss_bonnet(&p)?,
            label,
        };
        checks.push(Check::below(
            format!("willmore_relation:{}", item.label),
            item.willmore_relation,
            thresholds.quadrature,
        ));
        checks.push(Check::below(
            format!("second_summand_derivative:{}", item.label),
            item.second_summand_derivative,
            thresholds.finite_difference,
        ));
        checks.push(Check::below(
            format!("gauss_bonnet:{}", item.label),
            (item.gauss_bonnet - 4.0 * PI).abs(),
            thresholds.gauss_bonnet,
        ));
        profiles.push(item);
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(IdentitiesReport {
        geometry: *g,
        h,
        h_squared_samples: H_SQUARED_SAMPLES,
        h_squared_max,
        profiles,
        checks,
        passed,
    })
}
