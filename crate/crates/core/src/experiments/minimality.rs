use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{Check, Execution, Thresholds};
use crate::error::Result;
use crate::functional::{canonical_coefficients, energy};
use crate::geometry::GeometryParams;
use crate::profile::{generate_cmc_sphere, perturbed_sphere, PerturbationSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimalityEntry {
    pub epsilon: f64,
    pub mode: u32,
    #[serde(rename = "E")]
    pub e: Option<f64>,
    pub first_summand: Option<f64>,
    pub second_summand: Option<f64>,
    /// `E − 4π`.
    pub excess: Option<f64>,
    /// Set when the perturbation could not be built.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimalityReport {
    pub geometry: GeometryParams,
    #[serde(rename = "H")]
    pub h: f64,
    /// Energy of the CMC sphere itself.
    #[serde(rename = "E0")]
    pub e0: f64,
    pub entries: Vec<MinimalityEntry>,
    /// Largest `|E(ε) − E(−ε)|` over pairs present in the grid.
    pub max_asymmetry: f64,
    /// Whether `E` grows with `|ε|` within every mode (observed, not required).
    pub monotone_in_amplitude: bool,
    pub checks: Vec<Check>,
    pub passed: bool,
}

/// Canonical energy of perturbed spheres against the CMC sphere.
pub fn verify_minimality(
    g: &GeometryParams,
    h: f64,
    grid: &[PerturbationSpec],
) -> Result<MinimalityReport> {
    verify_minimality_with(g, h, grid, &Thresholds::default(), Execution::default())
}

pub fn verify_minimality_with(
    g: &GeometryParams,
    h: f64,
    grid: &[PerturbationSpec],
    thresholds: &Thresholds,
    exec: Execution,
) -> Result<MinimalityReport> {
    let four_pi = 4.0 * PI;
    let coeffs = canonical_coefficients(g);
    let sphere = generate_cmc_sphere(g, h)?;
    let e0 = energy(&sphere, coeffs)?.e;

    let entries = exec.map(grid, |spec| {
        let outcome = perturbed_sphere(g, h, *spec).and_then(|p| energy(&p, coeffs));
        match outcome {
            Ok(r) => MinimalityEntry {
                epsilon: spec.epsilon,
                mode: spec.mode,
                e: Some(r.e),
                first_summand: Some(r.first_summand),
                second_summand: Some(r.second_summand),
                excess: Some(r.e - four_pi),
                error: None,
            },
            Err(e) => MinimalityEntry {
                epsilon: spec.epsilon,
                mode: spec.mode,
                e: None,
                first_summand: None,
                second_summand: None,
                excess: None,
                error: Some(e.to_string()),
            },
        }
    });

    let mut checks = vec![Check::below(
        "E0",
        (e0 - four_pi).abs() / four_pi,
        thresholds.energy,
    )];
    let mut max_asymmetry: f64 = 0.0;
    let mut monotone = true;
    for entry in &entries {
        let label = format!("eps={},mode={}", entry.epsilon, entry.mode);
        let (Some(e), Some(second)) = (entry.e, entry.second_summand) else {
            continue;
        };
        checks.push(Check::below(
            format!("second_summand:{label}"),
            (second - four_pi).abs(),
            thresholds.second_summand,
        ));
        if entry.epsilon != 0.0 {
            checks.push(Check::above(
                format!("excess:{label}"),
                e - four_pi,
                thresholds.minimality_margin,
            ));
        }
        for other in &entries {
            if other.mode != entry.mode {
                continue;
            }
            let Some(e_other) = other.e else { continue };
            if other.epsilon == -entry.epsilon {
                max_asymmetry = max_asymmetry.max((e - e_other).abs());
            }
            if other.epsilon.abs() > entry.epsilon.abs() && e_other <= e {
                monotone = false;
            }
        }
    }
    checks.push(Check::below("evenness", max_asymmetry, thresholds.evenness));
    let passed = checks.iter().all(|c| c.passed);
    Ok(MinimalityReport {
        geometry: *g,
        h,
        e0,
        entries,
        max_asymmetry,
        monotone_in_amplitude: monotone,
        checks,
        passed,
    })
}
