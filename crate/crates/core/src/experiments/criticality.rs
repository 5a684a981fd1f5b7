use serde::{Deserialize, Serialize};

use super::variation::{first_variation, weak_form_variation, VariationResult, VelocityProfile};
use super::{Check, Execution, Thresholds};
use crate::error::Result;
use crate::functional::{energy, residual_trace, EnergyReport, FunctionalCoefficients};
use crate::geometry::GeometryParams;
use crate::profile::generate_cmc_sphere;

/// A finite-difference first variation next to its weak-form prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationCheck {
    #[serde(flatten)]
    pub result: VariationResult,
    /// `2π ∫ R φ μ ds`.
    pub weak_form: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalityReport {
    pub geometry: GeometryParams,
    #[serde(rename = "H")]
    pub h: f64,
    pub coefficients: FunctionalCoefficients,
    pub energy: EnergyReport,
    pub max_residual: f64,
    /// Arclength of the sample with the largest residual.
    pub max_residual_at: f64,
    pub variations: Vec<VariationCheck>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

/// Residual scan and first variations of `E_{α,β}` at the CMC sphere of
/// mean curvature `h`, with default thresholds.
pub fn verify_criticality(
    g: &GeometryParams,
    h: f64,
    coeffs: FunctionalCoefficients,
) -> Result<CriticalityReport> {
    verify_criticality_with(g, h, coeffs, &Thresholds::default(), Execution::default())
}

pub fn verify_criticality_with(
    g: &GeometryParams,
    h: f64,
    coeffs: FunctionalCoefficients,
    thresholds: &Thresholds,
    exec: Execution,
) -> Result<CriticalityReport> {
    let profile = generate_cmc_sphere(g, h)?;
    let dense = profile.dense()?;
    let report = energy(&profile, coeffs)?;
    let rows = residual_trace(&profile, coeffs, exec)?;
    let (max_residual, max_residual_at) = rows
        .iter()
        .map(|r| (r.residual.abs(), r.s))
        .fold((0.0, 0.0), |best, x| if x.0 > best.0 { x } else { best });

    let step = thresholds.variation_step / h.abs();
    let variations = exec.map(&VelocityProfile::ALL, |&v| VariationCheck {
        result: first_variation(dense, coeffs, v, step),
        weak_form: weak_form_variation(dense, coeffs, v),
    });

    let mut checks = vec![Check::below(
        "max_residual",
        max_residual,
        thresholds.residual,
    )];
    checks.extend(variations.iter().map(|v| {
        Check::below(
            format!("first_variation:{}", v.result.velocity_profile_id),
            v.result.de_dt.abs(),
            thresholds.variation,
        )
    }));
    let passed = checks.iter().all(|c| c.passed);
    Ok(CriticalityReport {
        geometry: *g,
        h: profile.mean_curvature().unwrap_or(h),
        coefficients: coeffs,
        energy: report,
        max_residual,
        max_residual_at,
        variations,
        checks,
        passed,
    })
}
