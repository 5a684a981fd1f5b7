//! Numerical verification suites: criticality of CMC spheres for the
//! canonical energy, minimality among rotationally invariant spheres, energy
//! descent within a family of spheres, and parameter sweeps.

mod criticality;
mod descent;
mod identities;
mod minimality;
mod sweep;
mod variation;

use serde::{Deserialize, Serialize};

pub use crate::execution::Execution;
pub use criticality::{
    verify_criticality, verify_criticality_with, CriticalityReport, VariationCheck,
};
pub use descent::{descend_energy, descend_energy_with, DescentReport, DescentStart};
pub use identities::{verify_identities, IdentitiesReport};
pub use minimality::{
    verify_minimality, verify_minimality_with, MinimalityEntry, MinimalityReport,
};
pub use sweep::{default_sweep_spec, sweep, write_sweep_csv, SweepRow, SweepSpec, SWEEP_HEADER};
pub use variation::{
    first_variation, weak_form_variation, DeformedProfile, VariationResult, VelocityProfile,
    VARIATION_PANELS,
};

/// Pass/fail thresholds shared by the verification suites.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Thresholds {
    /// Largest interior Euler–Lagrange residual on a critical sphere.
    pub residual: f64,
    /// Largest finite-difference first variation on a critical sphere.
    pub variation: f64,
    /// Relative deviation of `E` from `4π` on a CMC sphere.
    pub energy: f64,
    /// Required excess `E − 4π` of every perturbed sphere.
    pub minimality_margin: f64,
    /// Deviation of the second summand from `4π`.
    pub second_summand: f64,
    /// Asymmetry `|E(ε) − E(−ε)|` allowed for mirror-symmetric families.
    pub evenness: f64,
    /// Required final `E − 4π` of a descent.
    pub descent_gap: f64,
    /// Required final `|c_m|` of a descent.
    pub descent_coefficient: f64,
    /// Required `max |sin σ − H u|` after refitting `H`.
    pub refit_identity: f64,
    pub max_iterations: usize,
    /// Finite-difference step of the first variation, in units of `1/H`.
    pub variation_step: f64,
    /// Bound for the algebraic identities.
    pub algebraic: f64,
    /// Bound for quadrature-level identities.
    pub quadrature: f64,
    /// Bound for finite-difference identities.
    pub finite_difference: f64,
    /// Gauss–Bonnet deviation from `4π`.
    pub gauss_bonnet: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            residual: 1e-4,
            variation: 1e-5,
            energy: 1e-6,
            minimality_margin: 1e-7,
            second_summand: 1e-6,
            evenness: 1e-6,
            descent_gap: 1e-6,
            descent_coefficient: 1e-4,
            refit_identity: 1e-3,
            max_iterations: 200,
            variation_step: 1e-4,
            algebraic: 1e-12,
            quadrature: 1e-8,
            finite_difference: 1e-5,
            gauss_bonnet: 1e-3,
        }
    }
}

impl Thresholds {
    /// Names accepted by [`Thresholds::set`].
    pub const NAMES: [&'static str; 15] = [
        "residual",
        "variation",
        "energy",
        "minimality_margin",
        "second_summand",
        "evenness",
        "descent_gap",
        "descent_coefficient",
        "refit_identity",
        "max_iterations",
        "variation_step",
        "algebraic",
        "quadrature",
        "finite_difference",
        "gauss_bonnet",
    ];

    /// Overrides one threshold by name; returns `false` for unknown names.
    pub fn set(&mut self, name: &str, value: f64) -> bool {
        let slot = match name {
            "residual" => &mut self.residual,
            "variation" => &mut self.variation,
            "energy" => &mut self.energy,
            "minimality_margin" => &mut self.minimality_margin,
            "second_summand" => &mut self.second_summand,
            "evenness" => &mut self.evenness,
            "descent_gap" => &mut self.descent_gap,
            "descent_coefficient" => &mut self.descent_coefficient,
            "refit_identity" => &mut self.refit_identity,
            "variation_step" => &mut self.variation_step,
            "algebraic" => &mut self.algebraic,
            "quadrature" => &mut self.quadrature,
            "finite_difference" => &mut self.finite_difference,
            "gauss_bonnet" => &mut self.gauss_bonnet,
            "max_iterations" => {
                self.max_iterations = value as usize;
                return true;
            }
            _ => return false,
        };
        *slot = value;
        true
    }
}

/// One named pass/fail check inside a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when `value < threshold`.
    pub fn below(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            passed: value < threshold,
        }
    }

    /// Passes when `value > threshold`.
    pub fn above(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            passed: value > threshold,
        }
    }
}

/// The first failing check, if any.
pub fn first_failure(checks: &[Check]) -> Option<&Check> {
    checks.iter().find(|c| !c.passed)
}
