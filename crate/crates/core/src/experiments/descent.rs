use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{Check, Thresholds};
use crate::error::{Error, Result};
use crate::functional::{canonical_coefficients, energy_with_panels, FunctionalCoefficients};
use crate::geometry::GeometryParams;
use crate::profile::{check_existence, ModulatedSphere, RESAMPLE_INTERVALS};

/// Starting point of a descent: a single-mode perturbation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DescentStart {
    pub epsilon: f64,
    pub mode: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescentReport {
    pub geometry: GeometryParams,
    #[serde(rename = "H")]
    pub h: f64,
    pub family_dims: usize,
    pub start: DescentStart,
    pub iterations: usize,
    /// `gradient_tolerance`, `line_search_stalled` or `max_iterations`.
    pub stop_reason: String,
    pub initial_energy: f64,
    pub final_energy: f64,
    /// `E − 4π` at the end.
    pub energy_gap: f64,
    pub final_coefficients: Vec<f64>,
    pub gradient_norm: f64,
    /// Least-squares `H` of `sin σ ≈ H u` on the final profile.
    pub refit_h: f64,
    /// `max |sin σ − H u|` with the refitted `H`.
    pub refit_identity_residual: f64,
    /// Energy after each iteration, starting with the initial energy.
    pub energy_history: Vec<f64>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

const PANELS: usize = 128;
const GRADIENT_STEP: f64 = 1e-5;
const HESSIAN_STEP: f64 = 1e-3;
/// Below this the finite-difference gradient is at the roundoff floor.
const GRADIENT_TOLERANCE: f64 = 1e-8;
const ARMIJO: f64 = 1e-4;
const MAX_HALVINGS: usize = 40;

struct Family {
    geometry: GeometryParams,
    h: f64,
    coeffs: FunctionalCoefficients,
}

impl Family {
    fn sphere(&self, c: &DVector<f64>) -> Result<ModulatedSphere> {
        let terms = c
            .iter()
            .enumerate()
            .map(|(i, &x)| (i as u32 + 1, x))
            .collect();
        ModulatedSphere::new(self.geometry, self.h, terms)
    }

    /// Energy, or `+∞` outside the admissible set.
    fn energy(&self, c: &DVector<f64>) -> f64 {
        match self.sphere(c) {
            Ok(m) => energy_with_panels(&m, self.coeffs, PANELS).e,
            Err(_) => f64::INFINITY,
        }
    }

    fn gradient(&self, c: &DVector<f64>) -> DVector<f64> {
        DVector::from_fn(c.len(), |i, _| {
            let mut p = c.clone();
            let mut m = c.clone();
            p[i] += GRADIENT_STEP;
            m[i] -= GRADIENT_STEP;
            (self.energy(&p) - self.energy(&m)) / (2.0 * GRADIENT_STEP)
        })
    }

    fn hessian(&self, c: &DVector<f64>) -> DMatrix<f64> {
        let n = c.len();
        let d = HESSIAN_STEP;
        let shifted = |i: usize, si: f64, j: usize, sj: f64| {
            let mut x = c.clone();
            x[i] += si * d;
            x[j] += sj * d;
            self.energy(&x)
        };
        let e0 = self.energy(c);
        let mut h = DMatrix::zeros(n, n);
        for i in 0..n {
            h[(i, i)] = (shifted(i, 1.0, i, 0.0) - 2.0 * e0 + shifted(i, -1.0, i, 0.0)) / (d * d);
            for j in 0..i {
                let v =
                    (shifted(i, 1.0, j, 1.0) - shifted(i, 1.0, j, -1.0) - shifted(i, -1.0, j, 1.0)
                        + shifted(i, -1.0, j, -1.0))
                        / (4.0 * d * d);
                h[(i, j)] = v;
                h[(j, i)] = v;
            }
        }
        h
    }
}

/// Preconditioned gradient descent of the canonical energy over the family
/// `ds/dσ = (1 + Σ_{m=1}^{dims} c_m cos((2m+1)σ)) / (H (1 + ku²/4))`.
pub fn descend_energy(
    g: &GeometryParams,
    h_init: f64,
    family_dims: usize,
    start: DescentStart,
) -> Result<DescentReport> {
    descend_energy_with(g, h_init, family_dims, start, &Thresholds::default())
}

/// As [`descend_energy`]. The gradient is a central difference; the step is
/// preconditioned by a finite-difference Hessian taken at the start (or its
/// absolute diagonal if that is not positive definite) and chosen by Armijo
/// backtracking.
pub fn descend_energy_with(
    g: &GeometryParams,
    h_init: f64,
    family_dims: usize,
    start: DescentStart,
    thresholds: &Thresholds,
) -> Result<DescentReport> {
    check_existence(g, h_init)?;
    if family_dims == 0 {
        return Err(Error::InvalidArgument(
            "family_dims must be at least 1".into(),
        ));
    }
    if start.mode == 0 || start.mode as usize > family_dims {
        return Err(Error::InvalidArgument(format!(
            "start mode {} outside the family 1..={family_dims}",
            start.mode
        )));
    }
    let h = h_init.abs();
    let family = Family {
        geometry: *g,
        h,
        coeffs: canonical_coefficients(g),
    };
    let mut c = DVector::zeros(family_dims);
    c[start.mode as usize - 1] = start.epsilon;
    family.sphere(&c)?;

    let mut e = family.energy(&c);
    let initial_energy = e;
    let mut history = vec![e];
    let mut grad = family.gradient(&c);
    let mut iterations = 0;
    let mut stop_reason = "gradient_tolerance";

    if grad.amax() >= GRADIENT_TOLERANCE {
        let hess = family.hessian(&c);
        let chol = hess.clone().cholesky().or_else(|| {
            DMatrix::from_diagonal(&hess.diagonal().map(|d| d.abs().max(1e-8))).cholesky()
        });
        let solve = |g: &DVector<f64>| match &chol {
            Some(ch) => ch.solve(g),
            None => g.clone(),
        };
        while grad.amax() >= GRADIENT_TOLERANCE {
            if iterations >= thresholds.max_iterations {
                stop_reason = "max_iterations";
                break;
            }
            let direction = -solve(&grad);
            let slope = grad.dot(&direction);
            let mut lambda = 1.0;
            let mut accepted = None;
            for _ in 0..MAX_HALVINGS {
                let trial = &c + lambda * &direction;
                let e_trial = family.energy(&trial);
                if e_trial <= e + ARMIJO * lambda * slope {
                    accepted = Some((trial, e_trial));
                    break;
                }
                lambda *= 0.5;
            }
            let Some((next, e_next)) = accepted else {
                stop_reason = "line_search_stalled";
                break;
            };
            iterations += 1;
            c = next;
            e = e_next;
            history.push(e);
            grad = family.gradient(&c);
        }
    }

    let profile = family.sphere(&c)?.to_profile(RESAMPLE_INTERVALS)?;
    let samples = profile.samples();
    let (num, den) = samples.iter().fold((0.0, 0.0), |(n, d), p| {
        (n + p.u * p.sigma.sin(), d + p.u * p.u)
    });
    let refit_h = num / den;
    let refit_identity_residual = samples
        .iter()
        .map(|p| (p.sigma.sin() - refit_h * p.u).abs())
        .fold(0.0, f64::max);

    let four_pi = 4.0 * PI;
    let checks = vec![
        Check::below("energy_gap", (e - four_pi).abs(), thresholds.descent_gap),
        Check::below("coefficients", c.amax(), thresholds.descent_coefficient),
        Check::below(
            "refit_identity",
            refit_identity_residual,
            thresholds.refit_identity,
        ),
        Check::below(
            "iterations",
            iterations as f64,
            thresholds.max_iterations as f64 + 0.5,
        ),
    ];
    let passed = checks.iter().all(|c| c.passed);
    Ok(DescentReport {
        geometry: *g,
        h,
        family_dims,
        start,
        iterations,
        stop_reason: stop_reason.to_string(),
        initial_energy,
        final_energy: e,
        energy_gap: e - four_pi,
        final_coefficients: c.iter().copied().collect(),
        gradient_norm: grad.amax(),
        refit_h,
        refit_identity_residual,
        energy_history: history,
        checks,
        passed,
    })
}
