//! Profile curves of rotationally invariant surfaces in the orbit space `B(k, τ)`.
//!
//! A profile `γ(s) = (u(s), v(s))` is parametrized by arclength in the
//! quotient metric, and `σ` is the angle between `γ̇` and `∂/∂u`. Constant
//! mean curvature profiles solve
//!
//! ```text
//! u' = (1 + k u²/4) cos σ
//! v' = √(1 + τ² u²) sin σ
//! σ' = 2H − (1/u − k u/4) sin σ
//! ```
//!
//! which conserves `J = u/(1 + k u²/4) (sin σ − H u)`. Spheres live on `J = 0`.

mod dense;
pub mod io;
mod perturbed;
mod shooting;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::GeometryParams;

pub use dense::{DenseProfile, DenseState};
pub use perturbed::{perturbed_sphere, ModulatedSphere, PerturbationSpec};
pub use shooting::{
    generate_cmc_sphere, generate_cmc_sphere_with, integrate, integrate_with, SphereOptions,
    StopCondition,
};

/// Arclength at which integration leaves the axis using the series start.
pub const AXIS_START: f64 = 1e-6;
/// Largest `u` accepted at a pole of a closed sphere.
pub const AXIS_TOLERANCE: f64 = 1e-5;
/// Largest deviation of `σ` from `0` / `π` accepted at the poles.
pub const SIGMA_CLOSURE: f64 = 1e-7;
/// Default number of uniform arclength intervals for closed spheres.
pub const RESAMPLE_INTERVALS: usize = 2048;

/// One point `(s, u, v, σ)` of a profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileState {
    pub s: f64,
    pub u: f64,
    pub v: f64,
    pub sigma: f64,
}

impl ProfileState {
    pub fn new(s: f64, u: f64, v: f64, sigma: f64) -> Self {
        Self { s, u, v, sigma }
    }

    /// Pole start `(s, u, v, σ) = (0, 0, v0, 0)`.
    pub fn axis(v0: f64) -> Self {
        Self::new(0.0, 0.0, v0, 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Closure {
    ClosedSphere,
    Open,
}

/// Whether the profile carries the requested orientation or its mirror.
///
/// Spheres are always stored with `sin σ = |H| u ≥ 0`; a negative requested
/// mean curvature is recorded as `Reversed`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    #[default]
    Standard,
    Reversed,
}

/// How a profile came to be.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileKind {
    /// Constant mean curvature sphere from shooting.
    CmcSphere { h: f64 },
    /// Turning-rate modulation of the CMC sphere with `(mode, amplitude)` terms.
    Modulated { h: f64, terms: Vec<(u32, f64)> },
    /// Raw ODE trajectory with mean curvature `h`.
    Trajectory { h: f64 },
    /// Samples of unknown origin.
    Imported,
}

/// Numbers recorded while shooting a CMC sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootingDiagnostics {
    /// `max |J(s) − J(s₀)|` over every accepted step of the run.
    pub first_integral_drift: f64,
    /// `max |sin σ − H u|` over the samples.
    pub identity_residual: f64,
    pub apex_arclength: f64,
    pub apex_u: f64,
    pub accepted_steps: usize,
}

/// A sampled profile curve with its metadata.
#[derive(Debug, Clone)]
pub struct Profile {
    samples: Vec<ProfileState>,
    geometry: GeometryParams,
    mean_curvature: Option<f64>,
    closure: Closure,
    orientation: Orientation,
    kind: ProfileKind,
    diagnostics: Option<ShootingDiagnostics>,
    dense: Option<DenseProfile>,
}

impl Profile {
    /// An open profile; samples must be strictly increasing in `s`.
    pub fn open(
        geometry: GeometryParams,
        samples: Vec<ProfileState>,
        mean_curvature: Option<f64>,
        kind: ProfileKind,
    ) -> Result<Self> {
        check_samples(&geometry, &samples, 2)?;
        Ok(Self {
            samples,
            geometry,
            mean_curvature,
            closure: Closure::Open,
            orientation: Orientation::Standard,
            kind,
            diagnostics: None,
            dense: None,
        })
    }

    /// A closed sphere. Validates the pole conditions and builds the dense
    /// representation. Non-uniform samples are resampled onto a uniform grid and
    /// `s` is shifted to start at zero; a mirrored profile (`σ` ending at `−π`) is
    /// flipped to the standard orientation.
    pub fn closed_sphere(
        geometry: GeometryParams,
        samples: Vec<ProfileState>,
        mean_curvature: Option<f64>,
        kind: ProfileKind,
    ) -> Result<Self> {
        check_samples(&geometry, &samples, 5)?;
        let mut samples = samples;
        let mut orientation = Orientation::Standard;
        let last = samples[samples.len() - 1];
        if (last.sigma + PI).abs() <= SIGMA_CLOSURE {
            orientation = Orientation::Reversed;
            for p in &mut samples {
                p.sigma = -p.sigma;
                p.v = -p.v;
            }
        }
        let first = samples[0];
        let last = samples[samples.len() - 1];
        if first.u > AXIS_TOLERANCE || last.u > AXIS_TOLERANCE {
            return Err(Error::OpenProfile(format!(
                "end points are off the axis (u = {:e}, {:e}; tolerance {AXIS_TOLERANCE:e})",
                first.u, last.u
            )));
        }
        if first.sigma.abs() > SIGMA_CLOSURE || (last.sigma - PI).abs() > SIGMA_CLOSURE {
            return Err(Error::OpenProfile(format!(
                "angles at the poles are sigma = {:e} and pi - {:e}; both must be within {SIGMA_CLOSURE:e}",
                first.sigma,
                PI - last.sigma
            )));
        }
        let inner = &samples[1..samples.len() - 1];
        if let Some(p) = inner.iter().find(|p| p.u <= 0.0) {
            return Err(Error::OpenProfile(format!(
                "interior sample at s = {} touches the axis",
                p.s
            )));
        }
        let s0 = first.s;
        for p in &mut samples {
            p.s -= s0;
        }
        if !is_uniform(&samples) {
            samples = dense::resample_uniform(&samples, samples.len() - 1);
        }
        let dense = DenseProfile::fit(geometry, &samples);
        Ok(Self {
            samples,
            geometry,
            mean_curvature,
            closure: Closure::ClosedSphere,
            orientation,
            kind,
            diagnostics: None,
            dense: Some(dense),
        })
    }

    pub(crate) fn with_orientation(mut self, orientation: Orientation) -> Self {
        self.orientation = orientation;
        self
    }

    pub(crate) fn with_diagnostics(mut self, d: ShootingDiagnostics) -> Self {
        self.diagnostics = Some(d);
        self
    }

    pub fn samples(&self) -> &[ProfileState] {
        &self.samples
    }

    pub fn geometry(&self) -> &GeometryParams {
        &self.geometry
    }

    pub fn mean_curvature(&self) -> Option<f64> {
        self.mean_curvature
    }

    pub fn closure(&self) -> Closure {
        self.closure
    }

    pub fn is_closed(&self) -> bool {
        self.closure == Closure::ClosedSphere
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    pub fn diagnostics(&self) -> Option<&ShootingDiagnostics> {
        self.diagnostics.as_ref()
    }

    /// Total arclength.
    pub fn length(&self) -> f64 {
        self.samples[self.samples.len() - 1].s - self.samples[0].s
    }

    pub fn max_u(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, p| m.max(p.u))
    }

    /// The dense representation of a closed sphere.
    pub fn dense(&self) -> Result<&DenseProfile> {
        self.dense
            .as_ref()
            .ok_or_else(|| Error::OpenProfile("open profiles carry no dense representation".into()))
    }

    /// Checks that `index` is an interior sample of a closed sphere.
    pub fn interior(&self, index: usize) -> Result<&ProfileState> {
        let last = self.samples.len() - 1;
        if index == 0 || index >= last {
            return Err(Error::NotInterior { index, last });
        }
        Ok(&self.samples[index])
    }

    /// `max |J(s) − J(s_first)|` over the samples, if the profile has a mean curvature.
    pub fn first_integral_drift(&self) -> Option<f64> {
        let h = self.mean_curvature?;
        let j0 = first_integral(&self.geometry, h, &self.samples[0]);
        Some(
            self.samples
                .iter()
                .map(|p| (first_integral(&self.geometry, h, p) - j0).abs())
                .fold(0.0, f64::max),
        )
    }
}

fn check_samples(g: &GeometryParams, samples: &[ProfileState], min: usize) -> Result<()> {
    if samples.len() < min {
        return Err(Error::MalformedProfile(format!(
            "need at least {min} samples, got {}",
            samples.len()
        )));
    }
    for w in samples.windows(2) {
        if w[1].s <= w[0].s || w[1].s.is_nan() {
            return Err(Error::MalformedProfile(format!(
                "arclength not strictly increasing at s = {}",
                w[1].s
            )));
        }
    }
    for p in samples {
        if !(p.u.is_finite() && p.v.is_finite() && p.sigma.is_finite()) {
            return Err(Error::MalformedProfile(format!(
                "non-finite sample at s = {}",
                p.s
            )));
        }
        g.check_radius(p.u.max(0.0))?;
        if p.u < 0.0 {
            return Err(Error::MalformedProfile(format!(
                "negative radius u = {} at s = {}",
                p.u, p.s
            )));
        }
    }
    Ok(())
}

fn is_uniform(samples: &[ProfileState]) -> bool {
    let n = samples.len() - 1;
    let length = samples[n].s - samples[0].s;
    let h = length / n as f64;
    samples
        .iter()
        .enumerate()
        .all(|(j, p)| (p.s - samples[0].s - h * j as f64).abs() <= 1e-9 * length)
}

/// Right-hand side `(u', v', σ')` of the CMC profile system.
pub fn ode_rhs(g: &GeometryParams, h: f64, state: &ProfileState) -> Result<(f64, f64, f64)> {
    if state.u <= 0.0 {
        return Err(Error::AxisSingularity { u: state.u });
    }
    g.check_radius(state.u)?;
    Ok(rhs_unchecked(g, h, state.u, state.sigma))
}

#[inline]
pub(crate) fn rhs_unchecked(g: &GeometryParams, h: f64, u: f64, sigma: f64) -> (f64, f64, f64) {
    let (sin, cos) = sigma.sin_cos();
    (
        g.conformal(u) * cos,
        g.twist(u) * sin,
        2.0 * h - (1.0 / u - 0.25 * g.k() * u) * sin,
    )
}

/// `J = u/(1 + k u²/4) · (sin σ − H u)`.
pub fn first_integral(g: &GeometryParams, h: f64, state: &ProfileState) -> f64 {
    state.u / g.conformal(state.u) * (state.sigma.sin() - h * state.u)
}

/// `dσ/ds` on the CMC sphere of mean curvature `h`, where `sin σ = H u`.
pub fn cmc_sigma_rate(g: &GeometryParams, h: f64, u: f64) -> Result<f64> {
    g.check_radius(u)?;
    if h != 0.0 && u > 1.0 / h.abs() * (1.0 + 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "u = {u} exceeds the apex radius 1/|H| = {}",
            1.0 / h.abs()
        )));
    }
    Ok(h * g.conformal(u))
}

/// Rejects `(k, H)` pairs without a CMC sphere.
pub fn check_existence(g: &GeometryParams, h: f64) -> Result<()> {
    if !h.is_finite() {
        return Err(Error::InvalidArgument(format!("H = {h} must be finite")));
    }
    let k = g.k();
    if k <= 0.0 && h * h <= -k / 4.0 + 1e-12 {
        return Err(Error::ExistenceViolation {
            k,
            tau: g.tau(),
            h,
            condition: "H^2 > -k/4",
        });
    }
    if k > 0.0 && h == 0.0 {
        return Err(Error::ExistenceViolation {
            k,
            tau: g.tau(),
            h,
            condition: "H != 0",
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rhs_on_the_nil_sphere() {
        let g = GeometryParams::nil();
        let state = ProfileState::new(0.0, 0.5, 0.0, 0.5f64.asin());
        let (du, _, dsigma) = ode_rhs(&g, 1.0, &state).unwrap();
        assert_abs_diff_eq!(dsigma, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            dsigma,
            cmc_sigma_rate(&g, 1.0, 0.5).unwrap(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(du, (0.75f64).sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn rhs_horizontal_tangent_has_no_vertical_speed() {
        let g = GeometryParams::new(0.7, -0.2).unwrap();
        let (_, dv, _) = ode_rhs(&g, 0.3, &ProfileState::new(0.0, 1.3, 2.0, 0.0)).unwrap();
        assert_eq!(dv, 0.0);
    }

    #[test]
    fn rhs_rejects_the_axis() {
        let g = GeometryParams::nil();
        assert!(matches!(
            ode_rhs(&g, 1.0, &ProfileState::axis(0.0)),
            Err(Error::AxisSingularity { .. })
        ));
    }

    #[test]
    fn first_integral_examples() {
        let g = GeometryParams::sl2();
        let on_sphere = ProfileState::new(0.0, 1.0, 0.0, 0.8f64.asin());
        assert_abs_diff_eq!(first_integral(&g, 0.8, &on_sphere), 0.0, epsilon = 1e-16);
        assert_eq!(
            first_integral(&g, 0.8, &ProfileState::new(0.0, 0.0, 1.0, 2.0)),
            0.0
        );
        let flat = GeometryParams::new(0.0, 3.0).unwrap();
        assert_eq!(
            first_integral(&flat, 0.0, &ProfileState::new(0.0, 1.0, 0.0, PI / 2.0)),
            1.0
        );
    }

    #[test]
    fn sigma_rate_examples() {
        let nil = GeometryParams::nil();
        assert_eq!(cmc_sigma_rate(&nil, 1.3, 0.4).unwrap(), 1.3);
        assert_abs_diff_eq!(
            cmc_sigma_rate(&GeometryParams::sl2(), 0.8, 1.0).unwrap(),
            0.6,
            epsilon = 1e-15
        );
        assert!(cmc_sigma_rate(&GeometryParams::sl2(), 0.8, 1.3).is_err());
    }

    #[test]
    fn existence_boundary() {
        let sl = GeometryParams::sl2();
        assert!(matches!(
            check_existence(&sl, 0.5),
            Err(Error::ExistenceViolation { .. })
        ));
        assert!(check_existence(&sl, 0.5 + 1e-6).is_ok());
        assert!(check_existence(&GeometryParams::euclidean(), 0.0).is_err());
        assert!(check_existence(&GeometryParams::s2_cross_r(), 0.0).is_err());
        assert!(check_existence(&GeometryParams::s2_cross_r(), 1e-9).is_ok());
    }
}
