//! Surface quantities along profile curves and the energies
//!
//! ```text
//! E_{α,β} = ∫ (H² + α K̄ + β) dμ,      W = ∫ (H² + K̄) dμ,
//! ```
//!
//! with the canonical choice `α = 1/4`, `β = k/4 − τ²/4`. On a rotationally
//! invariant sphere `dμ = 2π μ(u) ds` and the canonical integrand splits as
//!
//! ```text
//! ¼ (σ̇ − (1/u + k u/4) sin σ)²  +  (σ̇ sin σ/u − k sin²σ/4 + (k/4 − τ²) ν² + k/4)
//! ```
//!
//! where `ν = cos σ / √(1 + τ²u²)`. The first part is nonnegative and vanishes
//! exactly on CMC spheres; the second part times `μ` is the derivative of
//! `−u̇ √(1+τ²u²)/(1+ku²/4)²`, so it integrates to `4π` on every sphere.

mod checks;
mod energy;
mod residual;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::GeometryParams;
use crate::profile::{DenseProfile, ModulatedSphere};

pub use checks::{
    gauss_bonnet, h_squared_identity_check, second_summand_derivative_check,
    willmore_relation_check,
};
pub use energy::{energy, energy_of_curve, energy_with_panels, EnergyReport, QUADRATURE_TARGET};
pub use residual::{
    div_nut_profile, el_residual, gauss_curvature_profile, residual_at, residual_trace,
    surface_point, write_residual_trace, ResidualRow, STENCIL_INTERVALS,
};

/// The coefficients `(α, β)` of `E_{α,β}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalCoefficients {
    pub alpha: f64,
    pub beta: f64,
}

impl FunctionalCoefficients {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "coefficients must be finite, got alpha = {alpha}, beta = {beta}"
            )));
        }
        Ok(Self { alpha, beta })
    }

    /// `(1/4, k/4 − τ²/4)`, the coefficients for which CMC spheres are critical.
    pub fn canonical(g: &GeometryParams) -> Self {
        Self {
            alpha: 0.25,
            beta: 0.25 * g.k() - 0.25 * g.tau() * g.tau(),
        }
    }

    /// `(0, 0)`: the total squared mean curvature `∫ H² dμ`.
    pub fn mean_curvature_only() -> Self {
        Self {
            alpha: 0.0,
            beta: 0.0,
        }
    }

    /// `(1, 0)`: the Willmore functional `W = ∫ (H² + K̄) dμ`.
    pub fn willmore() -> Self {
        Self {
            alpha: 1.0,
            beta: 0.0,
        }
    }
}

pub fn canonical_coefficients(g: &GeometryParams) -> FunctionalCoefficients {
    FunctionalCoefficients::canonical(g)
}

/// `H = ½ (σ̇ + (1/u − k u/4) sin σ)`.
pub fn mean_curvature(g: &GeometryParams, u: f64, sigma: f64, sigma_dot: f64) -> Result<f64> {
    if u.is_nan() || u <= 0.0 {
        return Err(Error::AxisSingularity { u });
    }
    g.check_radius(u)?;
    Ok(0.5 * (sigma_dot + (1.0 / u - 0.25 * g.k() * u) * sigma.sin()))
}

/// Vertical component of the unit normal, `ν = cos σ / √(1 + τ²u²)`.
pub fn nu_on_profile(g: &GeometryParams, u: f64, sigma: f64) -> f64 {
    sigma.cos() / g.twist(u)
}

/// Pointwise surface data at one profile sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfacePointData {
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "K_bar")]
    pub k_bar: f64,
    #[serde(rename = "K_e")]
    pub k_e: f64,
    pub nu: f64,
    #[serde(rename = "div_nuT")]
    pub div_nut: f64,
    pub mu: f64,
}

/// First-order data of a profile at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalGeometry {
    pub u: f64,
    pub sin: f64,
    pub cos: f64,
    /// `dσ/ds`.
    pub sigma_dot: f64,
    /// `ds/dt` for the curve's parameter `t`.
    pub speed: f64,
    /// `sin σ / u`, with its limit on the axis.
    pub sin_over_u: f64,
}

impl LocalGeometry {
    pub fn mean_curvature(&self, g: &GeometryParams) -> f64 {
        0.5 * (self.sigma_dot + self.sin_over_u - 0.25 * g.k() * self.u * self.sin)
    }

    pub fn nu(&self, g: &GeometryParams) -> f64 {
        self.cos / g.twist(self.u)
    }

    /// `¼ (σ̇ − (1/u + k u/4) sin σ)²`.
    pub fn first_summand_density(&self, g: &GeometryParams) -> f64 {
        let d = self.sigma_dot - self.sin_over_u - 0.25 * g.k() * self.u * self.sin;
        0.25 * d * d
    }

    /// `σ̇ sin σ/u − k sin²σ/4 + (k/4 − τ²) ν² + k/4`.
    pub fn second_summand_density(&self, g: &GeometryParams) -> f64 {
        let k = g.k();
        let nu = self.nu(g);
        self.sigma_dot * self.sin_over_u - 0.25 * k * self.sin * self.sin
            + (0.25 * k - g.tau() * g.tau()) * nu * nu
            + 0.25 * k
    }
}

/// A regular closed profile with a parametrization `t ∈ [t0, t1]`, pole to pole.
pub trait ProfileCurve {
    fn geometry(&self) -> &GeometryParams;
    fn parameter_range(&self) -> (f64, f64);
    fn local(&self, t: f64) -> LocalGeometry;
}

impl ProfileCurve for DenseProfile {
    fn geometry(&self) -> &GeometryParams {
        DenseProfile::geometry(self)
    }

    fn parameter_range(&self) -> (f64, f64) {
        (0.0, self.length())
    }

    fn local(&self, t: f64) -> LocalGeometry {
        let d = self.at(t);
        let (sin, cos) = d.sigma.sin_cos();
        LocalGeometry {
            u: d.u,
            sin,
            cos,
            sigma_dot: d.dsigma,
            speed: 1.0,
            sin_over_u: d.sin_over_u(),
        }
    }
}

/// Parametrized by the tangent angle `σ ∈ [0, π]`.
impl ProfileCurve for ModulatedSphere {
    fn geometry(&self) -> &GeometryParams {
        ModulatedSphere::geometry(self)
    }

    fn parameter_range(&self) -> (f64, f64) {
        (0.0, std::f64::consts::PI)
    }

    fn local(&self, t: f64) -> LocalGeometry {
        let (sin, cos) = t.sin_cos();
        let speed = self.ds_dsigma(t);
        LocalGeometry {
            u: self.u(t),
            sin,
            cos,
            sigma_dot: 1.0 / speed,
            speed,
            sin_over_u: 1.0 / self.u_over_sin(t),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn canonical_special_cases() {
        let c = canonical_coefficients(&GeometryParams::nil());
        assert_eq!((c.alpha, c.beta), (0.25, -1.0 / 16.0));
        let c = canonical_coefficients(&GeometryParams::sl2());
        assert_eq!((c.alpha, c.beta), (0.25, -5.0 / 16.0));
        let c = canonical_coefficients(&GeometryParams::s2_cross_r());
        assert_eq!((c.alpha, c.beta), (0.25, 0.25));
    }

    #[test]
    fn mean_curvature_of_round_spheres() {
        let g = GeometryParams::euclidean();
        for r in [0.5f64, 1.0, 3.0] {
            let s = 0.7 * r;
            let h = mean_curvature(&g, r * (s / r).sin(), s / r, 1.0 / r).unwrap();
            assert_abs_diff_eq!(h, 1.0 / r, epsilon = 1e-15);
        }
        assert!(mean_curvature(&g, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn nu_examples() {
        let g = GeometryParams::nil();
        assert_abs_diff_eq!(nu_on_profile(&g, 0.8, PI / 2.0), 0.0, epsilon = 1e-16);
        assert_eq!(nu_on_profile(&g, 0.0, 0.0), 1.0);
        assert_abs_diff_eq!(
            nu_on_profile(&g, 1.0, PI / 3.0),
            0.5 / 1.25f64.sqrt(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn densities_split_the_canonical_integrand() {
        let g = GeometryParams::new(-0.7, 0.4).unwrap();
        let c = canonical_coefficients(&g);
        let p = LocalGeometry {
            u: 0.9,
            sin: 0.3f64.sin(),
            cos: 0.3f64.cos(),
            sigma_dot: 1.7,
            speed: 1.0,
            sin_over_u: 0.3f64.sin() / 0.9,
        };
        let h = p.mean_curvature(&g);
        let nu = p.nu(&g);
        let whole = h * h + c.alpha * g.sectional_curvature(nu).unwrap() + c.beta;
        assert_abs_diff_eq!(
            whole,
            p.first_summand_density(&g) + p.second_summand_density(&g),
            epsilon = 1e-14
        );
    }
}
