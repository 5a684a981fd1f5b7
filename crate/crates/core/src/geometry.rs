//! The Bianchi–Cartan–Vranceanu family E(k, τ).
//!
//! E(k, τ) fibres over a surface of constant curvature `k` with bundle
//! curvature `τ`. For `k < 0` the base is the disk of radius `2/√(−k)`; for
//! `k ≥ 0` it is the whole plane. Everything downstream is rotationally
//! invariant, so only the cylindrical chart `(ρ, θ, z)` and the orbit space
//! `B(k, τ)` with coordinates `(u, v) = (ρ, z)` are exposed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack accepted on `|ν| ≤ 1` to absorb roundoff from quadrature and ODE output.
pub const NU_TOLERANCE: f64 = 1e-9;

/// Radius of the base disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainRadius {
    Finite(f64),
    Infinite,
}

impl DomainRadius {
    pub fn contains(self, u: f64) -> bool {
        match self {
            DomainRadius::Finite(r) => u < r,
            DomainRadius::Infinite => u.is_finite(),
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            DomainRadius::Finite(r) => r,
            DomainRadius::Infinite => f64::INFINITY,
        }
    }
}

/// Base curvature `k` and bundle curvature `τ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct GeometryParams {
    k: f64,
    tau: f64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    k: f64,
    tau: f64,
}

impl TryFrom<RawParams> for GeometryParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        GeometryParams::new(raw.k, raw.tau)
    }
}

impl From<GeometryParams> for RawParams {
    fn from(g: GeometryParams) -> Self {
        RawParams { k: g.k, tau: g.tau }
    }
}

/// A point in cylindrical coordinates `x = ρ cos θ`, `y = ρ sin θ`, `z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylindricalPoint {
    pub rho: f64,
    pub theta: f64,
    pub z: f64,
}

impl GeometryParams {
    pub fn new(k: f64, tau: f64) -> Result<Self> {
        if !k.is_finite() || !tau.is_finite() {
            return Err(Error::InvalidGeometry(format!(
                "k = {k}, tau = {tau} must be finite"
            )));
        }
        Ok(Self { k, tau })
    }

    /// Heisenberg group Nil with τ = 1/2.
    pub fn nil() -> Self {
        Self { k: 0.0, tau: 0.5 }
    }

    /// The universal cover of SL(2, R) with k = −1, τ = −1/2.
    pub fn sl2() -> Self {
        Self { k: -1.0, tau: -0.5 }
    }

    pub fn h2_cross_r() -> Self {
        Self { k: -1.0, tau: 0.0 }
    }

    pub fn s2_cross_r() -> Self {
        Self { k: 1.0, tau: 0.0 }
    }

    pub fn euclidean() -> Self {
        Self { k: 0.0, tau: 0.0 }
    }

    #[inline]
    pub fn k(&self) -> f64 {
        self.k
    }

    #[inline]
    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn domain_radius(&self) -> DomainRadius {
        if self.k < 0.0 {
            DomainRadius::Finite(2.0 / (-self.k).sqrt())
        } else {
            DomainRadius::Infinite
        }
    }

    /// `k − 4τ²`, the coefficient of `ν²` in the sectional curvature.
    #[inline]
    pub fn nu_coefficient(&self) -> f64 {
        self.k - 4.0 * self.tau * self.tau
    }

    pub fn check_radius(&self, u: f64) -> Result<()> {
        if u.is_nan() || u < 0.0 || !self.domain_radius().contains(u) {
            return Err(Error::OutOfDomain {
                u,
                radius: self.domain_radius().as_f64(),
            });
        }
        Ok(())
    }

    fn check_nu(nu: f64) -> Result<()> {
        if nu.is_nan() || nu.abs() > 1.0 + NU_TOLERANCE {
            return Err(Error::InvalidNormalComponent {
                nu,
                tol: NU_TOLERANCE,
            });
        }
        Ok(())
    }

    /// `1 + k u²/4`, the conformal factor of the base.
    #[inline]
    pub fn conformal(&self, u: f64) -> f64 {
        1.0 + 0.25 * self.k * u * u
    }

    /// `√(1 + τ² u²)`.
    #[inline]
    pub fn twist(&self, u: f64) -> f64 {
        (1.0 + self.tau * self.tau * u * u).sqrt()
    }

    /// Sectional curvature of a 2-plane whose unit normal has vertical component `nu`.
    pub fn sectional_curvature(&self, nu: f64) -> Result<f64> {
        Self::check_nu(nu)?;
        Ok(self.sectional_curvature_unchecked(nu))
    }

    #[inline]
    pub(crate) fn sectional_curvature_unchecked(&self, nu: f64) -> f64 {
        self.tau * self.tau + self.nu_coefficient() * nu * nu
    }

    /// `Ric(n, n)` for a unit vector `n` with vertical component `nu`.
    pub fn ricci_normal(&self, nu: f64) -> Result<f64> {
        Self::check_nu(nu)?;
        Ok(self.k - 2.0 * self.tau * self.tau - self.nu_coefficient() * nu * nu)
    }

    /// Metric coefficients in the coordinate order `(ρ, θ, z)`.
    pub fn ambient_metric_cylindrical(&self, p: CylindricalPoint) -> Result<[[f64; 3]; 3]> {
        self.check_radius(p.rho)?;
        let rho2 = p.rho * p.rho;
        let c = self.conformal(p.rho);
        let g_rr = 1.0 / (c * c);
        let g_tt = (rho2 + self.tau * self.tau * rho2 * rho2) / (c * c);
        let g_tz = -self.tau * rho2 / c;
        Ok([[g_rr, 0.0, 0.0], [0.0, g_tt, g_tz], [0.0, g_tz, 1.0]])
    }

    /// Orbit-space metric `(g_uu, g_vv)` on `B(k, τ)`.
    pub fn quotient_metric(&self, u: f64) -> Result<(f64, f64)> {
        self.check_radius(u)?;
        let c = self.conformal(u);
        Ok((1.0 / (c * c), 1.0 / (1.0 + self.tau * self.tau * u * u)))
    }

    /// Length factor `μ(u)` of an SO(2) orbit: the orbit through `u` has length `2π μ(u)`.
    pub fn orbit_volume_factor(&self, u: f64) -> Result<f64> {
        self.check_radius(u)?;
        Ok(self.orbit_factor(u))
    }

    /// `μ(u)` without domain checks. Odd in `u`, which the pole-crossing stencils rely on.
    #[inline]
    pub(crate) fn orbit_factor(&self, u: f64) -> f64 {
        u * self.twist(u) / self.conformal(u)
    }
}
