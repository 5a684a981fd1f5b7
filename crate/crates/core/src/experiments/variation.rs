use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::functional::{
    energy_with_panels, residual_at, FunctionalCoefficients, LocalGeometry, ProfileCurve,
    STENCIL_INTERVALS,
};
use crate::geometry::GeometryParams;
use crate::numerics::jet::Jet2;
use crate::numerics::quadrature::GaussLegendre;
use crate::profile::DenseProfile;

/// Normal velocity `φ` of a variation, as a function of the base angle `σ`.
///
/// Each profile is a smooth function of `cos σ`, hence even about both poles,
/// which keeps the deformed surface smooth on the axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VelocityProfile {
    Constant,
    CosSigma,
    /// Gaussian bump in `cos σ` centred at `σ = π/3`.
    Bump,
}

impl VelocityProfile {
    pub const ALL: [VelocityProfile; 3] = [
        VelocityProfile::Constant,
        VelocityProfile::CosSigma,
        VelocityProfile::Bump,
    ];

    pub fn id(self) -> &'static str {
        match self {
            VelocityProfile::Constant => "constant",
            VelocityProfile::CosSigma => "cos_sigma",
            VelocityProfile::Bump => "bump",
        }
    }

    /// `φ` as a jet in `s`, given `σ` as a jet in `s`.
    pub fn jet(self, sigma: Jet2) -> Jet2 {
        match self {
            VelocityProfile::Constant => Jet2::constant(1.0),
            VelocityProfile::CosSigma => sigma.cos(),
            VelocityProfile::Bump => {
                let x = (sigma.cos() + (-0.5)) * (1.0 / BUMP_WIDTH);
                (-(x * x)).exp()
            }
        }
    }

    pub fn eval(self, sigma: f64) -> f64 {
        self.jet(Jet2::constant(sigma)).v
    }
}

const BUMP_WIDTH: f64 = 0.5;

/// The normal deformation `γ + t φ n` of a dense profile, with
/// `n = (−(1 + ku²/4) sin σ, √(1 + τ²u²) cos σ)` the unit normal in `B(k, τ)`.
///
/// Parametrized by the base arclength; its geometry comes from exact
/// second-order jets of the deformed coordinates.
pub struct DeformedProfile<'a> {
    base: &'a DenseProfile,
    velocity: VelocityProfile,
    t: f64,
}

impl<'a> DeformedProfile<'a> {
    pub fn new(base: &'a DenseProfile, velocity: VelocityProfile, t: f64) -> Self {
        Self { base, velocity, t }
    }
}

impl ProfileCurve for DeformedProfile<'_> {
    fn geometry(&self) -> &GeometryParams {
        self.base.geometry()
    }

    fn parameter_range(&self) -> (f64, f64) {
        (0.0, self.base.length())
    }

    fn local(&self, s: f64) -> LocalGeometry {
        let g = self.base.geometry();
        let k4 = 0.25 * g.k();
        let tau2 = g.tau() * g.tau();
        let conformal = |u: Jet2| u * u * k4 + 1.0;
        let twist = |u: Jet2| (u * u * tau2 + 1.0).sqrt();

        let d = self.base.at(s);
        let u = Jet2::new(d.u, d.du, d.d2u);
        let sigma = Jet2::new(d.sigma, d.dsigma, d.d2sigma);
        let phi = self.velocity.jet(sigma);
        let t = self.t;

        let ut = u - phi * conformal(u) * sigma.sin() * t;
        let dv_base = twist(u) * sigma.sin();
        let dv = dv_base + (phi * twist(u) * sigma.cos()).derivative() * t;
        let x = ut.derivative() / conformal(ut);
        let y = dv / twist(ut);

        let w2 = x.v * x.v + y.v * y.v;
        let w = w2.sqrt();
        let turn = (x.v * y.d1 - y.v * x.d1) / w2;
        let (sin, cos) = (y.v / w, x.v / w);
        LocalGeometry {
            u: ut.v,
            sin,
            cos,
            sigma_dot: turn / w,
            speed: w,
            sin_over_u: sin / ut.v,
        }
    }
}

/// Central-difference first variation of the energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationResult {
    #[serde(rename = "dE_dt")]
    pub de_dt: f64,
    pub velocity_profile_id: String,
    pub step: f64,
    /// `|D(h) − D(2h)|/3`, the leading central-difference error.
    pub truncation: f64,
}

/// Panels shared by all energies of one finite difference.
pub const VARIATION_PANELS: usize = 256;

/// `[E(γ + hφn) − E(γ − hφn)] / 2h` on a common quadrature rule.
pub fn first_variation(
    base: &DenseProfile,
    coeffs: FunctionalCoefficients,
    velocity: VelocityProfile,
    step: f64,
) -> VariationResult {
    let e = |t: f64| {
        energy_with_panels(
            &DeformedProfile::new(base, velocity, t),
            coeffs,
            VARIATION_PANELS,
        )
        .e
    };
    let d1 = (e(step) - e(-step)) / (2.0 * step);
    let d2 = (e(2.0 * step) - e(-2.0 * step)) / (4.0 * step);
    VariationResult {
        de_dt: d1,
        velocity_profile_id: velocity.id().to_string(),
        step,
        truncation: (d1 - d2).abs() / 3.0,
    }
}

/// `2π ∫ R φ μ ds`, the first variation predicted by the Euler–Lagrange residual `R`.
pub fn weak_form_variation(
    base: &DenseProfile,
    coeffs: FunctionalCoefficients,
    velocity: VelocityProfile,
) -> f64 {
    let step = base.length() / STENCIL_INTERVALS as f64;
    let total = GaussLegendre::sixteen().integrate_composite(0.0, base.length(), 128, |s| {
        let d = base.at(s);
        residual_at(base, coeffs, s, step) * velocity.eval(d.sigma) * base.orbit_factor(s)
    });
    2.0 * PI * total
}
