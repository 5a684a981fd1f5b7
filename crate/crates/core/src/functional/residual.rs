use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{FunctionalCoefficients, ProfileCurve, SurfacePointData};
use crate::error::Result;
use crate::execution::Execution;
use crate::numerics::stencil;
use crate::profile::{DenseProfile, Profile};

/// Stencil spacing is `L / STENCIL_INTERVALS`.
pub const STENCIL_INTERVALS: usize = 2048;

/// One row of a residual trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow {
    pub s: f64,
    pub u: f64,
    pub sigma: f64,
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub nu: f64,
    pub residual: f64,
}

/// Everything the Euler–Lagrange expression needs at one point.
#[derive(Debug, Clone, Copy)]
struct PointData {
    u: f64,
    sigma: f64,
    h: f64,
    laplacian_h: f64,
    k: f64,
    nu: f64,
    div_nut: f64,
    mu: f64,
}

fn point_data(dense: &DenseProfile, s: f64, step: f64) -> PointData {
    let g = *dense.geometry();
    let (h, dh, d2h) = stencil(|t| dense.local(t).mean_curvature(&g), s, step);
    let (mu, dmu, d2mu) = stencil(|t| dense.orbit_factor(t), s, step);
    let (_, dflux, _) = stencil(
        |t| {
            let d = dense.at(t);
            let (sin, cos) = d.sigma.sin_cos();
            d.u * cos * sin / (g.conformal(d.u) * g.twist(d.u))
        },
        s,
        step,
    );
    let here = dense.at(s);
    PointData {
        u: here.u,
        sigma: here.sigma,
        h,
        laplacian_h: d2h + dmu / mu * dh,
        k: -d2mu / mu,
        nu: here.sigma.cos() / g.twist(here.u),
        div_nut: dflux / mu,
        mu,
    }
}

fn residual_from(dense: &DenseProfile, coeffs: FunctionalCoefficients, p: &PointData) -> f64 {
    let g = dense.geometry();
    let (k, tau2) = (g.k(), g.tau() * g.tau());
    let (alpha, beta) = (coeffs.alpha, coeffs.beta);
    let c = k - 4.0 * tau2;
    p.laplacian_h
        + p.h
            * (2.0 * p.h * p.h - 2.0 * p.k + (1.0 - 2.0 * alpha) * c * p.nu * p.nu + k
                - 2.0 * beta
                - 2.0 * alpha * tau2)
        + 2.0 * alpha * c * p.div_nut
}

/// Euler–Lagrange residual of `E_{α,β}` at arclength `s` of a dense profile,
/// with derivatives by five-point stencils of spacing `step`:
///
/// ```text
/// ΔH + H (2H² − 2K + (1 − 2α)(k − 4τ²) ν² + k − 2β − 2ατ²) + 2α (k − 4τ²) div(νT)
/// ```
///
/// `ΔH = H'' + (μ'/μ) H'`, `K = −μ''/μ` and `div(νT) = (1/μ) (u cos σ sin σ / ((1 + ku²/4) √(1 + τ²u²)))'`.
pub fn residual_at(dense: &DenseProfile, coeffs: FunctionalCoefficients, s: f64, step: f64) -> f64 {
    residual_from(dense, coeffs, &point_data(dense, s, step))
}

fn default_step(dense: &DenseProfile) -> f64 {
    dense.length() / STENCIL_INTERVALS as f64
}

fn interior_point(profile: &Profile, index: usize) -> Result<(&DenseProfile, PointData)> {
    let s = profile.interior(index)?.s;
    let dense = profile.dense()?;
    Ok((dense, point_data(dense, s, default_step(dense))))
}

/// Euler–Lagrange residual at an interior sample of a closed sphere.
pub fn el_residual(profile: &Profile, coeffs: FunctionalCoefficients, index: usize) -> Result<f64> {
    let (dense, p) = interior_point(profile, index)?;
    Ok(residual_from(dense, coeffs, &p))
}

/// Intrinsic Gauss curvature `K = −μ''/μ` at an interior sample.
pub fn gauss_curvature_profile(profile: &Profile, index: usize) -> Result<f64> {
    Ok(interior_point(profile, index)?.1.k)
}

/// `div(νT)` at an interior sample.
pub fn div_nut_profile(profile: &Profile, index: usize) -> Result<f64> {
    Ok(interior_point(profile, index)?.1.div_nut)
}

/// All pointwise surface data at an interior sample.
pub fn surface_point(profile: &Profile, index: usize) -> Result<SurfacePointData> {
    let (dense, p) = interior_point(profile, index)?;
    let k_bar = dense.geometry().sectional_curvature(p.nu)?;
    Ok(SurfacePointData {
        h: p.h,
        k: p.k,
        k_bar,
        k_e: p.k - k_bar,
        nu: p.nu,
        div_nut: p.div_nut,
        mu: p.mu,
    })
}

/// Residual and curvature data at every interior sample, in sample order.
pub fn residual_trace(
    profile: &Profile,
    coeffs: FunctionalCoefficients,
    exec: Execution,
) -> Result<Vec<ResidualRow>> {
    let dense = profile.dense()?;
    let step = default_step(dense);
    let samples = profile.samples();
    let interior = &samples[1..samples.len() - 1];
    Ok(exec.map(interior, |q| {
        let p = point_data(dense, q.s, step);
        ResidualRow {
            s: q.s,
            u: p.u,
            sigma: p.sigma,
            h: p.h,
            k: p.k,
            nu: p.nu,
            residual: residual_from(dense, coeffs, &p),
        }
    }))
}

/// CSV with header `s,u,sigma,H,K,nu,residual`.
pub fn write_residual_trace<W: Write>(writer: W, rows: &[ResidualRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
