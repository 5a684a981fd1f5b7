//! Numerical building blocks: ODE stepping, quadrature, spectral interpolation,
//! jets and finite-difference stencils.

pub mod jet;
pub mod ode;
pub mod quadrature;
pub mod series;

/// Centered five-point first derivative from `f(x−2h), f(x−h), f(x+h), f(x+2h)`.
#[inline]
pub fn d1_five_point(fm2: f64, fm1: f64, fp1: f64, fp2: f64, h: f64) -> f64 {
    (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h)
}

/// Centered five-point second derivative.
#[inline]
pub fn d2_five_point(fm2: f64, fm1: f64, f0: f64, fp1: f64, fp2: f64, h: f64) -> f64 {
    (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h)
}

/// Five-point first and second derivatives of `f` at `x` with spacing `h`.
pub fn stencil<F: FnMut(f64) -> f64>(mut f: F, x: f64, h: f64) -> (f64, f64, f64) {
    let fm2 = f(x - 2.0 * h);
    let fm1 = f(x - h);
    let f0 = f(x);
    let fp1 = f(x + h);
    let fp2 = f(x + 2.0 * h);
    (
        f0,
        d1_five_point(fm2, fm1, fp1, fp2, h),
        d2_five_point(fm2, fm1, f0, fp1, fp2, h),
    )
}
