use std::f64::consts::PI;

use super::ProfileState;
use crate::geometry::GeometryParams;
use crate::numerics::series::SineSeries;

/// Spectral dense output of a closed sphere profile.
///
/// On a smooth sphere `u(s)` and `σ(s) − πs/L` both extend to odd
/// `2L`-periodic functions (the surface is smooth across each pole), so a sine
/// series fitted to uniform samples represents them, and their derivatives, to
/// near machine precision. Evaluation is valid for any real `s`; values outside
/// `[0, L]` are the reflections through the poles.
#[derive(Debug, Clone)]
pub struct DenseProfile {
    geometry: GeometryParams,
    length: f64,
    u: SineSeries,
    sigma: SineSeries,
}

/// Position, angle and their first two arclength derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenseState {
    pub s: f64,
    pub u: f64,
    pub du: f64,
    pub d2u: f64,
    pub sigma: f64,
    pub dsigma: f64,
    pub d2sigma: f64,
}

impl DenseState {
    /// `sin σ / u` with the pole limit `σ'/u'` on the axis.
    pub fn sin_over_u(&self) -> f64 {
        if self.u.abs() < 1e-9 {
            self.dsigma * self.sigma.cos() / self.du
        } else {
            self.sigma.sin() / self.u
        }
    }
}

impl DenseProfile {
    /// Fits uniform samples starting at `s = 0`.
    pub(crate) fn fit(geometry: GeometryParams, samples: &[ProfileState]) -> Self {
        let n = samples.len() - 1;
        let length = samples[n].s;
        let us: Vec<f64> = samples.iter().map(|p| p.u).collect();
        let sigmas: Vec<f64> = samples
            .iter()
            .map(|p| p.sigma - PI * p.s / length)
            .collect();
        Self {
            geometry,
            length,
            u: SineSeries::fit(&us, length),
            sigma: SineSeries::fit(&sigmas, length),
        }
    }

    pub fn geometry(&self) -> &GeometryParams {
        &self.geometry
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Retained spectral modes for `(u, σ)`.
    pub fn modes(&self) -> (usize, usize) {
        (self.u.modes(), self.sigma.modes())
    }

    pub fn at(&self, s: f64) -> DenseState {
        let u = self.u.eval(s);
        let sg = self.sigma.eval(s);
        let slope = PI / self.length;
        DenseState {
            s,
            u: u.f,
            du: u.d1,
            d2u: u.d2,
            sigma: sg.f + slope * s,
            dsigma: sg.d1 + slope,
            d2sigma: sg.d2,
        }
    }

    /// `μ(u(s))`, odd through the poles.
    pub fn orbit_factor(&self, s: f64) -> f64 {
        self.geometry.orbit_factor(self.u.eval(s).f)
    }
}

/// Eighth-order Lagrange resampling onto `n` uniform intervals.
pub(crate) fn resample_uniform(samples: &[ProfileState], n: usize) -> Vec<ProfileState> {
    let start = samples[0].s;
    let length = samples[samples.len() - 1].s - start;
    let h = length / n as f64;
    let width = 8.min(samples.len());
    (0..=n)
        .map(|j| {
            let s = if j == n {
                start + length
            } else {
                start + h * j as f64
            };
            let hi = samples.partition_point(|p| p.s < s);
            let lo = hi.saturating_sub(width / 2).min(samples.len() - width);
            let window = &samples[lo..lo + width];
            let mut out = ProfileState::new(s - start, 0.0, 0.0, 0.0);
            for (i, pi) in window.iter().enumerate() {
                let mut w = 1.0;
                for (m, pm) in window.iter().enumerate() {
                    if m != i {
                        w *= (s - pm.s) / (pi.s - pm.s);
                    }
                }
                out.u += w * pi.u;
                out.v += w * pi.v;
                out.sigma += w * pi.sigma;
            }
            out
        })
        .collect()
}
