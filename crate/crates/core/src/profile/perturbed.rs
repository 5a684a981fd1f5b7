use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{check_existence, Orientation, Profile, ProfileKind, ProfileState, RESAMPLE_INTERVALS};
use crate::error::{Error, Result};
use crate::geometry::GeometryParams;
use crate::numerics::quadrature::GaussLegendre;

/// Single-mode perturbation of a CMC sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSpec {
    pub epsilon: f64,
    pub mode: u32,
}

impl PerturbationSpec {
    pub fn new(epsilon: f64, mode: u32) -> Result<Self> {
        let spec = Self { epsilon, mode };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.mode == 0 {
            return Err(Error::InadmissiblePerturbation(
                "mode must be at least 1".into(),
            ));
        }
        if self.epsilon.is_nan() || self.epsilon.abs() >= 1.0 {
            return Err(Error::InadmissiblePerturbation(format!(
                "|epsilon| = {} must be below 1 for a regular profile",
                self.epsilon.abs()
            )));
        }
        Ok(())
    }
}

/// Panels used for the cumulative `s(σ)` and `v(σ)` tables.
const TABLE_PANELS: usize = 512;
/// Grid used to certify positivity of the modulation.
const ADMISSIBILITY_GRID: usize = 8192;

/// A rotationally invariant sphere whose turning rate is a modulated version
/// of the CMC rate:
///
/// ```text
/// ds/dσ = M(σ) / (H (1 + k u²/4)),   M(σ) = 1 + Σ c_m cos((2m+1)σ)
/// ```
///
/// The profile equations then give `du/dσ = M cos σ / H`, so `u(σ)` has a
/// closed form, vanishes at both poles and peaks at `u(π/2) = 1/H`. With all
/// `c_m = 0` this is the CMC sphere; `M` is even about both poles, so the
/// surface is smooth there. Replacing `c` by `−c` mirrors the curve through
/// the equator.
#[derive(Debug, Clone, PartialEq)]
pub struct ModulatedSphere {
    geometry: GeometryParams,
    h: f64,
    terms: Vec<(u32, f64)>,
}

impl ModulatedSphere {
    /// `terms` holds `(m, c_m)` pairs with `m ≥ 1`; requires `h > 0` and `M > 0`.
    pub fn new(geometry: GeometryParams, h: f64, terms: Vec<(u32, f64)>) -> Result<Self> {
        check_existence(&geometry, h)?;
        if h <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "modulated spheres take H > 0, got {h}"
            )));
        }
        if let Some(&(m, _)) = terms.iter().find(|(m, _)| *m == 0) {
            return Err(Error::InadmissiblePerturbation(format!(
                "mode {m} must be at least 1"
            )));
        }
        if let Some(&(m, c)) = terms.iter().find(|(_, c)| !c.is_finite()) {
            return Err(Error::InadmissiblePerturbation(format!(
                "amplitude {c} of mode {m} is not finite"
            )));
        }
        let sphere = Self { geometry, h, terms };
        let bound: f64 = sphere.terms.iter().map(|(_, c)| c.abs()).sum();
        if bound >= 1.0 {
            let worst = (0..=ADMISSIBILITY_GRID)
                .map(|i| sphere.modulation(PI * i as f64 / ADMISSIBILITY_GRID as f64))
                .fold(f64::INFINITY, f64::min);
            if worst <= 0.0 {
                return Err(Error::InadmissiblePerturbation(format!(
                    "turning-rate modulation reaches {worst:.3e}; ds/dsigma must stay positive"
                )));
            }
        }
        // u peaks at 1/H, which lies inside the domain by the existence condition.
        geometry
            .check_radius(1.0 / h)
            .map_err(|e| Error::InadmissiblePerturbation(e.to_string()))?;
        Ok(sphere)
    }

    pub fn geometry(&self) -> &GeometryParams {
        &self.geometry
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn terms(&self) -> &[(u32, f64)] {
        &self.terms
    }

    pub fn modulation(&self, sigma: f64) -> f64 {
        1.0 + self
            .terms
            .iter()
            .map(|&(m, c)| c * ((2 * m + 1) as f64 * sigma).cos())
            .sum::<f64>()
    }

    pub fn u(&self, sigma: f64) -> f64 {
        let extra: f64 = self
            .terms
            .iter()
            .map(|&(m, c)| {
                let j = (2 * m + 1) as f64;
                0.5 * c
                    * (((j + 1.0) * sigma).sin() / (j + 1.0)
                        + ((j - 1.0) * sigma).sin() / (j - 1.0))
            })
            .sum();
        (sigma.sin() + extra) / self.h
    }

    /// `u(σ)/sin σ`, finite at the poles.
    pub fn u_over_sin(&self, sigma: f64) -> f64 {
        let s = sigma.sin();
        if s.abs() > 1e-4 {
            return self.u(sigma) / s;
        }
        // Near a pole u ≈ M(pole)·sin σ / H to second order.
        let pole = if sigma < PI / 2.0 { 0.0 } else { PI };
        self.modulation(pole) / self.h
    }

    pub fn ds_dsigma(&self, sigma: f64) -> f64 {
        self.modulation(sigma) / (self.h * self.geometry.conformal(self.u(sigma)))
    }

    pub fn dv_dsigma(&self, sigma: f64) -> f64 {
        self.geometry.twist(self.u(sigma)) * sigma.sin() * self.ds_dsigma(sigma)
    }

    /// Total arclength `s(π)`.
    pub fn length(&self) -> f64 {
        GaussLegendre::sixteen().integrate_composite(0.0, PI, TABLE_PANELS, |t| self.ds_dsigma(t))
    }

    /// Samples the sphere on `intervals` uniform arclength intervals.
    pub fn to_profile(&self, intervals: usize) -> Result<Profile> {
        if intervals < 4 {
            return Err(Error::InvalidArgument(format!(
                "need at least 4 intervals, got {intervals}"
            )));
        }
        let gl = GaussLegendre::sixteen();
        let width = PI / TABLE_PANELS as f64;
        let mut s_table = vec![0.0; TABLE_PANELS + 1];
        let mut v_table = vec![0.0; TABLE_PANELS + 1];
        for i in 0..TABLE_PANELS {
            let (a, b) = (width * i as f64, width * (i + 1) as f64);
            s_table[i + 1] = s_table[i] + gl.integrate(a, b, |t| self.ds_dsigma(t));
            v_table[i + 1] = v_table[i] + gl.integrate(a, b, |t| self.dv_dsigma(t));
        }
        let length = s_table[TABLE_PANELS];
        let step = length / intervals as f64;
        let mut samples = Vec::with_capacity(intervals + 1);
        samples.push(ProfileState::axis(0.0));
        for j in 1..intervals {
            let target = step * j as f64;
            let panel = s_table.partition_point(|&s| s <= target) - 1;
            let a = width * panel as f64;
            let frac = (target - s_table[panel]) / (s_table[panel + 1] - s_table[panel]);
            let mut sigma = a + frac * width;
            for _ in 0..30 {
                let s = s_table[panel] + gl.integrate(a, sigma, |t| self.ds_dsigma(t));
                let delta = (s - target) / self.ds_dsigma(sigma);
                sigma -= delta;
                if delta.abs() < 1e-15 {
                    break;
                }
            }
            let v = v_table[panel] + gl.integrate(a, sigma, |t| self.dv_dsigma(t));
            samples.push(ProfileState::new(target, self.u(sigma), v, sigma));
        }
        samples.push(ProfileState::new(length, 0.0, v_table[TABLE_PANELS], PI));
        Profile::closed_sphere(
            self.geometry,
            samples,
            self.terms.iter().all(|&(_, c)| c == 0.0).then_some(self.h),
            ProfileKind::Modulated {
                h: self.h,
                terms: self.terms.clone(),
            },
        )
    }
}

/// The sphere with turning rate modulated by `1 + ε cos((2·mode + 1)σ)`.
///
/// A negative `h` gives the mirrored profile, flagged `Orientation::Reversed`.
pub fn perturbed_sphere(g: &GeometryParams, h: f64, spec: PerturbationSpec) -> Result<Profile> {
    spec.validate()?;
    check_existence(g, h)?;
    let sphere = ModulatedSphere::new(*g, h.abs(), vec![(spec.mode, spec.epsilon)])?;
    let profile = sphere.to_profile(RESAMPLE_INTERVALS)?;
    Ok(if h < 0.0 {
        profile.with_orientation(Orientation::Reversed)
    } else {
        profile
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::generate_cmc_sphere;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_amplitude_reproduces_the_cmc_sphere() {
        let g = GeometryParams::nil();
        let p = perturbed_sphere(&g, 1.0, PerturbationSpec::new(0.0, 1).unwrap()).unwrap();
        let cmc = generate_cmc_sphere(&g, 1.0).unwrap();
        assert_abs_diff_eq!(p.length(), cmc.length(), epsilon = 1e-9);
        for (a, b) in p.samples().iter().zip(cmc.samples()) {
            assert_abs_diff_eq!(a.u, b.u, epsilon = 1e-8);
            assert_abs_diff_eq!(a.sigma, b.sigma, epsilon = 1e-8);
            assert_abs_diff_eq!(a.v, b.v, epsilon = 1e-8);
        }
    }

    #[test]
    fn closed_form_radius_matches_integrated_derivative() {
        let g = GeometryParams::new(-1.0, -0.5).unwrap();
        let m = ModulatedSphere::new(g, 0.8, vec![(1, 0.2), (2, -0.1)]).unwrap();
        let gl = GaussLegendre::sixteen();
        for sigma in [0.3, 1.1, PI / 2.0, 2.7, PI] {
            let integrated =
                gl.integrate_composite(0.0, sigma, 32, |t| m.modulation(t) * t.cos() / m.h());
            assert_abs_diff_eq!(m.u(sigma), integrated, epsilon = 1e-13);
        }
        assert_abs_diff_eq!(m.u(PI / 2.0), 1.25, epsilon = 1e-15);
        assert_abs_diff_eq!(m.u(PI), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn samples_solve_the_profile_equations() {
        let g = GeometryParams::new(0.25, 0.3).unwrap();
        let m = ModulatedSphere::new(g, 0.9, vec![(1, 0.15)]).unwrap();
        let p = m.to_profile(1024).unwrap();
        let s = p.samples();
        let h = s[1].s - s[0].s;
        for j in (3..s.len() - 3).step_by(37) {
            let du = (s[j - 2].u - 8.0 * s[j - 1].u + 8.0 * s[j + 1].u - s[j + 2].u) / (12.0 * h);
            let dv = (s[j - 2].v - 8.0 * s[j - 1].v + 8.0 * s[j + 1].v - s[j + 2].v) / (12.0 * h);
            assert_abs_diff_eq!(du, g.conformal(s[j].u) * s[j].sigma.cos(), epsilon = 1e-8);
            assert_abs_diff_eq!(dv, g.twist(s[j].u) * s[j].sigma.sin(), epsilon = 1e-8);
        }
    }

    #[test]
    fn inadmissible_amplitudes_are_rejected() {
        assert!(PerturbationSpec::new(1.0, 1).is_err());
        assert!(PerturbationSpec::new(0.1, 0).is_err());
        let g = GeometryParams::nil();
        assert!(matches!(
            ModulatedSphere::new(g, 1.0, vec![(1, 0.7), (2, 0.7)]),
            Err(Error::InadmissiblePerturbation(_))
        ));
    }

    #[test]
    fn opposite_amplitudes_are_mirror_images() {
        let g = GeometryParams::sl2();
        let plus = ModulatedSphere::new(g, 0.8, vec![(2, 0.2)]).unwrap();
        let minus = ModulatedSphere::new(g, 0.8, vec![(2, -0.2)]).unwrap();
        for sigma in [0.2, 0.9, 1.4] {
            assert_abs_diff_eq!(plus.u(sigma), minus.u(PI - sigma), epsilon = 1e-14);
        }
        assert_abs_diff_eq!(plus.length(), minus.length(), epsilon = 1e-12);
    }
}
