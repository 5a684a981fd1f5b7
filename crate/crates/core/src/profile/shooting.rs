use std::f64::consts::PI;

use super::{
    check_existence, first_integral, rhs_unchecked, Orientation, Profile, ProfileKind,
    ProfileState, ShootingDiagnostics, AXIS_START, RESAMPLE_INTERVALS,
};
use crate::error::{Error, Result};
use crate::geometry::GeometryParams;
use crate::numerics::ode::{hermite, Knot, OdeSystem, StepControl, Stepper};

/// When to stop integrating a profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StopCondition {
    /// Integrate over this much arclength.
    ArcLength(f64),
    /// Integrate until `σ` crosses `target`, giving up after `max_arclength`.
    SigmaReaches { target: f64, max_arclength: f64 },
}

/// State layout `[u, v, σ]`.
struct CmcSystem {
    geometry: GeometryParams,
    h: f64,
}

impl OdeSystem<3> for CmcSystem {
    fn rhs(&self, _s: f64, y: &[f64; 3]) -> Option<[f64; 3]> {
        let u = y[0];
        if u.is_nan()
            || u <= 0.0
            || !self.geometry.domain_radius().contains(u)
            || self.geometry.conformal(u) <= 0.0
        {
            return None;
        }
        let (du, dv, dsigma) = rhs_unchecked(&self.geometry, self.h, u, y[2]);
        Some([du, dv, dsigma])
    }
}

/// Off-axis start for a pole start state, using `u ≈ s`, `σ ≈ H s`, `v ≈ v₀ + H s²/2`.
fn series_start(h: f64, start: &ProfileState) -> (f64, [f64; 3]) {
    let s0 = AXIS_START;
    (
        start.s + s0,
        [s0, start.v + 0.5 * h * s0 * s0, start.sigma + h * s0],
    )
}

fn resolve_start(g: &GeometryParams, h: f64, start: &ProfileState) -> Result<(f64, [f64; 3])> {
    if start.u == 0.0 {
        if start.sigma.rem_euclid(2.0 * PI) != 0.0 {
            return Err(Error::InvalidArgument(format!(
                "axis start needs sigma = 0 (got {}); any other angle leaves through u < 0",
                start.sigma
            )));
        }
        return Ok(series_start(h, start));
    }
    if start.u < 0.0 {
        return Err(Error::AxisSingularity { u: start.u });
    }
    g.check_radius(start.u)?;
    Ok((start.s, [start.u, start.v, start.sigma]))
}

/// Runs the integrator, landing exactly on each checkpoint (ascending, beyond
/// the start) and stopping per `stop`. Returns every accepted knot.
fn drive(
    sys: &CmcSystem,
    s_start: f64,
    y0: [f64; 3],
    ctl: StepControl,
    stop: StopCondition,
    checkpoints: &[f64],
) -> Result<Vec<Knot<3>>> {
    let mut stepper = Stepper::new(sys, s_start, y0, ctl)?;
    let mut knots = vec![stepper.knot];
    let end = match stop {
        StopCondition::ArcLength(len) => s_start + len,
        StopCondition::SigmaReaches { max_arclength, .. } => s_start + max_arclength,
    };
    let mut next_cp = checkpoints.iter().position(|&c| c > s_start);
    loop {
        let limit = next_cp.map_or(end, |i| checkpoints[i].min(end));
        let prev = stepper.knot;
        let knot = stepper.step(limit)?;
        if let StopCondition::SigmaReaches { target, .. } = stop {
            if (prev.y[2] - target) * (knot.y[2] - target) <= 0.0 && knot.y[2] != prev.y[2] {
                let hit = locate_sigma(&stepper, &prev, &knot, target)?;
                knots.push(hit);
                return Ok(knots);
            }
        }
        knots.push(knot);
        if let Some(i) = next_cp {
            if knot.t == checkpoints[i] {
                next_cp = (i + 1 < checkpoints.len()).then_some(i + 1);
            }
        }
        if knot.t >= end {
            return match stop {
                StopCondition::ArcLength(_) => Ok(knots),
                StopCondition::SigmaReaches { max_arclength, .. } => {
                    Err(Error::StopNotReached { max_arclength })
                }
            };
        }
    }
}

/// Finds the arclength where `σ = target` inside one accepted step: bisection on
/// the Hermite interpolant, then Newton refinement with exact sub-steps.
fn locate_sigma(
    stepper: &Stepper<'_, 3, CmcSystem>,
    a: &Knot<3>,
    b: &Knot<3>,
    target: f64,
) -> Result<Knot<3>> {
    let (mut lo, mut hi) = (a.t, b.t);
    let rising = b.y[2] > a.y[2];
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let below = hermite(a, b, mid)[2] < target;
        if below == rising {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut t = 0.5 * (lo + hi);
    let mut knot = stepper.restep_from(a, t)?;
    for _ in 0..4 {
        let slope = knot.dy[2];
        if slope == 0.0 {
            break;
        }
        let dt = (knot.y[2] - target) / slope;
        if dt.abs() <= 1e-16 * t.abs().max(1.0) {
            break;
        }
        t -= dt;
        knot = stepper.restep_from(a, t)?;
    }
    Ok(knot)
}

fn knot_state(k: &Knot<3>) -> ProfileState {
    ProfileState::new(k.t, k.y[0], k.y[1], k.y[2])
}

/// Integrates the CMC profile system with the default tolerances
/// (`rtol = 1e−10`, `atol = 1e−12`).
pub fn integrate(
    g: &GeometryParams,
    h: f64,
    start: ProfileState,
    stop: StopCondition,
) -> Result<Profile> {
    integrate_with(g, h, start, stop, StepControl::default())
}

/// Integrates the CMC profile system; every accepted step becomes a sample.
pub fn integrate_with(
    g: &GeometryParams,
    h: f64,
    start: ProfileState,
    stop: StopCondition,
    ctl: StepControl,
) -> Result<Profile> {
    let (s0, y0) = resolve_start(g, h, &start)?;
    let sys = CmcSystem { geometry: *g, h };
    let knots = drive(&sys, s0, y0, ctl, stop, &[])?;
    let mut samples: Vec<ProfileState> = Vec::with_capacity(knots.len() + 1);
    if start.u == 0.0 {
        samples.push(start);
    }
    samples.extend(knots.iter().map(knot_state));
    Profile::open(*g, samples, Some(h), ProfileKind::Trajectory { h })
}

/// Settings for sphere generation.
#[derive(Debug, Clone, Copy)]
pub struct SphereOptions {
    /// Number of uniform arclength intervals (even).
    pub intervals: usize,
    pub control: StepControl,
}

impl Default for SphereOptions {
    fn default() -> Self {
        Self {
            intervals: RESAMPLE_INTERVALS,
            control: StepControl::default(),
        }
    }
}

/// Shoots the rotationally invariant CMC sphere of mean curvature `h`.
pub fn generate_cmc_sphere(g: &GeometryParams, h: f64) -> Result<Profile> {
    generate_cmc_sphere_with(g, h, &SphereOptions::default())
}

/// Shoots from the pole to the equator `σ = π/2`, resamples that half on a
/// uniform grid and completes the sphere with the symmetry
/// `(s, u, v, σ) → (L − s, u, 2v(L/2) − v, π − σ)` of the system.
///
/// A negative `h` yields the mirror sphere; the profile is stored with `|h|`
/// and `Orientation::Reversed`.
pub fn generate_cmc_sphere_with(
    g: &GeometryParams,
    h: f64,
    opts: &SphereOptions,
) -> Result<Profile> {
    check_existence(g, h)?;
    if opts.intervals < 4 || !opts.intervals.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "sphere grid needs an even number of intervals >= 4, got {}",
            opts.intervals
        )));
    }
    let orientation = if h < 0.0 {
        Orientation::Reversed
    } else {
        Orientation::Standard
    };
    let h = h.abs();
    let sys = CmcSystem { geometry: *g, h };
    let pole = ProfileState::axis(0.0);
    let (s0, y0) = series_start(h, &pole);

    // Turning rate on the sphere is H(1 + k u²/4) ≥ H·min(1, 1 + k/(4H²)).
    let slowest = h * g.conformal(1.0 / h).min(1.0);
    let max_arclength = 10.0 * (PI / 2.0) / slowest + 1.0;
    let first = drive(
        &sys,
        s0,
        y0,
        opts.control,
        StopCondition::SigmaReaches {
            target: PI / 2.0,
            max_arclength,
        },
        &[],
    )?;
    let apex = first[first.len() - 1].t;

    let n = opts.intervals;
    let half = n / 2;
    let step = 2.0 * apex / n as f64;
    let grid: Vec<f64> = (1..=half)
        .map(|j| if j == half { apex } else { step * j as f64 })
        .collect();
    let run = drive(
        &sys,
        s0,
        y0,
        opts.control,
        StopCondition::ArcLength(apex - s0),
        &grid,
    )?;

    let j0 = first_integral(g, h, &knot_state(&run[0]));
    let drift = run
        .iter()
        .map(|k| (first_integral(g, h, &knot_state(k)) - j0).abs())
        .fold(0.0, f64::max);

    let mut samples = vec![ProfileState::axis(0.0); n + 1];
    let mut cursor = 0;
    for k in &run {
        if cursor < grid.len() && k.t == grid[cursor] {
            samples[cursor + 1] = knot_state(k);
            cursor += 1;
        }
    }
    if cursor != grid.len() {
        return Err(Error::InvalidArgument(format!(
            "integrator missed {} grid points",
            grid.len() - cursor
        )));
    }
    let length = 2.0 * apex;
    let v_mid = samples[half].v;
    for j in half + 1..=n {
        let m = samples[n - j];
        samples[j] = ProfileState::new(
            if j == n { length } else { step * j as f64 },
            m.u,
            2.0 * v_mid - m.v,
            PI - m.sigma,
        );
    }
    samples[n].u = 0.0;

    let identity_residual = samples
        .iter()
        .map(|p| (p.sigma.sin() - h * p.u).abs())
        .fold(0.0, f64::max);
    let diagnostics = ShootingDiagnostics {
        first_integral_drift: drift,
        identity_residual,
        apex_arclength: apex,
        apex_u: samples[half].u,
        accepted_steps: run.len() - 1,
    };
    Ok(
        Profile::closed_sphere(*g, samples, Some(h), ProfileKind::CmcSphere { h })?
            .with_orientation(orientation)
            .with_diagnostics(diagnostics),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::cmc_sigma_rate;
    use approx::assert_abs_diff_eq;

    #[test]
    fn unit_round_sphere() {
        let g = GeometryParams::euclidean();
        let p = generate_cmc_sphere(&g, 1.0).unwrap();
        assert!(p.is_closed());
        assert_abs_diff_eq!(p.length(), PI, epsilon = 1e-10);
        assert_abs_diff_eq!(p.max_u(), 1.0, epsilon = 1e-12);
        for q in p.samples() {
            assert_abs_diff_eq!(q.u, (q.s).sin(), epsilon = 1e-10);
            assert_abs_diff_eq!(q.sigma, q.s, epsilon = 1e-10);
            assert_abs_diff_eq!(q.v, 1.0 - q.s.cos(), epsilon = 1e-10);
        }
    }

    #[test]
    fn nil_sphere_identity_and_apex() {
        let g = GeometryParams::nil();
        let p = generate_cmc_sphere(&g, 1.0).unwrap();
        let d = p.diagnostics().unwrap();
        assert!(d.identity_residual < 1e-8, "{d:?}");
        assert!(d.first_integral_drift < 1e-8, "{d:?}");
        assert_abs_diff_eq!(d.apex_u, 1.0, epsilon = 1e-10);
        let first = p.samples()[0];
        let last = p.samples()[p.samples().len() - 1];
        assert_eq!((first.u, first.sigma), (0.0, 0.0));
        assert_eq!((last.u, last.sigma), (0.0, PI));
    }

    #[test]
    fn sl2_sphere_stays_inside_the_disk() {
        let g = GeometryParams::sl2();
        let p = generate_cmc_sphere(&g, 0.8).unwrap();
        assert_abs_diff_eq!(p.max_u(), 1.25, epsilon = 1e-10);
        assert!(p.max_u() < 2.0);
    }

    #[test]
    fn sigma_rate_matches_finite_differences() {
        let g = GeometryParams::sl2();
        let p = generate_cmc_sphere(&g, 0.8).unwrap();
        let s = p.samples();
        let h = s[1].s - s[0].s;
        for j in 2..s.len() - 2 {
            let fd = (s[j - 2].sigma - 8.0 * s[j - 1].sigma + 8.0 * s[j + 1].sigma
                - s[j + 2].sigma)
                / (12.0 * h);
            let exact = cmc_sigma_rate(&g, 0.8, s[j].u.min(1.25)).unwrap();
            assert!((fd - exact).abs() < 1e-6, "j = {j}: {fd} vs {exact}");
        }
    }

    #[test]
    fn negative_h_is_mirrored() {
        let g = GeometryParams::nil();
        let p = generate_cmc_sphere(&g, -1.0).unwrap();
        assert_eq!(p.orientation(), Orientation::Reversed);
        assert_eq!(p.mean_curvature(), Some(1.0));
    }

    #[test]
    fn existence_violation_is_reported() {
        let err = generate_cmc_sphere(&GeometryParams::sl2(), 0.5).unwrap_err();
        assert!(matches!(err, Error::ExistenceViolation { .. }));
    }

    #[test]
    fn arclength_stop_and_conservation() {
        let g = GeometryParams::new(0.25, 0.3).unwrap();
        let start = ProfileState::new(0.0, 0.7, 0.0, 0.4);
        let p = integrate(&g, 0.9, start, StopCondition::ArcLength(6.0)).unwrap();
        assert_abs_diff_eq!(p.length(), 6.0, epsilon = 1e-12);
        assert!(p.first_integral_drift().unwrap() < 1e-8);
    }

    #[test]
    fn sigma_stop_locates_the_crossing() {
        let g = GeometryParams::nil();
        let p = integrate(
            &g,
            1.0,
            ProfileState::axis(0.0),
            StopCondition::SigmaReaches {
                target: 1.0,
                max_arclength: 10.0,
            },
        )
        .unwrap();
        let last = p.samples()[p.samples().len() - 1];
        assert_abs_diff_eq!(last.sigma, 1.0, epsilon = 1e-13);
        assert_eq!(p.samples()[0], ProfileState::axis(0.0));
    }

    #[test]
    fn unreachable_sigma_reports_stop_not_reached() {
        let g = GeometryParams::nil();
        let err = integrate(
            &g,
            1.0,
            ProfileState::axis(0.0),
            StopCondition::SigmaReaches {
                target: 3.0,
                max_arclength: 0.5,
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::StopNotReached { .. }));
    }

    #[test]
    fn pole_start_with_other_angle_is_rejected() {
        let g = GeometryParams::nil();
        let start = ProfileState::new(0.0, 0.0, 0.0, PI);
        assert!(integrate(&g, 1.0, start, StopCondition::ArcLength(1.0)).is_err());
    }
}
