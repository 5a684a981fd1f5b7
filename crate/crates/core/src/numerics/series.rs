//! Sine-series interpolation of functions sampled on a uniform grid over `[0, L]`
//! that vanish at both ends and extend to smooth odd `2L`-periodic functions.

use rustfft::{num_complex::Complex, FftPlanner};

/// `f(s) = Σ b_n sin(nπs/L)`, truncated above the coefficient noise floor.
#[derive(Debug, Clone)]
pub struct SineSeries {
    length: f64,
    coeffs: Vec<f64>,
}

/// Value and first two derivatives.
#[derive(Debug, Clone, Copy, Default)]
pub struct Derivs {
    pub f: f64,
    pub d1: f64,
    pub d2: f64,
}

impl SineSeries {
    /// Fits `samples[j] = f(j L / N)`, `j = 0..=N`. The end samples are ignored
    /// (taken as zero).
    pub fn fit(samples: &[f64], length: f64) -> Self {
        let n = samples.len() - 1;
        assert!(n >= 2, "sine series needs at least three samples");
        let m = 2 * n;
        let mut buf = vec![Complex::new(0.0, 0.0); m];
        for j in 1..n {
            buf[j] = Complex::new(samples[j], 0.0);
            buf[m - j] = Complex::new(-samples[j], 0.0);
        }
        FftPlanner::new().plan_fft_forward(m).process(&mut buf);
        let nf = n as f64;
        let mut coeffs: Vec<f64> = (0..n).map(|k| -buf[k].im / nf).collect();
        coeffs[0] = 0.0;
        let keep = resolved_modes(&coeffs);
        coeffs.truncate(keep);
        Self { length, coeffs }
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Number of retained modes (including the unused zeroth slot).
    pub fn modes(&self) -> usize {
        self.coeffs.len()
    }

    pub fn eval(&self, s: f64) -> Derivs {
        let w = std::f64::consts::PI / self.length;
        let theta = w * s;
        let step = Complex::new(theta.cos(), theta.sin());
        let mut z = Complex::new(1.0, 0.0);
        let mut out = Derivs::default();
        for (n, &b) in self.coeffs.iter().enumerate().skip(1) {
            // Recompute exactly every 64 modes to bound drift of the rotation.
            z = if n % 64 == 0 {
                let a = theta * n as f64;
                Complex::new(a.cos(), a.sin())
            } else {
                z * step
            };
            let kn = w * n as f64;
            out.f += b * z.im;
            out.d1 += b * kn * z.re;
            out.d2 -= b * kn * kn * z.im;
        }
        out
    }
}

/// Index just past the last coefficient that stands clear of the noise floor.
///
/// The floor is estimated from the top quarter of the spectrum, which is pure
/// roundoff/integration noise for a resolved analytic profile.
fn resolved_modes(coeffs: &[f64]) -> usize {
    let n = coeffs.len();
    let peak = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if peak == 0.0 {
        return 1;
    }
    let mut tail: Vec<f64> = coeffs[3 * n / 4..].iter().map(|c| c.abs()).collect();
    tail.sort_by(f64::total_cmp);
    let median = tail.get(tail.len() / 2).copied().unwrap_or(0.0);
    let floor = (100.0 * median).max(1e-15 * peak);
    coeffs
        .iter()
        .rposition(|c| c.abs() > floor)
        .map_or(1, |i| i + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn recovers_a_smooth_odd_function_and_its_derivatives() {
        let l = 2.5;
        let f = |s: f64| (PI * s / l).sin() * (1.0 + 0.3 * (2.0 * PI * s / l).cos()).exp();
        let n = 256;
        let samples: Vec<f64> = (0..=n).map(|j| f(j as f64 * l / n as f64)).collect();
        let series = SineSeries::fit(&samples, l);
        assert!(series.modes() < 80, "modes = {}", series.modes());
        let h = 1e-4;
        for s in [0.013, 0.7, 1.25, 2.4] {
            let d = series.eval(s);
            assert_abs_diff_eq!(d.f, f(s), epsilon = 1e-13);
            let fd1 = (f(s + h) - f(s - h)) / (2.0 * h);
            let fd2 = (f(s + h) - 2.0 * f(s) + f(s - h)) / (h * h);
            assert_abs_diff_eq!(d.d1, fd1, epsilon = 1e-7);
            assert_abs_diff_eq!(d.d2, fd2, epsilon = 1e-5);
        }
    }

    #[test]
    fn odd_continuation_past_the_ends() {
        let l = 1.0;
        let samples: Vec<f64> = (0..=64).map(|j| (PI * j as f64 / 64.0).sin()).collect();
        let series = SineSeries::fit(&samples, l);
        assert_abs_diff_eq!(series.eval(-0.1).f, -series.eval(0.1).f, epsilon = 1e-15);
        assert_abs_diff_eq!(series.eval(1.05).f, -series.eval(0.95).f, epsilon = 1e-14);
    }

    #[test]
    fn zero_function() {
        let series = SineSeries::fit(&[0.0; 9], 1.0);
        assert_eq!(series.eval(0.3).f, 0.0);
    }
}
