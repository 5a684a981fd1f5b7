//! Dormand–Prince 5(4) with cubic Hermite dense output and checkpoint landing.

use crate::error::{Error, Result};

/// Right-hand side of an autonomous-in-form system `y' = f(t, y)`.
///
/// Returning `None` marks the state as outside the domain of the system; the
/// integrator then shrinks the step.
pub trait OdeSystem<const N: usize> {
    fn rhs(&self, t: f64, y: &[f64; N]) -> Option<[f64; N]>;
}

#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            h_init: 1e-3,
            h_min: 1e-14,
            h_max: 0.1,
            max_steps: 1_000_000,
        }
    }
}

/// One accepted step: endpoint values and slopes, enough for Hermite interpolation.
#[derive(Debug, Clone, Copy)]
pub struct Knot<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub dy: [f64; N],
}

/// Cubic Hermite interpolation between two knots.
pub fn hermite<const N: usize>(a: &Knot<N>, b: &Knot<N>, t: f64) -> [f64; N] {
    let h = b.t - a.t;
    let x = (t - a.t) / h;
    let h00 = (1.0 + 2.0 * x) * (1.0 - x) * (1.0 - x);
    let h10 = x * (1.0 - x) * (1.0 - x);
    let h01 = x * x * (3.0 - 2.0 * x);
    let h11 = x * x * (x - 1.0);
    std::array::from_fn(|i| h00 * a.y[i] + h10 * h * a.dy[i] + h01 * b.y[i] + h11 * h * b.dy[i])
}

// Dormand–Prince tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// A single Dormand–Prince step. Returns the 5th-order state, its slope and
/// the scaled error norm, or `None` if a stage left the domain.
pub fn dopri_step<const N: usize, S: OdeSystem<N>>(
    sys: &S,
    t: f64,
    y: &[f64; N],
    dy: &[f64; N],
    h: f64,
    ctl: &StepControl,
) -> Option<([f64; N], [f64; N], f64)> {
    let mut k = [[0.0; N]; 7];
    k[0] = *dy;
    for s in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = A[s][j];
            if a != 0.0 {
                for i in 0..N {
                    ys[i] += h * a * kj[i];
                }
            }
        }
        k[s] = sys.rhs(t + C[s] * h, &ys)?;
    }
    let mut y5 = *y;
    let mut err = 0.0;
    for i in 0..N {
        let mut inc5 = 0.0;
        let mut inc4 = 0.0;
        for s in 0..7 {
            inc5 += B5[s] * k[s][i];
            inc4 += B4[s] * k[s][i];
        }
        y5[i] += h * inc5;
        let scale = ctl.atol + ctl.rtol * y[i].abs().max(y5[i].abs());
        let e = h * (inc5 - inc4) / scale;
        err += e * e;
    }
    // FSAL: the last stage is evaluated at the new state.
    Some((y5, k[6], (err / N as f64).sqrt()))
}

/// Step-size update from the error norm of the last attempt.
pub fn next_step(h: f64, err: f64) -> f64 {
    let factor = if err == 0.0 {
        5.0
    } else {
        (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
    };
    h * factor
}

/// Adaptive driver that advances a state while honouring mandatory landing points.
pub struct Stepper<'a, const N: usize, S: OdeSystem<N>> {
    sys: &'a S,
    ctl: StepControl,
    pub knot: Knot<N>,
    h: f64,
    steps: usize,
    domain_rejected: bool,
}

impl<'a, const N: usize, S: OdeSystem<N>> Stepper<'a, N, S> {
    pub fn new(sys: &'a S, t0: f64, y0: [f64; N], ctl: StepControl) -> Result<Self> {
        let dy = sys
            .rhs(t0, &y0)
            .ok_or(Error::DomainExit { s: t0, u: y0[0] })?;
        Ok(Self {
            sys,
            ctl,
            knot: Knot { t: t0, y: y0, dy },
            h: ctl.h_init,
            steps: 0,
            domain_rejected: false,
        })
    }

    /// Takes one accepted step, never passing `t_limit`. Returns the new knot.
    ///
    /// Fails with `DomainExit` when the step size collapses because trial stages
    /// keep leaving the domain, and with `StepSizeUnderflow` otherwise.
    pub fn step(&mut self, t_limit: f64) -> Result<Knot<N>> {
        loop {
            if self.steps >= self.ctl.max_steps {
                return Err(Error::StepSizeUnderflow {
                    s: self.knot.t,
                    h: self.h,
                });
            }
            self.steps += 1;
            let remaining = t_limit - self.knot.t;
            let mut h = self.h.min(self.ctl.h_max);
            let landing = h >= remaining;
            if landing {
                h = remaining;
            }
            match dopri_step(
                self.sys,
                self.knot.t,
                &self.knot.y,
                &self.knot.dy,
                h,
                &self.ctl,
            ) {
                Some((y, dy, err)) if err <= 1.0 => {
                    self.domain_rejected = false;
                    let t = if landing { t_limit } else { self.knot.t + h };
                    // Keep the running step size when a landing clipped it.
                    if !landing || h >= self.h {
                        self.h = next_step(h, err);
                    }
                    self.knot = Knot { t, y, dy };
                    return Ok(self.knot);
                }
                Some((_, _, err)) => {
                    self.domain_rejected = false;
                    self.h = next_step(h, err).min(0.5 * h);
                }
                None => {
                    self.domain_rejected = true;
                    self.h = 0.25 * h;
                }
            }
            if self.h < self.ctl.h_min {
                if self.domain_rejected {
                    return Err(Error::DomainExit {
                        s: self.knot.t,
                        u: self.knot.y[0],
                    });
                }
                return Err(Error::StepSizeUnderflow {
                    s: self.knot.t,
                    h: self.h,
                });
            }
        }
    }

    /// Advances exactly to `t` from the current knot using a single sub-step
    /// taken from `from`, without changing the adaptive state.
    pub fn restep_from(&self, from: &Knot<N>, t: f64) -> Result<Knot<N>> {
        let h = t - from.t;
        if h == 0.0 {
            return Ok(*from);
        }
        dopri_step(self.sys, from.t, &from.y, &from.dy, h, &self.ctl)
            .map(|(y, dy, _)| Knot { t, y, dy })
            .ok_or(Error::DomainExit { s: t, u: from.y[0] })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    struct Oscillator;

    impl OdeSystem<2> for Oscillator {
        fn rhs(&self, _t: f64, y: &[f64; 2]) -> Option<[f64; 2]> {
            Some([y[1], -y[0]])
        }
    }

    #[test]
    fn harmonic_oscillator_to_tight_tolerance() {
        let ctl = StepControl::default();
        let mut st = Stepper::new(&Oscillator, 0.0, [1.0, 0.0], ctl).unwrap();
        let end = 10.0;
        while st.knot.t < end {
            st.step(end).unwrap();
        }
        assert_eq!(st.knot.t, end);
        assert_abs_diff_eq!(st.knot.y[0], end.cos(), epsilon = 1e-9);
        assert_abs_diff_eq!(st.knot.y[1], -end.sin(), epsilon = 1e-9);
    }

    #[test]
    fn hermite_reproduces_cubics() {
        let f = |t: f64| t * t * t - 2.0 * t;
        let df = |t: f64| 3.0 * t * t - 2.0;
        let a = Knot {
            t: 0.5,
            y: [f(0.5)],
            dy: [df(0.5)],
        };
        let b = Knot {
            t: 1.25,
            y: [f(1.25)],
            dy: [df(1.25)],
        };
        for t in [0.5, 0.7, 1.0, 1.25] {
            assert_abs_diff_eq!(hermite(&a, &b, t)[0], f(t), epsilon = 1e-14);
        }
    }

    struct Blowup;

    impl OdeSystem<1> for Blowup {
        fn rhs(&self, _t: f64, y: &[f64; 1]) -> Option<[f64; 1]> {
            (y[0] < 10.0).then_some([y[0] * y[0]])
        }
    }

    #[test]
    fn leaving_the_domain_is_reported() {
        let ctl = StepControl::default();
        let mut st = Stepper::new(&Blowup, 0.0, [1.0], ctl).unwrap();
        let mut result = Ok(st.knot);
        while result.is_ok() && st.knot.t < 2.0 {
            result = st.step(2.0);
        }
        assert!(matches!(result, Err(Error::DomainExit { .. })));
    }
}
