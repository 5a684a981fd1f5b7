//! Second-order forward-mode jets: a value with its first two derivatives
//! along one parameter.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet2 {
    pub const fn new(v: f64, d1: f64, d2: f64) -> Self {
        Self { v, d1, d2 }
    }

    pub const fn constant(v: f64) -> Self {
        Self::new(v, 0.0, 0.0)
    }

    /// Chain rule through a scalar function with derivatives `(f, f', f'')` at `self.v`.
    #[inline]
    fn compose(self, f: f64, df: f64, d2f: f64) -> Self {
        Self::new(f, df * self.d1, d2f * self.d1 * self.d1 + df * self.d2)
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.compose(s, c, -s)
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.compose(c, -s, -c)
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        self.compose(e, e, e)
    }

    pub fn sqrt(self) -> Self {
        let r = self.v.sqrt();
        self.compose(r, 0.5 / r, -0.25 / (r * self.v))
    }

    pub fn recip(self) -> Self {
        let r = 1.0 / self.v;
        self.compose(r, -r * r, 2.0 * r * r * r)
    }

    pub fn scale(self, c: f64) -> Self {
        Self::new(c * self.v, c * self.d1, c * self.d2)
    }

    /// Derivative along the parameter, valid to first order only.
    pub fn derivative(self) -> Self {
        Self::new(self.d1, self.d2, f64::NAN)
    }
}

impl Add for Jet2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.v + o.v, self.d1 + o.d1, self.d2 + o.d2)
    }
}

impl Sub for Jet2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.v - o.v, self.d1 - o.d1, self.d2 - o.d2)
    }
}

impl Neg for Jet2 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.v, -self.d1, -self.d2)
    }
}

impl Mul for Jet2 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.v * o.v,
            self.d1 * o.v + self.v * o.d1,
            self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
        )
    }
}

impl Div for Jet2 {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

impl Add<f64> for Jet2 {
    type Output = Self;
    fn add(self, c: f64) -> Self {
        Self::new(self.v + c, self.d1, self.d2)
    }
}

impl Mul<f64> for Jet2 {
    type Output = Self;
    fn mul(self, c: f64) -> Self {
        self.scale(c)
    }
}
