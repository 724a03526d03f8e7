//! Third-order univariate jets.
//!
//! A [`Jet3`] carries a value together with its first three derivatives with
//! respect to a single variable. Arithmetic follows the Leibniz rule and
//! composition with elementary functions uses Faà di Bruno's formula, so the
//! derivatives are exact up to round-off.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Value and derivatives of orders 1 to 3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet3 {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

impl Jet3 {
    pub const fn new(value: f64, d1: f64, d2: f64, d3: f64) -> Self {
        Self { value, d1, d2, d3 }
    }

    pub const fn constant(value: f64) -> Self {
        Self::new(value, 0.0, 0.0, 0.0)
    }

    /// The independent variable evaluated at `x`.
    pub const fn variable(x: f64) -> Self {
        Self::new(x, 1.0, 0.0, 0.0)
    }

    pub fn is_constant(&self) -> bool {
        self.d1 == 0.0 && self.d2 == 0.0 && self.d3 == 0.0
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.d1.is_finite() && self.d2.is_finite() && self.d3.is_finite()
    }

    /// Composes `self` with a scalar function whose value and first three
    /// derivatives at `self.value` are `f0..f3`.
    pub fn chain(self, f0: f64, f1: f64, f2: f64, f3: f64) -> Self {
        let (g1, g2, g3) = (self.d1, self.d2, self.d3);
        Self {
            value: f0,
            d1: f1 * g1,
            d2: f2 * g1 * g1 + f1 * g2,
            d3: f3 * g1 * g1 * g1 + 3.0 * f2 * g1 * g2 + f1 * g3,
        }
    }

    pub fn scale(self, k: f64) -> Self {
        Self::new(k * self.value, k * self.d1, k * self.d2, k * self.d3)
    }

    pub fn recip(self) -> Self {
        let x = self.value;
        let r = 1.0 / x;
        self.chain(r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r)
    }

    pub fn sqr(self) -> Self {
        self * self
    }

    /// Integer power by repeated squaring in jet arithmetic.
    pub fn powi(self, n: i32) -> Self {
        let mut base = if n < 0 { self.recip() } else { self };
        let mut e = n.unsigned_abs();
        let mut acc = Jet3::constant(1.0);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Real power; the caller guarantees a positive base.
    pub fn powf(self, r: f64) -> Self {
        let x = self.value;
        let f0 = x.powf(r);
        let f1 = r * x.powf(r - 1.0);
        let f2 = r * (r - 1.0) * x.powf(r - 2.0);
        let f3 = r * (r - 1.0) * (r - 2.0) * x.powf(r - 3.0);
        self.chain(f0, f1, f2, f3)
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s, -c)
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c, s)
    }

    pub fn tan(self) -> Self {
        let t = self.value.tan();
        let sec2 = 1.0 + t * t;
        self.chain(t, sec2, 2.0 * t * sec2, (2.0 + 6.0 * t * t) * sec2)
    }

    pub fn sinh(self) -> Self {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        self.chain(s, c, s, c)
    }

    pub fn cosh(self) -> Self {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        self.chain(c, s, c, s)
    }

    pub fn tanh(self) -> Self {
        let t = self.value.tanh();
        let sech2 = 1.0 - t * t;
        self.chain(t, sech2, -2.0 * t * sech2, (6.0 * t * t - 2.0) * sech2)
    }

    pub fn exp(self) -> Self {
        let e = self.value.exp();
        self.chain(e, e, e, e)
    }

    pub fn ln(self) -> Self {
        let r = 1.0 / self.value;
        self.chain(self.value.ln(), r, -r * r, 2.0 * r * r * r)
    }

    pub fn sqrt(self) -> Self {
        let s = self.value.sqrt();
        let x = self.value;
        self.chain(s, 0.5 / s, -0.25 / (s * x), 0.375 / (s * x * x))
    }

    pub fn abs(self) -> Self {
        if self.value < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn atan(self) -> Self {
        let x = self.value;
        let w = 1.0 / (1.0 + x * x);
        self.chain(x.atan(), w, -2.0 * x * w * w, (6.0 * x * x - 2.0) * w * w * w)
    }
}

impl Add for Jet3 {
    type Output = Jet3;
    fn add(self, o: Jet3) -> Jet3 {
        Jet3::new(self.value + o.value, self.d1 + o.d1, self.d2 + o.d2, self.d3 + o.d3)
    }
}

impl Sub for Jet3 {
    type Output = Jet3;
    fn sub(self, o: Jet3) -> Jet3 {
        Jet3::new(self.value - o.value, self.d1 - o.d1, self.d2 - o.d2, self.d3 - o.d3)
    }
}

impl Mul for Jet3 {
    type Output = Jet3;
    fn mul(self, o: Jet3) -> Jet3 {
        let (f0, f1, f2, f3) = (self.value, self.d1, self.d2, self.d3);
        let (g0, g1, g2, g3) = (o.value, o.d1, o.d2, o.d3);
        Jet3 {
            value: f0 * g0,
            d1: f1 * g0 + f0 * g1,
            d2: f2 * g0 + 2.0 * f1 * g1 + f0 * g2,
            d3: f3 * g0 + 3.0 * f2 * g1 + 3.0 * f1 * g2 + f0 * g3,
        }
    }
}

impl Div for Jet3 {
    type Output = Jet3;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet3) -> Jet3 {
        self * o.recip()
    }
}

impl Neg for Jet3 {
    type Output = Jet3;
    fn neg(self) -> Jet3 {
        Jet3::new(-self.value, -self.d1, -self.d2, -self.d3)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn constant_has_no_derivatives() {
        let c = Jet3::constant(4.2).sin().exp();
        assert!(c.is_constant());
    }

    #[test]
    fn product_rule_matches_polynomial() {
        // x^2 * x = x^3 at x = 2: (8, 12, 12, 6)
        let x = Jet3::variable(2.0);
        let p = x * x * x;
        assert_eq!(p, Jet3::new(8.0, 12.0, 12.0, 6.0));
        assert_eq!(x.powi(3), p);
    }

    #[test]
    fn negative_integer_power() {
        // x^-2 at x = 2: 1/4, -2/8, 6/16, -24/32
        let p = Jet3::variable(2.0).powi(-2);
        assert!(close(p.value, 0.25, 1e-15));
        assert!(close(p.d1, -0.25, 1e-15));
        assert!(close(p.d2, 0.375, 1e-15));
        assert!(close(p.d3, -0.75, 1e-15));
    }

    #[test]
    fn quotient_rule() {
        // sin(x)/x derivatives against the product of sin and recip
        let x = Jet3::variable(0.7);
        let q = x.sin() / x;
        let r = x.sin() * x.recip();
        assert!(close(q.d3, r.d3, 1e-14));
        // d/dx (sin x / x) = (x cos x - sin x)/x^2
        let expected = (0.7 * 0.7f64.cos() - 0.7f64.sin()) / 0.49;
        assert!(close(q.d1, expected, 1e-14));
    }

    #[test]
    fn atan_derivatives() {
        let x = 0.3;
        let j = Jet3::variable(x).atan();
        let w = 1.0 / (1.0 + x * x);
        assert!(close(j.d1, w, 1e-15));
        assert!(close(j.d2, -2.0 * x * w * w, 1e-15));
    }
}
