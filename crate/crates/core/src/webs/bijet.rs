//! Bivariate jets: second order ([`Jet2`]) and first order ([`Dual2`]).

use crate::expr::Jet3;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Value, gradient and Hessian of a function of `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet2 {
    pub v: f64,
    pub x: f64,
    pub y: f64,
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl Jet2 {
    pub const fn constant(v: f64) -> Self {
        Self { v, x: 0.0, y: 0.0, xx: 0.0, xy: 0.0, yy: 0.0 }
    }

    pub const fn var_x(x: f64) -> Self {
        Self { v: x, x: 1.0, y: 0.0, xx: 0.0, xy: 0.0, yy: 0.0 }
    }

    pub const fn var_y(y: f64) -> Self {
        Self { v: y, x: 0.0, y: 1.0, xx: 0.0, xy: 0.0, yy: 0.0 }
    }

    /// Lifts a function of `x` alone.
    pub fn of_x(j: Jet3) -> Self {
        Self { v: j.value, x: j.d1, y: 0.0, xx: j.d2, xy: 0.0, yy: 0.0 }
    }

    /// Lifts a function of `y` alone.
    pub fn of_y(j: Jet3) -> Self {
        Self { v: j.value, x: 0.0, y: j.d1, xx: 0.0, xy: 0.0, yy: j.d2 }
    }

    pub fn is_finite(&self) -> bool {
        [self.v, self.x, self.y, self.xx, self.xy, self.yy].iter().all(|c| c.is_finite())
    }

    pub fn chain(self, f0: f64, f1: f64, f2: f64) -> Self {
        Self {
            v: f0,
            x: f1 * self.x,
            y: f1 * self.y,
            xx: f2 * self.x * self.x + f1 * self.xx,
            xy: f2 * self.x * self.y + f1 * self.xy,
            yy: f2 * self.y * self.y + f1 * self.yy,
        }
    }

    pub fn scale(self, k: f64) -> Self {
        Self { v: k * self.v, x: k * self.x, y: k * self.y, xx: k * self.xx, xy: k * self.xy, yy: k * self.yy }
    }

    pub fn recip(self) -> Self {
        let r = 1.0 / self.v;
        self.chain(r, -r * r, 2.0 * r * r * r)
    }

    pub fn ln(self) -> Self {
        let r = 1.0 / self.v;
        self.chain(self.v.ln(), r, -r * r)
    }

    pub fn atan(self) -> Self {
        let w = 1.0 / (1.0 + self.v * self.v);
        self.chain(self.v.atan(), w, -2.0 * self.v * w * w)
    }

    pub fn tan(self) -> Self {
        let t = self.v.tan();
        let s = 1.0 + t * t;
        self.chain(t, s, 2.0 * t * s)
    }

    /// Gradient part only.
    pub fn grad(self) -> Dual2 {
        Dual2 { v: self.v, x: self.x, y: self.y }
    }

    /// First-order jet of `∂f/∂x`.
    pub fn d_x(self) -> Dual2 {
        Dual2 { v: self.x, x: self.xx, y: self.xy }
    }

    /// First-order jet of `∂f/∂y`.
    pub fn d_y(self) -> Dual2 {
        Dual2 { v: self.y, x: self.xy, y: self.yy }
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, o: Jet2) -> Jet2 {
        Jet2 {
            v: self.v + o.v,
            x: self.x + o.x,
            y: self.y + o.y,
            xx: self.xx + o.xx,
            xy: self.xy + o.xy,
            yy: self.yy + o.yy,
        }
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, o: Jet2) -> Jet2 {
        self + (-o)
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, o: Jet2) -> Jet2 {
        Jet2 {
            v: self.v * o.v,
            x: self.x * o.v + self.v * o.x,
            y: self.y * o.v + self.v * o.y,
            xx: self.xx * o.v + 2.0 * self.x * o.x + self.v * o.xx,
            xy: self.xy * o.v + self.x * o.y + self.y * o.x + self.v * o.xy,
            yy: self.yy * o.v + 2.0 * self.y * o.y + self.v * o.yy,
        }
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet2) -> Jet2 {
        self * o.recip()
    }
}

/// First-order bivariate dual number.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dual2 {
    pub v: f64,
    pub x: f64,
    pub y: f64,
}

impl Add for Dual2 {
    type Output = Dual2;
    fn add(self, o: Dual2) -> Dual2 {
        Dual2 { v: self.v + o.v, x: self.x + o.x, y: self.y + o.y }
    }
}

impl Sub for Dual2 {
    type Output = Dual2;
    fn sub(self, o: Dual2) -> Dual2 {
        Dual2 { v: self.v - o.v, x: self.x - o.x, y: self.y - o.y }
    }
}

impl Neg for Dual2 {
    type Output = Dual2;
    fn neg(self) -> Dual2 {
        Dual2 { v: -self.v, x: -self.x, y: -self.y }
    }
}

impl Mul for Dual2 {
    type Output = Dual2;
    fn mul(self, o: Dual2) -> Dual2 {
        Dual2 { v: self.v * o.v, x: self.x * o.v + self.v * o.x, y: self.y * o.v + self.v * o.y }
    }
}

impl Div for Dual2 {
    type Output = Dual2;
    fn div(self, o: Dual2) -> Dual2 {
        let r = 1.0 / o.v;
        let q = self.v * r;
        Dual2 { v: q, x: (self.x - q * o.x) * r, y: (self.y - q * o.y) * r }
    }
}

/// Arithmetic shared by `f64` and [`Dual2`], so that one formula gives both
/// values and first derivatives.
pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    fn c(x: f64) -> Self;
}

impl Scalar for f64 {
    fn c(x: f64) -> Self {
        x
    }
}

impl Scalar for Dual2 {
    fn c(x: f64) -> Self {
        Dual2 { v: x, x: 0.0, y: 0.0 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_hessian() {
        // f = x^2 y at (2, 3): grad (12, 4), hessian [[6, 4], [4, 0]]
        let x = Jet2::var_x(2.0);
        let y = Jet2::var_y(3.0);
        let f = x * x * y;
        assert_eq!((f.v, f.x, f.y, f.xx, f.xy, f.yy), (12.0, 12.0, 4.0, 6.0, 4.0, 0.0));
    }

    #[test]
    fn atan_of_ratio() {
        // atan(y/x) is harmonic
        let f = (Jet2::var_y(0.4) / Jet2::var_x(1.3)).atan();
        assert!((f.xx + f.yy).abs() < 1e-15);
    }

    #[test]
    fn dual_quotient() {
        let a = Dual2 { v: 3.0, x: 1.0, y: 0.0 };
        let b = Dual2 { v: 2.0, x: 0.0, y: 1.0 };
        let q = a / b;
        assert_eq!((q.v, q.x, q.y), (1.5, 0.5, -0.75));
    }
}
