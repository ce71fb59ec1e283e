//! Second-order jets in two chart variables.
//!
//! A [`Jet2`] carries a value together with its first and second partial
//! derivatives with respect to the chart coordinates `(u, v)`. Arithmetic and
//! the elementary functions propagate derivatives by the product and chain
//! rules, so closed-form maps evaluated on jets return exact derivatives up to
//! rounding.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Scalar type a closed-form map can be evaluated on: plain `f64` or [`Jet2`].
pub trait Real:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn cst(v: f64) -> Self;
    fn value(&self) -> f64;
    fn sqrt(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;
    fn tanh(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn atan(self) -> Self;
    fn atanh(self) -> Self;

    fn recip(self) -> Self {
        Self::cst(1.0) / self
    }

    fn square(self) -> Self {
        self * self
    }
}

impl Real for f64 {
    fn cst(v: f64) -> Self {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn sinh(self) -> Self {
        f64::sinh(self)
    }
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
    fn tanh(self) -> Self {
        f64::tanh(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn atan(self) -> Self {
        f64::atan(self)
    }
    fn atanh(self) -> Self {
        f64::atanh(self)
    }
}

/// Value, gradient and Hessian of a scalar function of two chart variables.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet2 {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
    pub d11: f64,
    pub d12: f64,
    pub d22: f64,
}

impl Jet2 {
    pub fn constant(v: f64) -> Self {
        Self {
            v,
            ..Self::default()
        }
    }

    /// The first chart coordinate, seeded at `v`.
    pub fn var1(v: f64) -> Self {
        Self {
            v,
            d1: 1.0,
            ..Self::default()
        }
    }

    /// The second chart coordinate, seeded at `v`.
    pub fn var2(v: f64) -> Self {
        Self {
            v,
            d2: 1.0,
            ..Self::default()
        }
    }

    /// Applies a scalar function given its value and first two derivatives.
    #[inline]
    fn chain(self, f: f64, df: f64, ddf: f64) -> Self {
        Self {
            v: f,
            d1: df * self.d1,
            d2: df * self.d2,
            d11: ddf * self.d1 * self.d1 + df * self.d11,
            d12: ddf * self.d1 * self.d2 + df * self.d12,
            d22: ddf * self.d2 * self.d2 + df * self.d22,
        }
    }
}

impl Add for Jet2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            v: self.v + o.v,
            d1: self.d1 + o.d1,
            d2: self.d2 + o.d2,
            d11: self.d11 + o.d11,
            d12: self.d12 + o.d12,
            d22: self.d22 + o.d22,
        }
    }
}

impl Sub for Jet2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self {
            v: self.v - o.v,
            d1: self.d1 - o.d1,
            d2: self.d2 - o.d2,
            d11: self.d11 - o.d11,
            d12: self.d12 - o.d12,
            d22: self.d22 - o.d22,
        }
    }
}

impl Mul for Jet2 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self {
            v: self.v * o.v,
            d1: self.d1 * o.v + self.v * o.d1,
            d2: self.d2 * o.v + self.v * o.d2,
            d11: self.d11 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d11,
            d12: self.d12 * o.v + self.d1 * o.d2 + self.d2 * o.d1 + self.v * o.d12,
            d22: self.d22 * o.v + 2.0 * self.d2 * o.d2 + self.v * o.d22,
        }
    }
}

impl Div for Jet2 {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let r = 1.0 / o.v;
        self * o.chain(r, -r * r, 2.0 * r * r * r)
    }
}

impl Neg for Jet2 {
    type Output = Self;
    fn neg(self) -> Self {
        self * -1.0
    }
}

impl Add<f64> for Jet2 {
    type Output = Self;
    fn add(mut self, o: f64) -> Self {
        self.v += o;
        self
    }
}

impl Sub<f64> for Jet2 {
    type Output = Self;
    fn sub(mut self, o: f64) -> Self {
        self.v -= o;
        self
    }
}

impl Mul<f64> for Jet2 {
    type Output = Self;
    fn mul(self, o: f64) -> Self {
        Self {
            v: self.v * o,
            d1: self.d1 * o,
            d2: self.d2 * o,
            d11: self.d11 * o,
            d12: self.d12 * o,
            d22: self.d22 * o,
        }
    }
}

impl Div<f64> for Jet2 {
    type Output = Self;
    fn div(self, o: f64) -> Self {
        self * (1.0 / o)
    }
}

impl Real for Jet2 {
    fn cst(v: f64) -> Self {
        Jet2::constant(v)
    }
    fn value(&self) -> f64 {
        self.v
    }
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.v))
    }
    fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }
    fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }
    fn sinh(self) -> Self {
        let (s, c) = (self.v.sinh(), self.v.cosh());
        self.chain(s, c, s)
    }
    fn cosh(self) -> Self {
        let (s, c) = (self.v.sinh(), self.v.cosh());
        self.chain(c, s, c)
    }
    fn tanh(self) -> Self {
        let t = self.v.tanh();
        let sech2 = self.v.cosh().powi(-2);
        self.chain(t, sech2, -2.0 * t * sech2)
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }
    fn ln(self) -> Self {
        let r = 1.0 / self.v;
        self.chain(self.v.ln(), r, -r * r)
    }
    fn atan(self) -> Self {
        let r = 1.0 / (1.0 + self.v * self.v);
        self.chain(self.v.atan(), r, -2.0 * self.v * r * r)
    }
    fn atanh(self) -> Self {
        let r = 1.0 / (1.0 - self.v * self.v);
        self.chain(self.v.atanh(), r, 2.0 * self.v * r * r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(f: impl Fn(f64, f64) -> f64, g: impl Fn(Jet2, Jet2) -> Jet2, u: f64, v: f64) {
        let j = g(Jet2::var1(u), Jet2::var2(v));
        let h = 1e-4;
        let d1 = (f(u + h, v) - f(u - h, v)) / (2.0 * h);
        let d2 = (f(u, v + h) - f(u, v - h)) / (2.0 * h);
        let d11 = (f(u + h, v) - 2.0 * f(u, v) + f(u - h, v)) / (h * h);
        let d22 = (f(u, v + h) - 2.0 * f(u, v) + f(u, v - h)) / (h * h);
        let d12 = (f(u + h, v + h) - f(u + h, v - h) - f(u - h, v + h) + f(u - h, v - h))
            / (4.0 * h * h);
        assert!((j.v - f(u, v)).abs() < 1e-14);
        for (a, b) in [(j.d1, d1), (j.d2, d2), (j.d11, d11), (j.d12, d12), (j.d22, d22)] {
            assert!((a - b).abs() < 1e-6, "jet {a} vs fd {b}");
        }
    }

    #[test]
    fn polynomial_jet() {
        let j = Jet2::var1(2.0) * Jet2::var2(3.0);
        assert_eq!(j.v, 6.0);
        assert_eq!(j.d1, 3.0);
        assert_eq!(j.d2, 2.0);
        assert_eq!(j.d12, 1.0);
        assert_eq!(j.d11, 0.0);
        assert_eq!(j.d22, 0.0);
    }

    #[test]
    fn cosh_second_derivative() {
        for s in [-1.3, 0.0, 0.7, 2.5] {
            let j = Jet2::var1(s).cosh();
            assert!((j.d11 - s.cosh()).abs() < 1e-15 * s.cosh().max(1.0));
        }
    }

    #[test]
    fn elementary_functions_match_central_differences() {
        fd_check(
            |u, v| (u * v).sin() + (u - v).cos() * u.exp(),
            |u, v| (u * v).sin() + (u - v).cos() * u.exp(),
            0.4,
            -0.9,
        );
        fd_check(
            |u, v| (u.sinh() + v.cosh()) / (1.0 + u * u + v * v).sqrt(),
            |u, v| (u.sinh() + v.cosh()) / (u * u + v * v + 1.0).sqrt(),
            0.3,
            1.1,
        );
        fd_check(
            |u, v| (0.5 * u).tanh().atanh() * (u + 2.0 * v).atan() + (2.0 + u * v).ln(),
            |u, v| (u * 0.5).tanh().atanh() * (u + v * 2.0).atan() + (u * v + 2.0).ln(),
            -0.6,
            0.8,
        );
    }
}
