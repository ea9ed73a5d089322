//! Second-order jets: a value together with its first and second derivative
//! with respect to the independent variable.
//!
//! Every closed-form solution in this crate is assembled from jets of
//! `sn`, `cn`, `dn`, so derivatives are exact up to roundoff and no finite
//! differencing is ever needed in the residual evaluators.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

const INTEGER_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub v: Complex64,
    pub d1: Complex64,
    pub d2: Complex64,
}

impl Jet {
    pub const ZERO: Jet = Jet {
        v: Complex64::new(0.0, 0.0),
        d1: Complex64::new(0.0, 0.0),
        d2: Complex64::new(0.0, 0.0),
    };

    pub fn new(v: Complex64, d1: Complex64, d2: Complex64) -> Self {
        Jet { v, d1, d2 }
    }

    pub fn real(v: f64, d1: f64, d2: f64) -> Self {
        Jet::new(v.into(), d1.into(), d2.into())
    }

    pub fn constant(c: Complex64) -> Self {
        Jet::new(c, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
    }

    pub fn scale(self, c: Complex64) -> Self {
        Jet::new(self.v * c, self.d1 * c, self.d2 * c)
    }

    pub fn recip(self) -> Self {
        let u = self.v;
        let inv = u.inv();
        let inv2 = inv * inv;
        Jet::new(inv, -self.d1 * inv2, (self.d1 * self.d1 * 2.0 * inv - self.d2) * inv2)
    }

    pub fn powi(self, n: i32) -> Self {
        match n {
            0 => Jet::constant(Complex64::new(1.0, 0.0)),
            1 => self,
            n if n < 0 => self.powi(-n).recip(),
            n => {
                let u = self.v;
                let nf = n as f64;
                let un2 = u.powi(n - 2);
                let un1 = un2 * u;
                Jet::new(
                    un1 * u,
                    un1 * self.d1 * nf,
                    un2 * self.d1 * self.d1 * (nf * (nf - 1.0)) + un1 * self.d2 * nf,
                )
            }
        }
    }

    /// `self^t` on the principal branch of the logarithm. Integer exponents
    /// are dispatched to [`Jet::powi`] so no branch is involved.
    pub fn powf(self, t: f64) -> Self {
        if let Some(n) = as_integer(t) {
            return self.powi(n);
        }
        let value = self.v.powf(t);
        self.pow_with_value(t, value)
    }

    /// `self^t` where the caller supplies the value of the chosen branch;
    /// derivatives follow from the logarithmic derivative of the base.
    pub fn pow_with_value(self, t: f64, value: Complex64) -> Self {
        let r1 = self.d1 / self.v;
        let r2 = self.d2 / self.v;
        Jet::new(value, value * r1 * t, value * (r1 * r1 * (t * (t - 1.0)) + r2 * t))
    }
}

pub(crate) fn as_integer(x: f64) -> Option<i32> {
    let r = x.round();
    if (x - r).abs() <= INTEGER_SLACK && r.abs() < i32::MAX as f64 {
        Some(r as i32)
    } else {
        None
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet::new(self.v + o.v, self.d1 + o.d1, self.d2 + o.d2)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        Jet::new(self.v - o.v, self.d1 - o.d1, self.d2 - o.d2)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet::new(-self.v, -self.d1, -self.d2)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet::new(
            self.v * o.v,
            self.d1 * o.v + self.v * o.d1,
            self.d2 * o.v + self.d1 * o.d1 * 2.0 + self.v * o.d2,
        )
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}

impl Mul<Complex64> for Jet {
    type Output = Jet;
    fn mul(self, c: Complex64) -> Jet {
        self.scale(c)
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, c: f64) -> Jet {
        Jet::new(self.v * c, self.d1 * c, self.d2 * c)
    }
}

impl Add<Complex64> for Jet {
    type Output = Jet;
    fn add(self, c: Complex64) -> Jet {
        Jet::new(self.v + c, self.d1, self.d2)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, c: f64) -> Jet {
        Jet::new(self.v + c, self.d1, self.d2)
    }
}
