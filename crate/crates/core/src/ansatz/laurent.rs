//! Laurent polynomials in `s = sn`, `c = cn`, `d = dn` with complex
//! coefficients, differentiated with respect to `y`.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Exponents of `s^i c^j d^k`.
pub type Monomial = (i32, i32, i32);

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Laurent {
    terms: BTreeMap<Monomial, Complex64>,
}

impl Laurent {
    pub fn zero() -> Self {
        Laurent::default()
    }

    pub fn monomial(mono: Monomial, coeff: Complex64) -> Self {
        let mut l = Laurent::zero();
        l.add_term(mono, coeff);
        l
    }

    pub fn constant(c: Complex64) -> Self {
        Laurent::monomial((0, 0, 0), c)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Complex64)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, mono: Monomial, coeff: Complex64) {
        if coeff == Complex64::new(0.0, 0.0) {
            return;
        }
        *self.terms.entry(mono).or_default() += coeff;
    }

    pub fn add(&self, other: &Laurent) -> Laurent {
        let mut out = self.clone();
        for (&k, &v) in &other.terms {
            out.add_term(k, v);
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> Laurent {
        let mut out = Laurent::zero();
        for (&k, &v) in &self.terms {
            out.add_term(k, v * c);
        }
        out
    }

    pub fn mul(&self, other: &Laurent) -> Laurent {
        let mut out = Laurent::zero();
        for (&(i1, j1, k1), &a) in &self.terms {
            for (&(i2, j2, k2), &b) in &other.terms {
                out.add_term((i1 + i2, j1 + j2, k1 + k2), a * b);
            }
        }
        out
    }

    pub fn shift(&self, (di, dj, dk): Monomial) -> Laurent {
        Laurent {
            terms: self
                .terms
                .iter()
                .map(|(&(i, j, k), &v)| ((i + di, j + dj, k + dk), v))
                .collect(),
        }
    }

    /// `d/dy` using `s' = c d`, `c' = -s d`, `d' = -m s c`.
    pub fn derivative(&self, m: f64) -> Laurent {
        let mut out = Laurent::zero();
        for (&(i, j, k), &v) in &self.terms {
            if i != 0 {
                out.add_term((i - 1, j + 1, k + 1), v * i as f64);
            }
            if j != 0 {
                out.add_term((i + 1, j - 1, k + 1), -v * j as f64);
            }
            if k != 0 {
                out.add_term((i + 1, j + 1, k - 1), -v * (m * k as f64));
            }
        }
        out
    }

    /// Componentwise minimum exponent over all terms, capped at 0.
    pub fn min_exponents(&self) -> Monomial {
        self.terms
            .keys()
            .fold((0, 0, 0), |(a, b, c), &(i, j, k)| (a.min(i), b.min(j), c.min(k)))
    }

    /// Rewrite with `c^2 = 1 - s^2` and `d^2 = 1 - m s^2` until every
    /// monomial has `c` and `d` exponents in `{0, 1}`. Requires all
    /// exponents non-negative.
    pub fn reduce(&self, m: f64) -> Result<Laurent> {
        let mut work: Vec<(Monomial, Complex64)> = self.terms.iter().map(|(&k, &v)| (k, v)).collect();
        let mut out = Laurent::zero();
        while let Some(((i, j, k), v)) = work.pop() {
            if i < 0 || j < 0 || k < 0 {
                return Err(Error::Construction(format!(
                    "negative exponent s^{i} c^{j} d^{k} survived clearing"
                )));
            }
            if j >= 2 {
                work.push(((i, j - 2, k), v));
                work.push(((i + 2, j - 2, k), -v));
            } else if k >= 2 {
                work.push(((i, j, k - 2), v));
                work.push(((i + 2, j, k - 2), -v * m));
            } else {
                out.add_term((i, j, k), v);
            }
        }
        Ok(out)
    }

    /// True when every monomial lies in `{s^i} x {1, c, d, c d}` with `i >= 0`.
    pub fn is_reduced(&self) -> bool {
        self.terms
            .keys()
            .all(|&(i, j, k)| i >= 0 && (0..=1).contains(&j) && (0..=1).contains(&k))
    }

    pub fn eval(&self, s: f64, c: f64, d: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|(&(i, j, k), &v)| v * s.powi(i) * c.powi(j) * d.powi(k))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::{eval_jacobi, EllipticModulus};

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let m = EllipticModulus::new(0.6).unwrap();
        let l = Laurent::monomial((3, 1, -1), one()).add(&Laurent::monomial((-1, 2, 0), one() * 0.5));
        let dl = l.derivative(m.value());
        let y = 0.9;
        let h = 1e-5;
        let f = |y: f64| {
            let p = eval_jacobi(y, m).unwrap();
            l.eval(p.sn, p.cn, p.dn)
        };
        let p = eval_jacobi(y, m).unwrap();
        let fd = (f(y + h) - f(y - h)) / (2.0 * h);
        assert!((dl.eval(p.sn, p.cn, p.dn) - fd).norm() < 1e-8);
    }

    #[test]
    fn reduction_preserves_values_and_closes() {
        let m = EllipticModulus::new(0.3).unwrap();
        let l = Laurent::monomial((1, 4, 3), one()).add(&Laurent::monomial((0, 2, 2), one() * 2.0));
        let r = l.reduce(m.value()).unwrap();
        assert!(r.is_reduced());
        let p = eval_jacobi(0.77, m).unwrap();
        assert!((r.eval(p.sn, p.cn, p.dn) - l.eval(p.sn, p.cn, p.dn)).norm() < 1e-14);
    }

    #[test]
    fn reduction_rejects_uncleared_terms() {
        let l = Laurent::monomial((-1, 0, 0), one());
        assert!(matches!(l.reduce(0.5), Err(Error::Construction(_))));
    }
}
