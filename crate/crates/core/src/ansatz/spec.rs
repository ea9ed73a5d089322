use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::laurent::{Laurent, Monomial};
use crate::elliptic::EllipticModulus;
use crate::error::{Error, Result};
use crate::gal::GalParams;

/// Which strength carries the half-odd-integral value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Case {
    /// Case 1: `b` half-integral, prefactor `[cn + i sn]^t`.
    BHalf,
    /// Case 2: `f` half-integral, prefactor `[dn + i k sn]^t`.
    FHalf,
    /// Case 3: `g` half-integral, prefactor `[dn + k cn]^t`.
    GHalf,
}

impl Case {
    pub const ALL: [Case; 3] = [Case::BHalf, Case::FHalf, Case::GHalf];

    pub fn number(self) -> u8 {
        match self {
            Case::BHalf => 1,
            Case::FHalf => 2,
            Case::GHalf => 3,
        }
    }

    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            1 => Ok(Case::BHalf),
            2 => Ok(Case::FHalf),
            3 => Ok(Case::GHalf),
            _ => Err(Error::InvalidSpec(format!("case must be 1, 2 or 3, got {n}"))),
        }
    }
}

/// `b + f + g = 2M + 1/2` or `2M + 3/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Half,
    ThreeHalf,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnsatzSpec {
    pub case: Case,
    pub t: f64,
    pub m: EllipticModulus,
    /// Sum of the two integral strengths.
    pub n: u32,
    pub p: u32,
    /// The half-odd-integral strength.
    pub half: Rational64,
    pub b: Rational64,
    pub f: Rational64,
    pub g: Rational64,
    pub big_m: u32,
    pub parity: Parity,
}

impl AnsatzSpec {
    /// Case 1: `b = half, g = p, f = N - p`; Case 2: `f = half, g = p,
    /// b = N - p`; Case 3: `g = half, b = p, f = N - p`. Always `a = t - 1/2`.
    pub fn new(case: Case, half: Rational64, n: u32, p: u32, t: f64, m: EllipticModulus) -> Result<Self> {
        if *half.denom() != 2 || !half.is_positive() {
            return Err(Error::InvalidSpec(format!(
                "half-integral strength must be a positive half-odd integer, got {half}"
            )));
        }
        if p > n {
            return Err(Error::InvalidSpec(format!("p = {p} exceeds N = {n}")));
        }
        if !t.is_finite() {
            return Err(Error::InvalidSpec(format!("t = {t} is not finite")));
        }
        let pr = Rational64::from_integer(p as i64);
        let rest = Rational64::from_integer((n - p) as i64);
        let (b, f, g) = match case {
            Case::BHalf => (half, rest, pr),
            Case::FHalf => (rest, half, pr),
            Case::GHalf => (pr, rest, half),
        };
        let sigma = b + f + g;
        // sigma = 2M + 1/2 or 2M + 3/2
        let twice = (sigma * 2).to_integer();
        let (big_m, parity) = match (twice - 1).rem_euclid(4) {
            0 => (((twice - 1) / 4) as u32, Parity::Half),
            _ => (((twice - 3) / 4) as u32, Parity::ThreeHalf),
        };
        Ok(AnsatzSpec {
            case,
            t,
            m,
            n,
            p,
            half,
            b,
            f,
            g,
            big_m,
            parity,
        })
    }

    pub fn strength_sum(&self) -> Rational64 {
        self.b + self.f + self.g
    }

    pub fn gal(&self) -> GalParams {
        GalParams::new(self.t - 0.5, to_f64(self.b), to_f64(self.f), to_f64(self.g), self.m)
    }

    pub fn with_t(&self, t: f64) -> Self {
        AnsatzSpec { t, ..*self }
    }

    pub fn unknowns(&self) -> usize {
        let m = self.big_m as usize;
        match self.parity {
            Parity::Half => 2 * m + 1,
            Parity::ThreeHalf => 2 * m + 2,
        }
    }

    /// Number of `A` coefficients; the rest are `B`.
    pub fn a_len(&self) -> usize {
        self.big_m as usize + 1
    }

    /// Monomials spanning `Z`: the `A` block followed by the `B` block.
    pub fn basis(&self) -> Vec<Monomial> {
        let mm = self.big_m as i32;
        // (A factor, B factor) as s^i c^j d^k
        let (fa, fb): (Monomial, Monomial) = match (self.case, self.parity) {
            (Case::BHalf, Parity::Half) => ((0, 0, 0), (1, 1, 0)),
            (Case::FHalf, Parity::Half) => ((0, 0, 0), (1, 0, 1)),
            (Case::GHalf, Parity::Half) => ((0, 0, 0), (0, 1, 1)),
            (Case::BHalf, Parity::ThreeHalf) => ((0, 1, 0), (1, 0, 0)),
            (Case::FHalf, Parity::ThreeHalf) => ((0, 0, 1), (1, 0, 0)),
            (Case::GHalf, Parity::ThreeHalf) => ((0, 1, 0), (0, 0, 1)),
        };
        let nb = match self.parity {
            Parity::Half => mm,
            Parity::ThreeHalf => mm + 1,
        };
        let a = (0..=mm).map(|j| (fa.0 + 2 * j, fa.1, fa.2));
        let b = (0..nb).map(|j| (fb.0 + 2 * j, fb.1, fb.2));
        a.chain(b).collect()
    }

    /// Logarithmic derivative `P'/P` of the prefactor as a Laurent polynomial.
    pub(crate) fn log_derivative(&self) -> Laurent {
        let t = self.t;
        let k = self.m.k();
        match self.case {
            Case::BHalf => Laurent::monomial((0, 0, 1), Complex64::new(0.0, t)),
            Case::FHalf => Laurent::monomial((0, 1, 0), Complex64::new(0.0, k * t)),
            Case::GHalf => Laurent::monomial((1, 0, 0), Complex64::new(-k * t, 0.0)),
        }
    }

    pub fn label(&self) -> String {
        format!(
            "case{} half={} N={} p={} t={} m={}",
            self.case.number(),
            self.half,
            self.n,
            self.p,
            self.t,
            self.m.value()
        )
    }
}

pub(crate) fn to_f64(r: Rational64) -> f64 {
    if r.is_zero() {
        0.0
    } else {
        r.to_f64().unwrap_or(f64::NAN)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(case: Case, half: (i64, i64), n: u32, p: u32) -> AnsatzSpec {
        AnsatzSpec::new(
            case,
            Rational64::new(half.0, half.1),
            n,
            p,
            0.37,
            EllipticModulus::new(0.5).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn parity_and_m_follow_strength_sum() {
        let s = spec(Case::BHalf, (1, 2), 0, 0);
        assert_eq!((s.big_m, s.parity, s.unknowns()), (0, Parity::Half, 1));
        let s = spec(Case::BHalf, (1, 2), 1, 0);
        assert_eq!((s.big_m, s.parity, s.unknowns()), (0, Parity::ThreeHalf, 2));
        let s = spec(Case::BHalf, (3, 2), 1, 1);
        assert_eq!((s.big_m, s.parity, s.unknowns()), (1, Parity::Half, 3));
        let s = spec(Case::GHalf, (3, 2), 4, 2);
        assert_eq!((s.big_m, s.parity), (2, Parity::ThreeHalf));
    }

    #[test]
    fn strengths_follow_case_assignment() {
        let s = spec(Case::FHalf, (1, 2), 3, 1);
        assert_eq!(
            (s.b, s.f, s.g),
            (Rational64::from(2), Rational64::new(1, 2), Rational64::from(1))
        );
        let s = spec(Case::GHalf, (1, 2), 3, 1);
        assert_eq!(
            (s.b, s.f, s.g),
            (Rational64::from(1), Rational64::from(2), Rational64::new(1, 2))
        );
    }

    #[test]
    fn gates() {
        let m = EllipticModulus::new(0.5).unwrap();
        assert!(AnsatzSpec::new(Case::BHalf, Rational64::from(1), 1, 0, 0.3, m).is_err());
        assert!(AnsatzSpec::new(Case::BHalf, Rational64::new(1, 2), 1, 3, 0.3, m).is_err());
        assert!(AnsatzSpec::new(Case::BHalf, Rational64::new(1, 2), 1, 0, f64::NAN, m).is_err());
        assert!(AnsatzSpec::new(Case::BHalf, Rational64::new(-1, 2), 1, 0, 0.3, m).is_err());
    }

    #[test]
    fn basis_sizes() {
        for case in Case::ALL {
            for n in 0..5 {
                for half in [(1, 2), (3, 2), (5, 2)] {
                    let s = spec(case, half, n, 0);
                    assert_eq!(s.basis().len(), s.unknowns());
                }
            }
        }
    }
}
