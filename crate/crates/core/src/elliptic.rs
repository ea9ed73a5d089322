//! Jacobi elliptic functions on the real line, complete elliptic integrals of
//! the first kind, and the unimodular phase factors used by the ansatz.
//!
//! Everything here uses the parameter convention `m = k^2`. The amplitude
//! `am(y, m)` is computed by the descending Landen / arithmetic-geometric mean
//! scheme after reducing `y` modulo `2K`, so `sn = sin am`, `cn = cos am` and
//! `dn = sqrt(1 - m sn^2)`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::Jet;

const AGM_TOL: f64 = 1e-16;
const AGM_MAX_ITER: usize = 64;

/// The elliptic parameter `m`, strictly inside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct EllipticModulus(f64);

impl EllipticModulus {
    pub fn new(m: f64) -> Result<Self> {
        if !m.is_finite() || m <= 0.0 || m >= 1.0 {
            return Err(Error::domain(format!(
                "elliptic parameter m = {m} must lie strictly inside (0, 1)"
            )));
        }
        Ok(EllipticModulus(m))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// `k = sqrt(m)`.
    #[inline]
    pub fn k(self) -> f64 {
        self.0.sqrt()
    }

    /// `k' = sqrt(1 - m)`.
    #[inline]
    pub fn k_prime(self) -> f64 {
        (1.0 - self.0).sqrt()
    }

    pub fn complement(self) -> Self {
        EllipticModulus(1.0 - self.0)
    }
}

impl TryFrom<f64> for EllipticModulus {
    type Error = Error;
    fn try_from(m: f64) -> Result<Self> {
        EllipticModulus::new(m)
    }
}

impl From<EllipticModulus> for f64 {
    fn from(m: EllipticModulus) -> f64 {
        m.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipticPoint {
    pub y: f64,
    pub m: EllipticModulus,
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
    /// Jacobi amplitude, continuous in `y` with `am(0) = 0`.
    pub am: f64,
}

/// Real and imaginary quarter periods `K(m)` and `K'(m) = K(1 - m)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuarterPeriods {
    pub k: f64,
    pub k_prime: f64,
}

/// Arithmetic-geometric mean of two positive numbers.
pub fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..AGM_MAX_ITER {
        if (a - b).abs() <= AGM_TOL * a {
            break;
        }
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    0.5 * (a + b)
}

/// `K(m)` for `m` in `[0, 1)`; `m = 0` gives `pi/2`.
pub(crate) fn complete_k(m: f64) -> f64 {
    FRAC_PI_2 / agm(1.0, (1.0 - m).sqrt())
}

pub fn quarter_periods(m: EllipticModulus) -> QuarterPeriods {
    QuarterPeriods {
        k: complete_k(m.value()),
        k_prime: complete_k(1.0 - m.value()),
    }
}

/// Amplitude for `|u| <= K` via the descending Landen sequence.
fn amplitude_reduced(u: f64, m: f64) -> f64 {
    let mut a = [0.0f64; AGM_MAX_ITER + 1];
    let mut c = [0.0f64; AGM_MAX_ITER + 1];
    a[0] = 1.0;
    c[0] = m.sqrt();
    let mut b = (1.0 - m).sqrt();
    let mut n = 0;
    while c[n].abs() > AGM_TOL && n < AGM_MAX_ITER {
        a[n + 1] = 0.5 * (a[n] + b);
        c[n + 1] = 0.5 * (a[n] - b);
        b = (a[n] * b).sqrt();
        n += 1;
    }
    let mut phi = (1u64 << n) as f64 * a[n] * u;
    for j in (1..=n).rev() {
        phi = 0.5 * (phi + (c[j] / a[j] * phi.sin()).asin());
    }
    phi
}

/// Jacobi amplitude `am(y, m)`, using `am(y + 2K) = am(y) + pi`.
pub fn amplitude(y: f64, m: EllipticModulus) -> f64 {
    let two_k = 2.0 * complete_k(m.value());
    let j = (y / two_k).round();
    let r = y - j * two_k;
    j * PI + amplitude_reduced(r, m.value())
}

pub fn eval_jacobi(y: f64, m: EllipticModulus) -> Result<EllipticPoint> {
    if !y.is_finite() {
        return Err(Error::domain(format!("argument y = {y} is not finite")));
    }
    let am = amplitude(y, m);
    let (sn, cn) = am.sin_cos();
    let dn = (1.0 - m.value() * sn * sn).sqrt();
    Ok(EllipticPoint { y, m, sn, cn, dn, am })
}

/// Inverse of `sn` on `[0, K]`: returns `y` with `sn(y, m) = s`.
pub fn inverse_sn(s: f64, m: EllipticModulus) -> Result<f64> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::domain(format!("sn value {s} outside [0, 1]")));
    }
    let kq = complete_k(m.value());
    let (mut lo, mut hi) = (0.0, kq);
    let mut y = s.asin().min(kq);
    for _ in 0..100 {
        let p = eval_jacobi(y, m)?;
        let f = p.sn - s;
        if f > 0.0 {
            hi = y;
        } else {
            lo = y;
        }
        let slope = p.cn * p.dn;
        let mut next = if slope > 1e-300 { y - f / slope } else { 0.5 * (lo + hi) };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - y).abs() <= 1e-16 * kq {
            return Ok(next);
        }
        y = next;
    }
    Ok(y)
}

/// `[cn + i sn]^t = exp(i t am(y))`; the amplitude is the continuous
/// argument of `cn + i sn` along the real line.
pub fn phase_power_case1(y: f64, m: EllipticModulus, t: f64) -> Result<Complex64> {
    let p = eval_jacobi(y, m)?;
    Ok(Complex64::from_polar(1.0, t * p.am))
}

/// `[dn + i sqrt(m) sn]^t`. The base has positive real part on the real line
/// so its principal argument is already continuous.
pub fn phase_power_case2(y: f64, m: EllipticModulus, t: f64) -> Result<Complex64> {
    let p = eval_jacobi(y, m)?;
    Ok(Complex64::from_polar(1.0, t * case2_angle(&p)))
}

/// `[dn + sqrt(m) cn]^t`, a positive real power since `dn > sqrt(m) |cn|`.
pub fn phase_power_case3(y: f64, m: EllipticModulus, t: f64) -> Result<f64> {
    let p = eval_jacobi(y, m)?;
    Ok((p.dn + m.k() * p.cn).powf(t))
}

pub(crate) fn case2_angle(p: &EllipticPoint) -> f64 {
    (p.m.k() * p.sn).atan2(p.dn)
}

/// Quarter-period translations of the argument, realised through the
/// addition identities so that only real-argument values are ever computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum QuarterShift {
    None,
    K,
    IKPrime,
    KIKPrime,
}

/// Half-period translations; these act on `(sn, cn, dn)` by signs only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HalfPeriod {
    /// `y -> y + 2K`: `(sn, cn, dn) -> (-sn, -cn, dn)`.
    TwoK,
    /// `y -> y + 2iK'`: `(sn, cn, dn) -> (sn, -cn, -dn)`.
    TwoIKPrime,
    /// `y -> y + 2K + 2iK'`: `(sn, cn, dn) -> (-sn, cn, -dn)`.
    TwoKTwoIKPrime,
}

/// Jets of `sn`, `cn`, `dn` (possibly at a shifted argument) as functions
/// of the real variable `y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triple {
    pub sn: Jet,
    pub cn: Jet,
    pub dn: Jet,
}

impl Triple {
    pub fn at(p: &EllipticPoint) -> Self {
        let m = p.m.value();
        let (s, c, d) = (p.sn, p.cn, p.dn);
        Triple {
            sn: Jet::real(s, c * d, -s * d * d - m * s * c * c),
            cn: Jet::real(c, -s * d, -c * d * d + m * s * s * c),
            dn: Jet::real(d, -m * s * c, -m * d * (c * c - s * s)),
        }
    }

    pub fn shifted(self, shift: QuarterShift, m: EllipticModulus) -> Self {
        let k = Complex64::new(m.k(), 0.0);
        let kp = Complex64::new(m.k_prime(), 0.0);
        let i = Complex64::i();
        let (s, c, d) = (self.sn, self.cn, self.dn);
        match shift {
            QuarterShift::None => self,
            QuarterShift::K => {
                let inv_d = d.recip();
                Triple {
                    sn: c * inv_d,
                    cn: -(s * inv_d * kp),
                    dn: inv_d * kp,
                }
            }
            QuarterShift::IKPrime => {
                let inv_s = s.recip();
                Triple {
                    sn: inv_s * k.inv(),
                    cn: d * inv_s * (-i / k),
                    dn: c * inv_s * (-i),
                }
            }
            QuarterShift::KIKPrime => {
                let inv_c = c.recip();
                Triple {
                    sn: d * inv_c * k.inv(),
                    cn: inv_c * (-i * kp / k),
                    dn: s * inv_c * (i * kp),
                }
            }
        }
    }

    pub fn half_period(self, h: HalfPeriod) -> Self {
        match h {
            HalfPeriod::TwoK => Triple {
                sn: -self.sn,
                cn: -self.cn,
                dn: self.dn,
            },
            HalfPeriod::TwoIKPrime => Triple {
                sn: self.sn,
                cn: -self.cn,
                dn: -self.dn,
            },
            HalfPeriod::TwoKTwoIKPrime => Triple {
                sn: -self.sn,
                cn: self.cn,
                dn: -self.dn,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn m(v: f64) -> EllipticModulus {
        EllipticModulus::new(v).unwrap()
    }

    #[test]
    fn rejects_degenerate_parameters() {
        for bad in [0.0, 1.0, -0.2, 1.5, f64::NAN] {
            assert!(EllipticModulus::new(bad).is_err());
        }
        assert!(eval_jacobi(f64::INFINITY, m(0.5)).is_err());
    }

    #[test]
    fn origin_and_quarter_period_values() {
        let p = eval_jacobi(0.0, m(0.5)).unwrap();
        assert_eq!((p.sn, p.cn, p.dn), (0.0, 1.0, 1.0));
        let kq = quarter_periods(m(0.5)).k;
        let q = eval_jacobi(kq, m(0.5)).unwrap();
        assert_relative_eq!(q.sn, 1.0, epsilon = 1e-14);
        assert!(q.cn.abs() < 1e-14);
        assert_relative_eq!(q.dn, 0.5f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn self_dual_point() {
        let qp = quarter_periods(m(0.5));
        assert_relative_eq!(qp.k, qp.k_prime, epsilon = 1e-15);
    }

    #[test]
    fn circular_limit() {
        assert_relative_eq!(complete_k(0.0), FRAC_PI_2, epsilon = 1e-15);
        assert_relative_eq!(complete_k(1e-12), FRAC_PI_2, epsilon = 1e-11);
    }

    #[test]
    fn amplitude_advances_by_pi_per_half_period() {
        let mm = m(0.75);
        let two_k = 2.0 * quarter_periods(mm).k;
        for y in [-3.0, -0.4, 0.0, 0.9, 2.2, 7.5] {
            let d = amplitude(y + two_k, mm) - amplitude(y, mm);
            assert_relative_eq!(d, PI, epsilon = 1e-13);
        }
    }

    #[test]
    fn inverse_sn_round_trip() {
        let mm = m(0.36);
        for s in [0.0, 0.1, 0.5, 0.9, 0.999] {
            let y = inverse_sn(s, mm).unwrap();
            assert_relative_eq!(eval_jacobi(y, mm).unwrap().sn, s, epsilon = 1e-14);
        }
    }

    #[test]
    fn triple_jets_match_defining_derivatives() {
        let mm = m(0.6);
        let p = eval_jacobi(0.83, mm).unwrap();
        let tr = Triple::at(&p);
        let h = 1e-5;
        let lo = Triple::at(&eval_jacobi(0.83 - h, mm).unwrap());
        let hi = Triple::at(&eval_jacobi(0.83 + h, mm).unwrap());
        for (j, jl, jh) in [(tr.sn, lo.sn, hi.sn), (tr.cn, lo.cn, hi.cn), (tr.dn, lo.dn, hi.dn)] {
            assert!(((jh.v - jl.v) / (2.0 * h) - j.d1).norm() < 1e-9);
            assert!(((jh.d1 - jl.d1) / (2.0 * h) - j.d2).norm() < 1e-9);
        }
    }
}
