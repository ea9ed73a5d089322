//! Heun's equation in canonical form
//!
//! ```text
//! G'' + (gamma/x + delta/(x-1) + epsilon/(x-c)) G' + (alpha beta x - q) / (x (x-1) (x-c)) G = 0
//! ```
//!
//! and in elliptic form after `x = sn^2(y, m)`, `c = 1/m`:
//!
//! ```text
//! F'' + [(1-2 epsilon) m sn cn/dn + (1-2 delta) sn dn/cn + (2 gamma-1) cn dn/sn] F'
//!     - [4 m q - 4 alpha beta m sn^2] F = 0.
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elliptic::{eval_jacobi, quarter_periods, EllipticModulus, EllipticPoint};
use crate::error::{Error, Result};
use crate::grid::Residual;
use crate::jet::{as_integer, Jet};

/// Tolerance on `gamma + delta + epsilon = alpha + beta + 1` for float input.
pub const CONSTRAINT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeunParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub epsilon: f64,
    /// Accessory parameter; complex when the underlying energy is.
    pub q: Complex64,
    pub c: f64,
}

impl HeunParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64, epsilon: f64, q: Complex64, c: f64) -> Result<Self> {
        let p = HeunParams {
            alpha,
            beta,
            gamma,
            delta,
            epsilon,
            q,
            c,
        };
        let defect = p.constraint_defect();
        let scale = 1.0 + alpha.abs() + beta.abs();
        if defect.abs() > CONSTRAINT_TOL * scale {
            return Err(Error::Constraint(format!(
                "gamma + delta + epsilon - alpha - beta - 1 = {defect:e}"
            )));
        }
        if !c.is_finite() || c == 0.0 || c == 1.0 {
            return Err(Error::Constraint(format!("singular point c = {c} must avoid 0 and 1")));
        }
        Ok(p)
    }

    pub fn constraint_defect(&self) -> f64 {
        self.gamma + self.delta + self.epsilon - self.alpha - self.beta - 1.0
    }

    /// `m = 1/c`.
    pub fn m(&self) -> f64 {
        1.0 / self.c
    }

    pub fn four_mq(&self) -> Complex64 {
        self.q * 4.0 / self.c
    }

    pub fn four_alpha_beta(&self) -> f64 {
        4.0 * self.alpha * self.beta
    }
}

/// A candidate solution and its first two derivatives at a point `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalPoint {
    pub x: f64,
    pub g: Complex64,
    pub g1: Complex64,
    pub g2: Complex64,
}

pub fn residual_canonical(p: &HeunParams, pt: &CanonicalPoint, exclusion: f64) -> Result<Residual> {
    let x = pt.x;
    for pole in [0.0, 1.0, p.c] {
        if (x - pole).abs() < exclusion {
            return Err(Error::Pole {
                at: x,
                pole,
                radius: exclusion,
            });
        }
    }
    let drift = p.gamma / x + p.delta / (x - 1.0) + p.epsilon / (x - p.c);
    let potential = (Complex64::from(p.alpha * p.beta * x) - p.q) / (x * (x - 1.0) * (x - p.c));
    Ok(Residual::with_floor(&[pt.g2, pt.g1 * drift, pt.g * potential], pt.g))
}

fn check_elliptic_poles(p: &HeunParams, point: &EllipticPoint, exclusion: f64) -> Result<()> {
    let kq = quarter_periods(point.m).k;
    let u = point.y / kq;
    let j = u.round();
    if ((u - j) * kq).abs() < exclusion {
        let sn_zero = (j as i64).rem_euclid(2) == 0;
        let coeff = if sn_zero {
            2.0 * p.gamma - 1.0
        } else {
            1.0 - 2.0 * p.delta
        };
        if coeff != 0.0 {
            return Err(Error::Pole {
                at: point.y,
                pole: j * kq,
                radius: exclusion,
            });
        }
    }
    Ok(())
}

pub fn residual_elliptic(p: &HeunParams, point: &EllipticPoint, f: &Jet, exclusion: f64) -> Result<Residual> {
    let m = point.m.value();
    if (p.c * m - 1.0).abs() > 1e-12 {
        return Err(Error::Constraint(format!(
            "Heun singular point c = {} does not match 1/m = {}",
            p.c,
            1.0 / m
        )));
    }
    check_elliptic_poles(p, point, exclusion)?;
    let (s, c, d) = (point.sn, point.cn, point.dn);
    let drift =
        (1.0 - 2.0 * p.epsilon) * m * s * c / d + (1.0 - 2.0 * p.delta) * s * d / c + (2.0 * p.gamma - 1.0) * c * d / s;
    let potential = p.four_mq() - p.four_alpha_beta() * m * s * s;
    Ok(Residual::with_floor(&[f.d2, f.d1 * drift, -(f.v * potential)], f.v))
}

/// `x = sn^2(y, m)` on the invertible chart `0 <= y <= K`.
pub fn to_canonical(y: f64, m: EllipticModulus) -> Result<f64> {
    let kq = quarter_periods(m).k;
    if !(0.0..=kq * (1.0 + 1e-15)).contains(&y) {
        return Err(Error::domain(format!(
            "y = {y} outside the invertible chart [0, K = {kq}]"
        )));
    }
    let s = eval_jacobi(y, m)?.sn;
    Ok(s * s)
}

/// Express a solution given as a jet in `y` as `(G, G', G'')` in `x = sn^2`.
pub fn pullback(point: &EllipticPoint, f: &Jet) -> CanonicalPoint {
    let m = point.m.value();
    let (s, c, d) = (point.sn, point.cn, point.dn);
    let x1 = 2.0 * s * c * d;
    let x2 = 2.0 * (c * c * d * d - s * s * d * d - m * s * s * c * c);
    let g1 = f.d1 / x1;
    let g2 = (f.d2 - g1 * x2) / (x1 * x1);
    CanonicalPoint {
        x: s * s,
        g: f.v,
        g1,
        g2,
    }
}

/// Coefficients `c_0 = 1, c_1, ...` of the exponent-0 Frobenius solution at
/// `x = 0`, from the three-term recurrence
///
/// ```text
/// c (k+1)(k+gamma) c_{k+1} = [(1+c) k (k-1) + (gamma (1+c) + delta c + epsilon) k + q] c_k
///                          - [(k-1)(k-2) + (gamma+delta+epsilon)(k-1) + alpha beta] c_{k-1}
/// ```
pub fn frobenius_series(p: &HeunParams, n_terms: usize) -> Result<Vec<Complex64>> {
    if let Some(g) = as_integer(p.gamma) {
        if g <= 0 {
            return Err(Error::BranchUnavailable { gamma: p.gamma });
        }
    }
    if n_terms < 2 {
        return Err(Error::domain("frobenius_series needs at least two terms"));
    }
    let c = p.c;
    let sum = p.gamma + p.delta + p.epsilon;
    let lin = p.gamma * (1.0 + c) + p.delta * c + p.epsilon;
    let ab = p.alpha * p.beta;
    let mut out = Vec::with_capacity(n_terms);
    out.push(Complex64::new(1.0, 0.0));
    let mut prev = Complex64::new(0.0, 0.0);
    for k in 0..n_terms - 1 {
        let kf = k as f64;
        let cur = out[k];
        let diag = Complex64::from((1.0 + c) * kf * (kf - 1.0) + lin * kf) + p.q;
        let back = (kf - 1.0) * (kf - 2.0) + sum * (kf - 1.0) + ab;
        let next = (cur * diag - prev * back) / (c * (kf + 1.0) * (kf + p.gamma));
        prev = cur;
        out.push(next);
    }
    Ok(out)
}

/// Parameters of the inner series of the exponent-`1-gamma` solution at `x = 0`:
/// `x^{1-gamma} Hl(c, q + (1-gamma)(c delta + epsilon); alpha+1-gamma, beta+1-gamma, 2-gamma, delta, epsilon)`.
pub fn second_exponent_params(p: &HeunParams) -> Result<HeunParams> {
    let s = 1.0 - p.gamma;
    HeunParams::new(
        p.alpha + s,
        p.beta + s,
        2.0 - p.gamma,
        p.delta,
        p.epsilon,
        p.q + s * (p.c * p.delta + p.epsilon),
        p.c,
    )
}

pub fn frobenius_sum(coeffs: &[Complex64], x: f64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sample() -> HeunParams {
        // gamma + delta + epsilon = 1.75 = alpha + beta + 1
        HeunParams::new(0.5, 0.25, 0.5, 0.75, 0.5, Complex64::new(0.3, 0.0), 2.0).unwrap()
    }

    #[test]
    fn constructor_enforces_constraint() {
        let err = HeunParams::new(0.5, 0.25, 0.5, 0.75, 0.6, Complex64::new(0.0, 0.0), 2.0);
        assert!(matches!(err, Err(Error::Constraint(_))));
        let err = HeunParams::new(0.5, 0.25, 0.5, 0.75, 0.5, Complex64::new(0.0, 0.0), 1.0);
        assert!(matches!(err, Err(Error::Constraint(_))));
    }

    #[test]
    fn zero_function_has_zero_residual() {
        let p = sample();
        let z = Complex64::new(0.0, 0.0);
        for x in [0.2, 0.5, 1.7, 3.0] {
            let pt = CanonicalPoint { x, g: z, g1: z, g2: z };
            assert_eq!(residual_canonical(&p, &pt, 1e-3).unwrap().value, z);
        }
    }

    #[test]
    fn canonical_residual_rejects_points_near_singularities() {
        let p = sample();
        let z = Complex64::new(0.0, 0.0);
        for x in [0.0, 1.0 + 1e-4, 2.0 - 5e-4] {
            let pt = CanonicalPoint { x, g: z, g1: z, g2: z };
            assert!(matches!(residual_canonical(&p, &pt, 1e-3), Err(Error::Pole { .. })));
        }
    }

    #[test]
    fn random_quadratic_is_not_a_solution() {
        let p = sample();
        let x = 0.4;
        let (a, b, cc) = (0.7, -1.3, 0.45);
        let pt = CanonicalPoint {
            x,
            g: Complex64::from(a + b * x + cc * x * x),
            g1: Complex64::from(b + 2.0 * cc * x),
            g2: Complex64::from(2.0 * cc),
        };
        assert!(residual_canonical(&p, &pt, 1e-3).unwrap().relative() > 1e-3);
    }

    #[test]
    fn chart_endpoints() {
        let m = EllipticModulus::new(0.5).unwrap();
        let kq = quarter_periods(m).k;
        assert_eq!(to_canonical(0.0, m).unwrap(), 0.0);
        assert_relative_eq!(to_canonical(kq, m).unwrap(), 1.0, epsilon = 1e-14);
        assert!(to_canonical(-0.1, m).is_err());
        assert!(to_canonical(1.1 * kq, m).is_err());
    }

    #[test]
    fn half_quarter_period_chart_value() {
        let m = EllipticModulus::new(0.5).unwrap();
        let kq = quarter_periods(m).k;
        // sn(K/2) = 1 / sqrt(1 + sqrt(1 - m))
        let expected = 1.0 / (1.0 + (1.0f64 - 0.5).sqrt());
        assert_relative_eq!(to_canonical(0.5 * kq, m).unwrap(), expected, epsilon = 1e-14);
    }

    #[test]
    fn frobenius_first_coefficients() {
        let p = sample();
        let c = frobenius_series(&p, 4).unwrap();
        assert_eq!(c[0], Complex64::new(1.0, 0.0));
        assert_relative_eq!(c[1].re, p.q.re / (p.c * p.gamma), epsilon = 1e-15);
    }

    #[test]
    fn frobenius_partial_sum_solves_the_equation() {
        // Independent check: differentiate the truncated series term by term
        // and feed it to the canonical residual.
        let p = sample();
        let c = frobenius_series(&p, 80).unwrap();
        for x in [0.05f64, 0.1, 0.3] {
            let mut g = Complex64::new(0.0, 0.0);
            let mut g1 = g;
            let mut g2 = g;
            for (k, ck) in c.iter().enumerate() {
                let kf = k as f64;
                g += ck * x.powi(k as i32);
                if k >= 1 {
                    g1 += ck * kf * x.powi(k as i32 - 1);
                }
                if k >= 2 {
                    g2 += ck * kf * (kf - 1.0) * x.powi(k as i32 - 2);
                }
            }
            let pt = CanonicalPoint { x, g, g1, g2 };
            assert!(residual_canonical(&p, &pt, 1e-3).unwrap().relative() < 1e-12);
            assert!((frobenius_sum(&c, x) - g).norm() < 1e-13);
        }
    }

    #[test]
    fn second_exponent_solution_solves_the_equation() {
        let p = HeunParams::new(-0.35, -0.65, 0.5, -0.5, 0.0, Complex64::new(0.4, 0.1), 2.0).unwrap();
        let inner = second_exponent_params(&p).unwrap();
        let c = frobenius_series(&inner, 80).unwrap();
        let s = 1.0 - p.gamma;
        let x: f64 = 0.1;
        let h = 1e-6;
        let w = |x: f64| frobenius_sum(&c, x) * x.powf(s);
        let g = w(x);
        let g1 = (w(x + h) - w(x - h)) / (2.0 * h);
        let g2 = (w(x + h) - 2.0 * g + w(x - h)) / (h * h);
        let r = residual_canonical(&p, &CanonicalPoint { x, g, g1, g2 }, 1e-3).unwrap();
        assert!(r.relative() < 1e-5, "{}", r.relative());
    }

    #[test]
    fn frobenius_refuses_non_positive_integer_gamma() {
        let p = HeunParams::new(0.5, 0.25, -1.0, 2.25, 0.5, Complex64::new(0.1, 0.0), 2.0).unwrap();
        assert!(matches!(frobenius_series(&p, 10), Err(Error::BranchUnavailable { .. })));
    }
}
