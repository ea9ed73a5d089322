//! Closed-form energies for half-integral strength 1/2 and 3/2.

use num_complex::Complex64;
use num_rational::Rational64;

use super::spec::{to_f64, AnsatzSpec, Case};
use crate::error::{Error, Result};

/// Energies in ascending order of the `-/+` branch (one value for strength 1/2).
pub fn eigenvalue_formula(spec: &AnsatzSpec) -> Result<Vec<Complex64>> {
    let half = spec.half;
    let three = half == Rational64::new(3, 2);
    if half != Rational64::new(1, 2) && !three {
        return Err(Error::NoClosedForm(half.to_string()));
    }
    let (b, f, g) = (to_f64(spec.b), to_f64(spec.f), to_f64(spec.g));
    let t = spec.t;
    let m = spec.m.value();
    let n1 = spec.n as f64 + 1.0;
    let c = Complex64::from;
    let two = |base: f64, radicand: f64| {
        let r = c(radicand).sqrt();
        vec![c(base) - r, c(base) + r]
    };
    Ok(match (spec.case, three) {
        (Case::BHalf, false) => vec![c(t * t + m * (g + b).powi(2))],
        (Case::FHalf, false) => vec![c(m * t * t + (g + f).powi(2))],
        (Case::GHalf, false) => vec![c((f + g).powi(2) + m * (g + b).powi(2))],
        (Case::BHalf, true) => two(
            1.0 + t * t + m * (g + b).powi(2) - m * (2.0 * g + 1.0),
            (2.0 * g + 1.0).powi(2) * m * m + 4.0 * m * n1 * (f - g) + 4.0 * (1.0 - m) * t * t,
        ),
        (Case::FHalf, true) => two(
            (1.0 + t * t) * m + (g + f).powi(2) - (2.0 * g + 1.0),
            (2.0 * g + 1.0).powi(2) + 4.0 * m * n1 * (b - g) - 4.0 * m * (1.0 - m) * t * t,
        ),
        (Case::GHalf, true) => two(
            (f + g).powi(2) + m * (g + b).powi(2) - (1.0 + 2.0 * f + (2.0 * b + 1.0) * m),
            (1.0 - m) * ((2.0 * f + 1.0).powi(2) - (2.0 * b + 1.0).powi(2) * m) + 4.0 * m * t * t,
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::EllipticModulus;

    fn spec(case: Case, half: i64, n: u32, p: u32, t: f64, m: f64) -> AnsatzSpec {
        AnsatzSpec::new(
            case,
            Rational64::new(half, 2),
            n,
            p,
            t,
            EllipticModulus::new(m).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn ground_state_specials() {
        let (t, m) = (0.37, 0.5);
        let e = eigenvalue_formula(&spec(Case::BHalf, 1, 0, 0, t, m)).unwrap();
        assert!((e[0].re - (4.0 * t * t + m) / 4.0).abs() < 1e-15);
        let e = eigenvalue_formula(&spec(Case::FHalf, 1, 0, 0, t, m)).unwrap();
        assert!((e[0].re - (4.0 * m * t * t + 1.0) / 4.0).abs() < 1e-15);
        let e = eigenvalue_formula(&spec(Case::GHalf, 1, 0, 0, t, m)).unwrap();
        assert!((e[0].re - (1.0 + m) / 4.0).abs() < 1e-15);
    }

    #[test]
    fn case1_p_dependence() {
        let (t, m) = (0.81, 0.36);
        for p in 0..4 {
            let e = eigenvalue_formula(&spec(Case::BHalf, 1, 3, p, t, m)).unwrap();
            let pf = p as f64 + 0.5;
            assert!((e[0].re - (t * t + m * pf * pf)).abs() < 1e-15);
        }
    }

    #[test]
    fn higher_strengths_have_no_closed_form() {
        let r = eigenvalue_formula(&spec(Case::BHalf, 5, 0, 0, 0.3, 0.5));
        assert!(matches!(r, Err(Error::NoClosedForm(_))));
    }
}
