//! Verification paths that do not reuse the constructors: direct numerical
//! integration of the elliptic Heun and phi equations, and a plane-wave
//! Bloch eigensolver for the nonsingular potentials.

mod bloch;
pub mod dop853;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elliptic::{eval_jacobi, quarter_periods, EllipticModulus};
use crate::error::{Error, Result};
use crate::gal::{GalParams, SpectralPair};
use crate::heun::HeunParams;

pub use bloch::{bloch_phase, discrete_spectrum, SpectrumReport};
pub use dop853::{Stats, Tolerance};

pub const DEFAULT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Equation {
    /// `F'' + D F' - (4mq - 4 alpha beta m sn^2) F = 0`.
    EllipticHeun(HeunParams),
    /// `phi'' + 2 W phi' + (Q m sn^2 - R) phi = 0`.
    Phi { gal: GalParams, spectral: SpectralPair },
}

impl Equation {
    /// Whether the coefficients blow up at zeros of `sn` and of `cn`.
    fn singular_at(&self) -> (bool, bool) {
        match self {
            Equation::EllipticHeun(p) => (2.0 * p.gamma - 1.0 != 0.0, 1.0 - 2.0 * p.delta != 0.0),
            Equation::Phi { gal, .. } => (gal.g != 0.0, gal.f != 0.0),
        }
    }

    fn rhs(&self, m: EllipticModulus, y: f64, u: &[Complex64; 2]) -> Result<[Complex64; 2]> {
        let pt = eval_jacobi(y, m)?;
        let mv = m.value();
        let (s, c, d) = (pt.sn, pt.cn, pt.dn);
        let (drift, pot) = match self {
            Equation::EllipticHeun(p) => {
                let drift = (1.0 - 2.0 * p.epsilon) * mv * s * c / d
                    + (1.0 - 2.0 * p.delta) * s * d / c
                    + (2.0 * p.gamma - 1.0) * c * d / s;
                (drift, p.q * (4.0 * mv) - 4.0 * p.alpha * p.beta * mv * s * s)
            }
            Equation::Phi { gal, spectral } => {
                let mut w = mv * gal.b * s * c / d;
                if gal.f != 0.0 {
                    w += gal.f * s * d / c;
                }
                if gal.g != 0.0 {
                    w -= gal.g * c * d / s;
                }
                (2.0 * w, spectral.r - spectral.q * mv * s * s)
            }
        };
        Ok([u[1], -u[1] * drift + u[0] * pot])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IvpSpec {
    pub equation: Equation,
    pub m: EllipticModulus,
    pub y0: f64,
    /// `(F(y0), F'(y0))`.
    pub initial: (Complex64, Complex64),
    pub span: (f64, f64),
    pub tol: f64,
    /// Minimum distance from a coefficient pole, in `y`.
    pub exclusion: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    /// `(y, F, F')` at the requested points, in the order given.
    pub samples: Vec<(f64, Complex64, Complex64)>,
    pub accepted: usize,
    pub rejected: usize,
}

impl IvpSpec {
    /// First coefficient pole inside the span widened by the exclusion radius.
    pub fn pole_in_span(&self) -> Option<f64> {
        let kq = quarter_periods(self.m).k;
        let (sn_pole, cn_pole) = self.equation.singular_at();
        let (lo, hi) = (self.span.0.min(self.y0), self.span.1.max(self.y0));
        let first = ((lo - self.exclusion) / kq).ceil() as i64;
        let last = ((hi + self.exclusion) / kq).floor() as i64;
        (first..=last)
            .filter(|j| if j.rem_euclid(2) == 0 { sn_pole } else { cn_pole })
            .map(|j| j as f64 * kq)
            .next()
    }
}

/// Integrate from `y0` to each of `points` (all inside the span).
pub fn integrate(spec: &IvpSpec, points: &[f64]) -> Result<Trajectory> {
    if let Some(pole) = spec.pole_in_span() {
        return Err(Error::Integration {
            at: pole,
            detail: format!(
                "span [{}, {}] passes within {} of a coefficient pole",
                spec.span.0, spec.span.1, spec.exclusion
            ),
        });
    }
    if let Some(&y) = points.iter().find(|&&y| y < spec.span.0 || y > spec.span.1) {
        return Err(Error::domain(format!("output point {y} outside the span")));
    }
    let rhs = |y: f64, u: &[Complex64; 2]| spec.equation.rhs(spec.m, y, u);
    let tol = Tolerance {
        rtol: spec.tol,
        atol: spec.tol * (spec.initial.0.norm() + spec.initial.1.norm()).max(1e-300),
    };
    let mut stats = Stats::default();
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a].total_cmp(&points[b]));
    let mut out = vec![(0.0, Complex64::default(), Complex64::default()); points.len()];
    let start = [spec.initial.0, spec.initial.1];
    // forward over points >= y0, backward over the rest, each as one sweep
    let (fwd, bwd): (Vec<usize>, Vec<usize>) = order.iter().partition(|&&i| points[i] >= spec.y0);
    for list in [fwd, bwd.into_iter().rev().collect()] {
        let (mut x, mut u) = (spec.y0, start);
        for i in list {
            u = dop853::integrate_to(&rhs, x, u, points[i], tol, &mut stats)?;
            x = points[i];
            out[i] = (x, u[0], u[1]);
        }
    }
    Ok(Trajectory {
        samples: out,
        accepted: stats.accepted,
        rejected: stats.rejected,
    })
}

/// Split `(lo, hi)` into arcs that keep `exclusion` away from every
/// multiple of `K` flagged singular by `(sn_pole, cn_pole)`.
pub fn pole_free_arcs(
    lo: f64,
    hi: f64,
    m: EllipticModulus,
    sn_pole: bool,
    cn_pole: bool,
    exclusion: f64,
) -> Vec<(f64, f64)> {
    let kq = quarter_periods(m).k;
    let mut arcs = Vec::new();
    let mut start = lo;
    let first = (lo / kq).ceil() as i64;
    let last = (hi / kq).floor() as i64;
    for j in first..=last {
        let singular = if j.rem_euclid(2) == 0 { sn_pole } else { cn_pole };
        if !singular {
            continue;
        }
        let pole = j as f64 * kq;
        if pole - exclusion > start {
            arcs.push((start, pole - exclusion));
        }
        start = pole + exclusion;
    }
    if hi > start {
        arcs.push((start, hi));
    }
    arcs
}

/// Arcs for an equation, from its own singularity pattern.
pub fn arcs_for(eq: &Equation, lo: f64, hi: f64, m: EllipticModulus, exclusion: f64) -> Vec<(f64, f64)> {
    let (s, c) = eq.singular_at();
    pole_free_arcs(lo, hi, m, s, c, exclusion)
}
