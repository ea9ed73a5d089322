use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::laurent::Monomial;
use super::pencil::{build_pencil, solve_pencil, PencilReport, PencilSolution};
use super::spec::{AnsatzSpec, Case, Parity};
use crate::elliptic::{case2_angle, eval_jacobi, quarter_periods, EllipticPoint, HalfPeriod, Triple};
use crate::error::{Error, Result};
use crate::gal::{heun_dictionary, phi_residual, GalParams, SpectralPair};
use crate::grid::{GridSpec, Residual};
use crate::heun::{pullback, residual_canonical, residual_elliptic, HeunParams};
use crate::jet::{as_integer, Jet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormSolution {
    pub spec: AnsatzSpec,
    pub pencil: PencilSolution,
    pub basis: Vec<Monomial>,
    pub gal: GalParams,
    pub spectral: SpectralPair,
    pub heun: HeunParams,
}

/// Build the pencil for `spec`, solve it, and wrap every accepted root.
pub fn construct(spec: &AnsatzSpec) -> Result<(PencilReport, Vec<ClosedFormSolution>)> {
    let pencil = build_pencil(spec)?;
    let report = solve_pencil(&pencil, spec.a_len())?;
    let gal = spec.gal();
    let sols = report
        .solutions
        .iter()
        .map(|ps| {
            let spectral = gal.spectral_pair(ps.energy);
            Ok(ClosedFormSolution {
                spec: *spec,
                pencil: ps.clone(),
                basis: pencil.basis.clone(),
                gal,
                spectral,
                heun: heun_dictionary(&gal, &spectral)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((report, sols))
}

pub fn wronskian(u: &Jet, v: &Jet) -> Complex64 {
    u.v * v.d1 - v.v * u.d1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuasiPeriodicity {
    /// Translation used: `2K`, `2K+2iK'` or `2iK'`.
    pub period: &'static str,
    pub mu: Complex64,
    pub expected: Complex64,
    /// Largest deviation of the pointwise ratio from its mean.
    pub spread: f64,
}

impl ClosedFormSolution {
    pub fn energy(&self) -> Complex64 {
        self.pencil.energy
    }

    fn z_on(&self, tr: &Triple) -> Jet {
        self.basis
            .iter()
            .zip(&self.pencil.coefficients)
            .fold(Jet::ZERO, |acc, (&(i, j, k), &v)| {
                acc + tr.sn.powi(i) * tr.cn.powi(j) * tr.dn.powi(k) * v
            })
    }

    fn base_on(&self, tr: &Triple) -> Jet {
        let k = self.spec.m.k();
        let i = Complex64::i();
        match self.spec.case {
            Case::BHalf => tr.cn + tr.sn * i,
            Case::FHalf => tr.dn + tr.sn * (i * k),
            Case::GHalf => tr.dn + tr.cn * k,
        }
    }

    /// `Z` alone, as a jet in `y`.
    pub fn polynomial_part(&self, point: &EllipticPoint) -> Jet {
        self.z_on(&Triple::at(point))
    }

    /// `phi = P Z` with the continuous branch of the prefactor along the real line.
    pub fn evaluate_at(&self, point: &EllipticPoint) -> Jet {
        let tr = Triple::at(point);
        let t = self.spec.t;
        let base = self.base_on(&tr);
        let value = match self.spec.case {
            Case::BHalf => Complex64::from_polar(1.0, t * point.am),
            Case::FHalf => Complex64::from_polar(1.0, t * case2_angle(point)),
            Case::GHalf => Complex64::from(base.v.re.powf(t)),
        };
        base.pow_with_value(t, value) * self.z_on(&tr)
    }

    pub fn evaluate(&self, y: f64) -> Result<Jet> {
        Ok(self.evaluate_at(&eval_jacobi(y, self.spec.m)?))
    }

    /// `phi` on an arbitrary (possibly shifted) triple, principal branch.
    pub fn eval_on_triple(&self, tr: &Triple) -> Jet {
        self.base_on(tr).powf(self.spec.t) * self.z_on(tr)
    }

    pub fn phi_residual(&self, y: f64, exclusion: f64) -> Result<Residual> {
        let pt = eval_jacobi(y, self.spec.m)?;
        phi_residual(&self.gal, &self.spectral, &self.evaluate_at(&pt), &pt, exclusion)
    }

    pub fn heun_residual(&self, y: f64, exclusion: f64) -> Result<Residual> {
        let pt = eval_jacobi(y, self.spec.m)?;
        residual_elliptic(&self.heun, &pt, &self.evaluate_at(&pt), exclusion)
    }

    /// Canonical-form residual after pulling back through `x = sn^2(y)`.
    pub fn canonical_residual(&self, y: f64, exclusion: f64) -> Result<Residual> {
        let pt = eval_jacobi(y, self.spec.m)?;
        let cp = pullback(&pt, &self.evaluate_at(&pt));
        residual_canonical(&self.heun, &cp, exclusion)
    }

    /// Same coefficients, different energy (for negative controls).
    pub fn with_energy(&self, energy: Complex64) -> Result<Self> {
        let spectral = self.gal.spectral_pair(energy);
        Ok(ClosedFormSolution {
            spectral,
            heun: heun_dictionary(&self.gal, &spectral)?,
            pencil: PencilSolution {
                energy,
                ..self.pencil.clone()
            },
            ..self.clone()
        })
    }

    /// The `t -> -t` solution with the same energy, reported against this
    /// solution's equation. Integer `t` is refused.
    pub fn degenerate_partner(&self) -> Result<Self> {
        if as_integer(self.spec.t).is_some() {
            return Err(Error::DegeneracyNotGuaranteed(self.spec.t));
        }
        self.reflection()
    }

    /// As [`Self::degenerate_partner`] without the integer-`t` gate.
    pub fn reflection(&self) -> Result<Self> {
        let spec = self.spec.with_t(-self.spec.t);
        let (_, sols) = construct(&spec)?;
        let e = self.energy();
        let best = sols
            .into_iter()
            .min_by(|a, b| (a.energy() - e).norm().total_cmp(&(b.energy() - e).norm()))
            .ok_or_else(|| Error::Construction(format!("{}: reflected pencil has no roots", spec.label())))?;
        if (best.energy() - e).norm() > 1e-9 * e.norm().max(1.0) {
            return Err(Error::Construction(format!(
                "{}: no reflected root matches E = {e}",
                spec.label()
            )));
        }
        Ok(ClosedFormSolution {
            gal: self.gal,
            spectral: self.spectral,
            heun: self.heun,
            ..best
        })
    }

    /// Multiplier over the case-appropriate period: the real `2K` for
    /// Case 1, `2K + 2iK'` for Case 2 and `2iK'` for Case 3. The latter two
    /// use the half-period sign identities with the prefactor continued by
    /// `e^{i pi t}`.
    pub fn quasi_periodicity(&self, grid: &GridSpec) -> Result<QuasiPeriodicity> {
        let m = self.spec.m;
        let kq = quarter_periods(m).k;
        let t = self.spec.t;
        let phase = Complex64::from_polar(1.0, PI * t);
        let (period, half) = match self.spec.case {
            Case::BHalf => ("2K", HalfPeriod::TwoK),
            Case::FHalf => ("2K+2iK'", HalfPeriod::TwoKTwoIKPrime),
            Case::GHalf => ("2iK'", HalfPeriod::TwoIKPrime),
        };
        let mut ratios = Vec::new();
        let mut max_mag: f64 = 0.0;
        let mut samples = Vec::new();
        for y in grid.build(kq) {
            let pt = eval_jacobi(y, m)?;
            let (num, den) = match self.spec.case {
                Case::BHalf => (self.evaluate(y + 2.0 * kq)?.v, self.evaluate_at(&pt).v),
                _ => {
                    let tr = Triple::at(&pt);
                    (phase * self.z_on(&tr.half_period(half)).v, self.z_on(&tr).v)
                }
            };
            max_mag = max_mag.max(den.norm());
            samples.push((num, den));
        }
        for (num, den) in samples {
            if den.norm() > 1e-6 * max_mag {
                ratios.push(num / den);
            }
        }
        if ratios.is_empty() {
            return Err(Error::Verification {
                check: "quasi_periodicity".into(),
                detail: "solution vanishes on the grid".into(),
            });
        }
        let mu = ratios.iter().sum::<Complex64>() / ratios.len() as f64;
        let spread = ratios.iter().map(|r| (r - mu).norm()).fold(0.0, f64::max);
        let sigma = match self.spec.parity {
            Parity::Half => 1.0,
            Parity::ThreeHalf => -1.0,
        };
        Ok(QuasiPeriodicity {
            period,
            mu,
            expected: phase * sigma,
            spread,
        })
    }
}
