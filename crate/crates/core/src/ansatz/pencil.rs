//! The linear pencil `M0 + E M1` obtained by substituting the ansatz into
//! the equation for `Z = phi / P`:
//!
//! ```text
//! Z'' + (2L + 2W) Z' + (L' + L^2 + 2WL - R + Q m sn^2) Z = 0,   L = P'/P.
//! ```
//!
//! Rows are indexed by the reduced monomials `sn^i cn^j dn^k` with
//! `j, k in {0, 1}`, which are linearly independent functions on the real
//! line. The system is in general rectangular.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::laurent::{Laurent, Monomial};
use super::spec::AnsatzSpec;
use crate::error::{Error, Result};

/// Relative tolerance on `sigma_min(M0 + E M1)` for accepting a root.
pub const ROOT_TOL: f64 = 1e-10;
/// Coefficient vectors below this norm (after normalization) are padding.
pub const NULL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Pencil {
    pub m0: DMatrix<Complex64>,
    pub m1: DMatrix<Complex64>,
    pub rows: Vec<Monomial>,
    pub basis: Vec<Monomial>,
}

impl Pencil {
    pub fn shape(&self) -> (usize, usize) {
        self.m0.shape()
    }

    pub fn at(&self, e: Complex64) -> DMatrix<Complex64> {
        &self.m0 + &self.m1 * e
    }
}

pub fn build_pencil(spec: &AnsatzSpec) -> Result<Pencil> {
    let gal = spec.gal();
    let m = spec.m.value();
    let c1 = Complex64::new(1.0, 0.0);
    let (b, f, g) = (gal.b, gal.f, gal.g);
    let mut w = Laurent::zero();
    w.add_term((1, 1, -1), c1 * (m * b));
    w.add_term((1, -1, 1), c1 * f);
    w.add_term((-1, 1, 1), c1 * (-g));
    let l = spec.log_derivative();
    let drift = l.add(&w).scale(c1 * 2.0);
    let mut pot = l.derivative(m).add(&l.mul(&l)).add(&w.mul(&l).scale(c1 * 2.0));
    pot.add_term((0, 0, 0), c1 * (-gal.r_offset()));
    pot.add_term((2, 0, 0), c1 * (gal.q_coefficient() * m));

    let basis = spec.basis();
    let mut ops = Vec::with_capacity(basis.len());
    for &mono in &basis {
        let z = Laurent::monomial(mono, c1);
        let z1 = z.derivative(m);
        let z2 = z1.derivative(m);
        ops.push((z2.add(&drift.mul(&z1)).add(&pot.mul(&z)), z));
    }
    let clear = ops.iter().fold((0, 0, 0), |acc, (op, z)| {
        let a = op.min_exponents();
        let b = z.min_exponents();
        (
            acc.0.min(a.0).min(b.0),
            acc.1.min(a.1).min(b.1),
            acc.2.min(a.2).min(b.2),
        )
    });
    let clear = (-clear.0, -clear.1, -clear.2);

    let mut cols = Vec::with_capacity(ops.len());
    for (op, z) in &ops {
        let r0 = op.shift(clear).reduce(m)?;
        let r1 = z.shift(clear).reduce(m)?;
        if !r0.is_reduced() || !r1.is_reduced() {
            return Err(Error::Construction(format!(
                "{}: reduction left a monomial outside the basis",
                spec.label()
            )));
        }
        cols.push((r0, r1));
    }
    let mut rows: Vec<Monomial> = cols
        .iter()
        .flat_map(|(a, b)| a.terms().chain(b.terms()).map(|(k, _)| *k))
        .collect();
    rows.sort_unstable();
    rows.dedup();
    let index = |mono: &Monomial| rows.binary_search(mono).expect("row present");
    let (nr, nc) = (rows.len(), cols.len());
    let mut m0 = DMatrix::zeros(nr, nc);
    let mut m1 = DMatrix::zeros(nr, nc);
    for (j, (a, b)) in cols.iter().enumerate() {
        for (k, v) in a.terms() {
            m0[(index(k), j)] += *v;
        }
        for (k, v) in b.terms() {
            m1[(index(k), j)] += *v;
        }
    }
    Ok(Pencil { m0, m1, rows, basis })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PencilSolution {
    pub energy: Complex64,
    /// `A_0..A_M` then `B`, normalized so the first nonzero entry is 1.
    pub coefficients: Vec<Complex64>,
    pub a_len: usize,
    /// `sigma_min(M0 + E M1) / (|M0| + |E| |M1|)`.
    pub conditioning: f64,
    pub multiplicity: usize,
}

impl PencilSolution {
    pub fn a(&self) -> &[Complex64] {
        &self.coefficients[..self.a_len]
    }

    pub fn b(&self) -> &[Complex64] {
        &self.coefficients[self.a_len..]
    }
}

/// Outcome of a pencil solve, including candidates that failed the
/// rectangular residual test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PencilReport {
    pub shape: (usize, usize),
    pub solutions: Vec<PencilSolution>,
    pub rejected: Vec<(Complex64, f64)>,
}

fn smallest_singular(mat: &DMatrix<Complex64>) -> Result<(f64, nalgebra::DVector<Complex64>)> {
    let svd = mat.clone().svd(false, true);
    let vt = svd
        .v_t
        .ok_or_else(|| Error::DefectivePencil("SVD did not return right singular vectors".into()))?;
    let (idx, sigma) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
    let v = vt.row(idx).adjoint();
    Ok((sigma, v))
}

fn refine(p: &Pencil, mut e: Complex64) -> Result<(Complex64, f64, nalgebra::DVector<Complex64>)> {
    let mut last = smallest_singular(&p.at(e))?;
    for _ in 0..4 {
        let v = &last.1;
        let a = &p.m1 * v;
        let b = &p.m0 * v;
        let den = a.norm_squared();
        if den == 0.0 {
            break;
        }
        let next = -a.dotc(&b) / den;
        let cand = smallest_singular(&p.at(next))?;
        if cand.0 <= last.0 {
            e = next;
            last = cand;
        } else {
            break;
        }
    }
    Ok((e, last.0, last.1))
}

fn normalize(v: &nalgebra::DVector<Complex64>) -> Option<Vec<Complex64>> {
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return None;
    }
    let pivot = v.iter().find(|z| z.norm() > 1e-8 * scale)?;
    let out: Vec<Complex64> = v.iter().map(|z| z / pivot).collect();
    let clean = out
        .into_iter()
        .map(|z| {
            let re = if z.re.abs() < 1e-15 { 0.0 } else { z.re };
            let im = if z.im.abs() < 1e-15 { 0.0 } else { z.im };
            Complex64::new(re, im)
        })
        .collect();
    Some(clean)
}

/// All finite roots of the rectangular pencil, sorted by `(Re E, Im E)`.
///
/// Candidates come from the square projection `Q^H (M0 + E M1)` where
/// `M1 = Q R`; each is refined against the full system and kept only if
/// `sigma_min` is below [`ROOT_TOL`] relative to the pencil scale.
pub fn solve_pencil(p: &Pencil, a_len: usize) -> Result<PencilReport> {
    let (nr, nc) = p.shape();
    if nc == 0 || nr < nc {
        return Err(Error::DefectivePencil(format!("pencil shape {nr}x{nc}")));
    }
    let qr = p.m1.clone().qr();
    let r = qr.r();
    let q = qr.q();
    let diag_min = (0..nc).map(|i| r[(i, i)].norm()).fold(f64::INFINITY, f64::min);
    let diag_max = (0..nc).map(|i| r[(i, i)].norm()).fold(0.0, f64::max);
    if diag_min <= 1e-13 * diag_max {
        return Err(Error::DefectivePencil(format!(
            "energy block is rank deficient (|R_ii| ratio {:e})",
            diag_min / diag_max
        )));
    }
    let rhs = -(q.adjoint() * &p.m0);
    let proj = r
        .solve_upper_triangular(&rhs)
        .ok_or_else(|| Error::DefectivePencil("triangular solve failed".into()))?;
    let eig = proj
        .schur()
        .eigenvalues()
        .ok_or_else(|| Error::DefectivePencil("Schur form not triangular".into()))?;

    let n0 = p.m0.norm();
    let n1 = p.m1.norm();
    let mut accepted: Vec<PencilSolution> = Vec::new();
    let mut rejected = Vec::new();
    let cands: Vec<Complex64> = eig.iter().copied().collect();
    for &cand in &cands {
        let (mut e, sigma, mut v) = refine(p, cand)?;
        let mut rel = sigma / (n0 + e.norm() * n1);
        if rel > ROOT_TOL {
            // A root that is multiple in the projection splits by O(sqrt(eps));
            // the cluster mean is accurate to roundoff.
            let near: Vec<Complex64> = cands
                .iter()
                .copied()
                .filter(|z| (z - cand).norm() <= 1e-5 * cand.norm().max(1.0))
                .collect();
            if near.len() > 1 {
                let mean = near.iter().sum::<Complex64>() / near.len() as f64;
                let (e2, s2, v2) = refine(p, mean)?;
                let rel2 = s2 / (n0 + e2.norm() * n1);
                if rel2 < rel {
                    (e, v, rel) = (e2, v2, rel2);
                }
            }
        }
        if rel > ROOT_TOL {
            rejected.push((cand, rel));
            continue;
        }
        let Some(coeffs) = normalize(&v) else {
            rejected.push((cand, rel));
            continue;
        };
        let z_norm: f64 = coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if z_norm < NULL_TOL {
            rejected.push((cand, rel));
            continue;
        }
        let scale = e.norm().max(1.0);
        if let Some(prev) = accepted.iter_mut().find(|s| (s.energy - e).norm() <= 1e-8 * scale) {
            prev.multiplicity += 1;
            continue;
        }
        accepted.push(PencilSolution {
            energy: e,
            coefficients: coeffs,
            a_len,
            conditioning: rel,
            multiplicity: 1,
        });
    }
    accepted.sort_by(|x, y| {
        x.energy
            .re
            .total_cmp(&y.energy.re)
            .then(x.energy.im.total_cmp(&y.energy.im))
    });
    Ok(PencilReport {
        shape: (nr, nc),
        solutions: accepted,
        rejected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::spec::Case;
    use crate::elliptic::EllipticModulus;
    use num_rational::Rational64;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn scalar_pencil_root() {
        let p = Pencil {
            m0: DMatrix::from_element(1, 1, c(3.0)),
            m1: DMatrix::from_element(1, 1, c(-2.0)),
            rows: vec![(0, 0, 0)],
            basis: vec![(0, 0, 0)],
        };
        let rep = solve_pencil(&p, 1).unwrap();
        assert_eq!(rep.solutions.len(), 1);
        assert!((rep.solutions[0].energy - c(1.5)).norm() < 1e-15);
    }

    #[test]
    fn case1_ground_state_pencil_is_one_by_one() {
        let (t, m) = (0.37, 0.5);
        let spec = AnsatzSpec::new(
            Case::BHalf,
            Rational64::new(1, 2),
            0,
            0,
            t,
            EllipticModulus::new(m).unwrap(),
        )
        .unwrap();
        let p = build_pencil(&spec).unwrap();
        assert_eq!(p.shape().1, 1);
        let rep = solve_pencil(&p, spec.a_len()).unwrap();
        assert_eq!(rep.solutions.len(), 1);
        assert!((rep.solutions[0].energy - c(t * t + m / 4.0)).norm() < 1e-12);
    }

    #[test]
    fn case1_three_half_ground_pencil_has_two_roots() {
        let (t, m) = (0.37, 0.5);
        let spec = AnsatzSpec::new(
            Case::BHalf,
            Rational64::new(3, 2),
            0,
            0,
            t,
            EllipticModulus::new(m).unwrap(),
        )
        .unwrap();
        let p = build_pencil(&spec).unwrap();
        let rep = solve_pencil(&p, spec.a_len()).unwrap();
        let es: Vec<f64> = rep.solutions.iter().map(|s| s.energy.re).collect();
        let base = 1.0 + t * t + 9.0 * m / 4.0 - m;
        let rad = (m * m + 4.0 * (1.0 - m) * t * t).sqrt();
        assert_eq!(es.len(), 2);
        assert!((es[0] - (base - rad)).abs() < 1e-12);
        assert!((es[1] - (base + rad)).abs() < 1e-12);
    }

    #[test]
    fn case3_ground_state() {
        let m = 0.5;
        let spec = AnsatzSpec::new(
            Case::GHalf,
            Rational64::new(1, 2),
            0,
            0,
            0.9,
            EllipticModulus::new(m).unwrap(),
        )
        .unwrap();
        let rep = solve_pencil(&build_pencil(&spec).unwrap(), 1).unwrap();
        assert!((rep.solutions[0].energy - c((1.0 + m) / 4.0)).norm() < 1e-12);
    }
}
