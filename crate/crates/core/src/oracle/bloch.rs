use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ansatz::{ClosedFormSolution, Parity};
use crate::elliptic::{eval_jacobi, quarter_periods};
use crate::error::{Error, Result};
use crate::gal::{potential, GalParams};

/// Bloch phase `theta` with `psi(y + 2K) = e^{i theta} psi(y)`, read off the
/// solution's multiplier `sigma e^{i pi t}`.
pub fn bloch_phase(sol: &ClosedFormSolution) -> f64 {
    let base = PI * sol.spec.t;
    match sol.spec.parity {
        Parity::Half => base,
        Parity::ThreeHalf => base + PI,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<f64>,
    pub basis_size: usize,
    /// Largest change of the compared eigenvalues against the coarser basis.
    pub cauchy: f64,
}

/// Number of low eigenvalues used for the convergence check.
const CHECKED: usize = 8;
const CAUCHY_TOL: f64 = 1e-8;

fn hamiltonian_spectrum(p: &GalParams, theta: f64, modes: usize) -> Result<Vec<f64>> {
    let kq = quarter_periods(p.m).k;
    let period = 2.0 * kq;
    let half = (modes / 2) as i64;
    let size = (2 * half + 1) as usize;
    // V sampled finely; its Fourier coefficients decay geometrically
    let ng = 8 * size;
    let samples = (0..ng)
        .map(|j| {
            let y = period * j as f64 / ng as f64;
            potential(p, &eval_jacobi(y, p.m)?, 0.0)
        })
        .collect::<Result<Vec<f64>>>()?;
    let vhat = |k: i64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, v) in samples.iter().enumerate() {
            let ang = -2.0 * PI * (k * j as i64).rem_euclid(ng as i64) as f64 / ng as f64;
            acc += Complex64::from_polar(*v, ang);
        }
        acc / ng as f64
    };
    let coeffs: Vec<Complex64> = (-2 * half..=2 * half).map(vhat).collect();
    let h = DMatrix::from_fn(size, size, |r, c| {
        let (nr, nc) = (r as i64 - half, c as i64 - half);
        let mut v = coeffs[(nr - nc + 2 * half) as usize];
        if r == c {
            let k = (theta + 2.0 * PI * nr as f64) / period;
            v += k * k;
        }
        v
    });
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Spectrum of `-d^2/dy^2 + V` on one period `2K` with
/// `psi(y + 2K) = e^{i theta} psi(y)`, in a plane-wave basis.
/// Only `f = g = 0` (no poles on the real line) is accepted.
pub fn discrete_spectrum(p: &GalParams, bloch_phase: f64, basis_size: usize) -> Result<SpectrumReport> {
    if p.f != 0.0 || p.g != 0.0 {
        return Err(Error::domain(format!(
            "plane-wave spectrum needs f = g = 0 (got f = {}, g = {})",
            p.f, p.g
        )));
    }
    if basis_size < 64 {
        return Err(Error::domain(format!("basis size {basis_size} below 64")));
    }
    let coarse = hamiltonian_spectrum(p, bloch_phase, basis_size)?;
    let fine = hamiltonian_spectrum(p, bloch_phase, basis_size + basis_size / 2)?;
    let cauchy = coarse
        .iter()
        .zip(&fine)
        .take(CHECKED)
        .map(|(a, b)| (a - b).abs() / b.abs().max(1.0))
        .fold(0.0, f64::max);
    if cauchy > CAUCHY_TOL {
        return Err(Error::Resolution(format!(
            "lowest eigenvalues moved by {cauchy:e} between {basis_size} and {} modes",
            basis_size + basis_size / 2
        )));
    }
    Ok(SpectrumReport {
        eigenvalues: fine,
        basis_size: basis_size + basis_size / 2,
        cauchy,
    })
}
