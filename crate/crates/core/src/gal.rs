//! Generalized associated Lamé (GAL) potentials
//!
//! ```text
//! V(y) = a(a+1) m sn^2 + b(b+1) m cn^2/dn^2 + f(f+1) dn^2/cn^2 + g(g+1)/sn^2
//! ```
//!
//! The substitution `psi = dn^-b cn^-f sn^-g phi` turns `-psi'' + V psi = E psi`
//! into the elliptic form of Heun's equation for `phi`, with
//! `R = -E + m(g+b)^2 + (f+g)^2` and `Q = (b+f+g)(b+f+g-1) - a(a+1)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elliptic::{quarter_periods, EllipticModulus, EllipticPoint};
use crate::error::{Error, Result};
use crate::grid::Residual;
use crate::heun::HeunParams;
use crate::jet::Jet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GalParams {
    pub a: f64,
    pub b: f64,
    pub f: f64,
    pub g: f64,
    pub m: EllipticModulus,
}

impl GalParams {
    pub fn new(a: f64, b: f64, f: f64, g: f64, m: EllipticModulus) -> Self {
        GalParams { a, b, f, g, m }
    }

    pub fn strength_sum(&self) -> f64 {
        self.b + self.f + self.g
    }

    /// `Q = (b+f+g)(b+f+g-1) - a(a+1)`.
    pub fn q_coefficient(&self) -> f64 {
        let s = self.strength_sum();
        s * (s - 1.0) - self.a * (self.a + 1.0)
    }

    /// `m(g+b)^2 + (f+g)^2`, the energy offset in `R = -E + offset`.
    pub fn r_offset(&self) -> f64 {
        let m = self.m.value();
        m * (self.g + self.b).powi(2) + (self.f + self.g).powi(2)
    }

    pub fn spectral_pair(&self, energy: Complex64) -> SpectralPair {
        SpectralPair {
            r: Complex64::from(self.r_offset()) - energy,
            q: self.q_coefficient(),
            e: energy,
        }
    }

    /// Coefficient `W` in `phi'' + 2 W phi' + (Q m sn^2 - R) phi = 0`.
    pub(crate) fn drift(&self, s: f64, c: f64, d: f64) -> f64 {
        let m = self.m.value();
        m * self.b * s * c / d + self.f * s * d / c - self.g * c * d / s
    }

    fn check_poles(&self, point: &EllipticPoint, sn_pole: bool, cn_pole: bool, exclusion: f64) -> Result<()> {
        let kq = quarter_periods(self.m).k;
        let u = point.y / kq;
        let j = u.round();
        if ((u - j) * kq).abs() >= exclusion {
            return Ok(());
        }
        let at_sn_zero = (j as i64).rem_euclid(2) == 0;
        if (at_sn_zero && sn_pole) || (!at_sn_zero && cn_pole) {
            return Err(Error::Pole {
                at: point.y,
                pole: j * kq,
                radius: exclusion,
            });
        }
        Ok(())
    }
}

/// `R = 4mq`, `Q = 4 alpha beta`, and the Schrödinger energy `E`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPair {
    pub r: Complex64,
    pub q: f64,
    pub e: Complex64,
}

pub fn potential(p: &GalParams, point: &EllipticPoint, exclusion: f64) -> Result<f64> {
    let (ga, gb, gf, gg) = (
        p.a * (p.a + 1.0),
        p.b * (p.b + 1.0),
        p.f * (p.f + 1.0),
        p.g * (p.g + 1.0),
    );
    p.check_poles(point, gg != 0.0, gf != 0.0, exclusion)?;
    let m = p.m.value();
    let (s, c, d) = (point.sn, point.cn, point.dn);
    let mut v = ga * m * s * s + gb * m * c * c / (d * d);
    if gf != 0.0 {
        v += gf * d * d / (c * c);
    }
    if gg != 0.0 {
        v += gg / (s * s);
    }
    Ok(v)
}

pub fn schrodinger_residual(
    p: &GalParams,
    energy: Complex64,
    psi: &Jet,
    point: &EllipticPoint,
    exclusion: f64,
) -> Result<Residual> {
    let v = potential(p, point, exclusion)?;
    Ok(Residual::from_terms(&[-psi.d2, psi.v * v, -(psi.v * energy)]))
}

pub fn phi_residual(
    p: &GalParams,
    sp: &SpectralPair,
    phi: &Jet,
    point: &EllipticPoint,
    exclusion: f64,
) -> Result<Residual> {
    p.check_poles(point, p.g != 0.0, p.f != 0.0, exclusion)?;
    let m = p.m.value();
    let (s, c, d) = (point.sn, point.cn, point.dn);
    let w = p.drift(s, c, d);
    let pot = Complex64::from(sp.q * m * s * s) - sp.r;
    Ok(Residual::with_floor(&[phi.d2, phi.d1 * (2.0 * w), phi.v * pot], phi.v))
}

/// `psi = dn^-b cn^-f sn^-g phi` as a jet (principal branch for
/// non-integer exponents on negative bases).
pub fn psi_from_phi(p: &GalParams, point: &EllipticPoint, phi: &Jet) -> Jet {
    let tr = crate::elliptic::Triple::at(point);
    tr.dn.powf(-p.b) * tr.cn.powf(-p.f) * tr.sn.powf(-p.g) * *phi
}

/// GAL to Heun identification: `gamma = 1/2 - g`, `delta = 1/2 - f`,
/// `epsilon = 1/2 - b`, `4 alpha beta = Q`, `4mq = R`, `c = 1/m`.
pub fn heun_dictionary(p: &GalParams, sp: &SpectralPair) -> Result<HeunParams> {
    let gamma = 0.5 - p.g;
    let delta = 0.5 - p.f;
    let epsilon = 0.5 - p.b;
    let s = gamma + delta + epsilon;
    let alpha = 0.5 * (p.a + s - 0.5);
    let beta = 0.5 * (s - p.a - 1.5);
    let m = p.m.value();
    HeunParams::new(alpha, beta, gamma, delta, epsilon, sp.r / (4.0 * m), 1.0 / m)
}

/// Generators of the symmetry group acting on GAL parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    /// `y -> y + K`: `a <-> b`, `f <-> g`.
    ShiftK,
    /// `y -> y + iK'`: `a <-> g`, `b <-> f`.
    ShiftIKPrime,
    /// `y -> y + K + iK'`: `a <-> f`, `b <-> g`.
    ShiftKIKPrime,
    NegateA,
    NegateB,
    NegateF,
    NegateG,
    /// `t -> -t`; on the strengths this is `a -> -a-1` since `a = t - 1/2`.
    TReflection,
}

impl Generator {
    pub const ALL: [Generator; 8] = [
        Generator::ShiftK,
        Generator::ShiftIKPrime,
        Generator::ShiftKIKPrime,
        Generator::NegateA,
        Generator::NegateB,
        Generator::NegateF,
        Generator::NegateG,
        Generator::TReflection,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Generator::ShiftK => "shift_K",
            Generator::ShiftIKPrime => "shift_iK'",
            Generator::ShiftKIKPrime => "shift_K_iK'",
            Generator::NegateA => "negate_a",
            Generator::NegateB => "negate_b",
            Generator::NegateF => "negate_f",
            Generator::NegateG => "negate_g",
            Generator::TReflection => "t_reflection",
        }
    }

    /// Action on `(a, b, f, g)`; `neg` realises `s -> -s-1` for the scalar type.
    pub fn permute<T: Copy>(self, [a, b, f, g]: [T; 4], neg: impl Fn(T) -> T) -> [T; 4] {
        match self {
            Generator::ShiftK => [b, a, g, f],
            Generator::ShiftIKPrime => [g, f, b, a],
            Generator::ShiftKIKPrime => [f, g, a, b],
            Generator::NegateA | Generator::TReflection => [neg(a), b, f, g],
            Generator::NegateB => [a, neg(b), f, g],
            Generator::NegateF => [a, b, neg(f), g],
            Generator::NegateG => [a, b, f, neg(g)],
        }
    }
}

/// A word of generators, applied left to right.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SymmetryOp(pub Vec<Generator>);

impl SymmetryOp {
    pub fn identity() -> Self {
        SymmetryOp(Vec::new())
    }

    pub fn then(mut self, g: Generator) -> Self {
        self.0.push(g);
        self
    }

    pub fn label(&self) -> String {
        if self.0.is_empty() {
            "identity".to_string()
        } else {
            self.0.iter().map(|g| g.name()).collect::<Vec<_>>().join("*")
        }
    }
}

impl std::fmt::Display for SymmetryOp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.label())
    }
}

pub fn apply_symmetry(op: &SymmetryOp, p: &GalParams) -> GalParams {
    let mut v = [p.a, p.b, p.f, p.g];
    for g in &op.0 {
        v = g.permute(v, |x| -x - 1.0);
    }
    GalParams::new(v[0], v[1], v[2], v[3], p.m)
}

/// `R` for `p2` at the same energy as `(p1, r1)`.
pub fn transport_r(p1: &GalParams, r1: Complex64, p2: &GalParams) -> Complex64 {
    r1 - p1.r_offset() + p2.r_offset()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::eval_jacobi;
    use approx::assert_relative_eq;

    fn m(v: f64) -> EllipticModulus {
        EllipticModulus::new(v).unwrap()
    }

    #[test]
    fn free_particle_potential_vanishes() {
        let p = GalParams::new(0.0, 0.0, 0.0, 0.0, m(0.4));
        for y in [0.0, 0.3, 1.1, 2.7] {
            let pt = eval_jacobi(y, p.m).unwrap();
            assert_eq!(potential(&p, &pt, 1e-3).unwrap(), 0.0);
        }
    }

    #[test]
    fn potential_at_origin_for_b_half() {
        let t = 0.37;
        let p = GalParams::new(t - 0.5, 0.5, 0.0, 0.0, m(0.5));
        let pt = eval_jacobi(0.0, p.m).unwrap();
        assert_relative_eq!(potential(&p, &pt, 1e-3).unwrap(), 0.75 * 0.5, epsilon = 1e-15);
    }

    #[test]
    fn potential_shift_covariance() {
        let sets = [
            (0.3, 1.5, 1.0, 2.0, 0.36),
            (-0.13, 0.5, 2.0, 0.0, 0.5),
            (1.2, 2.5, 0.0, 1.0, 0.75),
            (0.7, 0.5, 1.0, 1.0, 0.1),
            (2.0, 1.5, 3.0, 1.0, 0.9),
        ];
        for (a, b, f, g, mv) in sets {
            let p = GalParams::new(a, b, f, g, m(mv));
            let q = apply_symmetry(&SymmetryOp(vec![Generator::ShiftK]), &p);
            let kq = quarter_periods(p.m).k;
            for i in 1..40 {
                let y = 0.05 * kq + 0.0225 * kq * i as f64;
                let lhs = potential(&p, &eval_jacobi(y + kq, p.m).unwrap(), 1e-3).unwrap();
                let rhs = potential(&q, &eval_jacobi(y, p.m).unwrap(), 1e-3).unwrap();
                assert!((lhs - rhs).abs() <= 1e-11 * lhs.abs().max(1.0));
            }
        }
    }

    #[test]
    fn generators_are_involutions() {
        let p = GalParams::new(0.13, 1.5, 2.0, 1.0, m(0.3));
        for g in Generator::ALL {
            let q = apply_symmetry(&SymmetryOp(vec![g, g]), &p);
            for (x, y) in [(q.a, p.a), (q.b, p.b), (q.f, p.f), (q.g, p.g)] {
                assert!((x - y).abs() < 1e-15, "{}", g.name());
            }
        }
    }

    #[test]
    fn negation_leaves_potential_unchanged() {
        let p = GalParams::new(0.13, 1.5, 2.0, 1.0, m(0.3));
        let pt = eval_jacobi(0.77, p.m).unwrap();
        let v = potential(&p, &pt, 1e-3).unwrap();
        for g in [
            Generator::NegateA,
            Generator::NegateB,
            Generator::NegateF,
            Generator::NegateG,
        ] {
            let q = apply_symmetry(&SymmetryOp(vec![g]), &p);
            assert_eq!(potential(&q, &pt, 1e-3).unwrap(), v);
        }
    }

    #[test]
    fn dictionary_example() {
        let t = 0.37;
        let p = GalParams::new(t - 0.5, 0.5, 1.0, 0.0, m(0.5));
        let e = Complex64::from(t * t + 0.5 * 0.25);
        let sp = p.spectral_pair(e);
        let h = heun_dictionary(&p, &sp).unwrap();
        assert_relative_eq!(h.gamma, 0.5);
        assert_relative_eq!(h.delta, -0.5);
        assert_relative_eq!(h.epsilon, 0.0);
        assert_relative_eq!(h.alpha, -(1.0 - t) / 2.0, epsilon = 1e-15);
        assert_relative_eq!(h.beta, -(1.0 + t) / 2.0, epsilon = 1e-15);
        assert_relative_eq!(h.four_mq().re, 1.0 - t * t, epsilon = 1e-14);
        assert_relative_eq!(h.four_alpha_beta(), sp.q, epsilon = 1e-14);
    }

    #[test]
    fn transport_matches_recomputed_r() {
        let p1 = GalParams::new(-0.13, 0.5, 1.0, 0.0, m(0.5));
        let e = Complex64::new(0.2619, 0.0);
        let r1 = p1.spectral_pair(e).r;
        for g in Generator::ALL {
            let p2 = apply_symmetry(&SymmetryOp(vec![g]), &p1);
            let r2 = transport_r(&p1, r1, &p2);
            assert!((r2 - p2.spectral_pair(e).r).norm() < 1e-15);
        }
    }

    #[test]
    fn shift_k_reproduces_four_mq_of_shifted_table() {
        let (t, mv) = (0.37, 0.5);
        let p1 = GalParams::new(t - 0.5, 0.5, 1.0, 0.0, m(mv));
        let r1 = Complex64::from(1.0 - t * t);
        let p2 = apply_symmetry(&SymmetryOp(vec![Generator::ShiftK]), &p1);
        assert_eq!((p2.a, p2.b, p2.f, p2.g), (0.5, t - 0.5, 0.0, 1.0));
        // N^2 - t^2 + m (N+t)(N+t-2p-1) at N=1, p=0
        let expected = 1.0 - t * t + mv * (1.0 + t) * t;
        assert_relative_eq!(transport_r(&p1, r1, &p2).re, expected, epsilon = 1e-14);
    }

    #[test]
    fn negate_b_sets_epsilon_two() {
        let t = 0.37;
        let p1 = GalParams::new(t - 0.5, 0.5, 1.0, 0.0, m(0.5));
        let sp1 = p1.spectral_pair(Complex64::from(0.3));
        let p2 = apply_symmetry(&SymmetryOp(vec![Generator::NegateB]), &p1);
        let sp2 = p2.spectral_pair(sp1.e);
        assert_eq!(p2.b, -1.5);
        assert_eq!(heun_dictionary(&p1, &sp1).unwrap().epsilon, 0.0);
        assert_eq!(heun_dictionary(&p2, &sp2).unwrap().epsilon, 2.0);
    }

    #[test]
    fn schrodinger_residual_is_affine_in_energy() {
        let p = GalParams::new(-0.13, 0.5, 0.0, 0.0, m(0.5));
        let pt = eval_jacobi(0.4, p.m).unwrap();
        let psi = Jet::real(0.8, 0.1, -0.3);
        let r0 = schrodinger_residual(&p, Complex64::from(0.2), &psi, &pt, 1e-3).unwrap();
        let r1 = schrodinger_residual(&p, Complex64::from(0.3), &psi, &pt, 1e-3).unwrap();
        assert_relative_eq!((r0.value - r1.value).re, 0.1 * 0.8, epsilon = 1e-14);
    }
}
