//! Exact Heun parameter families obtained from the six closed-form seeds by
//! quarter-period shifts and strength negations.
//!
//! Each seed fixes GAL strengths `(a, b, f, g)` as polynomials in `(N, p, t)`
//! and an energy `E` (two-branch for strength 3/2). A word of generators
//! permutes/negates the strengths; the energy is invariant, so
//! `4mq = m(g+b)^2 + (f+g)^2 - E` for the new strengths.

pub mod expr;
mod golden;
mod transform;

use std::collections::HashMap;
use std::fmt;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::ansatz::{construct, AnsatzSpec, Case};
use crate::elliptic::{EllipticModulus, QuarterShift};
use crate::error::{Error, Result};
use crate::gal::{Generator, SymmetryOp};
use crate::heun::HeunParams;

pub use expr::{Expr, Poly, Vars};
pub use golden::{golden_tables, FieldComparison, GoldenComparison, PrintedEntry};
pub use transform::TransformedEigenfunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Seed {
    Eq16,
    Eq17,
    Eq3_21,
    Eq3_22,
    Eq3_29,
    Eq3_30,
}

impl Seed {
    pub const ALL: [Seed; 6] = [
        Seed::Eq16,
        Seed::Eq17,
        Seed::Eq3_21,
        Seed::Eq3_22,
        Seed::Eq3_29,
        Seed::Eq3_30,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Seed::Eq16 => "eq16",
            Seed::Eq17 => "eq17",
            Seed::Eq3_21 => "eq3.21",
            Seed::Eq3_22 => "eq3.22",
            Seed::Eq3_29 => "eq3.29",
            Seed::Eq3_30 => "eq3.30",
        }
    }

    pub fn from_label(s: &str) -> Result<Self> {
        Seed::ALL
            .into_iter()
            .find(|seed| seed.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::domain(format!("unknown seed '{s}'")))
    }

    pub fn case(self) -> Case {
        match self {
            Seed::Eq16 | Seed::Eq17 => Case::BHalf,
            Seed::Eq3_21 | Seed::Eq3_22 => Case::FHalf,
            Seed::Eq3_29 | Seed::Eq3_30 => Case::GHalf,
        }
    }

    /// The half-integral strength, 1/2 or 3/2.
    pub fn half(self) -> Rational64 {
        match self {
            Seed::Eq16 | Seed::Eq3_21 | Seed::Eq3_29 => Rational64::new(1, 2),
            _ => Rational64::new(3, 2),
        }
    }

    /// `(a, b, f, g)` as polynomials.
    pub fn strengths(self) -> [Poly; 4] {
        let a = Poly::t() - Poly::frac(1, 2);
        let h = Poly::constant(self.half());
        let (n, p) = (Poly::n(), Poly::p());
        let rest = &n - &p;
        match self.case() {
            Case::BHalf => [a, h, rest, p],
            Case::FHalf => [a, rest, h, p],
            Case::GHalf => [a, p, rest, h],
        }
    }

    pub fn energy(self) -> Expr {
        let src = match self {
            Seed::Eq16 => "t^2 + m*(p+1/2)^2",
            Seed::Eq17 => {
                "1 + t^2 + m*(p+3/2)^2 - m*(2*p+1) ± sqrt((2*p+1)^2*m^2 + 4*m*(N+1)*(N-2*p) + 4*(1-m)*t^2)"
            }
            Seed::Eq3_21 => "m*t^2 + (p+1/2)^2",
            Seed::Eq3_22 => {
                "(1+t^2)*m + (p+3/2)^2 - (2*p+1) ± sqrt((2*p+1)^2 + 4*m*(N+1)*(N-2*p) - 4*m*(1-m)*t^2)"
            }
            Seed::Eq3_29 => "(N-p+1/2)^2 + m*(p+1/2)^2",
            Seed::Eq3_30 => {
                "(N-p+3/2)^2 + m*(p+3/2)^2 - (1 + 2*(N-p) + (2*p+1)*m) ± sqrt((1-m)*((2*N-2*p+1)^2 - (2*p+1)^2*m) + 4*m*t^2)"
            }
        };
        Expr::parse(src).expect("seed energy parses")
    }
}

impl fmt::Display for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Heun parameters as exact expressions in `(N, p, t, m)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolicHeun {
    pub alpha: Poly,
    pub beta: Poly,
    pub gamma: Poly,
    pub delta: Poly,
    pub epsilon: Poly,
    pub four_mq: Expr,
}

impl SymbolicHeun {
    /// Dictionary from strengths and energy; both `gamma + delta + epsilon =
    /// alpha + beta + 1` and `4 alpha beta = Q` are checked symbolically.
    pub fn from_strengths(s: &[Poly; 4], energy: &Expr) -> Result<Self> {
        let [a, b, f, g] = s;
        let half = Poly::frac(1, 2);
        let gamma = &half - g;
        let delta = &half - f;
        let epsilon = &half - b;
        let sum = &(&gamma + &delta) + &epsilon;
        let alpha = (&(a + &sum) - &half).scale(Rational64::new(1, 2));
        let beta = (&(&sum - a) - &Poly::frac(3, 2)).scale(Rational64::new(1, 2));
        let offset = &(&Poly::m() * &(g + b).pow(2)) + &(f + g).pow(2);
        let out = SymbolicHeun {
            four_mq: energy.negated().plus(&offset),
            alpha,
            beta,
            gamma,
            delta,
            epsilon,
        };
        if !out.constraint_defect().is_zero() {
            return Err(Error::Constraint(format!(
                "symbolic defect {} for strengths ({a}, {b}, {f}, {g})",
                out.constraint_defect()
            )));
        }
        let sigma = &(b + f) + g;
        let q = &(&sigma * &(&sigma - &Poly::int(1))) - &(a * &(a + &Poly::int(1)));
        if (&out.alpha * &out.beta).scale(Rational64::from_integer(4)) != q {
            return Err(Error::Constraint(format!(
                "4 alpha beta != Q for strengths ({a}, {b}, {f}, {g})"
            )));
        }
        Ok(out)
    }

    pub fn constraint_defect(&self) -> Poly {
        &(&(&(&self.gamma + &self.delta) + &self.epsilon) - &(&self.alpha + &self.beta)) - &Poly::int(1)
    }

    /// Numerical parameters on branch `sigma`; `c = 1/m`.
    pub fn instantiate(&self, v: &Vars, sigma: i8) -> Result<HeunParams> {
        HeunParams::new(
            self.alpha.eval(v),
            self.beta.eval(v),
            self.gamma.eval(v),
            self.delta.eval(v),
            self.epsilon.eval(v),
            self.four_mq.eval(v, sigma) / (4.0 * v.m),
            1.0 / v.m,
        )
    }

    /// Identification key: `alpha`/`beta` unordered, `4mq` as a branch set.
    pub fn key(&self) -> DedupKey {
        let (mut x, mut y) = (self.alpha.to_string(), self.beta.to_string());
        if x > y {
            std::mem::swap(&mut x, &mut y);
        }
        let mq = match &self.four_mq.radical {
            None => self.four_mq.canonical(),
            Some(r) => format!("{} ± sqrt({})", self.four_mq.poly, r.radicand),
        };
        DedupKey([
            self.gamma.to_string(),
            self.delta.to_string(),
            self.epsilon.to_string(),
            x,
            y,
            mq,
        ])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DedupKey(pub [String; 6]);

/// How the transformed `F` is built from the seed eigenfunction:
/// `F(y) = [dn^b' cn^f' sn^g'](y) * [dn^-b cn^-f sn^-g](T y) * phi_seed(T y)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Recipe {
    pub shift: QuarterShift,
    /// `(b, f, g)` of the seed.
    pub seed_exponents: [Poly; 3],
    /// `(b', f', g')` of the entry.
    pub exponents: [Poly; 3],
}

impl Recipe {
    pub fn argument(&self) -> &'static str {
        match self.shift {
            QuarterShift::None => "y",
            QuarterShift::K => "y+K",
            QuarterShift::IKPrime => "y+iK'",
            QuarterShift::KIKPrime => "y+K+iK'",
        }
    }
}

impl fmt::Display for Recipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [b, ff, g] = &self.exponents;
        let [sb, sf, sg] = &self.seed_exponents;
        let arg = self.argument();
        if self.shift == QuarterShift::None {
            let db = b - sb;
            let df = ff - sf;
            let dg = g - sg;
            write!(f, "F_seed(y) * dn^({db}) cn^({df}) sn^({dg})")
        } else {
            write!(
                f,
                "F_seed({arg}) * [dn^({b}) cn^({ff}) sn^({g})](y) / [dn^({sb}) cn^({sf}) sn^({sg})]({arg})"
            )
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyEntry {
    pub seed: Seed,
    /// Representative word (shortest generating this entry).
    pub word: SymmetryOp,
    /// Every word identified with this entry.
    pub aliases: Vec<SymmetryOp>,
    pub strengths: [Poly; 4],
    pub energy: Expr,
    pub heun: SymbolicHeun,
    pub recipe: Recipe,
}

impl FamilyEntry {
    fn from_word(seed: Seed, word: SymmetryOp) -> Result<Self> {
        let base = seed.strengths();
        // slot -> (seed slot, negated); negation is an involution
        let mut slots = [(0usize, false), (1, false), (2, false), (3, false)];
        let mut shift = QuarterShift::None;
        for g in &word.0 {
            slots = g.permute(slots, |(i, n)| (i, !n));
            shift = match (g, shift) {
                (Generator::ShiftK, QuarterShift::None) => QuarterShift::K,
                (Generator::ShiftIKPrime, QuarterShift::None) => QuarterShift::IKPrime,
                (Generator::ShiftKIKPrime, QuarterShift::None) => QuarterShift::KIKPrime,
                (Generator::ShiftK | Generator::ShiftIKPrime | Generator::ShiftKIKPrime, _) => {
                    return Err(Error::domain(format!("word {word} composes two shifts")));
                }
                (_, sh) => sh,
            };
        }
        let s = slots.map(|(i, neg)| {
            if neg {
                -&(&base[i] + &Poly::int(1))
            } else {
                base[i].clone()
            }
        });
        let energy = seed.energy();
        let heun = SymbolicHeun::from_strengths(&s, &energy)?;
        Ok(FamilyEntry {
            seed,
            aliases: vec![word.clone()],
            word,
            recipe: Recipe {
                shift,
                seed_exponents: [base[1].clone(), base[2].clone(), base[3].clone()],
                exponents: [s[1].clone(), s[2].clone(), s[3].clone()],
            },
            strengths: s,
            energy,
            heun,
        })
    }

    pub fn vars(n: u32, p: u32, t: f64, m: f64) -> Vars {
        Vars {
            n: n as f64,
            p: p as f64,
            t,
            m,
        }
    }

    /// Branch whose energy matches `e`, if any (always `+1` for rational energies).
    pub fn branch_for(&self, v: &Vars, e: num_complex::Complex64) -> Option<i8> {
        let tol = 1e-8 * e.norm().max(1.0);
        [1i8, -1]
            .into_iter()
            .filter(|&s| self.energy.is_two_branch() || s == 1)
            .map(|s| (s, (self.energy.eval(v, s) - e).norm()))
            .filter(|(_, d)| *d <= tol)
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(s, _)| s)
    }
}

/// The six seed entries (identity word).
pub fn seed_families() -> Vec<FamilyEntry> {
    Seed::ALL
        .iter()
        .map(|&s| FamilyEntry::from_word(s, SymmetryOp::identity()).expect("seeds satisfy the constraint"))
        .collect()
}

/// All 64 words: optional `t`-reflection, at most one quarter shift, then any
/// subset of the `b`, `f`, `g` negations.
pub fn expansion_words() -> Vec<SymmetryOp> {
    let shifts = [
        None,
        Some(Generator::ShiftK),
        Some(Generator::ShiftIKPrime),
        Some(Generator::ShiftKIKPrime),
    ];
    let negs = [Generator::NegateB, Generator::NegateF, Generator::NegateG];
    let mut out = Vec::with_capacity(64);
    for tref in [false, true] {
        for shift in shifts {
            for mask in 0..8u8 {
                let mut w = SymmetryOp::identity();
                if tref {
                    w = w.then(Generator::TReflection);
                }
                if let Some(s) = shift {
                    w = w.then(s);
                }
                for (i, &g) in negs.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        w = w.then(g);
                    }
                }
                out.push(w);
            }
        }
    }
    out
}

pub const IDENTIFICATION_RULE: &str = "entries are identified when gamma, delta, epsilon and 4mq agree exactly \
     (4mq compared as a set of branch values) and {alpha, beta} agree as an unordered pair";

/// Apply every expansion word to `seed` and merge identical parameter sets.
pub fn expand_family(seed: &FamilyEntry) -> Result<Vec<FamilyEntry>> {
    let mut out: Vec<FamilyEntry> = Vec::new();
    let mut index: HashMap<DedupKey, usize> = HashMap::new();
    for w in expansion_words() {
        let mut full = seed.word.clone();
        full.0.extend(w.0.iter().copied());
        let e = FamilyEntry::from_word(seed.seed, full)?;
        match index.get(&e.heun.key()) {
            Some(&i) => out[i].aliases.push(e.word),
            None => {
                index.insert(e.heun.key(), out.len());
                out.push(e);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedCount {
    pub seed: Seed,
    pub words: usize,
    pub distinct: usize,
    pub claimed: usize,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplicityCheck {
    pub seed: Seed,
    pub n: u32,
    /// Distinct `p` values for which the pencil has accepted roots.
    pub solution_sets: usize,
    /// Distinct energies over all `p`.
    pub energies: usize,
    pub expected_sets: usize,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    pub per_seed: Vec<SeedCount>,
    pub total: usize,
    pub claimed_total: usize,
    pub agrees: bool,
    pub identification_rule: String,
    pub multiplicity: Vec<MultiplicityCheck>,
}

pub const CLAIMED_PER_SEED: usize = 32;
pub const CLAIMED_TOTAL: usize = 192;

/// Expand all seeds and check the per-`N` multiplicity of the `b = 1/2` and
/// `b = 3/2` constructions for `N <= max_n` at `(t, m)`.
pub fn grand_count(max_n: u32, t: f64, m: f64) -> Result<CountReport> {
    let mut per_seed = Vec::new();
    for s in seed_families() {
        let fam = expand_family(&s)?;
        let words = fam.iter().map(|e| e.aliases.len()).sum();
        per_seed.push(SeedCount {
            seed: s.seed,
            words,
            distinct: fam.len(),
            claimed: CLAIMED_PER_SEED,
            agrees: fam.len() == CLAIMED_PER_SEED,
        });
    }
    let total = per_seed.iter().map(|c| c.distinct).sum();
    let modulus = EllipticModulus::new(m)?;
    let mut multiplicity = Vec::new();
    for seed in [Seed::Eq16, Seed::Eq17] {
        for n in 0..=max_n {
            multiplicity.push(multiplicity_check(seed, n, t, modulus)?);
        }
    }
    Ok(CountReport {
        per_seed,
        total,
        claimed_total: CLAIMED_TOTAL,
        agrees: total == CLAIMED_TOTAL,
        identification_rule: IDENTIFICATION_RULE.to_string(),
        multiplicity,
    })
}

fn multiplicity_check(seed: Seed, n: u32, t: f64, m: EllipticModulus) -> Result<MultiplicityCheck> {
    let mut sets = 0;
    let mut energies: Vec<num_complex::Complex64> = Vec::new();
    let per_set = if seed.energy().is_two_branch() { 2 } else { 1 };
    let mut branch_counts_ok = true;
    for p in 0..=n {
        let spec = AnsatzSpec::new(seed.case(), seed.half(), n, p, t, m)?;
        let (_, sols) = construct(&spec)?;
        if !sols.is_empty() {
            sets += 1;
        }
        branch_counts_ok &= sols.len() == per_set;
        for s in sols {
            let e = s.energy();
            if !energies.iter().any(|x| (x - e).norm() <= 1e-9 * e.norm().max(1.0)) {
                energies.push(e);
            }
        }
    }
    let expected = n as usize + 1;
    Ok(MultiplicityCheck {
        seed,
        n,
        solution_sets: sets,
        energies: energies.len(),
        expected_sets: expected,
        agrees: sets == expected && branch_counts_ok && energies.len() == expected * per_set,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry_with(fam: &[FamilyEntry], gens: &[Generator]) -> FamilyEntry {
        let w = SymmetryOp(gens.to_vec());
        fam.iter()
            .find(|e| e.aliases.contains(&w))
            .cloned()
            .unwrap_or_else(|| panic!("no entry for {w}"))
    }

    #[test]
    fn seed_eq16_at_n1() {
        let s = &seed_families()[0];
        assert_eq!(s.seed, Seed::Eq16);
        let v = FamilyEntry::vars(1, 0, 0.3, 0.5);
        let h = s.heun.instantiate(&v, 1).unwrap();
        assert!((h.gamma - 0.5).abs() < 1e-15);
        assert!((h.delta + 0.5).abs() < 1e-15);
        assert_eq!(h.epsilon, 0.0);
        assert!((h.alpha + 0.35).abs() < 1e-15);
        assert!((h.beta + 0.65).abs() < 1e-15);
        assert!((h.four_mq().re - 0.91).abs() < 1e-14);
    }

    #[test]
    fn eq3_29_has_vanishing_q() {
        let s = seed_families().into_iter().find(|e| e.seed == Seed::Eq3_29).unwrap();
        assert!(s.heun.four_mq.poly.is_zero());
        assert!(s.heun.four_mq.radical.is_none());
    }

    #[test]
    fn sixty_four_words_give_thirty_two_sets() {
        assert_eq!(expansion_words().len(), 64);
        for s in seed_families() {
            let fam = expand_family(&s).unwrap();
            assert_eq!(fam.iter().map(|e| e.aliases.len()).sum::<usize>(), 64);
            assert_eq!(fam.len(), 32, "{}", s.seed);
            for e in &fam {
                assert!(e.heun.constraint_defect().is_zero());
            }
        }
    }

    #[test]
    fn shift_k_gives_the_expected_row() {
        let fam = expand_family(&seed_families()[0]).unwrap();
        let e = entry_with(&fam, &[Generator::ShiftK]);
        assert_eq!(e.heun.gamma, Poly::parse("1/2-N+p").unwrap());
        assert_eq!(e.heun.epsilon, Poly::parse("1-t").unwrap());
        let mq = Expr::parse("N^2-t^2+m*(N+t)*(N+t-2*p-1)").unwrap();
        assert!(e.heun.four_mq.same_branch_set(&mq));
        assert_eq!(e.recipe.shift, QuarterShift::K);
    }

    #[test]
    fn negations_match_printed_q() {
        let fam = expand_family(&seed_families()[0]).unwrap();
        let e = entry_with(&fam, &[Generator::NegateF, Generator::NegateG]);
        assert!(e.heun.four_mq.same_branch_set(&Expr::parse("N^2-t^2+4*(N+1)").unwrap()));
        let e = entry_with(&fam, &[Generator::NegateB]);
        assert_eq!(e.heun.epsilon, Poly::int(2));
    }

    #[test]
    fn reflection_only_swaps_alpha_and_beta() {
        let fam = expand_family(&seed_families()[0]).unwrap();
        let id = entry_with(&fam, &[]);
        assert!(id.aliases.contains(&SymmetryOp(vec![Generator::TReflection])));
    }

    #[test]
    fn gamma_values_follow_the_four_groups() {
        let fam = expand_family(&seed_families()[0]).unwrap();
        let allowed: Vec<Poly> = ["1/2-p", "3/2+p", "1/2+p-N", "3/2+N-p", "0", "2", "1-t", "1+t"]
            .iter()
            .map(|s| Poly::parse(s).unwrap())
            .collect();
        for e in &fam {
            assert!(allowed.contains(&e.heun.gamma), "{}", e.heun.gamma);
        }
    }

    #[test]
    fn three_half_seed_replaces_zero_and_two() {
        let fam = expand_family(&seed_families()[1]).unwrap();
        let eps: Vec<String> = fam.iter().map(|e| e.heun.epsilon.to_string()).collect();
        assert!(eps.contains(&"-1".to_string()));
        assert!(eps.contains(&"3".to_string()));
        assert!(!eps.contains(&"0".to_string()));
        assert!(!eps.contains(&"2".to_string()));
    }

    #[test]
    fn seed_labels_round_trip() {
        for s in Seed::ALL {
            assert_eq!(Seed::from_label(s.label()).unwrap(), s);
        }
        assert!(Seed::from_label("eq99").is_err());
    }

    #[test]
    fn multiplicity_is_n_plus_one() {
        let m = EllipticModulus::new(0.5).unwrap();
        let c = multiplicity_check(Seed::Eq16, 3, 0.37, m).unwrap();
        assert_eq!(c.solution_sets, 4);
        assert!(c.agrees);
    }
}
