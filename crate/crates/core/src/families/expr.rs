//! Exact polynomials in `(N, p, t, m)` with rational coefficients, plus
//! an optional single two-branch radical term.
//!
//! The canonical string form is the fully expanded polynomial with terms in
//! graded-lexicographic order (`N > p > t > m`, higher total degree first).
//! Two expressions are equal iff their canonical strings are equal.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const VARS: [&str; 4] = ["N", "p", "t", "m"];

/// Exponents of `N^a p^b t^c m^d`.
type Exps = [u32; 4];

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Exps, Rational64>,
}

/// Numerical values of the symbols.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vars {
    pub n: f64,
    pub p: f64,
    pub t: f64,
    pub m: f64,
}

impl Vars {
    fn get(&self, i: usize) -> f64 {
        [self.n, self.p, self.t, self.m][i]
    }
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Rational64) -> Self {
        let mut p = Poly::zero();
        p.add_term([0; 4], c);
        p
    }

    pub fn int(c: i64) -> Self {
        Poly::constant(Rational64::from_integer(c))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Poly::constant(Rational64::new(n, d))
    }

    /// The symbol `N`, `p`, `t` or `m`.
    pub fn var(name: &str) -> Result<Self> {
        let i = VARS
            .iter()
            .position(|v| *v == name)
            .ok_or_else(|| Error::domain(format!("unknown symbol '{name}'")))?;
        let mut e = [0; 4];
        e[i] = 1;
        let mut p = Poly::zero();
        p.add_term(e, Rational64::one());
        Ok(p)
    }

    pub fn n() -> Self {
        Poly::var("N").expect("symbol")
    }
    pub fn p() -> Self {
        Poly::var("p").expect("symbol")
    }
    pub fn t() -> Self {
        Poly::var("t").expect("symbol")
    }
    pub fn m() -> Self {
        Poly::var("m").expect("symbol")
    }

    fn add_term(&mut self, e: Exps, c: Rational64) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(Rational64::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<Rational64> {
        match self.terms.len() {
            0 => Some(Rational64::zero()),
            1 => self.terms.get(&[0; 4]).copied(),
            _ => None,
        }
    }

    pub fn pow(&self, k: u32) -> Poly {
        (0..k).fold(Poly::int(1), |acc, _| &acc * self)
    }

    pub fn scale(&self, c: Rational64) -> Poly {
        let mut out = Poly::zero();
        for (&e, &v) in &self.terms {
            out.add_term(e, v * c);
        }
        out
    }

    /// Substitute `t -> -t`.
    pub fn reflect_t(&self) -> Poly {
        let mut out = Poly::zero();
        for (&e, &v) in &self.terms {
            out.add_term(e, if e[2] % 2 == 1 { -v } else { v });
        }
        out
    }

    pub fn depends_on(&self, var: usize) -> bool {
        self.terms.keys().any(|e| e[var] > 0)
    }

    pub fn eval(&self, vars: &Vars) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut x = c.to_f64().unwrap_or(f64::NAN);
                for (i, &k) in e.iter().enumerate() {
                    x *= vars.get(i).powi(k as i32);
                }
                x
            })
            .sum()
    }

    fn ordered(&self) -> Vec<(Exps, Rational64)> {
        let mut v: Vec<_> = self.terms.iter().map(|(e, c)| (*e, *c)).collect();
        v.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        v
    }

    pub fn parse(src: &str) -> Result<Poly> {
        let mut p = Parser {
            toks: tokenize(src)?,
            pos: 0,
        };
        let out = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(Error::domain(format!("trailing input in '{src}'")));
        }
        Ok(out)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.ordered();
        if terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (e, c)) in terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            match (idx, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| {
                    if k == 1 {
                        VARS[i].to_string()
                    } else {
                        format!("{}^{}", VARS[i], k)
                    }
                })
                .collect();
            if mono.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                f.write_str(&mono.join("*"))?;
            } else {
                write!(f, "{}*{}", mag, mono.join("*"))?;
            }
        }
        Ok(())
    }
}

impl Serialize for Poly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Poly::parse(&s).map_err(serde::de::Error::custom)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (&e, &v) in &o.terms {
            out.add_term(e, v);
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        self + &(-o)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-Rational64::one())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (a, &x) in &self.terms {
            for (b, &y) in &o.terms {
                let e = [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]];
                out.add_term(e, x * y);
            }
        }
        out
    }
}

macro_rules! owned_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr for Poly {
            type Output = Poly;
            fn $f(self, o: Poly) -> Poly {
                (&self).$f(&o)
            }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(i64),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Tok::Num(
                s.parse().map_err(|_| Error::domain(format!("bad integer '{s}'")))?,
            ));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::domain(format!("unexpected character '{c}' in '{src}'")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek_op(&self) -> Option<char> {
        match self.toks.get(self.pos) {
            Some(Tok::Op(c)) => Some(*c),
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == '+' { acc + rhs } else { acc - rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = if op == '*' {
                acc * rhs
            } else {
                let c = rhs
                    .as_constant()
                    .filter(|c| !c.is_zero())
                    .ok_or_else(|| Error::domain("division only by nonzero constants"))?;
                acc.scale(c.recip())
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Poly> {
        match self.peek_op() {
            Some('-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            match self.toks.get(self.pos) {
                Some(Tok::Num(k)) if *k >= 0 && *k < 64 => {
                    self.pos += 1;
                    Ok(base.pow(*k as u32))
                }
                _ => Err(Error::domain("exponent must be a small non-negative integer")),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Poly> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Poly::int(n))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                Poly::var(&name)
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek_op() != Some(')') {
                    return Err(Error::domain("unbalanced parentheses"));
                }
                self.pos += 1;
                Ok(e)
            }
            other => Err(Error::domain(format!("unexpected token {other:?}"))),
        }
    }
}

/// `poly + sign * sigma * sqrt(radicand)`, `sigma = +-1` the branch.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Radical {
    pub sign: i8,
    pub radicand: Poly,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Expr {
    pub poly: Poly,
    pub radical: Option<Radical>,
}

impl Expr {
    pub fn rational(poly: Poly) -> Self {
        Expr { poly, radical: None }
    }

    pub fn two_branch(poly: Poly, radicand: Poly) -> Self {
        Expr {
            poly,
            radical: Some(Radical { sign: 1, radicand }),
        }
    }

    /// Parse `poly` or `poly +- sqrt(radicand)` (the `+-` may be written `±`).
    pub fn parse(src: &str) -> Result<Expr> {
        let norm = src.replace('±', "+-");
        if let Some(idx) = norm.find("+-") {
            let (head, tail) = norm.split_at(idx);
            let tail = tail[2..].trim();
            let inner = tail
                .strip_prefix("sqrt(")
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(|| Error::domain(format!("expected sqrt(...) after '+-' in '{src}'")))?;
            let head = if head.trim().is_empty() {
                Poly::zero()
            } else {
                Poly::parse(head)?
            };
            Ok(Expr::two_branch(head, Poly::parse(inner)?))
        } else {
            Ok(Expr::rational(Poly::parse(&norm)?))
        }
    }

    pub fn is_two_branch(&self) -> bool {
        self.radical.is_some()
    }

    /// Add a polynomial; the radical term is untouched.
    pub fn plus(&self, p: &Poly) -> Expr {
        Expr {
            poly: &self.poly + p,
            radical: self.radical.clone(),
        }
    }

    pub fn negated(&self) -> Expr {
        Expr {
            poly: -&self.poly,
            radical: self.radical.as_ref().map(|r| Radical {
                sign: -r.sign,
                radicand: r.radicand.clone(),
            }),
        }
    }

    pub fn reflect_t(&self) -> Expr {
        Expr {
            poly: self.poly.reflect_t(),
            radical: self.radical.as_ref().map(|r| Radical {
                sign: r.sign,
                radicand: r.radicand.reflect_t(),
            }),
        }
    }

    /// Value on branch `sigma` (ignored for rational expressions).
    pub fn eval(&self, vars: &Vars, sigma: i8) -> Complex64 {
        let base = Complex64::from(self.poly.eval(vars));
        match &self.radical {
            None => base,
            Some(r) => {
                let root = Complex64::from(r.radicand.eval(vars)).sqrt();
                base + root * f64::from(r.sign * sigma)
            }
        }
    }

    /// Equality of the set of branch values: the sign in front of the
    /// radical is a relabeling of the branches.
    pub fn same_branch_set(&self, other: &Expr) -> bool {
        self.poly == other.poly
            && match (&self.radical, &other.radical) {
                (None, None) => true,
                (Some(a), Some(b)) => a.radicand == b.radicand,
                _ => false,
            }
    }

    /// Canonical string; two-branch expressions print as `poly ± sqrt(D)`.
    pub fn canonical(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.radical {
            None => write!(f, "{}", self.poly),
            Some(r) if self.poly.is_zero() => write!(f, "± sqrt({})", r.radicand),
            Some(r) => write!(f, "{} ± sqrt({})", self.poly, r.radicand),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_is_expanded_and_ordered() {
        let e = Poly::parse("N^2 - t^2 + m*(N+t)*(N+t-2*p-1)").unwrap();
        let again = Poly::parse(&e.to_string()).unwrap();
        assert_eq!(e, again);
        assert_eq!(e.to_string(), again.to_string());
        assert!(e.to_string().starts_with("N^2*m"), "{e}");
    }

    #[test]
    fn rational_coefficients() {
        let e = Poly::parse("(N - t)/2 + 1/2").unwrap();
        assert_eq!(e.to_string(), "1/2*N - 1/2*t + 1/2");
        assert_eq!(Poly::parse("-(N+t)/2").unwrap(), Poly::parse("-1/2*N - 1/2*t").unwrap());
    }

    #[test]
    fn arithmetic_identities() {
        let a = Poly::parse("(N+1)^2").unwrap();
        let b = Poly::parse("N^2 + 2*N + 1").unwrap();
        assert_eq!(a, b);
        assert!((&a - &b).is_zero());
    }

    #[test]
    fn reflection_flips_odd_powers_of_t() {
        let e = Poly::parse("t^3 + t^2 + t*m").unwrap();
        assert_eq!(e.reflect_t(), Poly::parse("-t^3 + t^2 - t*m").unwrap());
    }

    #[test]
    fn branch_sets_ignore_radical_sign() {
        let a = Expr::parse("N^2 - 1 ± sqrt(4*t^2 + m)").unwrap();
        let b = a.negated().negated();
        let c = Expr {
            radical: a.radical.clone().map(|r| Radical { sign: -1, ..r }),
            ..a.clone()
        };
        assert!(a.same_branch_set(&b));
        assert!(a.same_branch_set(&c));
        assert!(!a.same_branch_set(&Expr::parse("N^2 - 1").unwrap()));
    }

    #[test]
    fn evaluation() {
        let v = Vars {
            n: 2.0,
            p: 1.0,
            t: 0.5,
            m: 0.25,
        };
        let e = Expr::parse("N*p + t ± sqrt(-m)").unwrap();
        assert!((e.eval(&v, 1) - Complex64::new(2.5, 0.5)).norm() < 1e-15);
        assert!((e.eval(&v, -1) - Complex64::new(2.5, -0.5)).norm() < 1e-15);
    }

    #[test]
    fn parse_errors() {
        assert!(Poly::parse("N + q").is_err());
        assert!(Poly::parse("(N + 1").is_err());
        assert!(Poly::parse("N / t").is_err());
        assert!(Expr::parse("N +- t").is_err());
    }
}
