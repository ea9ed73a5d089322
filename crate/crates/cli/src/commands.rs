use anyhow::Result;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use heunqp_core::ansatz::{construct, eigenvalue_formula, laurent::Monomial};
use heunqp_core::families::{expand_family, grand_count, seed_families, FamilyEntry};
use heunqp_core::verify::{verify_families, verify_solution, verify_spec, Check, Outcome, Summary, VerifyOptions};
use heunqp_core::{AnsatzSpec, ClosedFormSolution, EllipticModulus, HeunParams, Parity};

use crate::config::{Command, RunConfig};
use crate::render::{fmt_c, fmt_opt, Output, Table};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct C {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for C {
    fn from(z: Complex64) -> Self {
        C { re: z.re, im: z.im }
    }
}

pub fn run(cfg: &RunConfig) -> Result<Output> {
    match cfg.command {
        Command::Enumerate => enumerate(cfg),
        Command::Construct => construct_cmd(cfg),
        Command::Families => families(cfg),
        Command::Count => count(cfg),
        Command::Verify => verify(cfg, false),
        Command::Oracle => verify(cfg, true),
    }
}

/// "1", "sn", "sn^3*cn*dn".
pub fn basis_label(&(i, j, k): &Monomial) -> String {
    let parts: Vec<String> = [("sn", i), ("cn", j), ("dn", k)]
        .into_iter()
        .filter(|(_, e)| *e != 0)
        .map(|(name, e)| {
            if e == 1 {
                name.to_string()
            } else {
                format!("{name}^{e}")
            }
        })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

#[derive(Debug, Clone, Serialize)]
struct SpecRecord {
    label: String,
    case: u8,
    half: String,
    n: u32,
    p: u32,
    t: f64,
    m: f64,
    b: String,
    f: String,
    g: String,
    big_m: u32,
    parity: &'static str,
    unknowns: usize,
    basis: Vec<String>,
    energy_formula: Vec<C>,
}

impl SpecRecord {
    fn new(spec: &AnsatzSpec) -> Result<Self> {
        Ok(SpecRecord {
            label: spec.label(),
            case: spec.case.number(),
            half: spec.half.to_string(),
            n: spec.n,
            p: spec.p,
            t: spec.t,
            m: spec.m.value(),
            b: spec.b.to_string(),
            f: spec.f.to_string(),
            g: spec.g.to_string(),
            big_m: spec.big_m,
            parity: match spec.parity {
                Parity::Half => "2M+1/2",
                Parity::ThreeHalf => "2M+3/2",
            },
            unknowns: spec.unknowns(),
            basis: spec.basis().iter().map(basis_label).collect(),
            energy_formula: eigenvalue_formula(spec)?.into_iter().map(C::from).collect(),
        })
    }
}

fn enumerate(cfg: &RunConfig) -> Result<Output> {
    let records = cfg.specs()?.iter().map(SpecRecord::new).collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(&[
        "label",
        "case",
        "half",
        "N",
        "p",
        "t",
        "m",
        "b",
        "f",
        "g",
        "M",
        "parity",
        "unknowns",
        "basis",
        "E_formula",
    ]);
    for r in &records {
        table.push(vec![
            r.label.clone(),
            r.case.to_string(),
            r.half.clone(),
            r.n.to_string(),
            r.p.to_string(),
            r.t.to_string(),
            r.m.to_string(),
            r.b.clone(),
            r.f.clone(),
            r.g.clone(),
            r.big_m.to_string(),
            r.parity.to_string(),
            r.unknowns.to_string(),
            r.basis.join(" "),
            r.energy_formula.iter().map(|z| fmt_c(*z)).collect::<Vec<_>>().join(" "),
        ]);
    }
    Output::new(cfg.command, &records, table)
}

#[derive(Debug, Clone, Serialize)]
struct Coefficient {
    basis: String,
    value: C,
}

#[derive(Debug, Clone, Serialize)]
struct HeunRecord {
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
    epsilon: f64,
    q: C,
    c: f64,
}

impl From<&HeunParams> for HeunRecord {
    fn from(h: &HeunParams) -> Self {
        HeunRecord {
            alpha: h.alpha,
            beta: h.beta,
            gamma: h.gamma,
            delta: h.delta,
            epsilon: h.epsilon,
            q: h.q.into(),
            c: h.c,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct Quasi {
    period: &'static str,
    mu: C,
    expected: C,
    spread: f64,
}

#[derive(Debug, Clone, Serialize)]
struct SolutionRecord {
    spec: SpecRecord,
    index: usize,
    energy: C,
    /// Closed-form branch nearest the pencil root.
    energy_formula: Option<C>,
    coefficients: Vec<Coefficient>,
    heun: HeunRecord,
    residual_phi: Option<f64>,
    residual_canonical: Option<f64>,
    quasi_periodicity: Option<Quasi>,
    degeneracy: String,
    checks: Vec<Check>,
}

fn solution_record(sol: &ClosedFormSolution, index: usize, opts: &VerifyOptions) -> Result<SolutionRecord> {
    let spec = SpecRecord::new(&sol.spec)?;
    let e = sol.energy();
    let nearest = spec
        .energy_formula
        .iter()
        .map(|c| Complex64::new(c.re, c.im))
        .min_by(|a, b| (a - e).norm().total_cmp(&(b - e).norm()))
        .map(C::from);
    let checks = verify_solution(sol, opts);
    let value = |name: &str| checks.iter().find(|c| c.name == name).and_then(|c| c.value);
    let degeneracy = match checks.iter().find(|c| c.name == "degeneracy") {
        Some(c) => match &c.outcome {
            Outcome::Pass => "pass".to_string(),
            Outcome::Fail => "fail".to_string(),
            Outcome::Skip(r) => format!("skip: {r}"),
        },
        None => "not checked".to_string(),
    };
    let quasi = sol.quasi_periodicity(&opts.grid).ok().map(|q| Quasi {
        period: q.period,
        mu: q.mu.into(),
        expected: q.expected.into(),
        spread: q.spread,
    });
    Ok(SolutionRecord {
        index,
        energy: e.into(),
        energy_formula: nearest,
        coefficients: sol
            .basis
            .iter()
            .zip(&sol.pencil.coefficients)
            .map(|(b, v)| Coefficient {
                basis: basis_label(b),
                value: (*v).into(),
            })
            .collect(),
        heun: (&sol.heun).into(),
        residual_phi: value("residual_phi"),
        residual_canonical: value("residual_canonical"),
        quasi_periodicity: quasi,
        degeneracy,
        checks,
        spec,
    })
}

fn options(cfg: &RunConfig) -> VerifyOptions {
    VerifyOptions {
        tol: cfg.tol,
        oracle: cfg.oracle,
        bloch: cfg.oracle,
        perturb_e: cfg.perturb_e,
        ..VerifyOptions::default()
    }
}

fn construct_cmd(cfg: &RunConfig) -> Result<Output> {
    let specs = cfg.specs()?;
    let opts = VerifyOptions {
        oracle: false,
        bloch: false,
        frobenius: false,
        ..options(cfg)
    };
    let per_spec: Vec<Result<Vec<SolutionRecord>>> = specs
        .par_iter()
        .map(|spec| {
            let (_, sols) = construct(spec)?;
            sols.iter()
                .enumerate()
                .map(|(i, s)| solution_record(s, i, &opts))
                .collect()
        })
        .collect();
    let mut records = Vec::new();
    for r in per_spec {
        records.extend(r?);
    }
    let mut table = Table::new(&[
        "label",
        "index",
        "E",
        "E_formula",
        "coefficients",
        "alpha",
        "beta",
        "gamma",
        "delta",
        "epsilon",
        "q",
        "c",
        "residual_phi",
        "residual_canonical",
        "mu",
        "mu_expected",
        "degeneracy",
    ]);
    let mut summary = Summary::default();
    for r in &records {
        summary = add(summary, &r.checks);
        let q = r.quasi_periodicity.as_ref();
        table.push(vec![
            r.spec.label.clone(),
            r.index.to_string(),
            fmt_c(r.energy),
            r.energy_formula.map(fmt_c).unwrap_or_default(),
            r.coefficients
                .iter()
                .map(|c| format!("{}={}", c.basis, fmt_c(c.value)))
                .collect::<Vec<_>>()
                .join("; "),
            r.heun.alpha.to_string(),
            r.heun.beta.to_string(),
            r.heun.gamma.to_string(),
            r.heun.delta.to_string(),
            r.heun.epsilon.to_string(),
            fmt_c(r.heun.q),
            r.heun.c.to_string(),
            fmt_opt(r.residual_phi),
            fmt_opt(r.residual_canonical),
            q.map(|q| fmt_c(q.mu)).unwrap_or_default(),
            q.map(|q| fmt_c(q.expected)).unwrap_or_default(),
            r.degeneracy.clone(),
        ]);
    }
    Ok(Output::new(cfg.command, &records, table)?.with_summary(summary))
}

#[derive(Debug, Clone, Serialize)]
struct FamilyRecord {
    seed: String,
    index: usize,
    word: String,
    aliases: Vec<String>,
    argument: &'static str,
    a: String,
    b: String,
    f: String,
    g: String,
    energy: String,
    alpha: String,
    beta: String,
    gamma: String,
    delta: String,
    epsilon: String,
    four_mq: String,
}

impl FamilyRecord {
    fn new(e: &FamilyEntry, index: usize) -> Self {
        let [a, b, f, g] = &e.strengths;
        FamilyRecord {
            seed: e.seed.label().to_string(),
            index,
            word: e.word.label(),
            aliases: e.aliases.iter().map(|w| w.label()).collect(),
            argument: e.recipe.argument(),
            a: a.to_string(),
            b: b.to_string(),
            f: f.to_string(),
            g: g.to_string(),
            energy: e.energy.canonical(),
            alpha: e.heun.alpha.to_string(),
            beta: e.heun.beta.to_string(),
            gamma: e.heun.gamma.to_string(),
            delta: e.heun.delta.to_string(),
            epsilon: e.heun.epsilon.to_string(),
            four_mq: e.heun.four_mq.canonical(),
        }
    }
}

fn families(cfg: &RunConfig) -> Result<Output> {
    let mut records = Vec::new();
    for seed in seed_families().iter().filter(|s| cfg.seeds.contains(&s.seed)) {
        for (i, e) in expand_family(seed)?.iter().enumerate() {
            records.push(FamilyRecord::new(e, i));
        }
    }
    let mut table = Table::new(&[
        "seed", "index", "word", "argument", "a", "b", "f", "g", "alpha", "beta", "gamma", "delta", "epsilon", "4mq",
    ]);
    for r in &records {
        table.push(vec![
            r.seed.clone(),
            r.index.to_string(),
            r.word.clone(),
            r.argument.to_string(),
            r.a.clone(),
            r.b.clone(),
            r.f.clone(),
            r.g.clone(),
            r.alpha.clone(),
            r.beta.clone(),
            r.gamma.clone(),
            r.delta.clone(),
            r.epsilon.clone(),
            r.four_mq.clone(),
        ]);
    }
    Output::new(cfg.command, &records, table)
}

fn count(cfg: &RunConfig) -> Result<Output> {
    let max_n = if cfg.n_given {
        cfg.ns.iter().copied().max().unwrap_or(0)
    } else {
        4
    };
    let report = grand_count(max_n, cfg.ts[0], cfg.ms[0])?;
    let per_seed: Vec<_> = report
        .per_seed
        .iter()
        .filter(|c| cfg.seeds.contains(&c.seed))
        .cloned()
        .collect();
    let mut table = Table::new(&["seed", "words", "distinct", "claimed", "agrees"]);
    for c in &per_seed {
        table.push(vec![
            c.seed.label().to_string(),
            c.words.to_string(),
            c.distinct.to_string(),
            c.claimed.to_string(),
            c.agrees.to_string(),
        ]);
    }
    table.push(vec![
        "total".into(),
        report.per_seed.iter().map(|c| c.words).sum::<usize>().to_string(),
        report.total.to_string(),
        report.claimed_total.to_string(),
        report.agrees.to_string(),
    ]);
    for mc in &report.multiplicity {
        table.note(format!(
            "{} N={}: {} solution sets (expected {}), {} energies, agrees={}",
            mc.seed.label(),
            mc.n,
            mc.solution_sets,
            mc.expected_sets,
            mc.energies,
            mc.agrees
        ));
    }
    table.note(format!("identification rule: {}", report.identification_rule));
    let extra = serde_json::json!({
        "total": report.total,
        "claimed_total": report.claimed_total,
        "agrees": report.agrees,
        "identification_rule": report.identification_rule,
        "multiplicity": report.multiplicity,
    });
    Ok(Output::new(cfg.command, &per_seed, table)?.with_extra(extra))
}

const ORACLE_CHECKS: [&str; 5] = [
    "ode_oracle",
    "bloch_spectrum",
    "frobenius",
    "family_ode_oracle",
    "construct",
];

fn verify(cfg: &RunConfig, oracle_only: bool) -> Result<Output> {
    let specs = cfg.specs()?;
    let mut opts = options(cfg);
    if oracle_only {
        opts.oracle = true;
        opts.bloch = true;
    }
    let mut batches: Vec<Vec<Check>> = specs.par_iter().map(|s| verify_spec(s, &opts)).collect();
    if cfg.seed_given {
        let inst = cfg.instantiations()?;
        let fam: Vec<Result<Vec<Check>>> = inst
            .par_iter()
            .map(|&(n, p, t, m)| Ok(verify_families(&cfg.seeds, n, p, t, EllipticModulus::new(m)?, &opts)))
            .collect();
        for f in fam {
            batches.push(f?);
        }
    }
    let mut checks: Vec<Check> = batches.into_iter().flatten().collect();
    if oracle_only {
        checks.retain(|c| ORACLE_CHECKS.contains(&c.name.as_str()) || c.name.starts_with("family_instantiate"));
    }
    let summary = add(Summary::default(), &checks);
    let mut table = Table::new(&["name", "subject", "status", "value", "tolerance", "detail"]);
    for c in &checks {
        let (status, reason) = match &c.outcome {
            Outcome::Pass => ("pass", None),
            Outcome::Fail => ("fail", None),
            Outcome::Skip(r) => ("skip", Some(r.clone())),
        };
        table.push(vec![
            c.name.clone(),
            c.subject.clone(),
            status.to_string(),
            fmt_opt(c.value),
            fmt_opt(c.tolerance),
            reason.or_else(|| c.detail.clone()).unwrap_or_default(),
        ]);
    }
    Ok(Output::new(cfg.command, &checks, table)?.with_summary(summary))
}

fn add(mut s: Summary, checks: &[Check]) -> Summary {
    for c in checks {
        if c.passed() {
            s.passed += 1;
        } else if c.failed() {
            s.failed += 1;
        } else {
            s.skipped += 1;
        }
    }
    s
}
