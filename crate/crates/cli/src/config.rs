use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{Context, Result};
use clap::{Args, Subcommand, ValueEnum};
use num_rational::Rational64;

use heunqp_core::families::Seed;
use heunqp_core::verify::Tolerances;
use heunqp_core::{AnsatzSpec, Case, EllipticModulus, Error};

/// Bad flags or config values. Exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// List the ansatz specifications a sweep covers
    Enumerate,
    /// Build closed-form solutions and report energies, coefficients and Heun parameters
    Construct,
    /// Print the symbolic family tables generated from the seeds
    Families,
    /// Count distinct family entries and per-N solution multiplicities
    Count,
    /// Run every check on the swept solutions (and families with --seed)
    Verify,
    /// Run only the ODE, Bloch and Frobenius oracles
    Oracle,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Enumerate => "enumerate",
            Command::Construct => "construct",
            Command::Families => "families",
            Command::Count => "count",
            Command::Verify => "verify",
            Command::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Flags shared by every subcommand. Each may also come from `--config`;
/// flags win.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Case numbers, e.g. "1" or "1,3" [default: all]
    #[arg(long, global = true)]
    pub case: Option<String>,
    /// Values of N, comma separated [default: 0,1,2]
    #[arg(long = "N", global = true)]
    pub n: Option<String>,
    /// Values of p [default: every p <= N]
    #[arg(long, global = true)]
    pub p: Option<String>,
    /// Values of t [default: 0.37,0.81]
    #[arg(long, global = true)]
    pub t: Option<String>,
    /// Values of the modulus m in (0,1) [default: 0.36,0.75]
    #[arg(long, global = true)]
    pub m: Option<String>,
    /// Half-integral b for case 1, e.g. "1/2" or "1/2,3/2"
    #[arg(long = "b-half", global = true)]
    pub b_half: Option<String>,
    /// Half-integral f for case 2
    #[arg(long = "f-half", global = true)]
    pub f_half: Option<String>,
    /// Half-integral g for case 3
    #[arg(long = "g-half", global = true)]
    pub g_half: Option<String>,
    /// Residual tolerance, or named overrides like "ode=1e-7,bloch=1e-6"
    #[arg(long, global = true)]
    pub tol: Option<String>,
    /// Output format [default: json]
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// Write output here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Family seed: eq16, eq17, eq3.21, eq3.22, eq3.29, eq3.30 or all
    #[arg(long, global = true)]
    pub seed: Option<String>,
    /// Shift every pencil energy by this amount before verifying
    #[arg(long = "perturb-e", global = true, allow_hyphen_values = true)]
    pub perturb_e: Option<String>,
    /// Skip the ODE and Bloch oracles in verify
    #[arg(long = "no-oracle", global = true)]
    pub no_oracle: bool,
    /// Flat key = value file with the same keys as the flags
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub cases: Vec<Case>,
    /// Halves per case, indexed by `case.number() - 1`.
    pub halves: [Vec<Rational64>; 3],
    pub ns: Vec<u32>,
    pub n_given: bool,
    pub ps: Option<Vec<u32>>,
    pub ts: Vec<f64>,
    pub ms: Vec<f64>,
    pub tol: Tolerances,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub seeds: Vec<Seed>,
    pub seed_given: bool,
    pub perturb_e: Option<f64>,
    pub oracle: bool,
}

const KEYS: [&str; 14] = [
    "case",
    "N",
    "p",
    "t",
    "m",
    "b-half",
    "f-half",
    "g-half",
    "tol",
    "format",
    "out",
    "seed",
    "perturb-e",
    "no-oracle",
];

/// Parse `key = value` lines; `#` starts a comment.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("{}:{}: expected key = value", path.display(), i + 1)))?;
        let k = k.trim().trim_start_matches("--");
        if !KEYS.contains(&k) {
            return Err(usage(format!("{}:{}: unknown key '{k}'", path.display(), i + 1)));
        }
        map.insert(k.to_string(), v.trim().to_string());
    }
    Ok(map)
}

impl Flags {
    /// Fill unset flags from the config file.
    pub fn merged(mut self) -> Result<Flags> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let file = read_config_file(&path)?;
        let take = |slot: &mut Option<String>, key: &str| {
            if slot.is_none() {
                *slot = file.get(key).cloned();
            }
        };
        take(&mut self.case, "case");
        take(&mut self.n, "N");
        take(&mut self.p, "p");
        take(&mut self.t, "t");
        take(&mut self.m, "m");
        take(&mut self.b_half, "b-half");
        take(&mut self.f_half, "f-half");
        take(&mut self.g_half, "g-half");
        take(&mut self.tol, "tol");
        take(&mut self.format, "format");
        take(&mut self.seed, "seed");
        take(&mut self.perturb_e, "perturb-e");
        if self.out.is_none() {
            self.out = file.get("out").map(PathBuf::from);
        }
        if !self.no_oracle {
            if let Some(v) = file.get("no-oracle") {
                self.no_oracle = parse_bool("no-oracle", v)?;
            }
        }
        Ok(self)
    }
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(usage(format!("{key}: expected true or false, got '{v}'"))),
    }
}

fn parse_list<T: FromStr>(key: &str, src: &str) -> Result<Vec<T>> {
    let items: Vec<T> = src
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>()
                .map_err(|_| usage(format!("--{key}: cannot parse '{s}'")))
        })
        .collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(usage(format!("--{key}: empty list")));
    }
    Ok(items)
}

fn parse_halves(key: &str, src: &str) -> Result<Vec<Rational64>> {
    let halves: Vec<Rational64> = parse_list(key, src)?;
    for h in &halves {
        if *h.denom() != 2 || *h.numer() <= 0 {
            return Err(usage(format!("--{key}: {h} is not a positive half-odd integer")));
        }
    }
    Ok(halves)
}

fn parse_tol(src: &str) -> Result<Tolerances> {
    let mut tol = Tolerances::default();
    if let Ok(v) = src.trim().parse::<f64>() {
        tol.residual = v;
    } else {
        for item in src.split(',') {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| usage(format!("--tol: expected name=value, got '{item}'")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| usage(format!("--tol: bad number in '{item}'")))?;
            let slot = match k.trim() {
                "residual" => &mut tol.residual,
                "canonical" => &mut tol.canonical,
                "formula" => &mut tol.formula,
                "quasi" => &mut tol.quasi,
                "wronskian" => &mut tol.wronskian,
                "frobenius" => &mut tol.frobenius,
                "ode" => &mut tol.ode,
                "bloch" => &mut tol.bloch,
                "control_shift" => &mut tol.control_shift,
                "control_floor" => &mut tol.control_floor,
                other => return Err(usage(format!("--tol: unknown tolerance '{other}'"))),
            };
            *slot = v;
        }
    }
    let all = [
        tol.residual,
        tol.canonical,
        tol.formula,
        tol.quasi,
        tol.wronskian,
        tol.frobenius,
        tol.ode,
        tol.bloch,
        tol.control_shift,
        tol.control_floor,
    ];
    if all.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(usage("--tol: tolerances must be positive and finite"));
    }
    Ok(tol)
}

impl RunConfig {
    pub fn new(command: Command, flags: Flags) -> Result<Self> {
        let flags = flags.merged()?;
        let half_flags = [&flags.b_half, &flags.f_half, &flags.g_half];
        let cases = match &flags.case {
            Some(src) => {
                let nums: Vec<u8> = parse_list("case", src)?;
                let mut cases = nums
                    .into_iter()
                    .map(|n| Case::from_number(n).map_err(|e| usage(e.to_string())))
                    .collect::<Result<Vec<_>>>()?;
                cases.sort();
                cases.dedup();
                cases
            }
            // a half flag alone selects its case
            None if half_flags.iter().any(|h| h.is_some()) => Case::ALL
                .into_iter()
                .filter(|c| half_flags[c.number() as usize - 1].is_some())
                .collect(),
            None => Case::ALL.to_vec(),
        };
        let names = ["b-half", "f-half", "g-half"];
        for (i, h) in half_flags.iter().enumerate() {
            if h.is_some() && !cases.iter().any(|c| c.number() as usize == i + 1) {
                return Err(usage(format!("--{} applies to case {} only", names[i], i + 1)));
            }
        }
        let default_halves = vec![Rational64::new(1, 2), Rational64::new(3, 2)];
        let mut halves: [Vec<Rational64>; 3] = Default::default();
        for i in 0..3 {
            halves[i] = match half_flags[i] {
                Some(src) => parse_halves(names[i], src)?,
                None => default_halves.clone(),
            };
        }
        let ns = match &flags.n {
            Some(src) => parse_list::<u32>("N", src)?,
            None => vec![0, 1, 2],
        };
        let ps = flags.p.as_deref().map(|s| parse_list::<u32>("p", s)).transpose()?;
        let ts = match &flags.t {
            Some(src) => parse_list::<f64>("t", src)?,
            None => vec![0.37, 0.81],
        };
        if let Some(t) = ts.iter().find(|t| !t.is_finite()) {
            return Err(usage(format!("--t: {t} is not finite")));
        }
        let ms = match &flags.m {
            Some(src) => parse_list::<f64>("m", src)?,
            None => vec![0.36, 0.75],
        };
        if let Some(m) = ms.iter().find(|m| !(**m > 0.0 && **m < 1.0)) {
            return Err(usage(format!("--m: {m} is outside (0, 1)")));
        }
        let format = match flags.format.as_deref() {
            None => Format::Json,
            Some(s) => Format::from_str(s, true).map_err(|_| usage(format!("--format: unknown format '{s}'")))?,
        };
        let seeds = match flags.seed.as_deref() {
            None | Some("all") => Seed::ALL.to_vec(),
            Some(src) => src
                .split(',')
                .map(|s| Seed::from_label(s.trim()).map_err(|e| usage(format!("--seed: {e}"))))
                .collect::<Result<_>>()?,
        };
        let perturb_e = flags
            .perturb_e
            .as_deref()
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| usage(format!("--perturb-e: cannot parse '{s}'")))
            })
            .transpose()?;
        Ok(RunConfig {
            command,
            cases,
            halves,
            n_given: flags.n.is_some(),
            ns,
            ps,
            ts,
            ms,
            tol: flags.tol.as_deref().map(parse_tol).transpose()?.unwrap_or_default(),
            format,
            out: flags.out,
            seed_given: flags.seed.is_some(),
            seeds,
            perturb_e,
            oracle: !flags.no_oracle,
        })
    }

    /// Every spec of the sweep, ordered by case, half, N, p, t, m.
    pub fn specs(&self) -> Result<Vec<AnsatzSpec>> {
        let mut out = Vec::new();
        for &case in &self.cases {
            for &half in &self.halves[case.number() as usize - 1] {
                for &n in &self.ns {
                    let ps: Vec<u32> = match &self.ps {
                        Some(ps) => ps.clone(),
                        None => (0..=n).collect(),
                    };
                    for p in ps {
                        for &t in &self.ts {
                            for &m in &self.ms {
                                out.push(spec(case, half, n, p, t, m)?);
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// `(N, p, t, m)` combinations for family checks.
    pub fn instantiations(&self) -> Result<Vec<(u32, u32, f64, f64)>> {
        let mut out = Vec::new();
        for &n in &self.ns {
            let ps: Vec<u32> = match &self.ps {
                Some(ps) => ps.clone(),
                None => (0..=n).collect(),
            };
            for p in ps {
                if p > n {
                    return Err(usage(format!("invalid ansatz specification: p = {p} exceeds N = {n}")));
                }
                for &t in &self.ts {
                    for &m in &self.ms {
                        out.push((n, p, t, m));
                    }
                }
            }
        }
        Ok(out)
    }
}

fn spec(case: Case, half: Rational64, n: u32, p: u32, t: f64, m: f64) -> Result<AnsatzSpec> {
    let modulus = EllipticModulus::new(m).map_err(|e| usage(e.to_string()))?;
    AnsatzSpec::new(case, half, n, p, t, modulus).map_err(|e| match e {
        Error::InvalidSpec(_) => usage(e.to_string()),
        other => other.into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags() -> Flags {
        Flags::default()
    }

    #[test]
    fn defaults_cover_all_cases() {
        let cfg = RunConfig::new(Command::Verify, flags()).unwrap();
        assert_eq!(cfg.cases, Case::ALL.to_vec());
        assert_eq!(cfg.ns, vec![0, 1, 2]);
        // 3 cases x 2 halves x (1+2+3) p-values x 2 t x 2 m
        assert_eq!(cfg.specs().unwrap().len(), 3 * 2 * 6 * 4);
        assert_eq!(cfg.seeds.len(), 6);
    }

    #[test]
    fn half_flag_selects_its_case() {
        let f = Flags {
            g_half: Some("3/2".into()),
            ..flags()
        };
        let cfg = RunConfig::new(Command::Construct, f).unwrap();
        assert_eq!(cfg.cases, vec![Case::GHalf]);
        assert_eq!(cfg.halves[2], vec![Rational64::new(3, 2)]);
    }

    #[test]
    fn gates_are_named() {
        let f = Flags {
            n: Some("1".into()),
            p: Some("3".into()),
            ..flags()
        };
        let err = RunConfig::new(Command::Construct, f).unwrap().specs().unwrap_err();
        assert!(err.downcast_ref::<UsageError>().is_some());
        assert!(err.to_string().contains("p = 3 exceeds N = 1"), "{err}");

        let f = Flags {
            b_half: Some("1".into()),
            ..flags()
        };
        assert!(RunConfig::new(Command::Construct, f).is_err());
        let f = Flags {
            m: Some("1.0".into()),
            ..flags()
        };
        assert!(RunConfig::new(Command::Construct, f).is_err());
        let f = Flags {
            case: Some("1".into()),
            g_half: Some("1/2".into()),
            ..flags()
        };
        assert!(RunConfig::new(Command::Construct, f).is_err());
    }

    #[test]
    fn tolerances_parse_both_forms() {
        assert_eq!(parse_tol("1e-8").unwrap().residual, 1e-8);
        let t = parse_tol("ode=1e-6, bloch=2e-6").unwrap();
        assert_eq!((t.ode, t.bloch), (1e-6, 2e-6));
        assert!(parse_tol("ode=-1").is_err());
        assert!(parse_tol("speed=1").is_err());
    }
}
