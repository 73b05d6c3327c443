//! Flat `key = value` run configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use divcorr_core::{NumericShiftSet, Rational};

use crate::instances::{IdentityKind, Profile};

/// Anything wrong with the configuration; maps to exit status 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    VerifyLocal,
    Tau,
    Correlate,
    Recipe,
    Compare,
    Multiplicity,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::VerifyLocal => "verify-local",
            Mode::Tau => "tau",
            Mode::Correlate => "correlate",
            Mode::Recipe => "recipe",
            Mode::Compare => "compare",
            Mode::Multiplicity => "multiplicity",
        }
    }
}

impl FromStr for Mode {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, ConfigError> {
        Ok(match s {
            "verify-local" => Mode::VerifyLocal,
            "tau" => Mode::Tau,
            "correlate" => Mode::Correlate,
            "recipe" => Mode::Recipe,
            "compare" => Mode::Compare,
            "multiplicity" => Mode::Multiplicity,
            _ => return Err(ConfigError(format!("unknown mode '{s}'"))),
        })
    }
}

/// Every recognised key with its documentation line.
pub const KEYS: &[(&str, &str)] = &[
    ("mode", "suite to run"),
    ("seed", "seed for generated instances"),
    ("profile", "small or medium instance profile"),
    ("jobs", "worker threads, 0 for the default"),
    ("out", "path of the JSON report"),
    ("csv", "path of the CSV rows for numeric methods"),
    ("identities", "identity kinds for verify-local"),
    ("count", "instances per identity kind (defaults per kind)"),
    ("witness", "instances per kind rerun with doubled bounds"),
    ("order", "X-order for the identity checks"),
    ("order_theorem4", "X-order for the theorem4 checks"),
    ("A", "left shift list"),
    ("B", "right shift list"),
    ("T", "height"),
    ("X", "Dirichlet polynomial length"),
    ("eps", "band tolerance of the correlation sum"),
    ("direct", "also run the direct integral in correlate mode"),
    ("n", "tau arguments"),
    ("identity_tol", "relative tolerance between direct integral and correlation sum"),
    ("recipe_tol", "relative tolerance between recipe and correlation sum"),
    ("kmax", "largest k for the swap multiplicity grid"),
    ("star_kmax", "largest k for the star-system grid"),
    ("star_grid", "values of m and n for the star-system grid"),
];

/// Parsed configuration. Unset keys take the documented defaults.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub seed: u64,
    pub profile: Profile,
    pub jobs: usize,
    pub out: Option<String>,
    pub csv: Option<String>,
    pub identities: Vec<IdentityKind>,
    pub count: Option<usize>,
    pub witness: usize,
    pub order: u32,
    pub order_theorem4: u32,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub t: f64,
    pub x: u64,
    pub eps: f64,
    pub direct: bool,
    pub n: Vec<u64>,
    pub identity_tol: f64,
    pub recipe_tol: f64,
    pub kmax: usize,
    pub star_kmax: usize,
    pub star_grid: Vec<u64>,
}

/// m, n values for the star-system grid.
pub const DEFAULT_STAR_GRID: &[u64] = &[1, 2, 3, 4, 6, 8, 12, 16, 24, 30, 36, 48, 60, 72, 96, 120, 144, 180, 192, 200];

impl RunConfig {
    pub fn new(mode: Mode) -> Self {
        let l = 200f64.ln();
        RunConfig {
            mode,
            seed: 1,
            profile: Profile::Medium,
            jobs: 0,
            out: None,
            csv: None,
            identities: IdentityKind::ALL.to_vec(),
            count: None,
            witness: 5,
            order: 12,
            order_theorem4: 10,
            a: vec![1.0 / l],
            b: vec![2.0 / l],
            t: 200.0,
            x: 2000,
            eps: 1e-12,
            direct: false,
            n: vec![1, 2, 3, 4, 5, 6, 12, 30, 60, 360],
            identity_tol: 1e-6,
            recipe_tol: 0.10,
            kmax: 6,
            star_kmax: 3,
            star_grid: DEFAULT_STAR_GRID.to_vec(),
        }
    }

    /// Parse config text. `mode` falls back to `default_mode` when absent.
    pub fn parse(text: &str, default_mode: Option<Mode>) -> Result<Self, ConfigError> {
        let pairs = parse_pairs(text)?;
        let mode = match pairs.get("mode") {
            Some(m) => m.parse()?,
            None => default_mode.ok_or_else(|| ConfigError("no mode given".into()))?,
        };
        let mut cfg = RunConfig::new(mode);
        for (k, v) in &pairs {
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }

    /// Apply one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let v = value.trim();
        match key {
            "mode" => self.mode = v.parse()?,
            "seed" => self.seed = num(key, v)?,
            "profile" => self.profile = v.parse()?,
            "jobs" => self.jobs = num(key, v)?,
            "out" => self.out = Some(v.to_string()),
            "csv" => self.csv = Some(v.to_string()),
            "identities" => self.identities = list(v).iter().map(|s| s.parse()).collect::<Result<_, _>>()?,
            "count" => self.count = Some(num(key, v)?),
            "witness" => self.witness = num(key, v)?,
            "order" => self.order = num(key, v)?,
            "order_theorem4" => self.order_theorem4 = num(key, v)?,
            "A" => self.a = shifts(key, v)?,
            "B" => self.b = shifts(key, v)?,
            "T" => self.t = num(key, v)?,
            "X" => self.x = num(key, v)?,
            "eps" => self.eps = num(key, v)?,
            "direct" => self.direct = flag(key, v)?,
            "n" => self.n = list(v).iter().map(|s| num(key, s)).collect::<Result<_, _>>()?,
            "identity_tol" => self.identity_tol = num(key, v)?,
            "recipe_tol" => self.recipe_tol = num(key, v)?,
            "kmax" => self.kmax = num(key, v)?,
            "star_kmax" => self.star_kmax = num(key, v)?,
            "star_grid" => self.star_grid = list(v).iter().map(|s| num(key, s)).collect::<Result<_, _>>()?,
            _ => return Err(ConfigError(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Range checks that the parser alone cannot do.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError(m));
        if !(self.t > 1.0 && self.t.is_finite()) {
            return bad(format!("T must be a finite number above 1, got {}", self.t));
        }
        if self.x == 0 {
            return bad("X must be positive".into());
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return bad(format!("eps must lie in (0, 1), got {}", self.eps));
        }
        if self.order == 0 || self.order_theorem4 == 0 {
            return bad("orders must be positive".into());
        }
        if self.kmax == 0 || self.kmax > 7 || self.star_kmax == 0 || self.star_kmax > 4 {
            return bad("need 1 <= kmax <= 7 and 1 <= star_kmax <= 4".into());
        }
        if self.star_grid.iter().any(|&v| v == 0 || v > 10_000) || self.n.contains(&0) {
            return bad("grid values must lie in 1..=10000 and tau arguments must be positive".into());
        }
        for (name, s) in [("A", &self.a), ("B", &self.b)] {
            NumericShiftSet::new_coincident(s.clone()).map_err(|e| ConfigError(format!("{name}: {e}")))?;
        }
        Ok(())
    }

    /// Echo of every setting, in key order, for the report header.
    pub fn settings(&self) -> BTreeMap<String, String> {
        let join = |v: &[String]| v.join(",");
        let f = |v: &[f64]| join(&v.iter().map(|x| format!("{x}")).collect::<Vec<_>>());
        let u = |v: &[u64]| join(&v.iter().map(|x| format!("{x}")).collect::<Vec<_>>());
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        put("mode", self.mode.name().into());
        put("seed", self.seed.to_string());
        put("profile", self.profile.name().into());
        put("identities", join(&self.identities.iter().map(|k| k.name().to_string()).collect::<Vec<_>>()));
        put("count", self.count.map_or("default".into(), |c| c.to_string()));
        put("witness", self.witness.to_string());
        put("order", self.order.to_string());
        put("order_theorem4", self.order_theorem4.to_string());
        put("A", f(&self.a));
        put("B", f(&self.b));
        put("T", format!("{}", self.t));
        put("X", self.x.to_string());
        put("eps", format!("{:e}", self.eps));
        put("direct", self.direct.to_string());
        put("n", u(&self.n));
        put("identity_tol", format!("{:e}", self.identity_tol));
        put("recipe_tol", format!("{}", self.recipe_tol));
        put("kmax", self.kmax.to_string());
        put("star_kmax", self.star_kmax.to_string());
        put("star_grid", u(&self.star_grid));
        m
    }
}

fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| ConfigError(format!("line {}: expected key = value", i + 1)))?;
        let k = k.trim().to_string();
        if !KEYS.iter().any(|(name, _)| *name == k) {
            return Err(ConfigError(format!("line {}: unknown key '{k}'", i + 1)));
        }
        if out.insert(k.clone(), v.trim().to_string()).is_some() {
            return Err(ConfigError(format!("line {}: key '{k}' given twice", i + 1)));
        }
    }
    Ok(out)
}

fn list(v: &str) -> Vec<String> {
    v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}

fn num<T: FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    v.trim().parse().map_err(|_| ConfigError(format!("{key}: cannot parse '{v}'")))
}

fn flag(key: &str, v: &str) -> Result<bool, ConfigError> {
    match v.trim() {
        "1" | "true" | "yes" => Ok(true),
        "0" | "false" | "no" => Ok(false),
        _ => Err(ConfigError(format!("{key}: expected 0/1 or true/false, got '{v}'"))),
    }
}

/// Comma separated shift list.
fn shifts(key: &str, v: &str) -> Result<Vec<f64>, ConfigError> {
    list(v)
        .iter()
        .map(|s| parse_shift(s).map_err(|e| ConfigError(format!("{key}: {e}"))))
        .collect()
}

/// A rational literal, or `c/logH` meaning `c / ln H` with the height spelled out.
fn parse_shift(s: &str) -> Result<f64, String> {
    if let Some((c, tail)) = s.split_once("/log") {
        let t: f64 = tail.parse().map_err(|_| format!("cannot parse height in '{s}'"))?;
        let c: f64 = c.parse().map_err(|_| format!("cannot parse '{s}'"))?;
        if !(t > 1.0) {
            return Err(format!("height must exceed 1 in '{s}'"));
        }
        return Ok(c / t.ln());
    }
    s.parse::<Rational>().map(|r| r.to_f64()).map_err(|e| e.to_string())
}
