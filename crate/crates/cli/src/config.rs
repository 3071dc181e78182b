//! Run configuration: command-line flags layered over an optional
//! `key = value` file. Every value is resolved and checked before any
//! computation starts.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use kgwave_core::dispersion::SpacetimePoint;

use crate::output::Cell;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Format as ValueEnum>::from_str(s.trim(), true)
    }
}

impl Display for Format {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        })
    }
}

/// Flags shared by every command.
#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// `key = value` file; flags given on the command line take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Limiting wave speed.
    #[arg(long)]
    pub c: Option<f64>,
    /// Cut-off frequency.
    #[arg(long = "omega-co")]
    pub omega_co: Option<f64>,
}

/// Looks values up flag-first, then in the file, then falls back to a
/// default, recording what was used.
pub struct Resolver {
    file: BTreeMap<String, String>,
    used: BTreeSet<String>,
    resolved: Vec<(String, Cell)>,
}

fn normalize_key(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace('-', "_")
}

impl Resolver {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let mut file = BTreeMap::new();
        if let Some(path) = path {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read config file {}: {e}", path.display())))?;
            for (n, raw) in text.lines().enumerate() {
                let line = raw.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let (k, v) = line.split_once('=').ok_or_else(|| {
                    CliError::Config(format!("{}:{}: expected key = value", path.display(), n + 1))
                })?;
                let key = normalize_key(k);
                if file.insert(key.clone(), v.trim().to_string()).is_some() {
                    return Err(CliError::Config(format!("{}:{}: duplicate key '{key}'", path.display(), n + 1)));
                }
            }
        }
        Ok(Self { file, used: BTreeSet::new(), resolved: Vec::new() })
    }

    fn lookup<T: FromStr>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError>
    where
        T::Err: Display,
    {
        let key = normalize_key(key);
        self.used.insert(key.clone());
        if flag.is_some() {
            return Ok(flag);
        }
        match self.file.get(&key) {
            Some(text) => text
                .parse::<T>()
                .map(Some)
                .map_err(|e| CliError::Config(format!("config key '{key}': cannot parse '{text}': {e}"))),
            None => Ok(None),
        }
    }

    pub fn get<T>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError>
    where
        T: FromStr + Clone + Into<Cell>,
        T::Err: Display,
    {
        let v = self.lookup(key, flag)?.unwrap_or(default);
        self.resolved.push((normalize_key(key), v.clone().into()));
        Ok(v)
    }

    /// Like [`Resolver::optional`] but kept out of the recorded configuration.
    pub fn untracked<T>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.lookup(key, flag)
    }

    pub fn optional<T>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError>
    where
        T: FromStr + Clone + Into<Cell>,
        T::Err: Display,
    {
        let v = self.lookup(key, flag)?;
        self.resolved.push((normalize_key(key), v.clone().map(Into::into).unwrap_or(Cell::Empty)));
        Ok(v)
    }

    /// Rejects file keys no command option consumed, returning the resolved
    /// configuration in lookup order.
    pub fn finish(self) -> Result<Vec<(String, Cell)>, CliError> {
        let unknown: Vec<_> = self.file.keys().filter(|k| !self.used.contains(*k)).cloned().collect();
        if !unknown.is_empty() {
            return Err(CliError::Config(format!("unknown config keys: {}", unknown.join(", "))));
        }
        Ok(self.resolved)
    }
}

pub struct Common {
    pub out: Option<PathBuf>,
    pub format: Format,
    pub c: f64,
    pub omega_co: f64,
}

impl Common {
    pub fn resolve(args: &CommonArgs, r: &mut Resolver) -> Result<Self, CliError> {
        let format = r.get("format", args.format, Format::Csv)?;
        let c = r.get("c", args.c, 1.0)?;
        let omega_co = r.get("omega_co", args.omega_co, 1.0)?;
        // where the output goes is not part of the run's provenance
        let out = r.untracked("out", args.out.clone())?;
        if !(c.is_finite() && c > 0.0) {
            return Err(CliError::Config(format!("c must be positive, got {c}")));
        }
        if !(omega_co.is_finite() && omega_co >= 0.0) {
            return Err(CliError::Config(format!("omega_co must be non-negative, got {omega_co}")));
        }
        Ok(Self { out, format, c, omega_co })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum XScale {
    /// `x` values are absolute.
    Absolute,
    /// `x` values are fractions of the front position `c·t`.
    Front,
}

impl FromStr for XScale {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <XScale as ValueEnum>::from_str(s.trim(), true)
    }
}

impl From<XScale> for Cell {
    fn from(v: XScale) -> Cell {
        Cell::Text(match v {
            XScale::Absolute => "absolute".into(),
            XScale::Front => "front".into(),
        })
    }
}

/// Space-time grid flags for `field` and `compare`.
#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Single time; overrides the t grid.
    #[arg(long)]
    pub t: Option<f64>,
    /// Single position; overrides the x grid and implies absolute x.
    #[arg(long)]
    pub x: Option<f64>,
    #[arg(long)]
    pub t_min: Option<f64>,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub nt: Option<usize>,
    #[arg(long)]
    pub x_min: Option<f64>,
    #[arg(long)]
    pub x_max: Option<f64>,
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long, value_enum)]
    pub x_scale: Option<XScale>,
}

pub struct Grid {
    pub points: Vec<SpacetimePoint>,
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn check_axis(name: &str, lo: f64, hi: f64, n: usize) -> Result<(), CliError> {
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(CliError::Config(format!("{name} range must be finite")));
    }
    if lo > hi {
        return Err(CliError::Config(format!("{name}_min ({lo}) exceeds {name}_max ({hi})")));
    }
    if n == 0 {
        return Err(CliError::Config(format!("n{name} must be at least 1")));
    }
    Ok(())
}

impl Grid {
    /// Defaults: `t ∈ [0.2, 40]`, `x ∈ [0, 0.95·c·t]`, 20 × 20.
    pub fn resolve(args: &GridArgs, r: &mut Resolver, c: f64) -> Result<Self, CliError> {
        let single_t = r.optional("t", args.t)?;
        let single_x = r.optional("x", args.x)?;
        let mut t_min = r.get("t_min", args.t_min, 0.2)?;
        let mut t_max = r.get("t_max", args.t_max, 40.0)?;
        let mut nt = r.get("nt", args.nt, 20)?;
        let mut x_min = r.get("x_min", args.x_min, 0.0)?;
        let mut x_max = r.get("x_max", args.x_max, 0.95)?;
        let mut nx = r.get("nx", args.nx, 20)?;
        let mut scale = r.get("x_scale", args.x_scale, XScale::Front)?;
        if let Some(t) = single_t {
            (t_min, t_max, nt) = (t, t, 1);
        }
        if let Some(x) = single_x {
            (x_min, x_max, nx, scale) = (x, x, 1, XScale::Absolute);
        }
        check_axis("t", t_min, t_max, nt)?;
        check_axis("x", x_min, x_max, nx)?;
        if t_min < 0.0 {
            return Err(CliError::Config(format!("times must be non-negative, got t_min = {t_min}")));
        }
        let mut points = Vec::with_capacity(nt * nx);
        for t in linspace(t_min, t_max, nt) {
            for x in linspace(x_min, x_max, nx) {
                let x = match scale {
                    XScale::Absolute => x,
                    XScale::Front => x * c * t,
                };
                points.push(SpacetimePoint::new(t, x).map_err(|e| CliError::Config(e.to_string()))?);
            }
        }
        Ok(Self { points })
    }
}

/// Comma-separated list that is also a valid config value.
#[derive(Debug, Clone, PartialEq)]
pub struct List(pub Vec<String>);

impl FromStr for List {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(List(s.split(',').map(|p| p.trim().to_string()).filter(|p| !p.is_empty()).collect()))
    }
}

impl From<List> for Cell {
    fn from(v: List) -> Cell {
        Cell::Text(v.0.join(","))
    }
}
