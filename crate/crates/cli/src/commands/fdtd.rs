use std::fmt;
use std::str::FromStr;

use clap::Args;
use kgwave_core::dispersion::SpacetimePoint;
use kgwave_core::fdtd::{reference_field, simulate, FdtdConfig};
use rayon::prelude::*;

use crate::config::{Common, CommonArgs, List, Resolver};
use crate::output::{Cell, Table};
use crate::svg::{Panel, Series};
use crate::{CliError, Outcome, Run};

/// A Courant number, or `max` for the stability limit at each level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cfl {
    Fixed(f64),
    Max,
}

impl FromStr for Cfl {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("max") {
            return Ok(Cfl::Max);
        }
        s.parse().map(Cfl::Fixed).map_err(|e| format!("expected a number or 'max': {e}"))
    }
}

impl fmt::Display for Cfl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cfl::Fixed(v) => write!(f, "{v}"),
            Cfl::Max => f.write_str("max"),
        }
    }
}

impl From<Cfl> for Cell {
    fn from(v: Cfl) -> Cell {
        match v {
            Cfl::Fixed(x) => Cell::Num(x),
            Cfl::Max => Cell::Text("max".into()),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct FdtdArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Grid spacing of the coarsest level.
    #[arg(long)]
    pub dx: Option<f64>,
    /// Number of levels, each halving dx.
    #[arg(long)]
    pub levels: Option<usize>,
    /// Courant number c·dt/dx, or `max`.
    #[arg(long)]
    pub cfl: Option<Cfl>,
    /// Probe points as `t:x` pairs, comma-separated.
    #[arg(long)]
    pub probes: Option<List>,
    /// Simulated time; defaults to the latest probe time.
    #[arg(long)]
    pub t_end: Option<f64>,
}

fn probes(list: &List) -> Result<Vec<SpacetimePoint>, CliError> {
    list.0
        .iter()
        .map(|item| {
            let (t, x) = item
                .split_once(':')
                .ok_or_else(|| CliError::Config(format!("probe '{item}' is not t:x")))?;
            let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| CliError::Config(format!("probe '{item}': {e}")));
            SpacetimePoint::new(parse(t)?, parse(x)?).map_err(|e| CliError::Config(format!("probe '{item}': {e}")))
        })
        .collect()
}

pub fn run(args: &FdtdArgs) -> Result<Run, CliError> {
    let mut r = Resolver::load(args.common.config.as_deref())?;
    let common = Common::resolve(&args.common, &mut r)?;
    let dx = r.get("dx", args.dx, 8e-3)?;
    let levels = r.get("levels", args.levels, 3)?;
    let cfl = r.get("cfl", args.cfl, Cfl::Fixed(0.9))?;
    let default_probes = List(["18:0", "14.4:0"].map(String::from).to_vec());
    let probes = probes(&r.get("probes", args.probes.clone(), default_probes)?)?;
    let t_end = r.optional("t_end", args.t_end)?;
    let config = r.finish()?;
    if !(3..=10).contains(&levels) {
        return Err(CliError::Config(format!("levels must lie in 3..=10, got {levels}")));
    }
    if probes.is_empty() {
        return Err(CliError::Config("at least one probe is needed".into()));
    }
    let t_end = t_end.unwrap_or_else(|| probes.iter().map(SpacetimePoint::t).fold(0.0, f64::max));
    let configs: Vec<FdtdConfig> = (0..levels)
        .map(|level| {
            let dx = dx / f64::from(1u32 << level);
            let cfl = match cfl {
                Cfl::Fixed(v) => v,
                Cfl::Max => FdtdConfig::max_stable_cfl(common.c, common.omega_co, dx),
            };
            FdtdConfig::new(common.c, common.omega_co, dx, t_end).with_cfl(cfl)
        })
        .collect();
    for c in &configs {
        c.validate().map_err(|e| CliError::Config(e.to_string()))?;
        if let Some(p) = probes.iter().find(|p| p.t() > c.t_end || p.x() >= c.domain_half_width - c.dx) {
            return Err(CliError::Config(format!("probe (t = {}, x = {}) lies outside the simulation", p.t(), p.x())));
        }
    }

    let reference: Vec<f64> = probes
        .iter()
        .map(|p| reference_field(common.c, common.omega_co, p))
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let runs = configs
        .par_iter()
        .map(|c| simulate(c, &probes))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Numerical(e.to_string()))?;

    let mut table = Table::new(vec![
        "kind",
        "dx",
        "max_error",
        "observed_order",
        "t",
        "x",
        "simulated",
        "exact",
        "abs_error",
    ]);
    let mut errors = Vec::new();
    for (c, run) in configs.iter().zip(&runs) {
        let e = run.probes.iter().zip(&reference).map(|(p, r)| (p.value - r).abs()).fold(0.0, f64::max);
        let order = errors.last().map(|prev: &f64| (prev / e).log2());
        errors.push(e);
        table.push(vec![
            "level".into(),
            c.dx.into(),
            e.into(),
            order.into(),
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
        ]);
    }
    let finest = runs.last().expect("at least three levels");
    for (p, r) in finest.probes.iter().zip(&reference) {
        table.push(vec![
            "probe".into(),
            configs[levels - 1].dx.into(),
            Cell::Empty,
            Cell::Empty,
            p.point.t().into(),
            p.point.x().into(),
            p.value.into(),
            (*r).into(),
            (p.value - r).abs().into(),
        ]);
    }
    let monotone = errors.windows(2).all(|w| w[1] < w[0]);
    let violation = (!monotone).then(|| format!("errors do not decrease monotonically under refinement: {errors:?}"));

    let conv = configs.iter().zip(&errors).map(|(c, e)| (c.dx.log10(), e.log10())).collect::<Vec<_>>();
    let by_t = |v: &dyn Fn(usize) -> f64| (0..probes.len()).map(|i| (probes[i].t(), v(i))).collect::<Vec<_>>();
    let panels = vec![
        Panel::new("convergence", "log10 dx", "log10 max error")
            .with(Series::line("max probe error", conv.clone()))
            .with(Series::markers("levels", conv)),
        Panel::new("probes on the finest grid", "t", "u")
            .with(Series::markers("exact", by_t(&|i| reference[i])))
            .with(Series::markers("simulated", by_t(&|i| finest.probes[i].value))),
    ];
    Ok(Run { common, config, outcome: Outcome { table, panels, violation } })
}
