use std::collections::BTreeMap;

use clap::Args;
use kgwave_core::field::{evaluate, FieldMethod};
use kgwave_core::Error;
use rayon::prelude::*;

use super::{field_settings, methods, validity_warning, waveguide, MethodArgs};
use crate::config::{Common, CommonArgs, Grid, GridArgs, List, Resolver};
use crate::output::Table;
use crate::svg::{Panel, Series};
use crate::{CliError, Outcome, Run};

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub method: MethodArgs,
    /// Comma-separated methods compared against the closed form, or `all`.
    #[arg(long)]
    pub methods: Option<List>,
    /// Largest admissible |method − exact|.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Per-method overrides, e.g. `far_asymptotic=0.05,spectral_line=1e-8`.
    #[arg(long)]
    pub tolerances: Option<List>,
}

fn tolerances(list: &List) -> Result<BTreeMap<FieldMethod, f64>, CliError> {
    let mut out = BTreeMap::new();
    for item in &list.0 {
        let (m, v) = item
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("tolerance override '{item}' is not method=value")))?;
        let m: FieldMethod = m.parse().map_err(|e: Error| CliError::Config(e.to_string()))?;
        let v: f64 = v.trim().parse().map_err(|e| CliError::Config(format!("tolerance for {m}: {e}")))?;
        out.insert(m, v);
    }
    Ok(out)
}

struct Stats {
    evaluated: usize,
    not_applicable: usize,
    failed: usize,
    warned: usize,
    max: f64,
    sum: f64,
    worst: (f64, f64),
}

pub fn run(args: &CompareArgs) -> Result<Run, CliError> {
    let mut r = Resolver::load(args.common.config.as_deref())?;
    let common = Common::resolve(&args.common, &mut r)?;
    let params = waveguide(common.c, common.omega_co)?;
    let grid = Grid::resolve(&args.grid, &mut r, common.c)?;
    let list = r.get("methods", args.methods.clone(), List(vec!["tube_loop".into(), "saddle_height_loop".into()]))?;
    let methods = methods(&list)?;
    let tolerance = r.get("tolerance", args.tolerance, 1e-10)?;
    let overrides = tolerances(&r.get("tolerances", args.tolerances.clone(), List(Vec::new()))?)?;
    let settings = field_settings(&args.method, &mut r)?;
    let config = r.finish()?;
    for (m, tol) in overrides.iter().map(|(m, t)| (m.name(), *t)).chain([("default", tolerance)]) {
        if !(tol.is_finite() && tol >= 0.0) {
            return Err(CliError::Config(format!("tolerance for {m} must be non-negative, got {tol}")));
        }
    }

    let exact: Vec<f64> = grid
        .points
        .par_iter()
        .map(|p| evaluate(p, &params, FieldMethod::Exact, &settings).map(|s| s.value.re))
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Numerical(e.to_string()))?;
    let jobs: Vec<_> = methods.iter().flat_map(|m| (0..grid.points.len()).map(move |i| (*m, i))).collect();
    let results: Vec<_> = jobs.par_iter().map(|(m, i)| evaluate(&grid.points[*i], &params, *m, &settings)).collect();

    let mut stats: Vec<Stats> = methods
        .iter()
        .map(|_| Stats {
            evaluated: 0,
            not_applicable: 0,
            failed: 0,
            warned: 0,
            max: 0.0,
            sum: 0.0,
            worst: (f64::NAN, f64::NAN),
        })
        .collect();
    for ((m, i), res) in jobs.iter().zip(results) {
        let s = &mut stats[methods.iter().position(|x| x == m).expect("listed method")];
        let p = &grid.points[*i];
        match res {
            Ok(sample) => {
                let dev = (sample.value - exact[*i]).norm();
                s.evaluated += 1;
                s.sum += dev;
                if dev > s.max || dev.is_nan() {
                    s.max = dev;
                    s.worst = (p.t(), p.x());
                }
                let omega_r = p.proper_time(&params).map(|tau| params.omega_co() * tau);
                s.warned += usize::from(omega_r.and_then(|z| validity_warning(*m, z)).is_some());
            }
            Err(Error::Domain(_)) => s.not_applicable += 1,
            Err(_) => s.failed += 1,
        }
    }

    let mut table = Table::new(vec![
        "method",
        "points",
        "evaluated",
        "not_applicable",
        "failed",
        "max_abs_dev",
        "mean_abs_dev",
        "worst_t",
        "worst_x",
        "tolerance",
        "status",
    ]);
    let mut violations = Vec::new();
    let mut bars = Vec::new();
    for (k, (m, s)) in methods.iter().zip(&stats).enumerate() {
        let tol = overrides.get(m).copied().unwrap_or(tolerance);
        let ok = s.failed == 0 && s.evaluated > 0 && s.max <= tol;
        if !ok {
            violations.push(m.name());
        }
        if s.warned > 0 {
            eprintln!("kgwave: warning: {m}: {} points lie outside its conventional validity range", s.warned);
        }
        let mean = if s.evaluated > 0 { s.sum / s.evaluated as f64 } else { f64::NAN };
        bars.push((k as f64, s.max.log10()));
        table.push(vec![
            m.name().into(),
            grid.points.len().into(),
            s.evaluated.into(),
            s.not_applicable.into(),
            s.failed.into(),
            if s.evaluated > 0 { s.max.into() } else { None::<f64>.into() },
            if s.evaluated > 0 { mean.into() } else { None::<f64>.into() },
            s.worst.0.into(),
            s.worst.1.into(),
            tol.into(),
            if ok { "pass" } else { "violation" }.into(),
        ]);
    }
    let violation = (!violations.is_empty()).then(|| format!("tolerance violated by: {}", violations.join(", ")));
    let labels: Vec<String> = methods.iter().enumerate().map(|(k, m)| format!("{k}: {m}")).collect();
    let panels = vec![Panel::new("max |method - exact|", "method index", "log10 max deviation")
        .with(Series::markers(labels.join("  "), bars))];
    Ok(Run { common, config, outcome: Outcome { table, panels, violation } })
}
