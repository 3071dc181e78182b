use clap::Args;
use kgwave_core::field::{evaluate, FieldMethod};
use kgwave_core::Error;
use rayon::prelude::*;

use super::{field_settings, methods, validity_warning, waveguide, MethodArgs};
use crate::config::{Common, CommonArgs, Grid, GridArgs, List, Resolver};
use crate::output::{Cell, Table};
use crate::svg::{Panel, Series};
use crate::{CliError, Outcome, Run};

#[derive(Debug, Clone, Args)]
pub struct FieldArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub method: MethodArgs,
    /// Comma-separated methods, or `all`.
    #[arg(long)]
    pub methods: Option<List>,
}

pub fn run(args: &FieldArgs) -> Result<Run, CliError> {
    let mut r = Resolver::load(args.common.config.as_deref())?;
    let common = Common::resolve(&args.common, &mut r)?;
    let params = waveguide(common.c, common.omega_co)?;
    let grid = Grid::resolve(&args.grid, &mut r, common.c)?;
    let methods = methods(&r.get("methods", args.methods.clone(), List(vec!["exact".into()]))?)?;
    let settings = field_settings(&args.method, &mut r)?;
    let config = r.finish()?;

    let jobs: Vec<_> = grid.points.iter().flat_map(|p| methods.iter().map(move |m| (*p, *m))).collect();
    let results: Vec<_> = jobs.par_iter().map(|(p, m)| evaluate(p, &params, *m, &settings)).collect();

    let mut table = Table::new(vec![
        "t",
        "x",
        "method",
        "value_re",
        "value_im",
        "error_estimate",
        "status",
        "validity_note",
    ]);
    let (mut failed, mut warned) = (0usize, 0usize);
    for ((p, m), res) in jobs.iter().zip(results) {
        let omega_r = p.proper_time(&params).map(|tau| params.omega_co() * tau);
        let warning = omega_r.and_then(|z| validity_warning(*m, z));
        warned += usize::from(warning.is_some());
        let (value, error, status, note) = match res {
            Ok(s) => (Some(s.value), Some(s.error_estimate), "ok", s.validity_note),
            Err(Error::NotConverged(q)) => {
                failed += 1;
                // best estimates are reported in field units by the core
                (Some(q.value), Some(q.error_estimate), "not_converged", None)
            }
            Err(Error::Domain(msg)) => (None, None, "not_applicable", Some(msg)),
            Err(e) => {
                failed += 1;
                (None, None, "failed", Some(e.to_string()))
            }
        };
        let note = match (note, warning) {
            (Some(a), Some(b)) => Some(format!("{a}; {b}")),
            (a, b) => a.or(b),
        };
        table.push(vec![
            p.t().into(),
            p.x().into(),
            m.name().into(),
            value.map(|v| v.re).into(),
            value.map(|v| v.im).into(),
            error.into(),
            status.into(),
            note.into(),
        ]);
    }
    if warned > 0 {
        eprintln!("kgwave: warning: {warned} asymptotic rows lie outside their conventional validity range");
    }
    let violation = (failed > 0).then(|| format!("{failed} evaluations did not converge"));
    let panels = vec![plot(&table, &methods)];
    Ok(Run { common, config, outcome: Outcome { table, panels, violation } })
}

/// Real part against `t`, or against `x` when only one time was requested.
/// With both axes varying only the first `x` column is drawn.
fn plot(table: &Table, methods: &[FieldMethod]) -> Panel {
    let num = |c: &Cell| if let Cell::Num(v) = c { *v } else { f64::NAN };
    let ts: Vec<f64> = table.rows.iter().map(|r| num(&r[0])).collect();
    let along_t = ts.iter().any(|&t| t != ts[0]);
    let per_t = if along_t {
        table.rows.iter().take_while(|r| num(&r[0]) == ts[0]).count()
    } else {
        table.rows.len()
    };
    let mut panel = if along_t {
        Panel::new("field along t (first x column)", "t", "Re u")
    } else {
        Panel::new(format!("field at t = {}", ts[0]), "x", "Re u")
    };
    for (j, m) in methods.iter().enumerate() {
        let points = table
            .rows
            .iter()
            .enumerate()
            .filter(|(i, _)| i % methods.len() == j && (!along_t || (i % per_t) / methods.len() == 0))
            .map(|(_, r)| (if along_t { num(&r[0]) } else { num(&r[1]) }, num(&r[3])))
            .collect();
        panel.series.push(Series::line(m.name(), points));
    }
    panel
}
