use clap::Args;
use kgwave_core::contour::{trace_descent, TraceSettings};
use kgwave_core::dispersion::saddle_points;
use rayon::prelude::*;

use super::waveguide;
use crate::config::{Common, CommonArgs, Resolver};
use crate::output::Table;
use crate::svg::{Panel, Series};
use crate::{CliError, Outcome, Run};

/// Largest admissible `|Re h − Re h*|` relative to `|h*|`.
pub const PHASE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Args)]
pub struct TraceArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Ray speed V = x/t, with 0 < V < c; defaults to 0.5·c.
    #[arg(long)]
    pub ray_speed: Option<f64>,
    /// Depth of each arm in Im h; defaults to 30·omega_co/c.
    #[arg(long)]
    pub depth: Option<f64>,
    /// Largest step along an arm.
    #[arg(long)]
    pub max_step: Option<f64>,
}

pub fn run(args: &TraceArgs) -> Result<Run, CliError> {
    let mut r = Resolver::load(args.common.config.as_deref())?;
    let common = Common::resolve(&args.common, &mut r)?;
    let params = waveguide(common.c, common.omega_co)?;
    let ray_speed = r.get("ray_speed", args.ray_speed, 0.5 * common.c)?;
    let depth = r.optional("depth", args.depth)?;
    let defaults = TraceSettings::default();
    let max_step = r.get("max_step", args.max_step, defaults.max_step)?;
    let config = r.finish()?;
    if !(ray_speed > 0.0 && ray_speed < common.c) {
        return Err(CliError::Config(format!("ray_speed must lie in (0, c), got {ray_speed}")));
    }
    if let Some(d) = depth {
        if !(d.is_finite() && d > 0.0) {
            return Err(CliError::Config(format!("depth must be positive, got {d}")));
        }
    }
    if !(max_step.is_finite() && max_step > defaults.min_step) {
        return Err(CliError::Config(format!("max_step must exceed {:e}, got {max_step}", defaults.min_step)));
    }
    let settings = TraceSettings { depth, max_step, ..defaults };
    let saddle = saddle_points(ray_speed, &params).map_err(|e| CliError::Numerical(e.to_string()))?;

    let traces = [1i8, -1]
        .par_iter()
        .map(|&sign| trace_descent(&saddle, sign, &params, &settings))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Numerical(e.to_string()))?;

    let mut table = Table::new(vec!["arm", "index", "omega_re", "omega_im", "k_re", "k_im", "phase_residual", "descent"]);
    let mut panel = Panel::new(format!("steepest descent, V/c = {}", ray_speed / common.c), "Re omega", "Im omega");
    let mut worst = 0.0f64;
    let mut saddles = Vec::new();
    for tr in &traces {
        let arm = if tr.branch_sign > 0 { "plus" } else { "minus" };
        let h_star = tr.h(tr.saddle_index);
        for (i, (w, k)) in tr.nodes.iter().zip(&tr.wavenumbers).enumerate() {
            let h = tr.h(i);
            let residual = h.re - tr.phase_const;
            worst = worst.max(residual.abs() / tr.saddle_scale());
            table.push(vec![
                arm.into(),
                (i as i64 - tr.saddle_index as i64).into(),
                w.re.into(),
                w.im.into(),
                k.re.into(),
                k.im.into(),
                residual.into(),
                (h.im - h_star.im).into(),
            ]);
        }
        let w = tr.nodes[tr.saddle_index];
        saddles.push((w.re, w.im));
        panel.series.push(Series::line(format!("{arm} arm"), tr.nodes.iter().map(|w| (w.re, w.im)).collect()));
    }
    panel.series.push(Series::markers("saddles", saddles));
    panel.series.push(Series::markers("branch points", vec![(-common.omega_co, 0.0), (common.omega_co, 0.0)]));
    eprintln!("kgwave: max |Re h - Re h*| / |h*| = {worst:.3e}");
    let violation = (worst > PHASE_TOLERANCE)
        .then(|| format!("phase residual {worst:.3e} exceeds {PHASE_TOLERANCE:e} of |h*|"));
    Ok(Run { common, config, outcome: Outcome { table, panels: vec![panel], violation } })
}
