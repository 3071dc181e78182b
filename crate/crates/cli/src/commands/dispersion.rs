use clap::Args;
use kgwave_core::dispersion::{sample_diagram, Branch};

use super::waveguide;
use crate::config::{Common, CommonArgs, Resolver};
use crate::output::Table;
use crate::svg::{Panel, Series};
use crate::{CliError, Outcome, Run};

#[derive(Debug, Clone, Args)]
pub struct DispersionArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Largest sampled frequency; defaults to 4·omega_co.
    #[arg(long)]
    pub omega_max: Option<f64>,
    /// Number of uniform samples in [0, omega_max].
    #[arg(long)]
    pub samples: Option<usize>,
}

pub fn run(args: &DispersionArgs) -> Result<Run, CliError> {
    let mut r = Resolver::load(args.common.config.as_deref())?;
    let common = Common::resolve(&args.common, &mut r)?;
    let params = waveguide(common.c, common.omega_co)?;
    let omega_max = r.get("omega_max", args.omega_max, 4.0 * common.omega_co)?;
    let samples = r.get("samples", args.samples, 201)?;
    let config = r.finish()?;
    if !(omega_max.is_finite() && omega_max > 0.0) {
        return Err(CliError::Config(format!("omega_max must be positive, got {omega_max}")));
    }
    if samples < 2 {
        return Err(CliError::Config(format!("samples must be at least 2, got {samples}")));
    }

    let diagram = sample_diagram(&params, omega_max, samples).map_err(|e| CliError::Config(e.to_string()))?;
    let mut table = Table::new(vec!["omega", "k", "branch", "omega_sq", "k_sq"]);
    let (mut prop, mut evan, mut wk) = (Vec::new(), Vec::new(), Vec::new());
    for s in &diagram {
        let name = match s.branch {
            Branch::Propagating => {
                prop.push((s.k, s.omega));
                "propagating"
            }
            Branch::Evanescent => {
                evan.push((-s.k, s.omega));
                "evanescent"
            }
        };
        wk.push((s.k_sq, s.omega_sq));
        table.push(vec![s.omega.into(), s.k.into(), name.into(), s.omega_sq.into(), s.k_sq.into()]);
    }
    // the cut-off point belongs to both branches
    if let Some(&(_, w)) = prop.first() {
        evan.push((0.0, w));
    }
    let panels = vec![
        Panel::new("dispersion diagram", "k  (evanescent: -Im k)", "omega")
            .with(Series::line("propagating", prop))
            .with(Series::line("evanescent", evan)),
        Panel::new("squared coordinates", "K = k^2", "W = omega^2").with(Series::line("W = c^2 K + omega_co^2", wk)),
    ];
    Ok(Run { common, config, outcome: Outcome { table, panels, violation: None } })
}
