pub mod compare;
pub mod dispersion;
pub mod fdtd;
pub mod field;
pub mod trace;

use clap::Args;
use kgwave_core::dispersion::WaveguideParams;
use kgwave_core::field::{FieldMethod, FieldSettings};

use crate::config::{List, Resolver};
use crate::CliError;

/// Far-field results are flagged below this `ω_co·r`.
pub const FAR_FIELD_MIN: f64 = 5.0;
/// Near-field results are flagged above this `ω_co·r`.
pub const NEAR_FIELD_MAX: f64 = 0.3;

pub fn waveguide(c: f64, omega_co: f64) -> Result<WaveguideParams, CliError> {
    WaveguideParams::new(c, omega_co).map_err(|e| CliError::Config(e.to_string()))
}

/// Quadrature flags shared by `field` and `compare`.
#[derive(Debug, Clone, Args)]
pub struct MethodArgs {
    /// Trapezoid nodes on the tube loops.
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Height of the spectral integration line; defaults to 0.1·omega_co.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Depth of the descent arms in e-folds of the integrand.
    #[arg(long)]
    pub efolds: Option<f64>,
}

pub fn field_settings(args: &MethodArgs, r: &mut Resolver) -> Result<FieldSettings, CliError> {
    let defaults = FieldSettings::default();
    let n_nodes = r.get("nodes", args.nodes, defaults.n_nodes)?;
    let epsilon = r.optional("epsilon", args.epsilon)?;
    let descent_efolds = r.get("efolds", args.efolds, defaults.descent_efolds)?;
    if n_nodes < 8 {
        return Err(CliError::Config(format!("nodes must be at least 8, got {n_nodes}")));
    }
    if let Some(eps) = epsilon {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(CliError::Config(format!("epsilon must be positive, got {eps}")));
        }
    }
    if !(descent_efolds.is_finite() && descent_efolds > 0.0) {
        return Err(CliError::Config(format!("efolds must be positive, got {descent_efolds}")));
    }
    Ok(FieldSettings { n_nodes, epsilon, descent_efolds, ..defaults })
}

/// Parses a method list in enumeration order without duplicates; `all`
/// selects every method.
pub fn methods(list: &List) -> Result<Vec<FieldMethod>, CliError> {
    let mut out = Vec::new();
    for name in &list.0 {
        if name.eq_ignore_ascii_case("all") {
            out.extend(FieldMethod::ALL);
        } else {
            out.push(name.parse::<FieldMethod>().map_err(|e| CliError::Config(e.to_string()))?);
        }
    }
    out.sort();
    out.dedup();
    if out.is_empty() {
        return Err(CliError::Config("the method list is empty".into()));
    }
    Ok(out)
}

/// Conventional validity warning for the asymptotic forms, if any.
pub fn validity_warning(method: FieldMethod, omega_r: f64) -> Option<String> {
    match method {
        FieldMethod::FarAsymptotic if omega_r < FAR_FIELD_MIN => {
            Some(format!("outside far-field validity: omega_co*r = {omega_r:.3e} < {FAR_FIELD_MIN}"))
        }
        FieldMethod::NearAsymptotic if omega_r > NEAR_FIELD_MAX => {
            Some(format!("outside near-field validity: omega_co*r = {omega_r:.3e} > {NEAR_FIELD_MAX}"))
        }
        _ => None,
    }
}
