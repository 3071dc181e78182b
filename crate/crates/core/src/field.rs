//! The field `u(t, x)` by every available route, plus a dispatcher.
//!
//! Quadrature methods return a complex value whose imaginary part measures
//! numerical error only; the true field is real.

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::contour::{
    integrate, trace_descent, ContourPath, QuadSettings, QuadratureResult, TailSettings, TraceSettings,
};
use crate::dispersion::{
    saddle_points, spacetime_to_hyperbolic, wavenumber_branch, wavenumber_continued, Region, SpacetimePoint,
    WaveguideParams,
};
use crate::error::{Error, Result};
use crate::specfun::{exact_field_with, BesselSettings};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Largest `ln |integrand|` tolerated on the tube loop used by
/// [`field_tube_loop`].
pub const LOOP_DYNAMIC_RANGE: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldMethod {
    Exact,
    TubeLoop,
    SaddleHeightLoop,
    SpectralLine,
    FarAsymptotic,
    NearAsymptotic,
    SteepestDescent,
}

impl FieldMethod {
    pub const ALL: [FieldMethod; 7] = [
        FieldMethod::Exact,
        FieldMethod::TubeLoop,
        FieldMethod::SaddleHeightLoop,
        FieldMethod::SpectralLine,
        FieldMethod::FarAsymptotic,
        FieldMethod::NearAsymptotic,
        FieldMethod::SteepestDescent,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FieldMethod::Exact => "exact",
            FieldMethod::TubeLoop => "tube_loop",
            FieldMethod::SaddleHeightLoop => "saddle_height_loop",
            FieldMethod::SpectralLine => "spectral_line",
            FieldMethod::FarAsymptotic => "far_asymptotic",
            FieldMethod::NearAsymptotic => "near_asymptotic",
            FieldMethod::SteepestDescent => "steepest_descent",
        }
    }

    pub fn is_quadrature(self) -> bool {
        matches!(
            self,
            FieldMethod::TubeLoop | FieldMethod::SaddleHeightLoop | FieldMethod::SpectralLine | FieldMethod::SteepestDescent
        )
    }
}

impl fmt::Display for FieldMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FieldMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        FieldMethod::ALL
            .into_iter()
            .find(|m| m.name() == key)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown field method '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub point: SpacetimePoint,
    pub value: Complex64,
    pub method: FieldMethod,
    pub error_estimate: f64,
    pub validity_note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSettings {
    /// Trapezoid nodes on the tube loops.
    pub n_nodes: usize,
    /// Height of the spectral line; `None` means `0.1 ω_co`.
    pub epsilon: Option<f64>,
    /// Tolerances for the spectral line.
    pub line_quad: QuadSettings,
    /// Tolerances for integration along traced descent contours.
    pub descent_quad: QuadSettings,
    pub trace: TraceSettings,
    /// Decay, in e-folds of the integrand, at which descent arms stop.
    pub descent_efolds: f64,
    pub bessel: BesselSettings,
}

impl Default for FieldSettings {
    fn default() -> Self {
        Self {
            n_nodes: 512,
            epsilon: None,
            line_quad: QuadSettings { abs_tol: 1e-9, rel_tol: 1e-9, max_subdivisions: 20_000, ..QuadSettings::default() },
            descent_quad: QuadSettings { abs_tol: 1e-13, rel_tol: 1e-12, ..QuadSettings::default() },
            trace: TraceSettings::default(),
            descent_efolds: 30.0,
            bessel: BesselSettings::default(),
        }
    }
}

fn sample(p: &SpacetimePoint, value: Complex64, method: FieldMethod, error: f64, note: Option<String>) -> FieldSample {
    FieldSample { point: *p, value, method, error_estimate: error, validity_note: note }
}

fn front_value(params: &WaveguideParams) -> Complex64 {
    Complex64::new(-0.5 / params.c(), 0.0)
}

fn require_after_front(p: &SpacetimePoint, params: &WaveguideParams, what: &str) -> Result<()> {
    if p.region(params) != Region::AfterFront {
        return Err(Error::Domain(format!(
            "{what} needs t > x/c, got t = {}, x = {}",
            p.t(),
            p.x()
        )));
    }
    Ok(())
}

fn omega_r_note(z: f64) -> String {
    format!("omega_co*r = {z:.6e}")
}

pub fn field_exact(p: &SpacetimePoint, params: &WaveguideParams, settings: &BesselSettings) -> FieldSample {
    let value = exact_field_with(p, params, settings);
    let note = match p.region(params) {
        Region::OnFront => Some("on the front: left limit -1/(2c)".to_string()),
        _ => None,
    };
    sample(p, Complex64::new(value, 0.0), FieldMethod::Exact, 0.0, note)
}

/// `−(1/4πc) ∮ exp{i ω_co r cos(ξ − η)} dξ` over a full tube loop at height
/// `height`.
fn loop_integral(
    p: &SpacetimePoint,
    params: &WaveguideParams,
    n_nodes: usize,
    height: impl Fn(f64, f64) -> f64,
    method: FieldMethod,
) -> Result<FieldSample> {
    let hyper = spacetime_to_hyperbolic(p, params)?;
    let z = params.omega_co() * hyper.r;
    let h = height(hyper.eta.im, z);
    let settings = QuadSettings { periodic_nodes: n_nodes, ..QuadSettings::default() };
    let eta = hyper.eta;
    let r = integrate(|xi| (I * z * (xi - eta).cos()).exp(), &ContourPath::tube_loop(h), &settings)?;
    let scale = -1.0 / (4.0 * PI * params.c());
    Ok(sample(p, r.value * scale, method, r.error_estimate * scale.abs(), Some(omega_r_note(z))))
}

/// Loop integral on the tube.
///
/// Before the front the loop is homologous to zero and the field is exactly
/// `0`; on the front the value is `−1/(2c)`. After the front the loop is the
/// one nearest the real segment of the strip on which the integrand's
/// magnitude stays within `e^{LOOP_DYNAMIC_RANGE}`.
pub fn field_tube_loop(p: &SpacetimePoint, params: &WaveguideParams, n_nodes: usize) -> Result<FieldSample> {
    match p.region(params) {
        Region::BeforeFront => Ok(sample(
            p,
            Complex64::new(0.0, 0.0),
            FieldMethod::TubeLoop,
            0.0,
            Some("before the front: the closed loop is homologous to zero on the tube".into()),
        )),
        Region::OnFront => Ok(sample(
            p,
            front_value(params),
            FieldMethod::TubeLoop,
            0.0,
            Some("on the front: left limit -1/(2c)".into()),
        )),
        Region::AfterFront => loop_integral(
            p,
            params,
            n_nodes,
            |y, z| {
                // |integrand| ≤ exp(z·sinh|h − y|)
                let lift = if z > 0.0 { (LOOP_DYNAMIC_RANGE / z).asinh() } else { f64::INFINITY };
                (y - lift).max(0.0)
            },
            FieldMethod::TubeLoop,
        ),
    }
}

/// Loop through both saddles, `Im ξ = Im η`.
pub fn field_saddle_height_loop(p: &SpacetimePoint, params: &WaveguideParams, n_nodes: usize) -> Result<FieldSample> {
    require_after_front(p, params, "the saddle-height loop")?;
    loop_integral(p, params, n_nodes, |y, _| y, FieldMethod::SaddleHeightLoop)
}

/// `−(i/4πc) ∫ e^{ikx − iωt} / √(ω² − ω_co²) dω` along `Im ω = epsilon`.
pub fn field_spectral_line(
    p: &SpacetimePoint,
    params: &WaveguideParams,
    epsilon: f64,
    quad: &QuadSettings,
) -> Result<FieldSample> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
    }
    let (t, x, c, w0) = (p.t(), p.x(), params.c(), params.omega_co());
    if t <= 0.0 {
        return Err(Error::Domain("the spectral line needs t > 0".into()));
    }
    let tau = t - x / c;
    if tau == 0.0 {
        return Err(Error::Domain("the spectral line does not converge on the front".into()));
    }
    let half_width = 200.0 * w0.max(1.0 / t);
    let half_period = PI / tau.abs();
    let settings = QuadSettings {
        breakpoints: vec![-w0, w0],
        max_panel: Some(half_period.min(half_width)),
        tail: Some(TailSettings::for_half_period(half_period)),
        ..quad.clone()
    };
    let f = |omega: Complex64| {
        let k = wavenumber_branch(omega, params);
        (I * (k * x - omega * t)).exp() / (c * k)
    };
    let scale = -I / (4.0 * PI * c);
    let r = integrate(f, &ContourPath::horizontal_line(epsilon, half_width), &settings)
        .map_err(|e| rescale(e, scale))?;
    let note = match p.region(params) {
        Region::BeforeFront => Some("before the front: conditionally convergent tail".into()),
        _ => None,
    };
    Ok(sample(p, r.value * scale, FieldMethod::SpectralLine, r.error_estimate * scale.norm(), note))
}

fn rescale(e: Error, scale: Complex64) -> Error {
    match e {
        Error::NotConverged(r) => Error::NotConverged(QuadratureResult {
            value: r.value * scale,
            error_estimate: r.error_estimate * scale.norm(),
            evaluations: r.evaluations,
        }),
        other => other,
    }
}

/// Sum of the two saddle contributions,
/// `−(1/2c)·e^{∓i(ω_co r − π/4)}/√(2π ω_co r)`.
pub fn field_far_asymptotic(p: &SpacetimePoint, params: &WaveguideParams) -> Result<FieldSample> {
    require_after_front(p, params, "the far-field asymptotic")?;
    let r = p.proper_time(params).expect("after the front");
    let z = params.omega_co() * r;
    let amplitude = -0.5 / (params.c() * (2.0 * PI * z).sqrt());
    let plus = amplitude * (-I * (z - FRAC_PI_4)).exp();
    let minus = amplitude * (I * (z - FRAC_PI_4)).exp();
    Ok(sample(p, plus + minus, FieldMethod::FarAsymptotic, 0.0, Some(omega_r_note(z))))
}

/// Leading near-front behaviour `−1/(2c)`.
pub fn field_near_asymptotic(p: &SpacetimePoint, params: &WaveguideParams) -> Result<FieldSample> {
    require_after_front(p, params, "the near-field asymptotic")?;
    let z = params.omega_co() * p.proper_time(params).expect("after the front");
    Ok(sample(p, front_value(params), FieldMethod::NearAsymptotic, 0.0, Some(omega_r_note(z))))
}

/// Integral of the spectral-line integrand along the steepest-descent
/// contours through `+ω*` and `−ω*`, each traversed left to right.
pub fn field_steepest_descent(
    p: &SpacetimePoint,
    params: &WaveguideParams,
    trace: &TraceSettings,
    quad: &QuadSettings,
    efolds: f64,
) -> Result<FieldSample> {
    let (t, x, c) = (p.t(), p.x(), params.c());
    if !(x > 0.0) {
        return Err(Error::Domain("steepest descent needs x > 0".into()));
    }
    require_after_front(p, params, "steepest descent")?;
    let saddle = saddle_points(x / t, params)?;
    let trace = TraceSettings { depth: Some(efolds / x), ..*trace };
    let mut total = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    for sign in [1, -1] {
        let tr = trace_descent(&saddle, sign, params, &trace)?;
        for i in 0..tr.nodes.len() - 1 {
            let (a, b) = (tr.nodes[i], tr.nodes[i + 1]);
            let (ka, kb) = (tr.wavenumbers[i], tr.wavenumbers[i + 1]);
            let chord = b - a;
            let f = |omega: Complex64| {
                let s = ((omega - a) / chord).re;
                let k = wavenumber_continued(omega, ka + (kb - ka) * s, params);
                (I * (k * x - omega * t)).exp() / k
            };
            let r = integrate(f, &ContourPath::segment(a, b), quad)?;
            total += r.value;
            error += r.error_estimate;
        }
    }
    let scale = -I / (4.0 * PI * c * c);
    // the discarded tails are bounded by e^{−efolds} times the arm integrals
    let truncation = (-efolds).exp() * total.norm();
    let z = params.omega_co() * p.proper_time(params).expect("after the front");
    Ok(sample(
        p,
        total * scale,
        FieldMethod::SteepestDescent,
        (error + truncation) * scale.norm(),
        Some(omega_r_note(z)),
    ))
}

pub fn evaluate(
    p: &SpacetimePoint,
    params: &WaveguideParams,
    method: FieldMethod,
    settings: &FieldSettings,
) -> Result<FieldSample> {
    match method {
        FieldMethod::Exact => Ok(field_exact(p, params, &settings.bessel)),
        FieldMethod::TubeLoop => field_tube_loop(p, params, settings.n_nodes),
        FieldMethod::SaddleHeightLoop => field_saddle_height_loop(p, params, settings.n_nodes),
        FieldMethod::SpectralLine => {
            let eps = settings.epsilon.unwrap_or(0.1 * params.omega_co());
            field_spectral_line(p, params, eps, &settings.line_quad)
        }
        FieldMethod::FarAsymptotic => field_far_asymptotic(p, params),
        FieldMethod::NearAsymptotic => field_near_asymptotic(p, params),
        FieldMethod::SteepestDescent => {
            field_steepest_descent(p, params, &settings.trace, &settings.descent_quad, settings.descent_efolds)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::bessel_j0;
    use approx::assert_abs_diff_eq;

    fn unit() -> WaveguideParams {
        WaveguideParams::new(1.0, 1.0).unwrap()
    }

    fn pt(t: f64, x: f64) -> SpacetimePoint {
        SpacetimePoint::new(t, x).unwrap()
    }

    fn j0(z: f64) -> f64 {
        bessel_j0(z, &BesselSettings::default()).unwrap()
    }

    #[test]
    fn method_names_round_trip() {
        for m in FieldMethod::ALL {
            assert_eq!(m.name().parse::<FieldMethod>().unwrap(), m);
        }
        assert!("bogus".parse::<FieldMethod>().is_err());
    }

    #[test]
    fn tube_loop_examples() {
        let p = unit();
        assert_eq!(field_tube_loop(&pt(1.0, 3.0), &p, 256).unwrap().value, Complex64::new(0.0, 0.0));
        let s = field_tube_loop(&pt(5.0, 3.0), &p, 256).unwrap();
        assert_abs_diff_eq!(s.value.re, -0.5 * j0(4.0), epsilon = 1e-12);
        assert!(s.value.im.abs() <= s.error_estimate);
        let s = field_tube_loop(&pt(30.0, 0.0), &p, 256).unwrap();
        assert_abs_diff_eq!(s.value.re, -0.5 * j0(30.0), epsilon = 1e-12);
    }

    #[test]
    fn saddle_height_loop_examples() {
        let p = unit();
        let a = field_saddle_height_loop(&pt(5.0, 3.0), &p, 512).unwrap();
        let b = field_tube_loop(&pt(5.0, 3.0), &p, 512).unwrap();
        assert_abs_diff_eq!(a.value.re, b.value.re, epsilon = 1e-10);
        for (t, x) in [(1.05, 1.0), (100.0, 0.0)] {
            let s = field_saddle_height_loop(&pt(t, x), &p, 512).unwrap();
            assert_abs_diff_eq!(s.value.re, exact_field_with(&pt(t, x), &p, &BesselSettings::default()), epsilon = 1e-9);
        }
        assert!(field_saddle_height_loop(&pt(1.0, 2.0), &p, 512).is_err());
    }

    #[test]
    fn spectral_line_examples() {
        let p = unit();
        let s = field_spectral_line(&pt(5.0, 0.0), &p, 0.1, &FieldSettings::default().line_quad).unwrap();
        assert_abs_diff_eq!(s.value.re, -0.5 * j0(5.0), epsilon = 1e-4);
        let s = field_spectral_line(&pt(0.5, 1.0), &p, 0.1, &FieldSettings::default().line_quad).unwrap();
        assert!(s.value.norm() <= 1e-3, "{s:?}");
        assert!(field_spectral_line(&pt(1.0, 1.0), &p, 0.1, &FieldSettings::default().line_quad).is_err());
    }

    #[test]
    fn asymptotic_examples() {
        let p = unit();
        let far = field_far_asymptotic(&pt(20.0, 0.0), &p).unwrap();
        assert_eq!(far.value.im, 0.0);
        let near = field_near_asymptotic(&pt(1.0, 0.5), &WaveguideParams::new(2.0, 1.0).unwrap()).unwrap();
        assert_eq!(near.value.re, -0.25);
        assert!(near.validity_note.unwrap().contains("omega_co*r"));
    }

    #[test]
    fn steepest_descent_example() {
        let p = unit();
        let s = evaluate(&pt(10.0, 5.0), &p, FieldMethod::SteepestDescent, &FieldSettings::default()).unwrap();
        assert_abs_diff_eq!(s.value.re, -0.5 * j0(75f64.sqrt()), epsilon = 1e-6);
        assert!(field_steepest_descent(&pt(10.0, 0.0), &p, &TraceSettings::default(), &QuadSettings::default(), 30.0).is_err());
    }
}
