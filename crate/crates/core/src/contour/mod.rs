//! Contour paths in the complex plane (or on the tube) and quadrature along
//! them, plus steepest-descent contour tracing.
//!
//! * [`ContourPath::Segment`] and [`ContourPath::TracedPolyline`] use
//!   adaptive Gauss–Kronrod on each straight piece.
//! * [`ContourPath::HorizontalLine`] integrates a truncated line
//!   `[−T + iε, T + iε]` adaptively; with [`TailSettings`] it continues into
//!   half-period panels on both sides and extrapolates the partial sums by
//!   repeated averaging, which suits integrands decaying like `e^{−iωτ}/ω`.
//! * [`ContourPath::TubeLoop`] is one full period `Re ξ ∈ [−π/2, 3π/2)` at
//!   fixed `Im ξ`, integrated with the equispaced trapezoid rule.

mod descent;
mod gauss_kronrod;

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use descent::{trace_descent, DescentTrace, TraceSettings};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    Positive,
    Negative,
}

impl Orientation {
    fn sign(self) -> f64 {
        match self {
            Orientation::Positive => 1.0,
            Orientation::Negative => -1.0,
        }
    }

    fn flip(self) -> Self {
        match self {
            Orientation::Positive => Orientation::Negative,
            Orientation::Negative => Orientation::Positive,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ContourPath {
    Segment { from: Complex64, to: Complex64 },
    /// `Im z = epsilon`, `Re z ∈ [−half_width, half_width]`, traversed left
    /// to right when positive.
    HorizontalLine { epsilon: f64, half_width: f64, orientation: Orientation },
    /// `Re ξ` over one period at `Im ξ = height`, increasing when positive.
    TubeLoop { height: f64, orientation: Orientation },
    /// Straight chords between `nodes`; `arclength[i]` is the cumulative
    /// chord length up to node `i`.
    TracedPolyline { nodes: Vec<Complex64>, arclength: Vec<f64> },
}

impl ContourPath {
    pub fn segment(from: Complex64, to: Complex64) -> Self {
        ContourPath::Segment { from, to }
    }

    pub fn horizontal_line(epsilon: f64, half_width: f64) -> Self {
        ContourPath::HorizontalLine { epsilon, half_width, orientation: Orientation::Positive }
    }

    pub fn tube_loop(height: f64) -> Self {
        ContourPath::TubeLoop { height, orientation: Orientation::Positive }
    }

    pub fn polyline(nodes: Vec<Complex64>) -> Self {
        let mut arclength = Vec::with_capacity(nodes.len());
        let mut s = 0.0;
        for (i, z) in nodes.iter().enumerate() {
            if i > 0 {
                s += (z - nodes[i - 1]).norm();
            }
            arclength.push(s);
        }
        ContourPath::TracedPolyline { nodes, arclength }
    }

    pub fn reversed(&self) -> Self {
        match self {
            ContourPath::Segment { from, to } => ContourPath::Segment { from: *to, to: *from },
            ContourPath::HorizontalLine { epsilon, half_width, orientation } => ContourPath::HorizontalLine {
                epsilon: *epsilon,
                half_width: *half_width,
                orientation: orientation.flip(),
            },
            ContourPath::TubeLoop { height, orientation } => {
                ContourPath::TubeLoop { height: *height, orientation: orientation.flip() }
            }
            ContourPath::TracedPolyline { nodes, .. } => {
                ContourPath::polyline(nodes.iter().rev().copied().collect())
            }
        }
    }

    /// Parameter interval on which [`position`](Self::position) and
    /// [`derivative`](Self::derivative) are defined.
    pub fn parameter_range(&self) -> (f64, f64) {
        match self {
            ContourPath::Segment { .. } => (0.0, 1.0),
            ContourPath::HorizontalLine { half_width, .. } => (-half_width, *half_width),
            ContourPath::TubeLoop { .. } => (-FRAC_PI_2, 3.0 * FRAC_PI_2),
            ContourPath::TracedPolyline { arclength, .. } => (0.0, arclength.last().copied().unwrap_or(0.0)),
        }
    }

    pub fn position(&self, s: f64) -> Complex64 {
        match self {
            ContourPath::Segment { from, to } => from + (to - from) * s,
            ContourPath::HorizontalLine { epsilon, orientation, .. } => {
                Complex64::new(orientation.sign() * s, *epsilon)
            }
            ContourPath::TubeLoop { height, orientation } => {
                let re = match orientation {
                    Orientation::Positive => s,
                    Orientation::Negative => PI - s,
                };
                Complex64::new(re, *height)
            }
            ContourPath::TracedPolyline { nodes, arclength } => {
                let (i, tau) = locate(arclength, s);
                if i + 1 >= nodes.len() {
                    return nodes[nodes.len() - 1];
                }
                nodes[i] + (nodes[i + 1] - nodes[i]) * tau
            }
        }
    }

    pub fn derivative(&self, s: f64) -> Complex64 {
        match self {
            ContourPath::Segment { from, to } => to - from,
            ContourPath::HorizontalLine { orientation, .. } | ContourPath::TubeLoop { orientation, .. } => {
                Complex64::new(orientation.sign(), 0.0)
            }
            ContourPath::TracedPolyline { nodes, arclength } => {
                let (i, _) = locate(arclength, s);
                let j = i.min(nodes.len().saturating_sub(2));
                let chord = nodes[j + 1] - nodes[j];
                let len = chord.norm();
                if len > 0.0 {
                    chord / len
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
        }
    }
}

fn locate(arclength: &[f64], s: f64) -> (usize, f64) {
    let i = arclength.partition_point(|&a| a <= s).saturating_sub(1);
    if i + 1 >= arclength.len() {
        return (i, 0.0);
    }
    let span = arclength[i + 1] - arclength[i];
    (i, if span > 0.0 { (s - arclength[i]) / span } else { 0.0 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// Oscillatory-tail handling for [`ContourPath::HorizontalLine`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailSettings {
    /// Half-period of the far-field oscillation `e^{−iωτ}`, i.e. `π/|τ|`.
    pub half_period: f64,
    /// Panels added on each side beyond the truncation point.
    pub panels: usize,
    /// Rounds of pairwise averaging applied to the partial sums.
    pub levels: usize,
}

impl TailSettings {
    pub fn for_half_period(half_period: f64) -> Self {
        Self { half_period, panels: 48, levels: 24 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadSettings {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Bisections allowed beyond the initial panels.
    pub max_subdivisions: usize,
    /// Trapezoid nodes for tube loops.
    pub periodic_nodes: usize,
    /// Interior break points (real parts for lines, parameters for segments).
    pub breakpoints: Vec<f64>,
    /// Initial panel width for adaptive rules.
    pub max_panel: Option<f64>,
    pub tail: Option<TailSettings>,
}

impl Default for QuadSettings {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 4000,
            periodic_nodes: 512,
            breakpoints: Vec::new(),
            max_panel: None,
            tail: None,
        }
    }
}

/// `∫ f(z) dz` along `path`.
pub fn integrate<F>(f: F, path: &ContourPath, settings: &QuadSettings) -> Result<QuadratureResult>
where
    F: Fn(Complex64) -> Complex64,
{
    if !(settings.abs_tol >= 0.0 && settings.rel_tol >= 0.0) {
        return Err(Error::InvalidConfig("quadrature tolerances must be non-negative".into()));
    }
    match path {
        ContourPath::Segment { from, to } => segment_integral(&f, *from, *to, settings),
        ContourPath::HorizontalLine { epsilon, half_width, orientation } => {
            let sign = orientation.sign();
            let g = |s: f64| f(Complex64::new(s, *epsilon));
            let r = line_integral(&g, *half_width, settings)?;
            Ok(QuadratureResult { value: r.value * sign, ..r })
        }
        ContourPath::TubeLoop { height, orientation } => {
            let r = periodic_trapezoid(|s| f(Complex64::new(s, *height)), settings)?;
            Ok(QuadratureResult { value: r.value * orientation.sign(), ..r })
        }
        ContourPath::TracedPolyline { nodes, .. } => {
            let mut total = QuadratureResult { value: Complex64::new(0.0, 0.0), error_estimate: 0.0, evaluations: 0 };
            for w in nodes.windows(2) {
                let piece = segment_integral(&f, w[0], w[1], settings)?;
                total.value += piece.value;
                total.error_estimate += piece.error_estimate;
                total.evaluations += piece.evaluations;
            }
            Ok(total)
        }
    }
}

fn segment_integral<F>(f: &F, from: Complex64, to: Complex64, settings: &QuadSettings) -> Result<QuadratureResult>
where
    F: Fn(Complex64) -> Complex64,
{
    let dz = to - from;
    let g = |s: f64| f(from + dz * s) * dz;
    gauss_kronrod::adaptive(&g, 0.0, 1.0, &settings.breakpoints, settings.max_panel, settings)
}

/// Equispaced trapezoid over `s ∈ [−π/2, 3π/2)`.
///
/// The error estimate compares with the half-resolution sum `d = |T_N −
/// T_{N/2}|` and assumes geometric convergence, giving `d²/S` with `S` the
/// integral of `|f|`, plus a rounding floor.
fn periodic_trapezoid<F>(f: F, settings: &QuadSettings) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Complex64,
{
    let n = settings.periodic_nodes;
    if n < 4 || n % 2 != 0 {
        return Err(Error::InvalidConfig(format!("periodic_nodes must be even and >= 4, got {n}")));
    }
    let h = TAU / n as f64;
    let mut full = Complex64::new(0.0, 0.0);
    let mut half = Complex64::new(0.0, 0.0);
    let mut magnitude = 0.0;
    for j in 0..n {
        let v = f(-FRAC_PI_2 + h * j as f64);
        full += v;
        magnitude += v.norm();
        if j % 2 == 0 {
            half += v;
        }
    }
    let value = full * h;
    let coarse = half * (2.0 * h);
    let scale = magnitude * h;
    let d = (value - coarse).norm();
    let aliasing = if scale > 0.0 { d * (d / scale).min(1.0) } else { 0.0 };
    let error_estimate = aliasing + 16.0 * f64::EPSILON * scale;
    let result = QuadratureResult { value, error_estimate, evaluations: n };
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(Error::NotConverged(result));
    }
    if aliasing > settings.abs_tol.max(settings.rel_tol * value.norm()) {
        return Err(Error::NotConverged(result));
    }
    Ok(result)
}

/// Truncated line integral plus optional accelerated tails.
fn line_integral<G>(g: &G, half_width: f64, settings: &QuadSettings) -> Result<QuadratureResult>
where
    G: Fn(f64) -> Complex64,
{
    let core = gauss_kronrod::adaptive(g, -half_width, half_width, &settings.breakpoints, settings.max_panel, settings)?;
    let Some(tail) = settings.tail else {
        return Ok(core);
    };
    if !(tail.half_period > 0.0) || tail.panels < 2 {
        return Err(Error::InvalidConfig("tail needs a positive half period and at least two panels".into()));
    }
    let period = tail.half_period;
    let mut evaluations = core.evaluations;
    let mut error = core.error_estimate;
    let mut partial = Vec::with_capacity(tail.panels + 1);
    let mut running = core.value;
    partial.push(running);
    for n in 0..tail.panels {
        let a = half_width + n as f64 * period;
        let b = a + period;
        let right = gauss_kronrod::adaptive(g, a, b, &[], None, settings)?;
        let left = gauss_kronrod::adaptive(g, -b, -a, &[], None, settings)?;
        evaluations += right.evaluations + left.evaluations;
        error += right.error_estimate + left.error_estimate;
        running += right.value + left.value;
        partial.push(running);
    }
    let levels = tail.levels.min(partial.len() - 2);
    let mut seq = partial;
    let mut previous_last = *seq.last().expect("non-empty");
    for _ in 0..levels {
        previous_last = *seq.last().expect("non-empty");
        seq = seq.windows(2).map(|w| (w[0] + w[1]) * 0.5).collect();
    }
    let n = seq.len();
    let value = seq[n - 1];
    let spread = (seq[n - 1] - seq[n - 2]).norm() + (value - previous_last).norm();
    let result = QuadratureResult { value, error_estimate: error + spread, evaluations };
    if spread > settings.abs_tol.max(settings.rel_tol * value.norm()) {
        return Err(Error::NotConverged(result));
    }
    Ok(result)
}
