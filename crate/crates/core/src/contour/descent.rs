//! Steepest-descent contours of `h(ω) = k(ω) − ω/V` through the saddles `±ω*`.
//!
//! Each arm follows `dω/ds = i·conj(h′)/|h′|`, which keeps `Re h` fixed and
//! raises `Im h` at unit rate `|h′|`. Integration is RK4 with step doubling,
//! followed by a Newton projection back onto `Re h = const`. `k` is carried
//! along by nearest-root continuation, so arms may cross the cuts of the
//! principal branch onto the second sheet.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ContourPath;
use crate::dispersion::{wavenumber_branch, wavenumber_continued, SaddleData, WaveguideParams};
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSettings {
    /// Arms stop once `Im h − Im h(ω*)` reaches this; `None` means `30 ω_co/c`.
    pub depth: Option<f64>,
    /// Offset from the saddle along the descent axis, in units of `ω_co`.
    pub seed_offset: f64,
    /// Local RK4 error allowed per step, in units of `ω_co`.
    pub step_tolerance: f64,
    /// Largest step, in units of `max(ω_co, |ω|)`.
    pub max_step: f64,
    /// Smallest step before the trace is declared stuck, in units of `ω_co`.
    pub min_step: f64,
    /// Node budget per arm.
    pub max_nodes: usize,
}

impl Default for TraceSettings {
    fn default() -> Self {
        Self {
            depth: None,
            seed_offset: 1e-6,
            step_tolerance: 1e-11,
            max_step: 0.05,
            min_step: 1e-13,
            max_nodes: 200_000,
        }
    }
}

/// Both arms through one saddle, stored as a single polyline traversed from
/// the incoming arm's far end, through the saddle, to the outgoing arm's end.
/// The outgoing arm leaves the saddle with `Re dω > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct DescentTrace {
    pub saddle: SaddleData,
    /// `+1` for `+ω*`, `−1` for `−ω*`.
    pub branch_sign: i8,
    pub nodes: Vec<Complex64>,
    /// `k` at each node on the sheet reached by continuation.
    pub wavenumbers: Vec<Complex64>,
    pub saddle_index: usize,
    /// Conserved value of `Re h`.
    pub phase_const: f64,
}

impl DescentTrace {
    pub fn path(&self) -> ContourPath {
        ContourPath::polyline(self.nodes.clone())
    }

    pub fn h(&self, i: usize) -> Complex64 {
        self.wavenumbers[i] - self.nodes[i] / self.saddle.ray_speed
    }

    /// `max |Re h − phase_const|` over all nodes.
    pub fn max_phase_residual(&self) -> f64 {
        (0..self.nodes.len()).map(|i| (self.h(i).re - self.phase_const).abs()).fold(0.0, f64::max)
    }

    /// `|h(ω*)|`, the scale of the level-set tolerance.
    pub fn saddle_scale(&self) -> f64 {
        self.h(self.saddle_index).norm()
    }
}

struct Flow<'a> {
    params: &'a WaveguideParams,
    inv_v: f64,
}

impl Flow<'_> {
    fn k(&self, omega: Complex64, reference: Complex64) -> Complex64 {
        wavenumber_continued(omega, reference, self.params)
    }

    fn h(&self, omega: Complex64, k: Complex64) -> Complex64 {
        k - omega * self.inv_v
    }

    fn dh(&self, omega: Complex64, k: Complex64) -> Complex64 {
        let c = self.params.c();
        omega / (c * c * k) - self.inv_v
    }

    fn velocity(&self, omega: Complex64, reference: Complex64) -> Complex64 {
        let d = self.dh(omega, self.k(omega, reference));
        I * d.conj() / d.norm()
    }

    fn rk4(&self, omega: Complex64, reference: Complex64, step: f64) -> Complex64 {
        let k1 = self.velocity(omega, reference);
        let k2 = self.velocity(omega + k1 * (0.5 * step), reference);
        let k3 = self.velocity(omega + k2 * (0.5 * step), reference);
        let k4 = self.velocity(omega + k3 * step, reference);
        omega + (k1 + 2.0 * k2 + 2.0 * k3 + k4) * (step / 6.0)
    }

    fn branch_distance(&self, omega: Complex64) -> f64 {
        let w0 = self.params.omega_co();
        (omega - w0).norm().min((omega + w0).norm())
    }
}

pub fn trace_descent(
    saddle: &SaddleData,
    branch_sign: i8,
    params: &WaveguideParams,
    settings: &TraceSettings,
) -> Result<DescentTrace> {
    let c = params.c();
    let w0 = params.omega_co();
    let v = saddle.ray_speed;
    if !(v > 0.0 && v < c) {
        return Err(Error::Domain(format!("descent tracing needs 0 < V < c, got V = {v}")));
    }
    if branch_sign != 1 && branch_sign != -1 {
        return Err(Error::Domain(format!("branch_sign must be +1 or -1, got {branch_sign}")));
    }
    let depth = settings.depth.unwrap_or(30.0 * w0 / c);
    if !(depth > 0.0 && depth.is_finite()) {
        return Err(Error::InvalidConfig(format!("trace depth must be positive, got {depth}")));
    }
    if !(settings.seed_offset > 0.0 && settings.step_tolerance > 0.0 && settings.max_step > 0.0) {
        return Err(Error::InvalidConfig("trace offsets, tolerances and steps must be positive".into()));
    }

    let flow = Flow { params, inv_v: 1.0 / v };
    let omega_star = saddle.omega_star * f64::from(branch_sign);
    let k_star = wavenumber_branch(omega_star, params);
    let h_star = flow.h(omega_star, k_star);
    let phase_const = h_star.re;
    let h2 = -(w0 * w0) / (c.powi(4) * k_star.powi(3));
    let mut axis = (I / h2).sqrt();
    axis /= axis.norm();
    if axis.re < 0.0 {
        axis = -axis;
    }

    let outgoing = trace_arm(&flow, omega_star, k_star, axis, h_star, depth, settings)?;
    let incoming = trace_arm(&flow, omega_star, k_star, -axis, h_star, depth, settings)?;

    let mut nodes = Vec::with_capacity(incoming.len() + outgoing.len() + 1);
    let mut wavenumbers = Vec::with_capacity(nodes.capacity());
    for &(w, k) in incoming.iter().rev() {
        nodes.push(w);
        wavenumbers.push(k);
    }
    let saddle_index = nodes.len();
    nodes.push(omega_star);
    wavenumbers.push(k_star);
    for &(w, k) in &outgoing {
        nodes.push(w);
        wavenumbers.push(k);
    }
    Ok(DescentTrace { saddle: *saddle, branch_sign, nodes, wavenumbers, saddle_index, phase_const })
}

fn trace_arm(
    flow: &Flow<'_>,
    omega_star: Complex64,
    k_star: Complex64,
    direction: Complex64,
    h_star: Complex64,
    depth: f64,
    settings: &TraceSettings,
) -> Result<Vec<(Complex64, Complex64)>> {
    let w0 = flow.params.omega_co();
    let tol = settings.step_tolerance * w0;
    let min_step = settings.min_step * w0;
    let target = h_star.im + depth;

    let mut omega = omega_star + direction * (settings.seed_offset * w0);
    let mut k = flow.k(omega, k_star);
    (omega, k) = project(flow, omega, k, h_star.re);
    let mut arm = vec![(omega, k)];
    let mut step = settings.seed_offset * w0;

    while flow.h(omega, k).im - h_star.im < depth {
        if arm.len() >= settings.max_nodes {
            return Err(Error::Trace(format!(
                "node budget {} exhausted at omega = {omega} before reaching depth {depth}",
                settings.max_nodes
            )));
        }
        let cap = (settings.max_step * w0.max(omega.norm())).min(0.25 * flow.branch_distance(omega));
        step = step.min(cap);
        loop {
            if step < min_step {
                return Err(Error::Trace(format!("step size underflow near omega = {omega}")));
            }
            let full = flow.rk4(omega, k, step);
            let mid = flow.rk4(omega, k, 0.5 * step);
            let k_mid = flow.k(mid, k);
            let halves = flow.rk4(mid, k_mid, 0.5 * step);
            let err = (full - halves).norm() / 15.0;
            if err <= tol {
                let k_new = flow.k(halves, k_mid);
                let (w, kk) = project(flow, halves, k_new, h_star.re);
                omega = w;
                k = kk;
                let grow = if err > 0.0 { (0.9 * (tol / err).powf(0.2)).min(2.0) } else { 2.0 };
                step = (step * grow).min(cap.max(step));
                break;
            }
            step *= (0.9 * (tol / err).powf(0.2)).clamp(0.1, 0.5);
        }
        let im = flow.h(omega, k).im;
        if im >= target {
            arm.push((omega, k));
            break;
        }
        arm.push((omega, k));
    }
    Ok(arm)
}

/// Newton steps `δω = −(Re h − c₀)·conj(h′)/|h′|²` back onto the level set.
fn project(flow: &Flow<'_>, mut omega: Complex64, mut k: Complex64, level: f64) -> (Complex64, Complex64) {
    for _ in 0..4 {
        let h = flow.h(omega, k);
        let miss = h.re - level;
        if miss.abs() <= 1e-15 * h.norm().max(1e-300) {
            break;
        }
        let d = flow.dh(omega, k);
        omega -= miss * d.conj() / d.norm_sqr();
        k = flow.k(omega, k);
    }
    (omega, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::saddle_points;

    #[test]
    fn arms_stay_on_level_set_and_descend() {
        let p = WaveguideParams::new(1.0, 1.0).unwrap();
        let s = saddle_points(0.5, &p).unwrap();
        for sign in [1, -1] {
            let tr = trace_descent(&s, sign, &p, &TraceSettings::default()).unwrap();
            assert!(tr.max_phase_residual() <= 1e-8 * tr.saddle_scale());
            let i0 = tr.saddle_index;
            for i in i0..tr.nodes.len() - 1 {
                assert!(tr.h(i + 1).im > tr.h(i).im);
            }
            for i in 1..=i0 {
                assert!(tr.h(i - 1).im > tr.h(i).im);
            }
            assert!(tr.nodes[i0 + 1].re > tr.nodes[i0].re);
        }
    }

    #[test]
    fn rejects_static_ray() {
        let p = WaveguideParams::new(1.0, 1.0).unwrap();
        let s = saddle_points(0.0, &p).unwrap();
        assert!(matches!(trace_descent(&s, 1, &p, &TraceSettings::default()), Err(Error::Domain(_))));
    }
}
