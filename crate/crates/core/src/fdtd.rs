//! Leapfrog finite differences for the anchored cord,
//! `u_tt = c² u_xx − ω_co² u` with `u(0, x) = 0` and `u_t(0⁺, x) = −δ(x)`.
//!
//! The grid covers `x ≥ 0` only: the solution is even in `x`, so the node
//! left of the origin mirrors `u_1`. The far end is held at zero. The delta is
//! spread over three nodes with weights `[1/4, 1/2, 1/4]/dx`, which keeps unit
//! mass, has no odd-even component, and makes the scheme exact for `ω_co = 0`
//! at Courant number one.

use std::f64::consts::{PI, TAU};

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::dispersion::{Region, SpacetimePoint, WaveguideParams};
use crate::error::{ensure_finite, Error, Result};
use crate::specfun::exact_field;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdtdConfig {
    pub c: f64,
    /// May be zero (plain wave equation).
    pub omega_co: f64,
    pub dx: f64,
    /// `c·dt/dx`.
    pub cfl: f64,
    pub domain_half_width: f64,
    pub t_end: f64,
    /// Store the whole grid every this many steps.
    pub snapshot_every: Option<usize>,
    /// Positions at which the full time series is recorded.
    pub series_at: Vec<f64>,
}

impl FdtdConfig {
    /// Default Courant number 0.9 and a domain wide enough that nothing
    /// reflected from the far end reaches `x ≤ c·t_end`.
    pub fn new(c: f64, omega_co: f64, dx: f64, t_end: f64) -> Self {
        Self { c, omega_co, dx, cfl: 0.9, domain_half_width: 0.0, t_end, snapshot_every: None, series_at: Vec::new() }
            .with_cfl(0.9)
    }

    /// Sets the Courant number and resizes the domain to the default
    /// `c·t_end·(1 + 1/cfl)/2 + 8·dx`.
    pub fn with_cfl(self, cfl: f64) -> Self {
        let domain_half_width = self.c * self.t_end * (1.0 + 1.0 / cfl) * 0.5 + 8.0 * self.dx;
        Self { cfl, domain_half_width, ..self }
    }

    pub fn from_params(params: &WaveguideParams, dx: f64, t_end: f64) -> Self {
        Self::new(params.c(), params.omega_co(), dx, t_end)
    }

    /// Largest Courant number for which the leapfrog update with the mass
    /// term stays stable, `λ² (1 + (ω_co dx/2c)²) ≤ 1`. The scheme is least
    /// dispersive there.
    pub fn max_stable_cfl(c: f64, omega_co: f64, dx: f64) -> f64 {
        1.0 / (1.0 + (omega_co * dx / (2.0 * c)).powi(2)).sqrt()
    }

    pub fn dt(&self) -> f64 {
        self.cfl * self.dx / self.c
    }

    pub fn validate(&self) -> Result<()> {
        for (v, name) in [
            (self.c, "c"),
            (self.omega_co, "omega_co"),
            (self.dx, "dx"),
            (self.cfl, "cfl"),
            (self.domain_half_width, "domain_half_width"),
            (self.t_end, "t_end"),
        ] {
            ensure_finite(v, name)?;
        }
        if self.c <= 0.0 || self.omega_co < 0.0 || self.dx <= 0.0 || self.t_end <= 0.0 {
            return Err(Error::InvalidConfig(
                "need c > 0, omega_co >= 0, dx > 0 and t_end > 0".into(),
            ));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::InvalidConfig(format!("cfl must lie in (0, 1], got {}", self.cfl)));
        }
        let limit = Self::max_stable_cfl(self.c, self.omega_co, self.dx);
        if self.cfl > limit * (1.0 + 4.0 * f64::EPSILON) {
            return Err(Error::InvalidConfig(format!(
                "cfl {} is unstable with the mass term; the limit at this dx is {limit}",
                self.cfl
            )));
        }
        if self.domain_half_width <= self.c * self.t_end + 2.0 * self.dx {
            return Err(Error::InvalidConfig(format!(
                "domain_half_width {} must exceed c*t_end + 2*dx = {}",
                self.domain_half_width,
                self.c * self.t_end + 2.0 * self.dx
            )));
        }
        if self.snapshot_every == Some(0) {
            return Err(Error::InvalidConfig("snapshot_every must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeValue {
    pub point: SpacetimePoint,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: f64,
    /// `u(t, j·dx)` for `j = 0, 1, ...`.
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub x: f64,
    pub dt: f64,
    /// `u(n·dt, x)` for `n = 0, 1, ...`.
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdtdResult {
    pub probes: Vec<ProbeValue>,
    pub snapshots: Vec<Snapshot>,
    pub series: Vec<TimeSeries>,
    /// Largest `|u|` seen anywhere during the run.
    pub max_abs: f64,
    pub steps: usize,
}

fn spatial_interp(u: &[f64], x: f64, dx: f64) -> f64 {
    let s = x / dx;
    let j = (s.floor() as usize).min(u.len() - 2);
    let w = s - j as f64;
    u[j] * (1.0 - w) + u[j + 1] * w
}

pub fn simulate(config: &FdtdConfig, probes: &[SpacetimePoint]) -> Result<FdtdResult> {
    config.validate()?;
    for p in probes {
        if p.t() > config.t_end || p.x() >= config.domain_half_width - config.dx {
            return Err(Error::Domain(format!(
                "probe (t = {}, x = {}) lies outside the simulated region",
                p.t(),
                p.x()
            )));
        }
    }
    for &x in &config.series_at {
        if !(x >= 0.0 && x < config.domain_half_width - config.dx) {
            return Err(Error::Domain(format!("series position {x} lies outside the grid")));
        }
    }

    let dx = config.dx;
    let dt = config.dt();
    let m = (config.domain_half_width / dx).ceil() as usize;
    let steps = (config.t_end / dt).ceil() as usize;
    let lambda2 = config.cfl * config.cfl;
    let mass = (config.omega_co * dt).powi(2);

    let mut prev = vec![0.0; m + 1];
    let mut cur = vec![0.0; m + 1];
    cur[0] = -0.5 / dx * dt;
    cur[1] = -0.25 / dx * dt;
    let mut next = vec![0.0; m + 1];

    // probe indices sorted by time so each is resolved once
    let mut order: Vec<usize> = (0..probes.len()).collect();
    order.sort_by(|&a, &b| probes[a].t().total_cmp(&probes[b].t()));
    let mut probe_values = vec![0.0; probes.len()];
    let mut pending = order.into_iter().peekable();

    let mut snapshots = Vec::new();
    let mut series: Vec<TimeSeries> =
        config.series_at.iter().map(|&x| TimeSeries { x, dt, values: vec![0.0] }).collect();
    let mut max_abs: f64 = cur.iter().fold(0.0, |a, v| a.max(v.abs()));

    let record = |level: &[f64], t: f64, n: usize, snapshots: &mut Vec<Snapshot>, series: &mut Vec<TimeSeries>| {
        if let Some(every) = config.snapshot_every {
            if n % every == 0 {
                snapshots.push(Snapshot { t, values: level.to_vec() });
            }
        }
        for s in series.iter_mut() {
            s.values.push(spatial_interp(level, s.x, dx));
        }
    };
    if let Some(every) = config.snapshot_every {
        if every > 0 {
            snapshots.push(Snapshot { t: 0.0, values: prev.clone() });
        }
    }
    record(&cur, dt, 1, &mut snapshots, &mut series);

    // level n holds u at t = n·dt; `prev` is n − 1 and `cur` is n
    let mut n = 1usize;
    while let Some(&i) = pending.peek() {
        if probes[i].t() <= dt {
            let w = probes[i].t() / dt;
            probe_values[i] = w * spatial_interp(&cur, probes[i].x(), dx);
            pending.next();
        } else {
            break;
        }
    }
    while n < steps || pending.peek().is_some() {
        // highest index whose stencil can be non-zero at level n + 1
        let reach = (n + 2).min(m - 1);
        next[0] = 2.0 * cur[0] - prev[0] + lambda2 * 2.0 * (cur[1] - cur[0]) - mass * cur[0];
        for j in 1..=reach {
            next[j] = 2.0 * cur[j] - prev[j] + lambda2 * (cur[j + 1] - 2.0 * cur[j] + cur[j - 1]) - mass * cur[j];
        }
        next[m] = 0.0;
        for v in &next[..=reach] {
            max_abs = max_abs.max(v.abs());
        }
        let t_next = (n + 1) as f64 * dt;
        while let Some(&i) = pending.peek() {
            let p = &probes[i];
            if p.t() > t_next {
                break;
            }
            let w = (p.t() - n as f64 * dt) / dt;
            probe_values[i] = (1.0 - w) * spatial_interp(&cur, p.x(), dx) + w * spatial_interp(&next, p.x(), dx);
            pending.next();
        }
        std::mem::swap(&mut prev, &mut cur);
        std::mem::swap(&mut cur, &mut next);
        n += 1;
        record(&cur, t_next, n, &mut snapshots, &mut series);
    }

    Ok(FdtdResult {
        probes: probes.iter().zip(probe_values).map(|(p, value)| ProbeValue { point: *p, value }).collect(),
        snapshots,
        series,
        max_abs,
        steps: n,
    })
}

/// Closed-form field, including the wave-equation limit `ω_co = 0` where it
/// is the step `−1/(2c)` behind the front.
pub fn reference_field(c: f64, omega_co: f64, p: &SpacetimePoint) -> Result<f64> {
    if omega_co > 0.0 {
        return Ok(exact_field(p, &WaveguideParams::new(c, omega_co)?));
    }
    // same region rule as the dispersive case
    let probe = WaveguideParams::new(c, 1.0)?;
    Ok(match p.region(&probe) {
        Region::BeforeFront => 0.0,
        _ => -0.5 / c,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceLevel {
    pub dx: f64,
    pub max_error: f64,
    /// `log2(e_{k−1}/e_k)`, absent on the first level.
    pub observed_order: Option<f64>,
}

/// Runs `n_levels` simulations, halving `dx` each time at fixed Courant
/// number, and records the worst probe error against [`reference_field`].
pub fn convergence_study(base: &FdtdConfig, probes: &[SpacetimePoint], n_levels: usize) -> Result<Vec<ConvergenceLevel>> {
    if n_levels < 3 {
        return Err(Error::InvalidConfig(format!("a convergence study needs at least 3 levels, got {n_levels}")));
    }
    if probes.is_empty() {
        return Err(Error::InvalidConfig("a convergence study needs at least one probe".into()));
    }
    base.validate()?;
    let reference: Vec<f64> =
        probes.iter().map(|p| reference_field(base.c, base.omega_co, p)).collect::<Result<_>>()?;
    let mut levels: Vec<ConvergenceLevel> = Vec::with_capacity(n_levels);
    for level in 0..n_levels {
        let dx = base.dx / f64::from(1u32 << level);
        let config = FdtdConfig { dx, snapshot_every: None, series_at: Vec::new(), ..base.clone() };
        let run = simulate(&config, probes)?;
        let max_error = run
            .probes
            .iter()
            .zip(&reference)
            .map(|(p, r)| (p.value - r).abs())
            .fold(0.0, f64::max);
        let observed_order = levels.last().map(|prev| (prev.max_error / max_error).log2());
        levels.push(ConvergenceLevel { dx, max_error, observed_order });
    }
    Ok(levels)
}

/// Dominant angular frequency of `values[n] = u(n·dt)` over `t ∈ [t_from, t_to]`,
/// from a Hann-windowed, 16× zero-padded FFT with parabolic peak refinement.
pub fn ringing_frequency(values: &[f64], dt: f64, t_from: f64, t_to: f64) -> Result<f64> {
    if !(dt > 0.0 && t_from >= 0.0 && t_to > t_from) {
        return Err(Error::InvalidConfig("need dt > 0 and 0 <= t_from < t_to".into()));
    }
    let a = (t_from / dt).ceil() as usize;
    let b = ((t_to / dt).floor() as usize).min(values.len().saturating_sub(1));
    if b <= a + 8 {
        return Err(Error::Domain("too few samples in the requested window".into()));
    }
    let window = &values[a..=b];
    let len = window.len();
    let mean = window.iter().sum::<f64>() / len as f64;
    let padded = (len * 16).next_power_of_two();
    let mut buffer: Vec<Complex<f64>> = window
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let hann = 0.5 - 0.5 * (TAU * i as f64 / (len - 1) as f64).cos();
            Complex::new((v - mean) * hann, 0.0)
        })
        .collect();
    buffer.resize(padded, Complex::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(padded).process(&mut buffer);
    let power: Vec<f64> = buffer[..padded / 2].iter().map(|z| z.norm_sqr()).collect();
    let peak = (1..power.len() - 1)
        .max_by(|&i, &j| power[i].total_cmp(&power[j]))
        .expect("non-empty spectrum");
    let (l, c, r) = (power[peak - 1].ln(), power[peak].ln(), power[peak + 1].ln());
    let denom = l - 2.0 * c + r;
    let shift = if denom != 0.0 { 0.5 * (l - r) / denom } else { 0.0 };
    let bin = peak as f64 + shift;
    Ok(2.0 * PI * bin / (padded as f64 * dt))
}
