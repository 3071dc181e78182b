//! Dispersion relation `ω² − c²k² − ω_co² = 0` of the scalar Klein–Gordon
//! waveguide, its causal wavenumber branch, and the complex tube
//! parametrization `ω = ω_co sin ξ`, `k = i (ω_co / c) cos ξ` of the full
//! complex dispersion manifold.
//!
//! The manifold is topologically a tube: `ξ` lives on the strip
//! `−π/2 ≤ Re ξ < 3π/2` with the two edges glued. `Im ξ > 0` is the physical
//! sheet of `k(ω)` and `Im ξ < 0` the second sheet; the real segment of the
//! strip is the cut `[−ω_co, ω_co]`.

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

/// Carrier for every complex quantity in the crate (ω, k, ξ, field values).
pub type ComplexScalar = Complex64;

/// Relative residual accepted by [`plane_to_tube`].
pub const MANIFOLD_TOLERANCE: f64 = 1e-9;
/// Bound on `|dk/dω(ω*) − 1/V|`, in units of `1/c`, for `V ≥ 0.1c`.
pub const SADDLE_TOLERANCE: f64 = 1e-12;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Limiting velocity `c` and cut-off frequency `ω_co` of the waveguide.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveguideParams {
    c: f64,
    omega_co: f64,
}

impl WaveguideParams {
    pub fn new(c: f64, omega_co: f64) -> Result<Self> {
        ensure_finite(c, "c")?;
        ensure_finite(omega_co, "omega_co")?;
        if c <= 0.0 {
            return Err(Error::Domain(format!("wave speed c must be positive, got {c}")));
        }
        if omega_co <= 0.0 {
            return Err(Error::Domain(format!(
                "cut-off frequency must be positive, got {omega_co}"
            )));
        }
        Ok(Self { c, omega_co })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn omega_co(&self) -> f64 {
        self.omega_co
    }
}

/// A point `ξ` of the tube, with `Re ξ` folded into `[−π/2, 3π/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TubeCoordinate(Complex64);

impl TubeCoordinate {
    pub fn new(xi: Complex64) -> Result<Self> {
        if !(xi.re.is_finite() && xi.im.is_finite()) {
            return Err(Error::NonFinite("xi"));
        }
        Ok(Self(Complex64::new(normalize_strip(xi.re), xi.im)))
    }

    pub fn value(&self) -> Complex64 {
        self.0
    }
}

/// Folds a real part into `[−π/2, 3π/2)`.
pub fn normalize_strip(re: f64) -> f64 {
    let mut folded = (re + FRAC_PI_2).rem_euclid(TAU);
    // rem_euclid may round up to exactly the modulus for tiny negative input
    if folded >= TAU {
        folded = 0.0;
    }
    folded - FRAC_PI_2
}

/// Where an observation point sits relative to the wave front `t = x/c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    BeforeFront,
    OnFront,
    AfterFront,
}

/// Observation point `(t, x)`. Negative `x` is folded to `|x|` since the
/// Green's function is even in `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacetimePoint {
    t: f64,
    x: f64,
}

impl SpacetimePoint {
    pub fn new(t: f64, x: f64) -> Result<Self> {
        ensure_finite(t, "t")?;
        ensure_finite(x, "x")?;
        if t < 0.0 {
            return Err(Error::Domain(format!("time must be non-negative, got {t}")));
        }
        Ok(Self { t, x: x.abs() })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn region(&self, params: &WaveguideParams) -> Region {
        let front = self.x / params.c;
        if self.t > front {
            Region::AfterFront
        } else if self.t < front {
            Region::BeforeFront
        } else {
            Region::OnFront
        }
    }

    /// Proper time `√(t² − x²/c²)`, factored to avoid cancellation near the front.
    pub fn proper_time(&self, params: &WaveguideParams) -> Option<f64> {
        let front = self.x / params.c;
        (self.t > front).then(|| ((self.t - front) * (self.t + front)).sqrt())
    }
}

/// `(r, η)` with `ix/c = r cos η` and `−t = r sin η`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperbolicCoords {
    pub r: f64,
    pub eta: Complex64,
}

/// Stationary points `±ω*` of `k(ω) − ω/V` for the ray `x = V t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddleData {
    /// Ray speed `V = x/t`.
    pub ray_speed: f64,
    /// `ω* = ω_co (1 − V²/c²)^{−1/2}`; the mirror saddle is `−ω*`.
    pub omega_star: Complex64,
    /// Tube image of `+ω*`; the image of `−ω*` is `xi_star − π`.
    pub xi_star: TubeCoordinate,
    /// `|dk/dω(ω*) − 1/V|`, zero by definition for `V = 0`.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Propagating,
    Evanescent,
}

/// One point of the real dispersion diagram in both `(ω, k)` and `(W, K)`
/// coordinates. `k` is the magnitude of the wavenumber: real on the
/// propagating branch, the imaginary part on the evanescent branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagramSample {
    pub omega: f64,
    pub k: f64,
    pub branch: Branch,
    /// `W = ω²`.
    pub omega_sq: f64,
    /// `K = k²`, negative on the evanescent branch.
    pub k_sq: f64,
}

pub fn dispersion_residual(omega: Complex64, k: Complex64, params: &WaveguideParams) -> Complex64 {
    let c = params.c;
    let w0 = params.omega_co;
    omega * omega - c * c * k * k - w0 * w0
}

/// The causal branch `k(ω) = (i/c) √(ω_co² − ω²)` (principal root).
///
/// Continuous on `Im ω > 0` with `k → iω_co/c` near `ω = 0` and `Im k > 0`
/// there. Real `ω` is attached to the upper half-plane: `|ω| < ω_co` gives
/// `i√(ω_co² − ω²)/c`, `|ω| > ω_co` gives `sign(ω)√(ω² − ω_co²)/c`. Below the
/// real axis the same formula continues the branch through the segment
/// `(−ω_co, ω_co)`, with cuts on the real rays `|ω| > ω_co`.
pub fn wavenumber_branch(omega: Complex64, params: &WaveguideParams) -> Complex64 {
    let c = params.c;
    let w0 = params.omega_co;
    if omega.im == 0.0 {
        let w = omega.re;
        let gap = (w0 - w.abs()) * (w0 + w.abs());
        return if gap > 0.0 {
            Complex64::new(0.0, gap.sqrt() / c)
        } else {
            Complex64::new(w.signum() * (-gap).sqrt() / c, 0.0)
        };
    }
    let gap = (w0 - omega) * (w0 + omega);
    I * principal_sqrt(gap) / c
}

/// Principal square root that derives the smaller component from the larger
/// one, keeping full relative accuracy near the negative real axis.
fn principal_sqrt(z: Complex64) -> Complex64 {
    if z.re == 0.0 && z.im == 0.0 {
        return Complex64::new(0.0, z.im);
    }
    let t = ((z.re.abs() + z.norm()) * 0.5).sqrt();
    if z.re >= 0.0 {
        Complex64::new(t, z.im / (2.0 * t))
    } else {
        Complex64::new(z.im.abs() / (2.0 * t), t.copysign(z.im))
    }
}

/// Root of the dispersion relation at `omega` closest to `reference`.
///
/// Used to continue `k` analytically along a path on the Riemann surface:
/// as long as successive points are close compared with the distance to the
/// branch points `±ω_co`, picking the nearer of `±k` follows the sheet.
pub fn wavenumber_continued(
    omega: Complex64,
    reference: Complex64,
    params: &WaveguideParams,
) -> Complex64 {
    let root = wavenumber_branch(omega, params);
    if (root - reference).norm_sqr() <= (root + reference).norm_sqr() {
        root
    } else {
        -root
    }
}

/// `dk/dω = ω / (c² k)` on whichever sheet `k` belongs to.
pub fn wavenumber_derivative(omega: Complex64, k: Complex64, params: &WaveguideParams) -> Complex64 {
    omega / (params.c * params.c * k)
}

/// Group velocity `c √(ω² − ω_co²) / ω` of a propagating mode.
pub fn group_velocity(omega: f64, params: &WaveguideParams) -> Result<f64> {
    ensure_finite(omega, "omega")?;
    let w0 = params.omega_co;
    if omega <= w0 {
        return Err(Error::Domain(format!(
            "group velocity needs omega > omega_co ({w0}), got {omega}"
        )));
    }
    Ok(params.c * ((omega - w0) * (omega + w0)).sqrt() / omega)
}

pub fn tube_to_plane(xi: TubeCoordinate, params: &WaveguideParams) -> (Complex64, Complex64) {
    let z = xi.value();
    let w0 = params.omega_co;
    (w0 * z.sin(), I * (w0 / params.c) * z.cos())
}

/// `(dω/dξ, dk/dξ) = (ω_co cos ξ, −i (ω_co/c) sin ξ)`.
pub fn tube_derivatives(xi: TubeCoordinate, params: &WaveguideParams) -> (Complex64, Complex64) {
    let z = xi.value();
    let w0 = params.omega_co;
    (w0 * z.cos(), -I * (w0 / params.c) * z.sin())
}

pub fn plane_to_tube(omega: Complex64, k: Complex64, params: &WaveguideParams) -> Result<TubeCoordinate> {
    plane_to_tube_with_tolerance(omega, k, params, MANIFOLD_TOLERANCE)
}

/// Inverse of [`tube_to_plane`]: `e^{iξ} = i(ω − ck)/ω_co`, equivalently
/// `e^{−iξ} = −i(ω + ck)/ω_co`.
pub fn plane_to_tube_with_tolerance(
    omega: Complex64,
    k: Complex64,
    params: &WaveguideParams,
    tolerance: f64,
) -> Result<TubeCoordinate> {
    if !(omega.re.is_finite() && omega.im.is_finite()) {
        return Err(Error::NonFinite("omega"));
    }
    if !(k.re.is_finite() && k.im.is_finite()) {
        return Err(Error::NonFinite("k"));
    }
    let c = params.c;
    let w0 = params.omega_co;
    let scale = (w0 * w0).max((c * k).norm_sqr()).max(omega.norm_sqr());
    let residual = dispersion_residual(omega, k, params).norm() / scale;
    if residual > tolerance {
        return Err(Error::OffManifold { residual, tolerance });
    }
    // ω − ck and ω + ck multiply to ω_co²; use the larger one so the
    // logarithm never sees a cancelled difference.
    let minus = omega - c * k;
    let plus = omega + c * k;
    let xi = if minus.norm_sqr() >= plus.norm_sqr() {
        -I * (I * minus / w0).ln()
    } else {
        I * (-I * plus / w0).ln()
    };
    TubeCoordinate::new(xi)
}

/// `r = √(t² − x²/c²)`, `η = −π/2 + i artanh(x/(ct))`.
pub fn spacetime_to_hyperbolic(p: &SpacetimePoint, params: &WaveguideParams) -> Result<HyperbolicCoords> {
    let r = p.proper_time(params).ok_or_else(|| {
        Error::Domain(format!(
            "hyperbolic coordinates need t > x/c, got t = {}, x = {}",
            p.t(),
            p.x()
        ))
    })?;
    let eta = Complex64::new(-FRAC_PI_2, (p.x() / (params.c * p.t())).atanh());
    Ok(HyperbolicCoords { r, eta })
}

pub fn saddle_points(ray_speed: f64, params: &WaveguideParams) -> Result<SaddleData> {
    ensure_finite(ray_speed, "V")?;
    let c = params.c;
    if !(0.0..c).contains(&ray_speed) {
        return Err(Error::Domain(format!("ray speed must lie in [0, c), got {ray_speed}")));
    }
    let v = ray_speed / c;
    let omega_star = params.omega_co / ((1.0 - v) * (1.0 + v)).sqrt();
    if ray_speed == 0.0 {
        return Ok(SaddleData {
            ray_speed,
            omega_star: Complex64::new(omega_star, 0.0),
            xi_star: TubeCoordinate::new(Complex64::new(FRAC_PI_2, 0.0))?,
            residual: 0.0,
        });
    }
    // ξ* = η + π with η = −π/2 + i artanh(V/c)
    let xi_star = TubeCoordinate::new(Complex64::new(FRAC_PI_2, v.atanh()))?;
    let w = Complex64::new(omega_star, 0.0);
    let k = wavenumber_branch(w, params);
    let residual = (wavenumber_derivative(w, k, params) - 1.0 / ray_speed).norm();
    // ω* − ω_co ≈ ω_co v²/2: rounding ω* perturbs k by eps/v² relative,
    // which is eps/(v³c) on the scale 1/V of the residual
    let conditioning = (1e-3 / (v * v * v)).max(1.0);
    if residual > SADDLE_TOLERANCE / c * conditioning {
        return Err(Error::Domain(format!(
            "saddle residual {residual:e} exceeds tolerance at V = {ray_speed}"
        )));
    }
    Ok(SaddleData { ray_speed, omega_star: w, xi_star, residual })
}

/// Samples `ω ∈ [0, omega_max]` on a uniform grid of `n` points, with `ω_co`
/// inserted when it falls inside the range.
pub fn sample_diagram(params: &WaveguideParams, omega_max: f64, n: usize) -> Result<Vec<DiagramSample>> {
    ensure_finite(omega_max, "omega_max")?;
    if omega_max <= 0.0 {
        return Err(Error::Domain(format!("omega_max must be positive, got {omega_max}")));
    }
    if n < 2 {
        return Err(Error::Domain(format!("need at least two samples, got {n}")));
    }
    let w0 = params.omega_co;
    let c = params.c;
    let mut omegas: Vec<f64> = (0..n).map(|i| omega_max * i as f64 / (n - 1) as f64).collect();
    if w0 <= omega_max && !omegas.contains(&w0) {
        let at = omegas.partition_point(|&w| w < w0);
        omegas.insert(at, w0);
    }
    Ok(omegas
        .into_iter()
        .map(|omega| {
            let gap = (omega - w0) * (omega + w0);
            DiagramSample {
                omega,
                k: gap.abs().sqrt() / c,
                branch: if omega >= w0 { Branch::Propagating } else { Branch::Evanescent },
                omega_sq: omega * omega,
                k_sq: gap / (c * c),
            }
        })
        .collect())
}
