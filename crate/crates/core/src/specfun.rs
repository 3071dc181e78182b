//! Bessel `J0` and the closed-form Green's function `−J0(ω_co r)/(2c)`.
//!
//! `J0` uses two regimes: the ascending series `Σ (−z²/4)^m / (m!)²`,
//! accumulated in double-double arithmetic so the alternating terms (which
//! peak near `e^z`) cancel without losing the low digits, and the Hankel
//! asymptotic expansion `√(2/πz) (P cos χ − Q sin χ)`, `χ = z − π/4`, beyond
//! the cutoff.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use crate::dispersion::{Region, SpacetimePoint, WaveguideParams};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesselSettings {
    /// Arguments at or below this use the power series.
    pub series_cutoff: f64,
    pub target_abs_error: f64,
}

impl Default for BesselSettings {
    fn default() -> Self {
        // The Hankel expansion's smallest term is about e^{-2z}; at z = 20
        // that is far below 1e-13, at z = 12 it is not.
        Self { series_cutoff: 20.0, target_abs_error: 1e-13 }
    }
}

impl BesselSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.series_cutoff > 0.0 && self.series_cutoff.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "series_cutoff must be positive, got {}",
                self.series_cutoff
            )));
        }
        if !(self.target_abs_error > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "target_abs_error must be positive, got {}",
                self.target_abs_error
            )));
        }
        Ok(())
    }
}

pub fn bessel_j0(z: f64, settings: &BesselSettings) -> Result<f64> {
    if !z.is_finite() {
        return Err(Error::NonFinite("z"));
    }
    if z < 0.0 {
        return Err(Error::Domain(format!("J0 is evaluated for z >= 0 only, got {z}")));
    }
    settings.validate()?;
    let value = if z <= settings.series_cutoff {
        j0_series(z, settings.target_abs_error)
    } else {
        j0_asymptotic(z, settings.target_abs_error)
    };
    Ok(value.clamp(-1.0, 1.0))
}

/// Ascending series, double-double accumulation.
pub(crate) fn j0_series(z: f64, target: f64) -> f64 {
    let (zz, zz_lo) = two_prod(z, z);
    let quarter = Dd::new(zz * 0.25, zz_lo * 0.25);
    let mut term = Dd::new(1.0, 0.0);
    let mut sum = term;
    let mut m = 1.0;
    loop {
        term = term.mul(quarter).div(-(m * m));
        sum = sum.add(term);
        // past the peak of |term| and below the floor of the result
        if m * m > quarter.hi && term.hi.abs() < target * 1e-4 {
            break;
        }
        m += 1.0;
    }
    sum.hi + sum.lo
}

/// Hankel expansion, summed until the terms stop decreasing or drop below
/// the target.
pub(crate) fn j0_asymptotic(z: f64, target: f64) -> f64 {
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut m = 1.0f64;
    loop {
        let next = term * (2.0 * m - 1.0).powi(2) / (8.0 * m * z);
        if next >= term || next < target * 1e-4 {
            break;
        }
        term = next;
        // m = 1, 2, 3, 4, 5, ... enters Q, P, Q, P, Q, ... with signs - - + + - ...
        let n = m as u64;
        let signed = if ((n + 1) / 2) % 2 == 1 { -term } else { term };
        if n % 2 == 1 {
            q += signed;
        } else {
            p += signed;
        }
        m += 1.0;
    }
    let (s, c) = z.sin_cos();
    let cos_chi = (c + s) * FRAC_1_SQRT_2;
    let sin_chi = (s - c) * FRAC_1_SQRT_2;
    (2.0 / (PI * z)).sqrt() * (p * cos_chi - q * sin_chi)
}

/// Closed-form field: `−J0(ω_co r)/(2c)` after the front, `0` before it,
/// and the left limit `−1/(2c)` on it.
pub fn exact_field(p: &SpacetimePoint, params: &WaveguideParams) -> f64 {
    exact_field_with(p, params, &BesselSettings::default())
}

pub fn exact_field_with(p: &SpacetimePoint, params: &WaveguideParams, settings: &BesselSettings) -> f64 {
    let amplitude = -0.5 / params.c();
    match p.region(params) {
        Region::BeforeFront => 0.0,
        Region::OnFront => amplitude,
        Region::AfterFront => {
            let r = p.proper_time(params).expect("after the front");
            // argument is finite and non-negative here
            amplitude * bessel_j0(params.omega_co() * r, settings).unwrap_or(f64::NAN)
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    fn new(hi: f64, lo: f64) -> Self {
        let (hi, lo) = quick_two_sum(hi, lo);
        Self { hi, lo }
    }

    fn add(self, other: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, other.hi);
        Dd::new(s, e + self.lo + other.lo)
    }

    fn mul(self, other: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, other.hi);
        Dd::new(p, e + self.hi * other.lo + self.lo * other.hi)
    }

    fn div(self, d: f64) -> Dd {
        let q1 = self.hi / d;
        let (p, e) = two_prod(q1, d);
        let q2 = (self.hi - p - e + self.lo) / d;
        Dd::new(q1, q2)
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn j0(z: f64) -> f64 {
        bessel_j0(z, &BesselSettings::default()).unwrap()
    }

    // (1/2π) ∫_0^{2π} cos(z sin θ) dθ by the periodic trapezoid rule
    fn integral_oracle(z: f64) -> f64 {
        let n = 512;
        (0..n)
            .map(|j| (z * (2.0 * PI * j as f64 / n as f64).sin()).cos())
            .sum::<f64>()
            / n as f64
    }

    #[test]
    fn value_at_zero() {
        assert_eq!(j0(0.0), 1.0);
    }

    #[test]
    fn first_zero() {
        assert!(j0(2.404825557695773).abs() < 1e-12);
    }

    #[test]
    fn matches_integral_representation() {
        for z in [0.5, 3.0, 7.25, 11.0, 19.9, 20.1, 33.0, 50.0, 99.0] {
            assert_abs_diff_eq!(j0(z), integral_oracle(z), epsilon = 1e-13);
        }
    }

    #[test]
    fn regimes_agree_around_cutoff() {
        let s = BesselSettings::default();
        let mut z = s.series_cutoff - 1.0;
        while z <= s.series_cutoff + 1.0 {
            let a = j0_series(z, s.target_abs_error);
            let b = j0_asymptotic(z, s.target_abs_error);
            assert!((a - b).abs() <= 2.0 * s.target_abs_error, "z = {z}: {a} vs {b}");
            z += 0.05;
        }
    }

    #[test]
    fn domain_errors() {
        let s = BesselSettings::default();
        assert!(bessel_j0(-1.0, &s).is_err());
        assert!(bessel_j0(f64::NAN, &s).is_err());
        assert!(bessel_j0(f64::INFINITY, &s).is_err());
        let bad = BesselSettings { series_cutoff: 0.0, ..s };
        assert!(bessel_j0(1.0, &bad).is_err());
    }

    #[test]
    fn exact_field_regions() {
        let p = WaveguideParams::new(2.0, 1.0).unwrap();
        let before = SpacetimePoint::new(0.5, 2.0).unwrap();
        assert_eq!(exact_field(&before, &p), 0.0);
        let on = SpacetimePoint::new(1.0, 2.0).unwrap();
        assert_eq!(exact_field(&on, &p), -0.25);
        let unit = WaveguideParams::new(1.0, 1.0).unwrap();
        let axis = SpacetimePoint::new(10.0, 0.0).unwrap();
        assert_abs_diff_eq!(exact_field(&axis, &unit), -0.5 * integral_oracle(10.0), epsilon = 1e-13);
    }

    #[test]
    fn front_jump() {
        let p = WaveguideParams::new(1.0, 1.0).unwrap();
        let behind = exact_field(&SpacetimePoint::new(3.0 + 1e-9, 3.0).unwrap(), &p);
        let ahead = exact_field(&SpacetimePoint::new(3.0 - 1e-9, 3.0).unwrap(), &p);
        assert_eq!(ahead, 0.0);
        assert_abs_diff_eq!(behind, -0.5, epsilon = 1e-8);
    }
}
