use std::f64::consts::PI;

use kgwave_core::dispersion::{Region, SpacetimePoint, WaveguideParams};
use kgwave_core::field::{
    evaluate, field_far_asymptotic, field_saddle_height_loop, field_spectral_line, field_steepest_descent,
    field_tube_loop, FieldMethod, FieldSettings,
};
use kgwave_core::specfun::{bessel_j0, exact_field, BesselSettings};
use kgwave_core::Error;
use num_complex::Complex64;
use proptest::prelude::*;

fn unit() -> WaveguideParams {
    WaveguideParams::new(1.0, 1.0).unwrap()
}

fn pt(t: f64, x: f64) -> SpacetimePoint {
    SpacetimePoint::new(t, x).unwrap()
}

fn j0(z: f64) -> f64 {
    bessel_j0(z, &BesselSettings::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn tube_loops_agree_with_closed_form(c in 0.3f64..4.0, w0 in 0.1f64..3.0, t in 0.05f64..40.0, ratio in 0.0f64..0.999) {
        let p = WaveguideParams::new(c, w0).unwrap();
        let q = pt(t, ratio * c * t);
        let exact = exact_field(&q, &p);
        let a = field_tube_loop(&q, &p, 512).unwrap();
        let b = field_saddle_height_loop(&q, &p, 512).unwrap();
        prop_assert!((a.value.re - exact).abs() <= 1e-10);
        prop_assert!((a.value - b.value).norm() <= 1e-10);
        prop_assert!(a.value.im.abs() <= a.error_estimate);
        prop_assert!(b.value.im.abs() <= b.error_estimate);
    }

    #[test]
    fn nothing_arrives_before_the_front(c in 0.3f64..4.0, w0 in 0.1f64..3.0, t in 0.05f64..40.0, ratio in 1.001f64..10.0) {
        let p = WaveguideParams::new(c, w0).unwrap();
        let q = pt(t, ratio * c * t);
        prop_assert_eq!(q.region(&p), Region::BeforeFront);
        let settings = FieldSettings::default();
        prop_assert_eq!(evaluate(&q, &p, FieldMethod::Exact, &settings).unwrap().value, Complex64::new(0.0, 0.0));
        prop_assert_eq!(evaluate(&q, &p, FieldMethod::TubeLoop, &settings).unwrap().value, Complex64::new(0.0, 0.0));
        for m in [FieldMethod::SaddleHeightLoop, FieldMethod::FarAsymptotic, FieldMethod::NearAsymptotic, FieldMethod::SteepestDescent] {
            prop_assert!(matches!(evaluate(&q, &p, m, &settings), Err(Error::Domain(_))));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn spectral_line_is_real_and_accurate(z in 1.0f64..30.0, v in 0.0f64..0.9) {
        let p = unit();
        let t = z / (1.0 - v * v).sqrt();
        let q = pt(t, v * t);
        let s = evaluate(&q, &p, FieldMethod::SpectralLine, &FieldSettings::default()).unwrap();
        prop_assert!((s.value.re - exact_field(&q, &p)).abs() <= 1e-4);
        prop_assert!(s.value.im.abs() <= s.error_estimate.max(1e-12), "{s:?}");
    }

    #[test]
    fn steepest_descent_matches_closed_form(z in 3.0f64..40.0, v in 0.1f64..0.95) {
        let p = unit();
        let t = z / (1.0 - v * v).sqrt();
        let q = pt(t, v * t);
        let s = evaluate(&q, &p, FieldMethod::SteepestDescent, &FieldSettings::default()).unwrap();
        prop_assert!((s.value.re - exact_field(&q, &p)).abs() <= 1e-6);
        prop_assert!(s.value.im.abs() <= s.error_estimate.max(1e-12), "{s:?}");
    }
}

#[test]
fn spectral_line_is_independent_of_its_height() {
    let p = unit();
    let quad = FieldSettings::default().line_quad;
    for (t, x) in [(5.0, 0.0), (8.0, 3.0), (20.0, 15.0)] {
        let a = field_spectral_line(&pt(t, x), &p, 0.05, &quad).unwrap();
        let b = field_spectral_line(&pt(t, x), &p, 0.2, &quad).unwrap();
        assert!((a.value - b.value).norm() <= a.error_estimate + b.error_estimate, "{a:?} {b:?}");
    }
}

#[test]
fn spectral_line_rejects_bad_inputs() {
    let p = unit();
    let quad = FieldSettings::default().line_quad;
    assert!(field_spectral_line(&pt(5.0, 1.0), &p, 0.0, &quad).is_err());
    assert!(field_spectral_line(&pt(0.0, 1.0), &p, 0.1, &quad).is_err());
}

#[test]
fn steepest_descent_examples() {
    let p = unit();
    let s = FieldSettings::default();
    let run = |t: f64, x: f64| {
        field_steepest_descent(&pt(t, x), &p, &s.trace, &s.descent_quad, s.descent_efolds).unwrap()
    };
    assert!((run(10.0, 5.0).value.re + 0.5 * j0(75f64.sqrt())).abs() <= 1e-6);
    let q = pt(4.0, 3.6);
    assert!((run(4.0, 3.6).value.re - exact_field(&q, &p)).abs() <= 1e-5);
    // agrees with the two-saddle asymptotic to first order in 1/(ω_co r)
    let q = pt(60.0, 30.0);
    let z = q.proper_time(&p).unwrap();
    let far = field_far_asymptotic(&q, &p).unwrap().value.re;
    assert!((run(60.0, 30.0).value.re - far).abs() <= 0.5 / (2.0 * PI * z).sqrt() / z);
}

#[test]
fn front_moves_at_the_limiting_speed() {
    for (c, w0) in [(1.0, 1.0), (3.0, 0.5)] {
        let p = WaveguideParams::new(c, w0).unwrap();
        let x = 7.0;
        let dt = 1e-3;
        let first = (0..20_000)
            .map(|i| i as f64 * dt)
            .find(|&t| t > 0.0 && field_tube_loop(&pt(t, x), &p, 512).unwrap().value.norm() > 1e-6)
            .unwrap();
        assert!((first - x / c).abs() <= dt, "c = {c}: first arrival at {first}");
        let exact_first = (0..20_000).map(|i| i as f64 * dt).find(|&t| exact_field(&pt(t, x), &p).abs() > 1e-6).unwrap();
        assert!((exact_first - x / c).abs() <= dt);
    }
}

#[test]
fn late_ringing_sits_at_the_cut_off() {
    for (c, w0) in [(1.0, 1.0), (2.0, 0.3)] {
        let p = WaveguideParams::new(c, w0).unwrap();
        let x = 5.0;
        let u = |t: f64| exact_field(&pt(t, x), &p);
        let start = 100.0 / w0;
        let step = 0.01 / w0;
        let mut crossings = Vec::new();
        let mut t = start;
        while crossings.len() < 12 {
            if u(t) * u(t + step) < 0.0 {
                // refine by bisection
                let (mut a, mut b) = (t, t + step);
                for _ in 0..60 {
                    let m = 0.5 * (a + b);
                    if u(a) * u(m) <= 0.0 {
                        b = m;
                    } else {
                        a = m;
                    }
                }
                crossings.push(0.5 * (a + b));
            }
            t += step;
        }
        for w in crossings.windows(2) {
            let spacing = w[1] - w[0];
            assert!((spacing * w0 / PI - 1.0).abs() <= 0.01, "spacing {spacing}");
        }
    }
}

#[test]
fn dispatcher_examples() {
    let p = unit();
    let s = FieldSettings::default();
    assert_eq!(evaluate(&pt(0.5, 2.0), &p, FieldMethod::Exact, &s).unwrap().value.re, 0.0);
    let q = pt(7.0, 2.0);
    let tube = evaluate(&q, &p, FieldMethod::TubeLoop, &s).unwrap();
    assert!((tube.value.re - exact_field(&q, &p)).abs() <= 1e-10);
    assert_eq!(evaluate(&q, &p, FieldMethod::NearAsymptotic, &s).unwrap().value.re, -0.5);
    let on = pt(2.0, 2.0);
    assert_eq!(evaluate(&on, &p, FieldMethod::TubeLoop, &s).unwrap().value.re, -0.5);
    assert_eq!(evaluate(&on, &p, FieldMethod::Exact, &s).unwrap().value.re, -0.5);
    // the field is even in x
    assert_eq!(pt(7.0, -2.0), q);
}
