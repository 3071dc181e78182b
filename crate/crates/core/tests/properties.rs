use std::f64::consts::{FRAC_PI_2, PI, TAU};

use kgwave_core::contour::{integrate, trace_descent, ContourPath, QuadSettings, TraceSettings};
use kgwave_core::dispersion::{
    dispersion_residual, group_velocity, normalize_strip, plane_to_tube, saddle_points, spacetime_to_hyperbolic,
    tube_to_plane, wavenumber_branch, wavenumber_continued, wavenumber_derivative, SpacetimePoint, TubeCoordinate,
    WaveguideParams,
};
use kgwave_core::specfun::{bessel_j0, BesselSettings};
use num_complex::Complex64;
use proptest::prelude::*;

fn params() -> impl Strategy<Value = WaveguideParams> {
    (0.1f64..10.0, 0.05f64..20.0).prop_map(|(c, w0)| WaveguideParams::new(c, w0).unwrap())
}

fn tube_point() -> impl Strategy<Value = TubeCoordinate> {
    (-FRAC_PI_2..1.5 * PI, -4.0f64..4.0).prop_map(|(re, im)| TubeCoordinate::new(Complex64::new(re, im)).unwrap())
}

proptest! {
    #[test]
    fn tube_image_lies_on_the_manifold(p in params(), xi in tube_point()) {
        let (w, k) = tube_to_plane(xi, &p);
        let scale = (p.omega_co() * p.omega_co()).max(w.norm_sqr());
        prop_assert!(dispersion_residual(w, k, &p).norm() <= 1e-12 * scale);
    }

    #[test]
    fn tube_round_trip(p in params(), xi in tube_point()) {
        let (w, k) = tube_to_plane(xi, &p);
        let back = plane_to_tube(w, k, &p).unwrap().value();
        let mut d = back - xi.value();
        d.re -= (d.re / TAU).round() * TAU;
        prop_assert!(d.norm() <= 1e-12, "{xi:?} -> {back}");
    }

    #[test]
    fn strip_normalization_is_idempotent(re in -100.0f64..100.0) {
        let a = normalize_strip(re);
        prop_assert!((-FRAC_PI_2..1.5 * PI).contains(&a));
        prop_assert_eq!(normalize_strip(a), a);
    }

    #[test]
    fn branch_is_positive_above_the_real_axis(p in params(), re in -100.0f64..100.0, eps in 1e-6f64..5.0) {
        let k = wavenumber_branch(Complex64::new(re, eps * p.omega_co()), &p);
        prop_assert!(k.im > 0.0);
        prop_assert!(dispersion_residual(Complex64::new(re, eps * p.omega_co()), k, &p).norm()
            <= 1e-12 * (re * re + p.omega_co() * p.omega_co()));
    }

    #[test]
    fn continuation_picks_the_nearer_root(p in params(), re in -10.0f64..10.0, im in -10.0f64..10.0, flip in any::<bool>()) {
        let w = Complex64::new(re, im);
        let root = wavenumber_branch(w, &p);
        let reference = if flip { -root * 1.01 } else { root * 0.99 };
        let k = wavenumber_continued(w, reference, &p);
        prop_assert_eq!(k, if flip { -root } else { root });
    }

    #[test]
    fn group_velocity_is_subluminal_and_increasing(p in params(), a in 1e-6f64..1e3, b in 1e-6f64..1e3) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assume!(hi > lo * (1.0 + 1e-9));
        let vl = group_velocity(p.omega_co() * (1.0 + lo), &p).unwrap();
        let vh = group_velocity(p.omega_co() * (1.0 + hi), &p).unwrap();
        prop_assert!(0.0 < vl && vl < vh && vh < p.c());
    }

    #[test]
    fn saddle_is_stationary(p in params(), v in 0.01f64..0.99) {
        let s = saddle_points(v * p.c(), &p).unwrap();
        let w = s.omega_star;
        let k = wavenumber_branch(w, &p);
        let dk = wavenumber_derivative(w, k, &p);
        let conditioning = (1e-3 / (v * v * v)).max(1.0);
        prop_assert!((dk - 1.0 / (v * p.c())).norm() <= 1e-12 / p.c() * conditioning);
        let (wt, _) = tube_to_plane(s.xi_star, &p);
        prop_assert!((wt - w).norm() <= 1e-12 * w.norm());
    }

    #[test]
    fn bessel_matches_integral(z in 0.0f64..100.0) {
        let n = 1024;
        let oracle = (0..n).map(|j| (z * (TAU * j as f64 / n as f64).sin()).cos()).sum::<f64>() / n as f64;
        prop_assert!((bessel_j0(z, &BesselSettings::default()).unwrap() - oracle).abs() <= 1e-13);
    }
}

fn loop_at(z: f64, eta: Complex64, height: f64, nodes: usize) -> Complex64 {
    let settings = QuadSettings { periodic_nodes: nodes, ..QuadSettings::default() };
    integrate(|xi| (Complex64::new(0.0, z) * (xi - eta).cos()).exp(), &ContourPath::tube_loop(height), &settings)
        .unwrap()
        .value
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn loop_height_does_not_change_the_integral(t in 0.5f64..10.0, ratio in 0.0f64..0.5, w0 in 0.1f64..1.0) {
        // z·sinh(Im η) stays below 6, so the real-segment loop keeps its digits
        let p = WaveguideParams::new(1.0, w0).unwrap();
        let pt = SpacetimePoint::new(t, ratio * t).unwrap();
        let hy = spacetime_to_hyperbolic(&pt, &p).unwrap();
        let z = w0 * hy.r;
        let a = loop_at(z, hy.eta, 0.0, 512);
        let b = loop_at(z, hy.eta, hy.eta.im, 512);
        prop_assert!((a - b).norm() / (4.0 * PI) <= 1e-10);
    }

    #[test]
    fn trapezoid_converges_spectrally(z in 0.0f64..30.0, y in 0.0f64..2.0) {
        let eta = Complex64::new(-FRAC_PI_2, y);
        let coarse = loop_at(z, eta, y, 128);
        let fine = loop_at(z, eta, y, 256);
        prop_assert!((coarse - fine).norm() <= 1e-12);
    }

    #[test]
    fn descent_arms_keep_phase_and_descend(c in 0.5f64..3.0, w0 in 0.2f64..3.0, v in 0.05f64..0.95, sign in prop_oneof![Just(1i8), Just(-1i8)]) {
        let p = WaveguideParams::new(c, w0).unwrap();
        let s = saddle_points(v * c, &p).unwrap();
        let tr = trace_descent(&s, sign, &p, &TraceSettings::default()).unwrap();
        prop_assert!(tr.max_phase_residual() <= 1e-8 * tr.saddle_scale());
        for i in tr.saddle_index..tr.nodes.len() - 1 {
            prop_assert!(tr.h(i + 1).im > tr.h(i).im);
        }
        for i in 1..=tr.saddle_index {
            prop_assert!(tr.h(i - 1).im > tr.h(i).im);
        }
    }
}

#[test]
fn reversing_a_path_negates_the_integral_exactly() {
    let f = |z: Complex64| (Complex64::new(0.0, 3.0) * z.cos()).exp();
    let s = QuadSettings::default();
    for path in [ContourPath::tube_loop(0.4), ContourPath::horizontal_line(0.2, 5.0)] {
        let a = integrate(f, &path, &s).unwrap().value;
        let b = integrate(f, &path.reversed(), &s).unwrap().value;
        assert_eq!(a, -b);
    }
}
