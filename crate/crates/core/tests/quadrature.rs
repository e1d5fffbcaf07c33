mod common;

use std::f64::consts::PI;

use polyharmonic::kernels::geometry::BallGeometry;
use polyharmonic::quadrature::{
    cap_surface_integral, integrate_ball, sphere_area, sphere_integral_about, spherical_average, CapRange,
    QuadratureSpec,
};

use common::*;

fn on_axis(n: usize, x1: f64) -> Vec<f64> {
    let mut x = vec![0.0; n];
    x[0] = x1;
    x
}

#[test]
fn whole_sphere_matches_poisson_normalization() {
    let spec = QuadratureSpec::with_tolerance(1e-11);
    for n in [2, 3, 4, 6] {
        let area = n as f64 * ball_volume(n);
        for (x1, r) in [(1.0f64, 4.0f64), (0.3, 16.0), (2.0, 64.0)] {
            let d = r - x1;
            let want = area * r / (r * r - d * d);
            let got = cap_surface_integral(&CapRange::new(0.0, 2.0 * r, r).unwrap(), &on_axis(n, x1), &spec).unwrap();
            assert!((got - want).abs() <= 1e-9 * want, "N={n} x1={x1} R={r}: {got} vs {want}");
        }
    }
}

#[test]
fn three_dimensional_bands_match_archimedes() {
    let spec = QuadratureSpec::with_tolerance(1e-11);
    let band = |x1: f64, r: f64, a: f64, b: f64| {
        let s = |y1: f64| (x1 * x1 + 2.0 * (r - x1) * y1).powf(-0.5);
        2.0 * PI * r / (r - x1) * (s(a) - s(b))
    };
    for (x1, r, a, b) in [(1.0, 8.0, 1.0, 16.0), (0.5, 32.0, 0.0, 2.0), (1.5, 4.0, 0.25, 3.0)] {
        let want = band(x1, r, a, b);
        let got = cap_surface_integral(&CapRange::new(a, b, r).unwrap(), &on_axis(3, x1), &spec).unwrap();
        assert!((got - want).abs() <= 1e-9 * want);
    }
    let empty = cap_surface_integral(&CapRange::new(2.0, 2.0, 8.0).unwrap(), &on_axis(3, 1.0), &spec).unwrap();
    assert_eq!(empty, 0.0);
    assert!(CapRange::new(3.0, 2.0, 8.0).is_err());
    assert!(CapRange::new(0.0, 20.0, 8.0).is_err());
}

#[test]
fn ball_integrals_of_polynomials() {
    let spec = QuadratureSpec::with_tolerance(1e-10);
    for n in [1, 2, 3, 5] {
        let vol = integrate_ball(&|_: &[f64]| 1.0, &BallGeometry::ball(2.0).unwrap(), n, &spec, None).unwrap();
        assert!((vol.value - ball_volume(n) * 2f64.powi(n as i32)).abs() < 1e-9 * vol.value);
        let second = integrate_ball(&|y: &[f64]| dot(y, y), &BallGeometry::unit_ball(), n, &spec, None).unwrap();
        let want = n as f64 * ball_volume(n) / (n as f64 + 2.0);
        assert!((second.value - want).abs() < 1e-9 * want);
    }
    // shifted ball: y_1 averages to the center R
    let r = 3.0;
    let geom = BallGeometry::shifted_ball(r).unwrap();
    let first = integrate_ball(&|y: &[f64]| y[0], &geom, 3, &spec, None).unwrap();
    let want = r * ball_volume(3) * r.powi(3);
    assert!((first.value - want).abs() < 1e-9 * want);
}

#[test]
fn newtonian_potential_of_uniform_ball() {
    let spec = QuadratureSpec::with_tolerance(1e-10);
    for x in [[0.0, 0.0, 0.0], [0.3, -0.2, 0.5], [0.0, 0.95, 0.0]] {
        let f = |y: &[f64]| 1.0 / dist(&x, y);
        let got = integrate_ball(&f, &BallGeometry::unit_ball(), 3, &spec, Some(&x)).unwrap();
        let want = 2.0 * PI * (1.0 - dot(&x, &x) / 3.0);
        assert!((got.value - want).abs() <= 1e-8 * want, "{x:?}: {} vs {want}", got.value);
    }
}

#[test]
fn sphere_integrals_and_averages() {
    let spec = QuadratureSpec::default();
    for n in [2, 3, 4, 7] {
        let area = n as f64 * ball_volume(n);
        assert!((sphere_area(n) - area).abs() < 1e-13 * area);
        let axis = on_axis(n, 1.0);
        let center = vec![0.5; n];
        let s = sphere_integral_about(&|y: &[f64]| (y[0] - 0.5).powi(2), &center, 2.0, &axis, &spec).unwrap();
        let want = area * 2f64.powi(n as i32 - 1) * 4.0 / n as f64;
        assert!((s.value - want).abs() < 1e-10 * want);
        let avg = spherical_average(&|y: &[f64]| y.iter().map(|c| c.powi(4)).sum(), n, 1.0, &spec).unwrap();
        let want = 3.0 / (n as f64 + 2.0);
        assert!((avg - want).abs() < 1e-10);
        assert_eq!(spherical_average(&|y: &[f64]| 1.0 + y[0], n, 0.0, &spec).unwrap(), 1.0);
    }
}

#[test]
fn invalid_specs_are_rejected() {
    let mut spec = QuadratureSpec::default();
    spec.target_rel_error = 0.0;
    assert!(integrate_ball(&|_: &[f64]| 1.0, &BallGeometry::unit_ball(), 2, &spec, None).is_err());
    let spec = QuadratureSpec::default();
    assert!(spherical_average(&|_: &[f64]| 1.0, 2, -1.0, &spec).is_err());
}
