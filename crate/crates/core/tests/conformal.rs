mod common;

use nalgebra::DMatrix;
use polyharmonic::conformal::{distance_identity, green_covariance_sides, ConformalMap};
use polyharmonic::kernels::KernelParams;
use polyharmonic::Error;

use common::*;

fn phi_oracle(y: &[f64]) -> Vec<f64> {
    let mut z = y.to_vec();
    z[0] += 1.0;
    let z2 = dot(&z, &z);
    let mut out: Vec<f64> = z.iter().map(|c| 2.0 * c / z2).collect();
    out[0] -= 1.0;
    out
}

#[test]
fn map_matches_formula_and_swaps_domains() {
    let mut r = rng(10);
    for n in [2, 3, 5] {
        let map = ConformalMap::new(KernelParams::kernel(n, 1).unwrap());
        for _ in 0..200 {
            let y = ball_point(&mut r, n, 1.0);
            let got = map.phi(&y).unwrap();
            let want = phi_oracle(&y);
            assert!(dist(&got, &want) < 1e-12 * (1.0 + dot(&want, &want).sqrt()));
            assert!(got[0] > 0.0);
            assert!(dist(&map.phi_inverse(&got).unwrap(), &y) < 1e-12);
        }
        let mut edge = vec![0.0; n];
        edge[1] = 1.0;
        assert_eq!(map.phi(&edge).unwrap()[0], 0.0);
    }
}

#[test]
fn jacobian_matches_numerical_determinant() {
    let map = ConformalMap::new(KernelParams::kernel(3, 1).unwrap());
    let y = [0.2, -0.4, 0.1];
    let h = 1e-6;
    let mut jac = DMatrix::zeros(3, 3);
    for j in 0..3 {
        let mut up = y;
        up[j] += h;
        let mut down = y;
        down[j] -= h;
        let (a, b) = (phi_oracle(&up), phi_oracle(&down));
        for i in 0..3 {
            jac[(i, j)] = (a[i] - b[i]) / (2.0 * h);
        }
    }
    let det = jac.determinant().abs();
    assert!((map.jacobian_det(&y).unwrap() - det).abs() < 1e-6 * det);
}

#[test]
fn covariance_and_distance_identity() {
    let mut r = rng(11);
    for (n, m) in [(3, 1), (3, 2), (5, 2), (7, 3), (2, 2)] {
        let p = KernelParams::kernel(n, m).unwrap();
        let map = ConformalMap::new(p);
        for _ in 0..300 {
            let (x, y) = (ball_point(&mut r, n, 1.0), ball_point(&mut r, n, 1.0));
            let (lhs, rhs) = green_covariance_sides(&p, &x, &y).unwrap();
            let half = boggio_half_space(m, &phi_oracle(&x), &phi_oracle(&y));
            assert!((lhs - half).abs() <= 1e-9 * half, "N={n} m={m} {lhs} {half} {x:?} {y:?}");
            assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs));
            let (direct, closed) = distance_identity(&map, &x, &y).unwrap();
            assert!((direct - closed).abs() <= 1e-12 * closed);
        }
    }
}

#[test]
fn pole_is_rejected() {
    let map = ConformalMap::new(KernelParams::kernel(3, 1).unwrap());
    assert_eq!(map.phi(&[-1.0, 0.0, 0.0]), Err(Error::PoleSingularity));
}
