mod common;

use std::sync::Arc;

use polyharmonic::kernels::KernelParams;
use polyharmonic::movingplane::axial_symmetry_defect;
use polyharmonic::semilinear::{
    picard_solve_with, write_history_csv, GreenOperator, GridFunction, Lattice, PicardConfig, PicardVerdict,
};
use polyharmonic::suites::default_lattice;

use common::*;

#[test]
fn lattice_weights_integrate_polynomials() {
    for n in [2, 3, 5] {
        let lattice = default_lattice(n).unwrap();
        let vol = ball_volume(n);
        assert!((lattice.total_weight() - vol).abs() < 1e-6 * vol);
        let second = lattice.integrate(|y| dot(y, y));
        let want = n as f64 * vol / (n as f64 + 2.0);
        assert!((second - want).abs() < 1e-6 * want);
    }
}

#[test]
fn critical_exponent_operator_reproduces_torsion() {
    // alpha = 0 at the critical exponent, so T[c] = 4^m c^q (1 - |x|^2)^m / bubble constant
    for (n, m) in [(3, 1), (5, 2)] {
        let q = (n + 2 * m) as f64 / (n - 2 * m) as f64;
        let p = KernelParams::new(n, m, q).unwrap();
        assert!(p.alpha().abs() < 1e-12);
        let lattice = Arc::new(default_lattice(n).unwrap());
        let op = GreenOperator::new(Arc::clone(&lattice), p).unwrap();
        let c = 0.5f64;
        let tv = op.apply(&GridFunction::constant(lattice.clone(), p, c).unwrap()).unwrap();
        let scale = 4f64.powi(m as i32) * c.powf(q) / bubble_constant(n, m);
        let errors: Vec<f64> = lattice
            .nodes()
            .iter()
            .zip(tv.values())
            .map(|(node, v)| v - scale * (1.0 - dot(&node.point, &node.point)).powi(m as i32))
            .collect();
        // only rows whose off-diagonal mass already exceeds the exact mass are clamped,
        // and those can only overshoot
        let inexact = errors.iter().filter(|e| e.abs() > 1e-12 * scale).count();
        assert!(inexact <= op.clamped_cells(), "N={n} m={m}: {inexact} inexact rows");
        assert!(errors.iter().all(|e| *e > -1e-12 * scale));
    }
}

#[test]
fn small_data_contracts_to_zero() {
    for (n, m, q) in [(3, 1, 2.0), (4, 1, 2.0), (5, 2, 2.0), (3, 1, 3.0)] {
        let p = KernelParams::new(n, m, q).unwrap();
        let lattice = Arc::new(default_lattice(n).unwrap());
        let op = GreenOperator::new(Arc::clone(&lattice), p).unwrap();
        let v0 = GridFunction::constant(lattice, p, 1e-2).unwrap();
        let cfg = PicardConfig::default();
        let out = picard_solve_with(&op, &v0, &cfg).unwrap();
        assert_eq!(out.verdict, PicardVerdict::Converged);
        assert!(out.history.windows(2).all(|w| w[1].sup_norm <= w[0].sup_norm));
        assert!(out.audit_residual.unwrap() < cfg.contraction_tol);
        assert!(out.iterate.sup_norm() < cfg.contraction_tol);
        assert!(axial_symmetry_defect(&out.iterate).unwrap() < 1e-12);
    }
}

#[test]
fn large_data_diverges() {
    let p = KernelParams::new(3, 1, 2.0).unwrap();
    let lattice = Arc::new(default_lattice(3).unwrap());
    let op = GreenOperator::new(Arc::clone(&lattice), p).unwrap();
    let out = picard_solve_with(&op, &GridFunction::constant(lattice, p, 1e3).unwrap(), &PicardConfig::default()).unwrap();
    assert_eq!(out.verdict, PicardVerdict::Diverged);
}

#[test]
fn history_is_versioned_csv() {
    let p = KernelParams::new(3, 1, 2.0).unwrap();
    let lattice = Arc::new(Lattice::polar_ball(3, 8, 4, false).unwrap());
    let op = GreenOperator::new(Arc::clone(&lattice), p).unwrap();
    let out = picard_solve_with(&op, &GridFunction::constant(lattice, p, 1e-2).unwrap(), &PicardConfig::default()).unwrap();
    let mut buf = Vec::new();
    write_history_csv(&out.history, &mut buf).unwrap();
    let mut reader = csv::Reader::from_reader(buf.as_slice());
    assert_eq!(reader.headers().unwrap(), vec!["schema_version", "iter", "sup_norm", "residual"]);
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), out.history.len());
    assert!(rows.iter().all(|r| &r[0] == "1"));
}

#[test]
fn invalid_configurations_are_rejected() {
    let p = KernelParams::new(3, 1, 2.0).unwrap();
    let lattice = Arc::new(Lattice::polar_ball(3, 4, 2, false).unwrap());
    assert!(GridFunction::new(lattice.clone(), p, vec![1.0]).is_err());
    let bad = PicardConfig {
        damping: 0.0,
        ..PicardConfig::default()
    };
    assert!(bad.validate().is_err());
    assert!(Lattice::polar_ball(3, 0, 2, false).is_err());
}
