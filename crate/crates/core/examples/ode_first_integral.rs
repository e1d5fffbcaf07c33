//! The one-dimensional reduction `(-1)^m u^{(2m)} = f(u)` and its first integral.

use polyharmonic::ode1d::{bounded_solution_scan, integrate, tensor_grid, Nonlinearity1D, ODEState};

fn main() -> polyharmonic::Result<()> {
    let nl = Nonlinearity1D::power(2.0)?;
    for m in 1..=3 {
        let free: Vec<f64> = (0..m).map(|i| 0.01 / (i + 1) as f64).collect();
        let traj = integrate(&ODEState::dirichlet(&free, &nl, m)?, &nl, m, 10.0, 1e-12)?;
        println!(
            "m = {m}: {} steps, H(0) = {:.3e}, max drift {:.3e}, max |u| {:.4}",
            traj.states.len(),
            traj.states[0].h,
            traj.max_drift(),
            traj.max_abs_u()
        );
    }

    let linear = Nonlinearity1D::linear();
    let sine = integrate(&ODEState::dirichlet(&[1.0], &linear, 1)?, &linear, 1, 10.0, 1e-12)?;
    println!("u'' = -u from u'(0) = 1: u(10) = {:.12}, sin 10 = {:.12}", sine.last().u(), 10f64.sin());

    let scan = bounded_solution_scan(&nl, 2, &tensor_grid(&[-0.5, 0.0, 0.5], 2), 10.0, 1e6, 1e-10)?;
    for e in &scan.entries {
        println!("  initial {:?}: {:?}", e.initial, e.verdict);
    }
    Ok(())
}
