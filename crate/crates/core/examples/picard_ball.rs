//! Picard iteration for `v = G_1 [ |x + e_1|^{-alpha} v^q ]` on the unit ball.
//!
//! Small constant data contracts to the zero solution for subcritical exponents.

use std::sync::Arc;

use polyharmonic::kernels::KernelParams;
use polyharmonic::semilinear::{picard_solve_with, write_history_csv, GreenOperator, GridFunction, PicardConfig};
use polyharmonic::suites::default_lattice;

fn main() -> polyharmonic::Result<()> {
    for (n, m, q) in [(3, 1, 2.0), (4, 1, 2.0), (5, 2, 2.0)] {
        let p = KernelParams::new(n, m, q)?;
        let lattice = Arc::new(default_lattice(n)?);
        let op = GreenOperator::new(Arc::clone(&lattice), p)?;
        let v0 = GridFunction::constant(lattice, p, 1e-2)?;
        let out = picard_solve_with(&op, &v0, &PicardConfig::default())?;
        println!(
            "N = {n}, m = {m}, q = {q}: {:?} on {} nodes, audit residual {:?}",
            out.verdict,
            op.lattice().len(),
            out.audit_residual
        );
        write_history_csv(&out.history, std::io::stdout())?;
    }
    Ok(())
}
