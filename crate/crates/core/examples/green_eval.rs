//! Green functions of the ball, the shifted ball and the half-space.
//!
//! ```text
//! cargo run --example green_eval
//! ```

use polyharmonic::kernels::geometry::BallGeometry;
use polyharmonic::kernels::{green, kernel_derivative, GreenFunction, KernelParams};

fn main() -> polyharmonic::Result<()> {
    let x = [0.2, -0.1, 0.3];
    let y = [-0.4, 0.25, 0.1];
    for m in 1..=3 {
        let p = KernelParams::kernel(3, m)?;
        let ball = green(&p, &BallGeometry::unit_ball(), &x, &y)?;
        let shifted = green(&p, &BallGeometry::shifted_ball(4.0)?, &[1.0, 0.3, 0.0], &[2.0, -0.5, 0.4])?;
        let half = green(&p, &BallGeometry::half_space(), &[1.0, 0.3, 0.0], &[2.0, -0.5, 0.4])?;
        println!("m = {m}: G_1 = {ball:.12}  G_4^+ = {shifted:.12}  G_inf^+ = {half:.12}");
    }

    // a reusable evaluator and exact y-derivatives
    let p = KernelParams::kernel(5, 2)?;
    let unit = BallGeometry::unit_ball();
    let g = GreenFunction::new(p, unit);
    let (x, y) = ([0.1, 0.0, 0.2, 0.0, -0.3], [0.5, 0.1, 0.0, 0.2, 0.0]);
    println!("N = 5, m = 2: G = {:.12}", g.eval(&x, &y)?);
    for alpha in [[1, 0, 0, 0, 0], [2, 0, 0, 0, 0], [1, 1, 0, 0, 1]] {
        println!("  D^{alpha:?} G = {:.10}", kernel_derivative(&p, &unit, &x, &y, &alpha)?);
    }
    Ok(())
}
