//! Half-space Green functions as limits over growing balls `B_R(R e_1)`.

use polyharmonic::kernels::geometry::BallGeometry;
use polyharmonic::kernels::{green, KernelParams};
use polyharmonic::quadrature::QuadratureSpec;
use polyharmonic::representation::{default_schedule, gaussian_dipole, halfspace_representation};

fn main() -> polyharmonic::Result<()> {
    let p = KernelParams::kernel(3, 1)?;
    let (x, y) = ([0.5, 0.1, 0.0], [0.8, -0.2, 0.3]);
    let limit = green(&p, &BallGeometry::half_space(), &x, &y)?;
    println!("G_inf^+ = {limit:.12}");
    for k in [2, 4, 6, 8, 10, 12] {
        let r = x[0] * f64::from(1u32 << k);
        let g = green(&p, &BallGeometry::shifted_ball(r)?, &x, &y)?;
        println!("R = {r:>8}: G_R^+ = {g:.12}, gap {:.3e}", limit - g);
    }

    // truncated representation of a field with known half-space solution
    let dipole = gaussian_dipole(1.5)?;
    let x = [2.0, 0.3, -0.2];
    let rep = halfspace_representation(
        &p,
        |y: &[f64]| dipole.source(y),
        Some(&dipole),
        &x,
        &default_schedule(x[0]),
        1.0,
        &QuadratureSpec::with_tolerance(1e-8),
    )?;
    println!("u(x) = {:.10}", dipole.value(&x));
    for (t, b) in rep.sequence.iter().zip(&rep.tail_bounds) {
        println!(
            "R = {:>6}: truncated {:.10}  tail bound {:.3e} (far part {:.3e})",
            t.radius,
            t.value,
            b.estimate,
            b.far_part()
        );
    }
    Ok(())
}
