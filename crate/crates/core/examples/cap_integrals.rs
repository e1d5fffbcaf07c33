//! Surface integrals of `|x - y|^{1-N}` over bands of the sphere `dB_R(R e_1)`.
//!
//! Over `{a < y_1 < 2R}` the integral decays like `R^{-1/2}`, while over the whole
//! sphere it stays of size `c / x_1`.

use polyharmonic::quadrature::{cap_surface_integral, CapRange, QuadratureSpec};
use polyharmonic::rescale::log_log_slope;

fn main() -> polyharmonic::Result<()> {
    let spec = QuadratureSpec::with_tolerance(1e-10);
    let x = [1.0, 0.0, 0.0];
    let radii: Vec<f64> = (2..=9).map(|k| f64::from(1u32 << k)).collect();
    let mut band = Vec::new();
    println!("{:>6} {:>14} {:>14}", "R", "a = 1", "x1 * whole");
    for &r in &radii {
        let b = cap_surface_integral(&CapRange::new(1.0, 2.0 * r, r)?, &x, &spec)?;
        let whole = cap_surface_integral(&CapRange::new(0.0, 2.0 * r, r)?, &x, &spec)?;
        println!("{r:>6} {b:>14.8} {:>14.8}", x[0] * whole);
        band.push(b);
    }
    println!("fitted exponent of the band integral: {:.4}", log_log_slope(&radii, &band)?);
    Ok(())
}
