//! Transport between the unit ball and the half-space.
//!
//! The inversion `phi` swaps `B_1` and `R^N_+`, and the Green functions on the two
//! sides agree up to an explicit power of `|x + e_1| |y + e_1|`.

use polyharmonic::conformal::{distance_identity, green_covariance_sides, ConformalMap};
use polyharmonic::kernels::KernelParams;

fn main() -> polyharmonic::Result<()> {
    let p = KernelParams::kernel(5, 2)?;
    let map = ConformalMap::new(p);
    let x = [0.3, -0.2, 0.1, 0.0, 0.4];
    let y = [-0.5, 0.1, 0.2, -0.3, 0.0];

    let hx = map.phi(&x)?;
    println!("phi(x) = {:?}", hx.0);
    println!("phi(phi(x)) = {:?}", map.phi_inverse(&hx)?.0);
    println!("det D phi(x) = {:.6e}", map.jacobian_det(&x)?);

    let (direct, closed) = distance_identity(&map, &x, &y)?;
    println!("|phi x - phi y| = {direct:.15}, closed form {closed:.15}");

    let (half_space, transported) = green_covariance_sides(&p, &x, &y)?;
    println!("G_inf^+(phi x, phi y) = {half_space:.15}");
    println!("transported G_1(x, y) = {transported:.15}");
    Ok(())
}
