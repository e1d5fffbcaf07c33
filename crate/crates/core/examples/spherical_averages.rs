//! Spherical averages and Jensen's inequality for convex composites.

use polyharmonic::quadrature::{spherical_average, QuadratureSpec};

fn main() -> polyharmonic::Result<()> {
    let spec = QuadratureSpec::default();
    for n in [2, 3, 5] {
        let r = 0.75;
        let linear = spherical_average(&|x: &[f64]| 2.0 + x[0] - 3.0 * x[n - 1], n, r, &spec)?;
        let quadratic = spherical_average(&|x: &[f64]| x.iter().map(|c| c * c).sum(), n, r, &spec)?;
        println!("N = {n}: mean of 2 + x1 - 3 xN = {linear:.12}, mean of |x|^2 = {quadratic:.12}");

        let w = |x: &[f64]| x[0] + (2.0 * x[n - 1]).sin();
        let mean = spherical_average(&w, n, r, &spec)?;
        let mean_exp = spherical_average(&|x: &[f64]| w(x).exp(), n, r, &spec)?;
        println!("  exp(mean w) = {:.8} <= mean exp(w) = {mean_exp:.8}", mean.exp());
    }
    Ok(())
}
