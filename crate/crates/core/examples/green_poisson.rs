//! Reconstruct a field from its source and boundary data through the Green function.
//!
//! `v = (1 - |x|^2)^m` solves the Dirichlet problem with a constant source, so the
//! boundary terms vanish and the volume integral alone must return `v`.

use polyharmonic::kernels::geometry::BallGeometry;
use polyharmonic::kernels::{bubble_source, GreenFunction, KernelParams};
use polyharmonic::quadrature::QuadratureSpec;
use polyharmonic::representation::{corpus, green_poisson_breakdown, green_poisson_reconstruct};

fn main() -> polyharmonic::Result<()> {
    let spec = QuadratureSpec::default();
    let ball = BallGeometry::unit_ball();
    for (n, m) in [(3, 1), (3, 2), (5, 2)] {
        let fields = corpus(n, m)?;
        let bubble = &fields[0];
        println!("N = {n}, m = {m}: source constant {}", bubble_source(m, n));
        let x = vec![0.25; n];
        let got = green_poisson_reconstruct(bubble, &ball, &x, &spec)?;
        println!("  {}: {got:.12} vs {:.12}", bubble.descriptor(), bubble.value(&x));
    }

    // fields with boundary data use the boundary pairs as well
    let p = KernelParams::kernel(3, 2)?;
    let g = GreenFunction::new(p, ball);
    let x = [0.1, -0.3, 0.2];
    for field in corpus(3, 2)?.iter().skip(1) {
        let b = green_poisson_breakdown(field, &g, &x, &QuadratureSpec::with_tolerance(1e-6))?;
        println!(
            "  {:<28} volume {:>10.6} boundary {:>10.6} total {:>10.6} exact {:>10.6}",
            field.descriptor(),
            b.volume.value,
            b.boundary_pairs.iter().sum::<f64>() + b.middle.unwrap_or(0.0),
            b.total,
            field.value(&x)
        );
    }
    Ok(())
}
