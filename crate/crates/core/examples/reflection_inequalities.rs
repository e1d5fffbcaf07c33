//! Sample the reflection inequalities behind the moving-plane argument.

use polyharmonic::kernels::KernelParams;
use polyharmonic::movingplane::{check_reflection_inequalities, kernel_pointwise_bound_check, ReflectionSpec};

fn main() -> polyharmonic::Result<()> {
    for (n, m) in [(3, 1), (3, 2), (5, 2)] {
        let p = KernelParams::kernel(n, m)?;
        for lambda in [0.2, 0.6] {
            let spec = ReflectionSpec::along_second_axis(n, lambda)?;
            for r in check_reflection_inequalities(&p, &spec, 20_000, 1e-12, 7)? {
                println!(
                    "N = {n}, m = {m}, lambda = {lambda}: {:<24} samples {:>6} min margin {:>12.4e} violations {}",
                    r.inequality_id, r.samples, r.min_margin, r.violations
                );
            }
        }
        let bound = kernel_pointwise_bound_check(&p, 20_000, 7)?;
        println!(
            "  sup G |x - y|^(N-1) over samples = {:.6}, analytic bound k/(2m-1) = {:.6}",
            bound.max_ratio,
            p.k_norm() / (2.0 * m as f64 - 1.0)
        );
    }
    Ok(())
}
