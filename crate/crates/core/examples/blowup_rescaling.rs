//! Blow-up rescaling `u_M(y) = u(x_0 + M^{-(q-1)/2m} y) / M` and its scaling laws.

use polyharmonic::kernels::{finite_difference, KernelParams, Point};
use polyharmonic::rescale::{
    coefficient_exponent, derivative_exponent, log_log_slope, lower_order_vanishing, rescale_field, CoefficientMap,
    RescaleSpec,
};

fn main() -> polyharmonic::Result<()> {
    let p = KernelParams::new(3, 2, 3.0)?;
    let center = Point(vec![0.1, 0.2, 0.3]);
    let sup_norms = [1e1, 1e2, 1e3, 1e4];
    let u = |x: &[f64]| (x[0] + 0.5 * x[1]).exp();

    for order in 1..=4 {
        let alpha = [order, 0, 0];
        let values = sup_norms
            .iter()
            .map(|&big| {
                let v = rescale_field(&RescaleSpec::new(big, center.clone(), p)?, u);
                Ok(finite_difference(&|y: &[f64]| v.eval(y), &[0.0; 3], &alpha, 0.1).abs())
            })
            .collect::<polyharmonic::Result<Vec<f64>>>()?;
        println!(
            "D^{order} u_M: fitted exponent {:.4}, predicted {:.4}",
            log_log_slope(&sup_norms, &values)?,
            derivative_exponent(&p, order)
        );
    }

    let samples = vec![Point(vec![0.0; 3]), Point(vec![0.5, -0.5, 0.2]), Point(vec![-0.3, 0.1, 0.6])];
    for order in 0..4 {
        let c = CoefficientMap::new(vec![order, 0, 0], |x: &[f64]| 1.5 + 0.5 * x[0].cos());
        let r = lower_order_vanishing(&p, &center, &sup_norms, &c, &samples)?;
        println!(
            "coefficient of order {order}: fitted {:.4}, predicted {:.4}",
            r.fitted_slope,
            coefficient_exponent(&p, order)
        );
    }
    Ok(())
}
