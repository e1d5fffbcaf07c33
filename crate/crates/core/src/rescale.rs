//! Blow-up rescaling `v(y) = u(M^{(1-q)/2m} y + x_0) / M` and the induced scaling of
//! derivatives and operator coefficients.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::geometry::check_dim;
use crate::kernels::{KernelParams, Point};

/// Sup-norm `M`, blow-up center `x_0` and the problem parameters supplying `q` and `m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RescaleSpec {
    sup_norm: f64,
    center: Point,
    params: KernelParams,
}

impl RescaleSpec {
    pub fn new(sup_norm: f64, center: Point, params: KernelParams) -> Result<Self> {
        if !(sup_norm > 0.0) || !sup_norm.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "sup-norm M must be positive, got {sup_norm}"
            )));
        }
        check_dim(params.dim(), &center)?;
        Ok(RescaleSpec {
            sup_norm,
            center,
            params,
        })
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn params(&self) -> &KernelParams {
        &self.params
    }

    /// `M^{(1-q)/2m}`, in `(0, 1]` for `M >= 1`.
    pub fn scale(&self) -> f64 {
        let p = &self.params;
        self.sup_norm
            .powf((1.0 - p.exponent()) / (2.0 * p.order() as f64))
    }

    /// `scale * y + x_0`
    pub fn to_original(&self, y: &[f64]) -> Point {
        let s = self.scale();
        Point(y.iter().zip(self.center.iter()).map(|(a, c)| s * a + c).collect())
    }

    /// `D^alpha v(y) = derivative_prefactor(|alpha|) (D^alpha u)(scale * y + x_0)`.
    pub fn derivative_prefactor(&self, order: usize) -> f64 {
        let p = &self.params;
        self.sup_norm
            .powf((1.0 - p.exponent()) * order as f64 / (2.0 * p.order() as f64) - 1.0)
    }

    /// `M^{(q-1)(|alpha|/2m - 1)}`, equal to one at the top order.
    pub fn coefficient_prefactor(&self, order: usize) -> f64 {
        self.sup_norm.powf(coefficient_exponent(&self.params, order))
    }

    /// Rescaling by `self` and then by `next` in one step: sup-norms multiply and the
    /// center moves to `scale * x_0' + x_0`.
    pub fn then(&self, next: &RescaleSpec) -> Result<RescaleSpec> {
        if next.params != self.params {
            return Err(Error::InvalidParameter(
                "composed rescalings must share their parameters".into(),
            ));
        }
        RescaleSpec::new(
            self.sup_norm * next.sup_norm,
            self.to_original(&next.center),
            self.params,
        )
    }
}

/// `(q-1)(|alpha|/2m - 1)`.
pub fn coefficient_exponent(params: &KernelParams, order: usize) -> f64 {
    (params.exponent() - 1.0) * (order as f64 / (2.0 * params.order() as f64) - 1.0)
}

/// `(1-q)|alpha|/2m - 1`.
pub fn derivative_exponent(params: &KernelParams, order: usize) -> f64 {
    (1.0 - params.exponent()) * order as f64 / (2.0 * params.order() as f64) - 1.0
}

/// A rescaled field.
#[derive(Debug, Clone)]
pub struct Rescaled<U> {
    spec: RescaleSpec,
    u: U,
}

impl<U: Fn(&[f64]) -> f64> Rescaled<U> {
    pub fn eval(&self, y: &[f64]) -> f64 {
        (self.u)(&self.spec.to_original(y)) / self.spec.sup_norm
    }

    pub fn spec(&self) -> &RescaleSpec {
        &self.spec
    }
}

pub fn rescale_field<U: Fn(&[f64]) -> f64>(spec: &RescaleSpec, u: U) -> Rescaled<U> {
    Rescaled {
        spec: spec.clone(),
        u,
    }
}

type CoefficientFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A coefficient `c_alpha(x)` of the derivative `D^alpha`.
#[derive(Clone)]
pub struct CoefficientMap {
    order: Vec<usize>,
    values: CoefficientFn,
}

impl std::fmt::Debug for CoefficientMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CoefficientMap")
            .field("order", &self.order)
            .finish_non_exhaustive()
    }
}

impl CoefficientMap {
    pub fn new<F>(order: Vec<usize>, values: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        CoefficientMap {
            order,
            values: Arc::new(values),
        }
    }

    pub fn multiindex(&self) -> &[usize] {
        &self.order
    }

    /// `|alpha|`
    pub fn order(&self) -> usize {
        self.order.iter().sum()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.values)(x)
    }
}

/// `c(y) = M^{(q-1)(|alpha|/2m - 1)} c(scale * y + x_0)`.
pub fn rescale_coefficient(spec: &RescaleSpec, c: &CoefficientMap) -> Result<CoefficientMap> {
    let top = 2 * spec.params.order();
    if c.order() > top {
        return Err(Error::InvalidParameter(format!(
            "coefficient order {} exceeds 2m = {top}",
            c.order()
        )));
    }
    if c.multiindex().len() != spec.params.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.params.dim(),
            got: c.multiindex().len(),
        });
    }
    let factor = spec.coefficient_prefactor(c.order());
    let spec = spec.clone();
    let inner = Arc::clone(&c.values);
    Ok(CoefficientMap::new(c.order.clone(), move |y: &[f64]| {
        factor * inner(&spec.to_original(y))
    }))
}

/// `w(z) = v(z_1 - tau, z')`.
pub fn shift_first_axis<V: Fn(&[f64]) -> f64>(v: V, tau: f64) -> impl Fn(&[f64]) -> f64 {
    move |z: &[f64]| {
        let mut p = z.to_vec();
        p[0] -= tau;
        v(&p)
    }
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidParameter("regression needs at least two pairs".into()));
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0)) {
        return Err(Error::InvalidParameter("log-log regression needs positive data".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("regression abscissae coincide".into()));
    }
    Ok(sxy / sxx)
}

/// Decay of a rescaled coefficient along a sequence of sup-norms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VanishingReport {
    pub sup_norms: Vec<f64>,
    /// `sup_y |c_k(y)|` over the sample points for each `M_k`.
    pub coefficient_sups: Vec<f64>,
    pub fitted_slope: f64,
    pub expected_slope: f64,
    pub relative_error: f64,
}

/// Rescales `c` with center `center` for every `M` in `sup_norms`, records the sup of
/// `|c_k|` over `samples` and fits the log-log slope against `(q-1)(|alpha|/2m - 1)`.
pub fn lower_order_vanishing(
    params: &KernelParams,
    center: &Point,
    sup_norms: &[f64],
    c: &CoefficientMap,
    samples: &[Point],
) -> Result<VanishingReport> {
    if c.order() >= 2 * params.order() {
        return Err(Error::InvalidParameter(
            "only lower-order coefficients vanish under rescaling".into(),
        ));
    }
    if samples.is_empty() {
        return Err(Error::InvalidParameter("need at least one sample point".into()));
    }
    let mut coefficient_sups = Vec::with_capacity(sup_norms.len());
    for &m in sup_norms {
        let spec = RescaleSpec::new(m, center.clone(), *params)?;
        let ck = rescale_coefficient(&spec, c)?;
        coefficient_sups.push(samples.iter().map(|y| ck.eval(y).abs()).fold(0.0, f64::max));
    }
    let fitted_slope = log_log_slope(sup_norms, &coefficient_sups)?;
    let expected_slope = coefficient_exponent(params, c.order());
    Ok(VanishingReport {
        sup_norms: sup_norms.to_vec(),
        coefficient_sups,
        fitted_slope,
        expected_slope,
        relative_error: ((fitted_slope - expected_slope) / expected_slope).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(m_sup: f64, n: usize, m: usize, q: f64) -> RescaleSpec {
        RescaleSpec::new(m_sup, Point::origin(n), KernelParams::new(n, m, q).unwrap()).unwrap()
    }

    #[test]
    fn identity_at_unit_norm() {
        let s = spec(1.0, 2, 1, 3.0);
        let v = rescale_field(&s, |x: &[f64]| x[0] + 2.0 * x[1]);
        assert_eq!(v.eval(&[0.3, -0.1]), 0.3 - 0.2);
    }

    #[test]
    fn normalized_at_center() {
        let p = KernelParams::new(2, 1, 3.0).unwrap();
        let s = RescaleSpec::new(5.0, Point(vec![0.2, 0.1]), p).unwrap();
        let u = |x: &[f64]| 5.0 - (x[0] - 0.2).powi(2) - (x[1] - 0.1).powi(2);
        assert_eq!(rescale_field(&s, u).eval(&[0.0, 0.0]), 1.0);
    }

    #[test]
    fn prefactor_examples() {
        assert_eq!(spec(16.0, 3, 1, 3.0).coefficient_prefactor(0), 1.0 / 256.0);
        assert!((spec(16.0, 3, 1, 3.0).coefficient_prefactor(1) - 1.0 / 16.0).abs() < 1e-15);
        for m in 1..4 {
            assert_eq!(spec(1e3, 3, m, 2.5).coefficient_prefactor(2 * m), 1.0);
        }
    }

    #[test]
    fn constant_coefficient_decay() {
        let p = KernelParams::new(1, 1, 2.0).unwrap();
        let c = CoefficientMap::new(vec![0], |_| 1.0);
        let r = lower_order_vanishing(&p, &Point::origin(1), &[10.0, 100.0, 1000.0], &c, &[Point(vec![0.0])]).unwrap();
        for (got, want) in r.coefficient_sups.iter().zip([0.1, 0.01, 0.001]) {
            assert!((got - want).abs() < 1e-15);
        }
        assert!((r.fitted_slope + 1.0).abs() < 1e-12);
    }

    #[test]
    fn top_order_rejected() {
        let s = spec(4.0, 2, 1, 2.0);
        let c = CoefficientMap::new(vec![2, 1], |_| 1.0);
        assert!(rescale_coefficient(&s, &c).is_err());
    }

    #[test]
    fn shift_translates() {
        let w = shift_first_axis(|z: &[f64]| z[0] * 10.0 + z[1], 0.5);
        assert_eq!(w(&[1.0, 2.0]), 7.0);
    }
}
