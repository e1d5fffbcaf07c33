//! Integrals of `|x - y|^{-N}` over caps `{y in dB_R^+ : a <= y_1 <= b}` of the
//! shifted sphere, for poles `x = (x_1, 0, ..., 0)` on the first axis.
//!
//! The cap is parameterized by its first coordinate `y_1` and an angle vector on
//! `S^{N-2}`. The surface element is `R (2 R y_1 - y_1^2)^{(N-3)/2} dy_1` times the
//! product-of-sines density, whose integral over the angles is `|S^{N-2}|`, and the
//! distance reduces to `|x - y|^2 = x_1^2 + 2 (R - x_1) y_1`. Substituting
//! `y_1 = R (1 - cos b)` makes the remaining one-dimensional integrand smooth.

use serde::{Deserialize, Serialize};

use super::gauss_kronrod::integrate_panels;
use super::sphere::sphere_area;
use super::QuadratureSpec;
use crate::error::{Error, Result};

/// The band `a <= y_1 <= b` of the shifted sphere of radius `R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapRange {
    a: f64,
    b: f64,
    radius: f64,
}

impl CapRange {
    pub fn new(a: f64, b: f64, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::DegenerateCap(format!("radius must be positive, got {radius}")));
        }
        let upper = 2.0 * radius;
        if !(a >= 0.0 && a <= b && b <= upper * (1.0 + 4.0 * f64::EPSILON)) {
            return Err(Error::DegenerateCap(format!(
                "need 0 <= a <= b <= 2R, got a = {a}, b = {b}, 2R = {upper}"
            )));
        }
        Ok(CapRange {
            a,
            b: b.min(upper),
            radius,
        })
    }

    pub fn lower(&self) -> f64 {
        self.a
    }

    pub fn upper(&self) -> f64 {
        self.b
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    fn angle(&self, y1: f64) -> f64 {
        2.0 * (y1 / (2.0 * self.radius)).sqrt().min(1.0).asin()
    }
}

/// `\oint_{B(a,b)} |x - y|^{-N} ds_y` with `x = (x_1, 0, ..., 0)`, `0 < x_1 <= R/2`.
/// An empty band (`a = b`) integrates to zero.
pub fn cap_surface_integral(range: &CapRange, x: &[f64], spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    let n = x.len();
    if n < 2 {
        return Err(Error::InvalidParameter("cap integrals need N >= 2".into()));
    }
    let r = range.radius;
    let x1 = x[0];
    if x[1..].iter().any(|&c| c != 0.0) {
        return Err(Error::InvalidParameter("pole must lie on the first axis".into()));
    }
    if !(x1 > 0.0 && x1 <= 0.5 * r) {
        return Err(Error::InvalidParameter(format!(
            "pole coordinate must satisfy 0 < x_1 <= R/2, got x_1 = {x1}, R = {r}"
        )));
    }
    if range.a == range.b {
        return Ok(0.0);
    }
    let lo = range.angle(range.a);
    let hi = range.angle(range.b);
    let half_n = n as f64 / 2.0;
    let sin_power = n as i32 - 2;
    let x1_sq = x1 * x1;
    let slope = 4.0 * (r - x1) * r;
    let integrand = |beta: f64| {
        let h = (0.5 * beta).sin();
        beta.sin().powi(sin_power) / (x1_sq + slope * h * h).powf(half_n)
    };
    // graded breakpoints around the peak of width ~ x_1 / R at beta = 0
    let width = x1 / (r * (r - x1)).sqrt();
    let mut breaks = vec![lo];
    let mut t = width;
    while t < hi {
        if t > lo {
            breaks.push(t);
        }
        t *= 4.0;
    }
    breaks.push(hi);
    let res = integrate_panels(
        &integrand,
        &breaks,
        0.1 * spec.target_rel_error,
        0.0,
        spec.max_subdivisions,
    );
    if !res.converged {
        return Err(Error::BudgetExceeded {
            max_subdivisions: spec.max_subdivisions,
            estimated_error: res.error,
        });
    }
    Ok(sphere_area(n - 1) * r.powi(n as i32 - 1) * res.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_validation() {
        assert!(CapRange::new(0.5, 0.2, 1.0).is_err());
        assert!(CapRange::new(0.0, 2.5, 1.0).is_err());
        assert!(CapRange::new(-0.1, 1.0, 1.0).is_err());
        assert!(CapRange::new(0.0, 2.0, 1.0).is_ok());
    }

    #[test]
    fn empty_band_is_zero() {
        let spec = QuadratureSpec::default();
        let c = CapRange::new(0.3, 0.3, 2.0).unwrap();
        assert_eq!(cap_surface_integral(&c, &[0.5, 0.0, 0.0], &spec).unwrap(), 0.0);
    }

    #[test]
    fn whole_sphere_matches_poisson_identity() {
        // For |x - c| = d < R: \oint_{|y-c|=R} |x-y|^{-3} ds = 4 pi R / (R^2 - d^2)
        let spec = QuadratureSpec::default();
        let r = 3.0;
        let x1 = 0.7;
        let c = CapRange::new(0.0, 2.0 * r, r).unwrap();
        let v = cap_surface_integral(&c, &[x1, 0.0, 0.0], &spec).unwrap();
        let d = r - x1;
        let exact = 4.0 * std::f64::consts::PI * r / (r * r - d * d);
        assert!((v - exact).abs() < 1e-10 * exact);
    }

    #[test]
    fn off_axis_pole_rejected() {
        let spec = QuadratureSpec::default();
        let c = CapRange::new(0.0, 1.0, 2.0).unwrap();
        assert!(cap_surface_integral(&c, &[0.5, 0.1], &spec).is_err());
    }
}
