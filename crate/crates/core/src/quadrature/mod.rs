//! Integration over balls, spheres and spherical caps.

pub mod cap;
pub mod gauss;
pub mod gauss_kronrod;
pub mod sphere;

use std::cell::{Cell, RefCell};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::geometry::{check_dim, dot, norm, BallGeometry};
pub use cap::{cap_surface_integral, CapRange};
use gauss_kronrod::integrate_panels;
pub use sphere::{integrate_directions, sphere_area, sphere_rule, SphereRule};

/// Accuracy and budget controls shared by all integrators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub target_rel_error: f64,
    pub max_subdivisions: usize,
    /// Radius, as a fraction of the ball radius, of the graded region around a
    /// declared singularity.
    pub singularity_split_radius: f64,
    /// Absolute error accepted regardless of the relative target; lets integrands
    /// that vanish up to roundoff terminate.
    #[serde(default)]
    pub abs_tolerance: f64,
    pub seed: u64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            target_rel_error: 1e-8,
            max_subdivisions: 1000,
            singularity_split_radius: 0.1,
            abs_tolerance: 0.0,
            seed: 0,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tolerance(target_rel_error: f64) -> Self {
        QuadratureSpec {
            target_rel_error,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.target_rel_error > 0.0 && self.target_rel_error <= 1e-2) {
            return Err(Error::InvalidParameter(format!(
                "target_rel_error must lie in (0, 1e-2], got {}",
                self.target_rel_error
            )));
        }
        if !(self.abs_tolerance >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "abs_tolerance must be non-negative, got {}",
                self.abs_tolerance
            )));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidParameter("max_subdivisions must be positive".into()));
        }
        if !(self.singularity_split_radius > 0.0 && self.singularity_split_radius <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "singularity_split_radius must lie in (0, 1], got {}",
                self.singularity_split_radius
            )));
        }
        Ok(())
    }
}

/// An integral estimate with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Integrates `f` over a finite ball (centered or shifted).
///
/// The integral is written in polar coordinates about `singular_at` (or about the
/// center when no singularity is declared), with the polar axis pointing from the
/// center through the pole. Each ray is integrated adaptively on panels graded
/// dyadically toward the pole, which absorbs weak singularities `|y - x|^{2m-N}`.
pub fn integrate_ball<F>(
    f: &F,
    geom: &BallGeometry,
    n: usize,
    spec: &QuadratureSpec,
    singular_at: Option<&[f64]>,
) -> Result<Estimate>
where
    F: Fn(&[f64]) -> f64,
{
    spec.validate()?;
    if geom.is_half_space() {
        return Err(Error::InvalidParameter(
            "volume integration needs a finite ball".into(),
        ));
    }
    let radius = geom.radius();
    let center = geom.center(n);
    let pole: Vec<f64> = match singular_at {
        Some(p) => {
            check_dim(n, p)?;
            geom.check_closed(p)?;
            p.to_vec()
        }
        None => center.0.clone(),
    };
    let offset: Vec<f64> = pole.iter().zip(center.iter()).map(|(p, c)| p - c).collect();
    let off_norm = norm(&offset);
    let axis: Vec<f64> = if off_norm > 1e-14 * radius {
        offset.iter().map(|c| c / off_norm).collect()
    } else {
        let mut e = vec![0.0; n];
        e[0] = 1.0;
        e
    };
    let margin = geom.margin(&pole).max(0.0);
    let graded = singular_at.is_some();
    let split = spec.singularity_split_radius * radius;
    let ray_tol = 0.1 * spec.target_rel_error;
    let largest_ray = Cell::new(0.0f64);
    let worst_failure = Cell::new(0.0f64);
    let y = RefCell::new(vec![0.0; n]);

    let ray = |theta: &[f64]| -> f64 {
        let b = dot(&offset, theta);
        let disc = (b * b + margin).sqrt();
        let length = if b >= 0.0 { margin / (b + disc) } else { disc - b };
        if length <= 0.0 {
            return 0.0;
        }
        let radial = |s: f64| {
            let mut yb = y.borrow_mut();
            yb.iter_mut()
                .zip(&pole)
                .zip(theta)
                .for_each(|((yi, p), t)| *yi = p + s * t);
            f(&yb) * s.powi(n as i32 - 1)
        };
        let mut breaks = vec![0.0];
        if graded && split < length {
            let mut s = split;
            let mut inner = Vec::new();
            for _ in 0..4 {
                inner.push(s);
                s *= 0.5;
            }
            inner.reverse();
            breaks.extend(inner);
        }
        breaks.push(length);
        let r = integrate_panels(&radial, &breaks, ray_tol, spec.abs_tolerance, spec.max_subdivisions);
        largest_ray.set(largest_ray.get().max(r.value.abs()));
        if !r.converged {
            worst_failure.set(worst_failure.get().max(r.error));
        }
        r.value
    };
    let est = integrate_directions(n, &axis, &ray, spec)?;
    // rays at roundoff level next to much larger ones may miss their own relative
    // target without affecting the total
    let failed = worst_failure.get();
    if failed > ray_tol * largest_ray.get() && failed > spec.abs_tolerance {
        return Err(Error::BudgetExceeded {
            max_subdivisions: spec.max_subdivisions,
            estimated_error: failed,
        });
    }
    Ok(est)
}

/// Surface integral of `f` over the sphere `|y - center| = r`.
pub fn sphere_integral<F>(f: &F, center: &[f64], r: f64, spec: &QuadratureSpec) -> Result<Estimate>
where
    F: Fn(&[f64]) -> f64,
{
    let n = center.len();
    let mut axis = vec![0.0; n];
    if n > 0 {
        axis[0] = 1.0;
    }
    sphere_integral_about(f, center, r, &axis, spec)
}

/// [`sphere_integral`] with the polar axis of the rule set to `axis`; useful when the
/// integrand is concentrated around one direction.
pub fn sphere_integral_about<F>(
    f: &F,
    center: &[f64],
    r: f64,
    axis: &[f64],
    spec: &QuadratureSpec,
) -> Result<Estimate>
where
    F: Fn(&[f64]) -> f64,
{
    spec.validate()?;
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!("sphere radius must be positive, got {r}")));
    }
    let n = center.len();
    check_dim(n, axis)?;
    let y = RefCell::new(vec![0.0; n]);
    let g = |theta: &[f64]| {
        let mut yb = y.borrow_mut();
        yb.iter_mut()
            .zip(center)
            .zip(theta)
            .for_each(|((yi, c), t)| *yi = c + r * t);
        f(&yb)
    };
    let est = integrate_directions(n, axis, &g, spec)?;
    let jac = r.powi(n as i32 - 1);
    Ok(Estimate {
        value: est.value * jac,
        error: est.error * jac,
    })
}

/// Mean of `w` over the sphere of radius `r` about the origin of `R^n`;
/// `r = 0` returns `w(0)`.
pub fn spherical_average<F>(w: &F, n: usize, r: f64, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    if r < 0.0 || r.is_nan() {
        return Err(Error::InvalidParameter(format!("radius must be non-negative, got {r}")));
    }
    if r == 0.0 {
        return Ok(w(&vec![0.0; n]));
    }
    let total = sphere_integral(w, &vec![0.0; n], r, spec)?;
    Ok(total.value / (r.powi(n as i32 - 1) * sphere_area(n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn ball_volume_and_moments() {
        let spec = QuadratureSpec::default();
        let g = BallGeometry::unit_ball();
        let v = integrate_ball(&|_: &[f64]| 1.0, &g, 3, &spec, None).unwrap();
        assert!((v.value - 4.0 * PI / 3.0).abs() < 1e-10);
        let m = integrate_ball(&|y: &[f64]| dot(y, y), &g, 3, &spec, None).unwrap();
        assert!((m.value - 4.0 * PI / 5.0).abs() < 1e-8);
    }

    #[test]
    fn singular_integrand_about_offcenter_pole() {
        // \int_{B_1} |y - x|^{-1} dy = 2 pi (1 - |x|^2 / 3)
        let spec = QuadratureSpec::default();
        let g = BallGeometry::unit_ball();
        let x = [0.3, -0.2, 0.5];
        let f = |y: &[f64]| 1.0 / crate::kernels::geometry::dist(y, &x);
        let v = integrate_ball(&f, &g, 3, &spec, Some(&x)).unwrap();
        let exact = 2.0 * PI * (1.0 - dot(&x, &x) / 3.0);
        assert!((v.value - exact).abs() < 1e-8 * exact);
    }

    #[test]
    fn shifted_ball_volume() {
        let spec = QuadratureSpec::default();
        let g = BallGeometry::shifted_ball(2.0).unwrap();
        let v = integrate_ball(&|_: &[f64]| 1.0, &g, 2, &spec, Some(&[0.5, 0.1])).unwrap();
        assert!((v.value - 4.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn interval_is_a_one_dimensional_ball() {
        let spec = QuadratureSpec::default();
        let g = BallGeometry::ball(2.0).unwrap();
        let v = integrate_ball(&|y: &[f64]| y[0] * y[0], &g, 1, &spec, Some(&[0.5])).unwrap();
        assert!((v.value - 16.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn sphere_identities() {
        let spec = QuadratureSpec::default();
        let c = [0.0; 3];
        let one = sphere_integral(&|_: &[f64]| 1.0, &c, 1.0, &spec).unwrap();
        assert!((one.value - 4.0 * PI).abs() < 1e-12);
        let odd = sphere_integral(&|y: &[f64]| y[0], &c, 1.0, &spec).unwrap();
        assert!(odd.value.abs() < 1e-12);
        let sq = sphere_integral(&|y: &[f64]| y[0] * y[0], &c, 1.0, &spec).unwrap();
        assert!((sq.value - 4.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn zero_radius_average_is_point_value() {
        let spec = QuadratureSpec::default();
        let v = spherical_average(&|y: &[f64]| 3.0 + y[1], 4, 0.0, &spec).unwrap();
        assert_eq!(v, 3.0);
    }

    #[test]
    fn rejects_half_space() {
        let spec = QuadratureSpec::default();
        let r = integrate_ball(&|_: &[f64]| 1.0, &BallGeometry::half_space(), 2, &spec, None);
        assert!(r.is_err());
    }
}
