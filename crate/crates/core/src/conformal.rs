//! The Möbius map `phi(y) = 2 (y + e_1) / |y + e_1|^2 - e_1` between the unit ball
//! and the half-space `{x_1 > 0}`, and the transport of kernels, solutions and the
//! nonlinearity along it.
//!
//! `phi` is the inversion `z -> 2 z / |z|^2` in the variable `z = y + e_1`, hence its
//! own inverse.

use crate::error::{Error, Result};
use crate::kernels::geometry::{check_dim, dist_sq, norm_sq, BallGeometry};
use crate::kernels::{GreenFunction, KernelParams, Point};

/// Points closer than this to `-e_1` are rejected.
pub const POLE_TOLERANCE: f64 = 1e-8;

/// `|y + e_1|^2`
#[inline]
pub fn pole_distance_sq(y: &[f64]) -> f64 {
    let head = y[0] + 1.0;
    head * head + y[1..].iter().map(|c| c * c).sum::<f64>()
}

fn checked_pole_distance_sq(n: usize, y: &[f64]) -> Result<f64> {
    check_dim(n, y)?;
    let d2 = pole_distance_sq(y);
    if d2 < POLE_TOLERANCE * POLE_TOLERANCE {
        return Err(Error::PoleSingularity);
    }
    Ok(d2)
}

/// The ball-to-half-space map for a fixed problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConformalMap {
    params: KernelParams,
}

impl ConformalMap {
    pub fn new(params: KernelParams) -> Self {
        ConformalMap { params }
    }

    pub fn params(&self) -> &KernelParams {
        &self.params
    }

    /// `phi(y)`; the first coordinate is evaluated as `(1 - |y|^2) / |y + e_1|^2`,
    /// which keeps boundary points exactly on `{x_1 = 0}`.
    pub fn phi(&self, y: &[f64]) -> Result<Point> {
        let d2 = checked_pole_distance_sq(self.params.dim(), y)?;
        let mut out = Vec::with_capacity(y.len());
        out.push((1.0 - norm_sq(y)) / d2);
        out.extend(y[1..].iter().map(|c| 2.0 * c / d2));
        Ok(Point(out))
    }

    pub fn phi_inverse(&self, x: &[f64]) -> Result<Point> {
        self.phi(x)
    }

    /// `det D phi(y) = 2^N / |y + e_1|^{2N}` in absolute value.
    pub fn jacobian_det(&self, y: &[f64]) -> Result<f64> {
        let n = self.params.dim() as i32;
        let d2 = checked_pole_distance_sq(self.params.dim(), y)?;
        Ok(2f64.powi(n) / d2.powi(n))
    }

    /// `v(x) = |x + e_1|^{2m-N} u(phi(x))` as a field on the ball.
    pub fn pullback_solution<U>(&self, u: U) -> Pullback<U>
    where
        U: Fn(&[f64]) -> f64,
    {
        Pullback { map: *self, u }
    }
}

/// A half-space field transported to the ball.
#[derive(Debug, Clone)]
pub struct Pullback<U> {
    map: ConformalMap,
    u: U,
}

impl<U: Fn(&[f64]) -> f64> Pullback<U> {
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let p = self.map.params;
        let d2 = checked_pole_distance_sq(p.dim(), x)?;
        let e = 2 * p.order() as i32 - p.dim() as i32;
        let factor = if e % 2 == 0 {
            d2.powi(e / 2)
        } else {
            d2.sqrt().powi(e)
        };
        Ok(factor * (self.u)(&self.map.phi(x)?))
    }
}

/// The weight `2^{2m} |x + e_1|^{-alpha}` of the transported nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemilinearWeight {
    params: KernelParams,
}

impl SemilinearWeight {
    pub fn new(params: KernelParams) -> Self {
        SemilinearWeight { params }
    }

    pub fn params(&self) -> &KernelParams {
        &self.params
    }

    pub fn weight(&self, x: &[f64]) -> Result<f64> {
        let d2 = checked_pole_distance_sq(self.params.dim(), x)?;
        let scale = 4f64.powi(self.params.order() as i32);
        Ok(scale * d2.powf(-0.5 * self.params.alpha()))
    }

    /// `h(x, t) = 2^{2m} |x + e_1|^{-alpha} t^q` for `t >= 0`.
    pub fn transformed_nonlinearity(&self, x: &[f64], t: f64) -> Result<f64> {
        if t < 0.0 || t.is_nan() {
            return Err(Error::InvalidParameter(format!(
                "nonlinearity argument must be non-negative, got {t}"
            )));
        }
        Ok(self.weight(x)? * t.powf(self.params.exponent()))
    }
}

/// `G_inf^+(phi x, phi y) - (2 / (|x + e_1| |y + e_1|))^{2m-N} G_1(x, y)`.
pub fn green_covariance_residual(params: &KernelParams, x: &[f64], y: &[f64]) -> Result<f64> {
    let (lhs, rhs) = green_covariance_sides(params, x, y)?;
    Ok(lhs - rhs)
}

/// Both sides of the covariance identity, `(G_inf^+(phi x, phi y), factor * G_1(x, y))`.
pub fn green_covariance_sides(params: &KernelParams, x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    let map = ConformalMap::new(*params);
    let (px, py) = (map.phi(x)?, map.phi(y)?);
    let half = GreenFunction::new(*params, BallGeometry::half_space());
    let ball = GreenFunction::new(*params, BallGeometry::unit_ball());
    let lhs = half.eval(&px, &py)?;
    let g1 = ball.eval(x, y)?;
    let base = 4.0 / (pole_distance_sq(x) * pole_distance_sq(y));
    let e = 2 * params.order() as i32 - params.dim() as i32;
    let factor = if e % 2 == 0 {
        base.powi(e / 2)
    } else {
        base.sqrt().powi(e)
    };
    Ok((lhs, factor * g1))
}

/// `|phi(x) - phi(y)|` and its closed form `2 |x - y| / (|x + e_1| |y + e_1|)`.
pub fn distance_identity(map: &ConformalMap, x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    let (px, py) = (map.phi(x)?, map.phi(y)?);
    let direct = dist_sq(&px, &py).sqrt();
    let closed = 2.0 * dist_sq(x, y).sqrt() / (pole_distance_sq(x) * pole_distance_sq(y)).sqrt();
    Ok((direct, closed))
}
