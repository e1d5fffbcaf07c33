//! Points and the three ball-type domains (centered ball, shifted ball, half-space).

use std::ops::{Deref, DerefMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of `R^N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn origin(n: usize) -> Self {
        Point(vec![0.0; n])
    }

    /// The `i`-th coordinate unit vector.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut c = vec![0.0; n];
        c[i] = 1.0;
        Point(c)
    }

    /// `t * e_1` in `R^n`.
    pub fn on_axis(n: usize, t: f64) -> Self {
        let mut c = vec![0.0; n];
        c[0] = t;
        Point(c)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for Point {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for Point {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(v)
    }
}

impl From<&[f64]> for Point {
    fn from(v: &[f64]) -> Self {
        Point(v.to_vec())
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    norm_sq(a).sqrt()
}

#[inline]
pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist_sq(a, b).sqrt()
}

pub fn check_dim(expected: usize, p: &[f64]) -> Result<()> {
    if p.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            got: p.len(),
        });
    }
    Ok(())
}

/// One of the domains carrying an explicit polyharmonic Green function.
///
/// * `shifted = false`: the ball `B_R = {|x| < R}` centered at the origin.
/// * `shifted = true`, finite `R`: the ball `B_R^+ = {|x - P_R| < R}` with
///   `P_R = (R, 0, ..., 0)`, tangent to `{x_1 = 0}` at the origin.
/// * `shifted = true`, `R = inf`: the half-space `{x_1 > 0}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallGeometry {
    radius: f64,
    shifted: bool,
}

impl BallGeometry {
    pub fn new(radius: f64, shifted: bool) -> Result<Self> {
        if radius.is_nan() || radius <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "ball radius must be positive, got {radius}"
            )));
        }
        if radius.is_infinite() && !shifted {
            return Err(Error::InvalidParameter(
                "an infinite radius is only meaningful for the shifted ball (half-space)".into(),
            ));
        }
        Ok(BallGeometry { radius, shifted })
    }

    pub fn unit_ball() -> Self {
        BallGeometry {
            radius: 1.0,
            shifted: false,
        }
    }

    pub fn ball(radius: f64) -> Result<Self> {
        Self::new(radius, false)
    }

    pub fn shifted_ball(radius: f64) -> Result<Self> {
        Self::new(radius, true)
    }

    pub fn half_space() -> Self {
        BallGeometry {
            radius: f64::INFINITY,
            shifted: true,
        }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn is_shifted(&self) -> bool {
        self.shifted
    }

    pub fn is_half_space(&self) -> bool {
        self.radius.is_infinite()
    }

    /// Center of the ball in `R^n` (`P_R` when shifted). Undefined for the half-space,
    /// where the first coordinate is infinite.
    pub fn center(&self, n: usize) -> Point {
        if self.shifted {
            Point::on_axis(n, self.radius)
        } else {
            Point::origin(n)
        }
    }

    /// Signed interior margin: `R^2 - |p - c|^2` for balls and `p_1` for the half-space.
    /// Positive inside, zero on the boundary. The shifted form `2 R p_1 - |p|^2` is
    /// algebraically identical and free of cancellation for large `R`.
    #[inline]
    pub fn margin(&self, p: &[f64]) -> f64 {
        if self.is_half_space() {
            p[0]
        } else if self.shifted {
            2.0 * self.radius * p[0] - norm_sq(p)
        } else {
            self.radius * self.radius - norm_sq(p)
        }
    }

    /// Whether `p` lies in the closed domain, allowing rounding-level excursions.
    pub fn contains_closed(&self, p: &[f64]) -> bool {
        let m = self.margin(p);
        if m >= 0.0 {
            return true;
        }
        let scale = if self.is_half_space() {
            norm(p).max(1.0)
        } else {
            self.radius * self.radius + norm_sq(p)
        };
        m >= -8.0 * f64::EPSILON * scale
    }

    pub fn contains_open(&self, p: &[f64]) -> bool {
        self.margin(p) > 0.0
    }

    /// Distance from an interior point to the boundary.
    pub fn boundary_distance(&self, p: &[f64]) -> f64 {
        if self.is_half_space() {
            p[0]
        } else {
            self.radius - dist(p, &self.center(p.len()))
        }
    }

    /// Outward unit normal at a boundary point.
    pub fn outward_normal(&self, p: &[f64]) -> Point {
        if self.is_half_space() {
            let mut v = vec![0.0; p.len()];
            v[0] = -1.0;
            return Point(v);
        }
        let c = self.center(p.len());
        let mut v: Vec<f64> = p.iter().zip(c.iter()).map(|(a, b)| a - b).collect();
        let r = norm(&v);
        v.iter_mut().for_each(|x| *x /= r);
        Point(v)
    }

    pub fn check_closed(&self, p: &[f64]) -> Result<()> {
        if self.contains_closed(p) {
            Ok(())
        } else {
            Err(Error::OutsideDomain { point: p.to_vec() })
        }
    }
}
