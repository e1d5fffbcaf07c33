//! Polyharmonic Dirichlet Green functions of balls, shifted balls and the half-space.
//!
//! All kernels share Boggio's form
//! `G(x, y) = (k/2) |x - y|^{2m-N} P(psi(x, y))` and differ only in `psi`:
//!
//! * ball of radius `R`: `(R^2 - |x|^2)(R^2 - |y|^2) / (R^2 |x - y|^2)`
//! * shifted ball `B_R^+`: the same with margins `R^2 - |x - P_R|^2 = 2 R x_1 - |x|^2`
//! * half-space: `4 x_1 y_1 / |x - y|^2`

pub mod derivative;
pub mod geometry;
pub mod jet;
pub mod profile;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use derivative::{finite_difference, kernel_derivative};
use geometry::{check_dim, dist_sq, BallGeometry};
pub use geometry::Point;
pub use jet::BallKernelJet;
pub use profile::Profile;

/// Volume of the unit ball in `R^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    let (mut v, start) = if n % 2 == 0 { (1.0, 0) } else { (2.0, 1) };
    let mut k = start;
    while k < n {
        k += 2;
        v *= 2.0 * std::f64::consts::PI / k as f64;
    }
    v
}

/// The constant `k_N^m = 1 / (N e_N 4^{m-1} ((m-1)!)^2)`, `e_N` the unit-ball volume.
/// With it `(k/2) |x|^{2m-N} P(inf)` is the fundamental solution of `(-Delta)^m`.
pub fn normalization_constant(m: usize, n: usize) -> f64 {
    let factorial: f64 = (1..m).map(|j| j as f64).product();
    1.0 / (n as f64 * unit_ball_volume(n) * 4f64.powi(m as i32 - 1) * factorial * factorial)
}

/// `(-Delta)^m (1 - |x|^2)^m = 2^m m! prod_{j<m} (N + 2j)`, a constant.
pub fn bubble_source(m: usize, n: usize) -> f64 {
    (0..m).map(|j| 2.0 * (j + 1) as f64 * (n + 2 * j) as f64).product()
}

/// `\int_B G_1(x, y) dy = (1 - |x|^2)^m / bubble_source(m, N)` on the unit ball.
pub fn unit_ball_torsion(m: usize, n: usize, x: &[f64]) -> f64 {
    let margin = (1.0 - geometry::norm_sq(x)).max(0.0);
    margin.powi(m as i32) / bubble_source(m, n)
}

/// Dimension, order and exponent of the problem `(-Delta)^m u = u^q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    n: usize,
    m: usize,
    q: f64,
    k_norm: f64,
}

impl KernelParams {
    pub fn new(n: usize, m: usize, q: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("dimension N must be at least 1".into()));
        }
        if m == 0 {
            return Err(Error::InvalidParameter("order m must be at least 1".into()));
        }
        if !(q > 1.0) || !q.is_finite() {
            return Err(Error::InvalidParameter(format!("exponent q must exceed 1, got {q}")));
        }
        Ok(KernelParams {
            n,
            m,
            q,
            k_norm: normalization_constant(m, n),
        })
    }

    /// Parameters for kernel-only work, where the exponent plays no role (`q = 2`).
    pub fn kernel(n: usize, m: usize) -> Result<Self> {
        Self::new(n, m, 2.0)
    }

    /// Replaces the normalization constant, e.g. to probe its sensitivity.
    pub fn with_normalization(mut self, k_norm: f64) -> Result<Self> {
        if !(k_norm > 0.0) || !k_norm.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "normalization must be positive and finite, got {k_norm}"
            )));
        }
        self.k_norm = k_norm;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.m
    }

    pub fn exponent(&self) -> f64 {
        self.q
    }

    pub fn k_norm(&self) -> f64 {
        self.k_norm
    }

    /// `alpha = N + 2m - q (N - 2m)`.
    pub fn alpha(&self) -> f64 {
        let (n, m) = (self.n as f64, self.m as f64);
        n + 2.0 * m - self.q * (n - 2.0 * m)
    }

    /// `(N + 2m) / (N - 2m)` for `N > 2m`.
    pub fn critical_exponent(&self) -> Option<f64> {
        (self.n > 2 * self.m).then(|| (self.n + 2 * self.m) as f64 / (self.n - 2 * self.m) as f64)
    }
}

/// A Green function bound to its parameters and domain.
#[derive(Debug, Clone)]
pub struct GreenFunction {
    params: KernelParams,
    geom: BallGeometry,
    profile: Profile,
    psi_scale: f64,
}

impl GreenFunction {
    pub fn new(params: KernelParams, geom: BallGeometry) -> Self {
        let psi_scale = if geom.is_half_space() {
            4.0
        } else {
            1.0 / (geom.radius() * geom.radius())
        };
        GreenFunction {
            profile: Profile::new(params.m, params.n),
            params,
            geom,
            psi_scale,
        }
    }

    pub fn params(&self) -> &KernelParams {
        &self.params
    }

    pub fn geometry(&self) -> &BallGeometry {
        &self.geom
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    fn check(&self, x: &[f64], y: &[f64]) -> Result<()> {
        check_dim(self.params.n, x)?;
        check_dim(self.params.n, y)?;
        if x == y {
            return Err(Error::CoincidentPoints);
        }
        self.geom.check_closed(x)?;
        self.geom.check_closed(y)?;
        Ok(())
    }

    /// `psi` without domain checks. Outside the domain it continues the formula and
    /// stays above `-1` as long as one of the points is inside.
    #[inline]
    pub fn psi_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        self.psi_scale * self.geom.margin(x) * self.geom.margin(y) / dist_sq(x, y)
    }

    /// `(k/2) |x-y|^{2m-N} P(psi)` without domain checks.
    pub fn eval_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        let r2 = dist_sq(x, y);
        let psi = self.psi_scale * self.geom.margin(x) * self.geom.margin(y) / r2;
        self.prefactor(r2) * self.profile.value_extended(psi)
    }

    /// `(k/2) |x - y|^{2m-N}` from the squared distance.
    #[inline]
    pub fn prefactor(&self, r2: f64) -> f64 {
        let e = 2 * self.params.m as i64 - self.params.n as i64;
        let d = if e % 2 == 0 {
            r2.powi((e / 2) as i32)
        } else {
            r2.sqrt().powi(e as i32)
        };
        0.5 * self.params.k_norm * d
    }

    pub fn psi(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.check(x, y)?;
        Ok(self.psi_unchecked(x, y).max(0.0))
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.check(x, y)?;
        let r2 = dist_sq(x, y);
        let psi = (self.psi_scale * self.geom.margin(x) * self.geom.margin(y) / r2).max(0.0);
        Ok(self.prefactor(r2) * self.profile.value_extended(psi))
    }
}

/// `psi`, `psi_R`, `psi_R^+` or `psi_inf` depending on the geometry.
pub fn psi(params: &KernelParams, geom: &BallGeometry, x: &[f64], y: &[f64]) -> Result<f64> {
    GreenFunction::new(*params, *geom).psi(x, y)
}

/// `\int_0^t z^{m-1} (1+z)^{-N/2} dz`.
pub fn boggio_profile(t: f64, params: &KernelParams) -> Result<f64> {
    Profile::new(params.m, params.n).value(t)
}

/// The Green function of `(-Delta)^m` with Dirichlet conditions on `geom`.
pub fn green(params: &KernelParams, geom: &BallGeometry, x: &[f64], y: &[f64]) -> Result<f64> {
    GreenFunction::new(*params, *geom).eval(x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn ball_volumes() {
        assert!((unit_ball_volume(1) - 2.0).abs() < 1e-15);
        assert!((unit_ball_volume(2) - PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-15);
        assert!((unit_ball_volume(4) - PI * PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn normalization_matches_classical_constants() {
        assert!((normalization_constant(1, 3) - 1.0 / (4.0 * PI)).abs() < 1e-16);
        assert!((normalization_constant(1, 2) - 1.0 / (2.0 * PI)).abs() < 1e-16);
    }

    #[test]
    fn alpha_formula() {
        let p = KernelParams::new(3, 1, 2.0).unwrap();
        assert_eq!(p.alpha(), 3.0);
        let c = KernelParams::new(5, 2, 9.0).unwrap();
        assert_eq!(c.alpha(), 0.0);
        assert!(KernelParams::new(3, 1, 1.0).is_err());
    }

    #[test]
    fn psi_examples() {
        let p = KernelParams::kernel(3, 1).unwrap();
        let b = BallGeometry::unit_ball();
        assert!((psi(&p, &b, &[0.0; 3], &[0.5, 0.0, 0.0]).unwrap() - 3.0).abs() < 1e-15);
        assert_eq!(psi(&p, &b, &[1.0, 0.0, 0.0], &[0.2, 0.1, 0.0]).unwrap(), 0.0);
        let h = BallGeometry::half_space();
        assert_eq!(psi(&p, &h, &[1.0, 0.0, 0.0], &[2.0, 0.0, 0.0]).unwrap(), 8.0);
    }

    #[test]
    fn classical_values() {
        let p = KernelParams::kernel(3, 1).unwrap();
        let b = BallGeometry::unit_ball();
        let g = green(&p, &b, &[0.0; 3], &[0.5, 0.0, 0.0]).unwrap();
        assert!((g - 1.0 / (4.0 * PI)).abs() < 1e-15);
        let h = green(&p, &BallGeometry::half_space(), &[1.0, 0.0, 0.0], &[2.0, 0.0, 0.0]).unwrap();
        assert!((h - 1.0 / (6.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn errors() {
        let p = KernelParams::kernel(3, 1).unwrap();
        let b = BallGeometry::unit_ball();
        assert_eq!(
            green(&p, &b, &[0.1, 0.0, 0.0], &[0.1, 0.0, 0.0]),
            Err(Error::CoincidentPoints)
        );
        assert!(matches!(
            green(&p, &b, &[1.1, 0.0, 0.0], &[0.1, 0.0, 0.0]),
            Err(Error::OutsideDomain { .. })
        ));
        assert!(matches!(
            green(&p, &b, &[0.1, 0.0], &[0.1, 0.0, 0.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
