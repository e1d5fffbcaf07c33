//! Exact derivatives of ball Green functions in the second argument.
//!
//! For a ball with center `c`, `G(x, y)` depends on `y` only through
//! `r = |y - x|^2` and `s = |y - c|^2`. The Laplacian keeps this class closed:
//!
//! `Delta g(r, s) = 4 r g_rr + 4 s g_ss + 8 (y-x).(y-c) g_rs + 2N (g_r + g_s)`
//!
//! with `2 (y-x).(y-c) = r + s - |x - c|^2`. Iterated Laplacians and their normal
//! derivatives therefore follow from a truncated Taylor expansion of `g` in `(r, s)`.

use super::geometry::{check_dim, dist_sq, dot};
use super::profile::Profile;
use super::GreenFunction;
use crate::error::{Error, Result};

/// Truncated Taylor series in two variables of total degree `<= deg`.
#[derive(Debug, Clone, PartialEq)]
pub struct Series2 {
    deg: usize,
    coeffs: Vec<f64>,
}

impl Series2 {
    pub fn zeros(deg: usize) -> Self {
        Series2 {
            deg,
            coeffs: vec![0.0; (deg + 1) * (deg + 1)],
        }
    }

    pub fn constant(deg: usize, v: f64) -> Self {
        let mut s = Self::zeros(deg);
        s.coeffs[0] = v;
        s
    }

    /// `v + a`
    pub fn first(deg: usize, v: f64) -> Self {
        let mut s = Self::constant(deg, v);
        if deg >= 1 {
            s.set(1, 0, 1.0);
        }
        s
    }

    /// `v + b`
    pub fn second(deg: usize, v: f64) -> Self {
        let mut s = Self::constant(deg, v);
        if deg >= 1 {
            s.set(0, 1, 1.0);
        }
        s
    }

    pub fn degree(&self) -> usize {
        self.deg
    }

    /// Coefficient of `a^i b^j`.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i + j > self.deg {
            0.0
        } else {
            self.coeffs[i * (self.deg + 1) + j]
        }
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.coeffs[i * (self.deg + 1) + j] = v;
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn scaled(&self, f: f64) -> Self {
        Series2 {
            deg: self.deg,
            coeffs: self.coeffs.iter().map(|c| c * f).collect(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        debug_assert_eq!(self.deg, o.deg);
        Series2 {
            deg: self.deg,
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        debug_assert_eq!(self.deg, o.deg);
        let d = self.deg;
        let mut out = Self::zeros(d);
        for i1 in 0..=d {
            for j1 in 0..=(d - i1) {
                let a = self.get(i1, j1);
                if a == 0.0 {
                    continue;
                }
                for i2 in 0..=(d - i1 - j1) {
                    for j2 in 0..=(d - i1 - j1 - i2) {
                        let k = (i1 + i2) * (d + 1) + j1 + j2;
                        out.coeffs[k] += a * o.get(i2, j2);
                    }
                }
            }
        }
        out
    }

    /// `sum_k outer[k] (self - self(0))^k`, i.e. composition with a univariate
    /// function whose Taylor coefficients at `self(0)` are `outer`.
    pub fn compose(&self, outer: &[f64]) -> Self {
        let d = self.deg;
        let mut delta = self.clone();
        delta.coeffs[0] = 0.0;
        let mut out = Self::constant(d, outer.first().copied().unwrap_or(0.0));
        let mut power = Self::constant(d, 1.0);
        for &c in outer.iter().skip(1).take(d) {
            power = power.mul(&delta);
            out = out.add(&power.scaled(c));
        }
        out
    }
}

/// Taylor coefficients of `z^p` at `z0 > 0` up to degree `deg`.
pub fn power_coeffs(z0: f64, p: f64, deg: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(deg + 1);
    let mut binom = 1.0;
    for k in 0..=deg {
        out.push(binom * z0.powf(p - k as f64));
        binom *= (p - k as f64) / (k + 1) as f64;
    }
    out
}

/// Taylor coefficients of the profile `P` at `t0 > -1` up to degree `deg`.
pub fn profile_coeffs(profile: &Profile, t0: f64, deg: usize) -> Vec<f64> {
    let m = profile.order();
    let half_n = profile.dim() as f64 / 2.0;
    // (t0 + e)^{m-1}, exact finite expansion
    let mut lead = vec![0.0; deg];
    let mut binom = 1.0;
    for (j, slot) in lead.iter_mut().enumerate().take(m) {
        *slot = binom * if m - 1 - j == 0 { 1.0 } else { t0.powi((m - 1 - j) as i32) };
        binom *= (m - 1 - j) as f64 / (j + 1) as f64;
    }
    let tail = power_coeffs(1.0 + t0, -half_n, deg.saturating_sub(1));
    let mut out = vec![0.0; deg + 1];
    out[0] = profile.value_extended(t0);
    for k in 1..=deg {
        let mut c = 0.0;
        for j in 0..k {
            c += lead[j] * tail[k - 1 - j];
        }
        out[k] = c / k as f64;
    }
    out
}

/// Exact `y`-derivatives of a ball Green function with the first argument fixed.
#[derive(Debug, Clone)]
pub struct BallKernelJet<'a> {
    green: &'a GreenFunction,
    x: Vec<f64>,
    center: Vec<f64>,
    psi_factor: f64,
}

impl<'a> BallKernelJet<'a> {
    pub fn new(green: &'a GreenFunction, x: &[f64]) -> Result<Self> {
        let geom = green.geometry();
        if geom.is_half_space() {
            return Err(Error::InvalidParameter(
                "derivative jets are available for finite balls only".into(),
            ));
        }
        let n = green.params().dim();
        check_dim(n, x)?;
        geom.check_closed(x)?;
        let r = geom.radius();
        Ok(BallKernelJet {
            green,
            x: x.to_vec(),
            center: geom.center(n).0,
            psi_factor: geom.margin(x) / (r * r),
        })
    }

    /// Taylor expansion of `g(r, s) = G(x, y)` about the `(r, s)` of `y`.
    pub fn expansion(&self, y: &[f64], deg: usize) -> Result<Series2> {
        check_dim(self.x.len(), y)?;
        let r0 = dist_sq(&self.x, y);
        if r0 == 0.0 {
            return Err(Error::CoincidentPoints);
        }
        let params = self.green.params();
        let e = 2.0 * params.order() as f64 - params.dim() as f64;
        let margin_y = self.green.geometry().margin(y);
        let r = Series2::first(deg, r0);
        let inv_r = r.compose(&power_coeffs(r0, -1.0, deg));
        let r_pow = r.compose(&power_coeffs(r0, 0.5 * e, deg));
        let numer = Series2::second(deg, -margin_y).scaled(-self.psi_factor);
        let psi = numer.mul(&inv_r);
        let prof = psi.compose(&profile_coeffs(self.green.profile(), psi.value(), deg));
        Ok(r_pow.mul(&prof).scaled(0.5 * params.k_norm()))
    }

    /// One application of the Laplacian; the result is exact to degree `deg - 2`.
    fn laplacian(&self, g: &Series2, r0: f64, s0: f64, cross: f64) -> Series2 {
        let d = g.degree();
        assert!(d >= 2);
        let n2 = 2.0 * self.x.len() as f64;
        let mut out = Series2::zeros(d - 2);
        for i in 0..=(d - 2) {
            for j in 0..=(d - 2 - i) {
                let (fi, fj) = (i as f64, j as f64);
                let v = 4.0 * (r0 * (fi + 2.0) * (fi + 1.0) * g.get(i + 2, j) + (fi + 1.0) * fi * g.get(i + 1, j))
                    + 4.0 * (s0 * (fj + 2.0) * (fj + 1.0) * g.get(i, j + 2) + (fj + 1.0) * fj * g.get(i, j + 1))
                    + 4.0
                        * (cross * (fi + 1.0) * (fj + 1.0) * g.get(i + 1, j + 1)
                            + fi * (fj + 1.0) * g.get(i, j + 1)
                            + (fi + 1.0) * fj * g.get(i + 1, j))
                    + n2 * ((fi + 1.0) * g.get(i + 1, j) + (fj + 1.0) * g.get(i, j + 1));
                out.set(i, j, v);
            }
        }
        out
    }

    /// Expansion of `Delta_y^k G(x, .)` about `y`, exact to degree `extra`.
    pub fn laplacian_series(&self, y: &[f64], k: usize, extra: usize) -> Result<Series2> {
        let mut g = self.expansion(y, 2 * k + extra)?;
        let r0 = dist_sq(&self.x, y);
        let yc: Vec<f64> = y.iter().zip(&self.center).map(|(a, b)| a - b).collect();
        let yx: Vec<f64> = y.iter().zip(&self.x).map(|(a, b)| a - b).collect();
        let s0 = dot(&yc, &yc);
        let cross = 2.0 * dot(&yx, &yc);
        for _ in 0..k {
            g = self.laplacian(&g, r0, s0, cross);
        }
        Ok(g)
    }

    /// `Delta_y^k G(x, y)`.
    pub fn laplacian_power(&self, y: &[f64], k: usize) -> Result<f64> {
        Ok(self.laplacian_series(y, k, 0)?.value())
    }

    /// Gradient in `y` of `Delta_y^k G(x, y)`.
    pub fn laplacian_power_gradient(&self, y: &[f64], k: usize) -> Result<Vec<f64>> {
        let s = self.laplacian_series(y, k, 1)?;
        let (ga, gb) = (s.get(1, 0), s.get(0, 1));
        Ok(y.iter()
            .zip(&self.x)
            .zip(&self.center)
            .map(|((yi, xi), ci)| 2.0 * ga * (yi - xi) + 2.0 * gb * (yi - ci))
            .collect())
    }

    /// Derivative of `Delta_y^k G(x, y)` along `direction`.
    pub fn directional_laplacian_power(&self, y: &[f64], k: usize, direction: &[f64]) -> Result<f64> {
        check_dim(self.x.len(), direction)?;
        Ok(dot(&self.laplacian_power_gradient(y, k)?, direction))
    }
}
