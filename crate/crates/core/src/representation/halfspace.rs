//! Truncations of `\int_{R^N_+} G_inf^+(x, y) (-Delta)^m u(y) dy` over the balls `B_R^+`
//! and bounds for the boundary terms they leave out.

use serde::{Deserialize, Serialize};

use super::ManufacturedSolution;
use crate::error::{Error, Result};
use crate::kernels::geometry::{check_dim, dot, BallGeometry};
use crate::kernels::{GreenFunction, KernelParams};
use crate::quadrature::{cap_surface_integral, integrate_ball, CapRange, QuadratureSpec};
use crate::sampling::{direction_uniforms, unit_direction, LowDiscrepancy};

/// Samples drawn by [`boundary_smallness_profile`].
pub const PROFILE_SAMPLES: usize = 1000;

/// `{4 x_1, 8 x_1, ..., 1024 x_1}`
pub fn default_schedule(x1: f64) -> Vec<f64> {
    (2..=10).map(|k| x1 * f64::from(1u32 << k)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncatedIntegral {
    pub radius: f64,
    pub value: f64,
    pub error: f64,
}

/// Bound for the boundary terms on `dB_R^+` split at height `delta`:
/// `profile(delta) * cap(0, delta) + global_sup * cap(delta, 2R)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailBound {
    pub radius: f64,
    pub delta: f64,
    pub profile: f64,
    pub global_sup: f64,
    pub near_cap: f64,
    pub far_cap: f64,
    pub estimate: f64,
}

impl TailBound {
    /// The part supported away from `{y_1 <= delta}`, which vanishes as `R` grows.
    pub fn far_part(&self) -> f64 {
        self.global_sup * self.far_cap
    }

    /// The part supported in `{y_1 <= delta}`, small when `delta` is.
    pub fn near_part(&self) -> f64 {
        self.profile * self.near_cap
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfSpaceRepresentation {
    /// The integral over the largest ball.
    pub value: f64,
    pub sequence: Vec<TruncatedIntegral>,
    /// One entry per radius when boundary data were supplied.
    pub tail_bounds: Vec<TailBound>,
}

/// `u` translated so that `x'` moves to the axis; the problem is invariant under
/// translations along the boundary.
fn axis_offset(x: &[f64]) -> Vec<f64> {
    let mut off = x.to_vec();
    off[0] = 0.0;
    off
}

fn shifted(y: &[f64], off: &[f64]) -> Vec<f64> {
    y.iter().zip(off).map(|(a, b)| a + b).collect()
}

/// Sums of `|Delta^i u| + |d_nu Delta^i u|` entering the boundary terms, evaluated at
/// `y` with outward normal `nu`. Odd orders end with `|Delta^{(m-1)/2} u|` alone.
fn boundary_terms(ms: &ManufacturedSolution, y: &[f64], nu: &[f64]) -> Result<f64> {
    let m = ms.order();
    let mut acc = 0.0;
    for i in 0..(m / 2) {
        acc += ms.laplacian_power(i)?(y).abs() + dot(&ms.laplacian_gradient(i)?(y), nu).abs();
    }
    if m % 2 == 1 {
        acc += ms.laplacian_power((m - 1) / 2)?(y).abs();
    }
    Ok(acc)
}

/// Sampled sup of the boundary terms over `{y in dB_R^+ : y_1 <= delta}`.
/// `offset` translates the field along the boundary.
fn profile_with_offset(ms: &ManufacturedSolution, delta: f64, radius: f64, offset: &[f64], samples: usize) -> Result<f64> {
    let n = ms.dim();
    let top = delta.min(2.0 * radius);
    let center = {
        let mut c = vec![0.0; n];
        c[0] = radius;
        c
    };
    let mut worst = 0.0f64;
    let mut eval = |y: Vec<f64>| -> Result<()> {
        let nu: Vec<f64> = y.iter().zip(&center).map(|(a, c)| (a - c) / radius).collect();
        worst = worst.max(boundary_terms(ms, &shifted(&y, offset), &nu)?);
        Ok(())
    };
    if n == 1 {
        eval(vec![0.0])?;
        if top >= 2.0 * radius {
            eval(vec![2.0 * radius])?;
        }
        return Ok(worst);
    }
    let mut ld = LowDiscrepancy::new(1 + direction_uniforms(n - 1), 0);
    eval(vec![0.0; n])?;
    for _ in 1..samples {
        let u = ld.next_point();
        let y1 = top * u[0];
        let rho = (2.0 * radius * y1 - y1 * y1).max(0.0).sqrt();
        let dir = unit_direction(&u[1..], n - 1);
        let mut y = Vec::with_capacity(n);
        y.push(y1);
        y.extend(dir.iter().map(|d| rho * d));
        eval(y)?;
    }
    Ok(worst)
}

/// Sampled sup over `{y in dB_R^+ : 0 <= y_1 <= delta}` of the boundary terms that
/// the representation on `B_R^+` leaves out.
pub fn boundary_smallness_profile(ms: &ManufacturedSolution, delta: f64, radius: f64) -> Result<f64> {
    if !(delta > 0.0) || !(radius > 0.0) {
        return Err(Error::InvalidParameter("delta and R must be positive".into()));
    }
    profile_with_offset(ms, delta, radius, &vec![0.0; ms.dim()], PROFILE_SAMPLES)
}

/// Truncated integrals `\int_{B_R^+} G_R^+(x, y) source(y) dy` along `schedule`.
///
/// Because `G_R^+` increases with `R` and the source is non-negative, the sequence must
/// be nondecreasing; a decrease beyond `1e-10` plus the quadrature error estimates
/// raises `NonMonotoneSequence`. When `boundary` is given, every radius also gets a
/// [`TailBound`] split at height `delta`.
pub fn halfspace_representation<S>(
    params: &KernelParams,
    source: S,
    boundary: Option<&ManufacturedSolution>,
    x: &[f64],
    schedule: &[f64],
    delta: f64,
    spec: &QuadratureSpec,
) -> Result<HalfSpaceRepresentation>
where
    S: Fn(&[f64]) -> f64,
{
    let n = params.dim();
    check_dim(n, x)?;
    if !(x[0] > 0.0) {
        return Err(Error::OutsideDomain { point: x.to_vec() });
    }
    if schedule.is_empty() {
        return Err(Error::ScheduleTooSmall("empty radius schedule".into()));
    }
    if schedule[0] <= 2.0 * x[0] {
        return Err(Error::ScheduleTooSmall(format!(
            "first radius {} must exceed 2 x_1 = {}",
            schedule[0],
            2.0 * x[0]
        )));
    }
    if schedule.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::ScheduleTooSmall("radii must increase strictly".into()));
    }
    if let Some(ms) = boundary {
        if ms.dim() != n || ms.order() != params.order() {
            return Err(Error::InvalidParameter(
                "boundary data must match the kernel dimension and order".into(),
            ));
        }
        if !(delta > 0.0) {
            return Err(Error::InvalidParameter("delta must be positive".into()));
        }
    }
    let offset = axis_offset(x);
    let mut xa = vec![0.0; n];
    xa[0] = x[0];

    let mut sequence: Vec<TruncatedIntegral> = Vec::with_capacity(schedule.len());
    let mut tail_bounds = Vec::new();
    for &radius in schedule {
        let geom = BallGeometry::shifted_ball(radius)?;
        let green = GreenFunction::new(*params, geom);
        let integrand = |y: &[f64]| -> f64 {
            if y == xa.as_slice() {
                0.0
            } else {
                green.eval_unchecked(&xa, y) * source(&shifted(y, &offset))
            }
        };
        let est = integrate_ball(&integrand, &geom, n, spec, Some(&xa))?;
        if let Some(prev) = sequence.last() {
            let slack = 1e-10 + prev.error + est.error;
            if est.value < prev.value - slack {
                return Err(Error::NonMonotoneSequence {
                    radius,
                    previous: prev.value,
                    current: est.value,
                });
            }
        }
        sequence.push(TruncatedIntegral {
            radius,
            value: est.value,
            error: est.error,
        });
        if let Some(ms) = boundary {
            tail_bounds.push(tail_bound(ms, &xa, &offset, radius, delta, spec)?);
        }
    }
    Ok(HalfSpaceRepresentation {
        value: sequence.last().map(|s| s.value).unwrap_or(0.0),
        sequence,
        tail_bounds,
    })
}

fn tail_bound(
    ms: &ManufacturedSolution,
    xa: &[f64],
    offset: &[f64],
    radius: f64,
    delta: f64,
    spec: &QuadratureSpec,
) -> Result<TailBound> {
    let split = delta.min(2.0 * radius);
    let profile = profile_with_offset(ms, split, radius, offset, PROFILE_SAMPLES)?;
    let global_sup = profile_with_offset(ms, 2.0 * radius, radius, offset, PROFILE_SAMPLES)?;
    let (near_cap, far_cap) = if xa.len() == 1 {
        // the boundary of B_R^+ in one dimension is {0, 2R}
        (xa[0].powi(-1), (2.0 * radius - xa[0]).powi(-1))
    } else {
        (
            cap_surface_integral(&CapRange::new(0.0, split, radius)?, xa, spec)?,
            cap_surface_integral(&CapRange::new(split, 2.0 * radius, radius)?, xa, spec)?,
        )
    };
    Ok(TailBound {
        radius,
        delta: split,
        profile,
        global_sup,
        near_cap,
        far_cap,
        estimate: profile * near_cap + global_sup * far_cap,
    })
}
