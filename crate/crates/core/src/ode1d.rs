//! The ordinary differential equation `(-1)^m u^{(2m)} = f(u)` on the half-line, its
//! first integral
//!
//! `H = sum_{i=1}^{m-1} (-1)^i u^{(i)} u^{(2m-i)} + (-1)^m (u^{(m)}^2 / 2 + F(u))`
//!
//! and a scan over initial data with `u = u' = ... = u^{(m-1)} = 0` at the origin.
//!
//! Integration uses the Dormand-Prince 5(4) pair. Besides the usual local error test a
//! step is rejected when it changes `H` by more than `drift_rate * h` relative to the
//! magnitude of the terms of `H`.

use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A nonlinearity `f` with its antiderivative `F`, `F(0) = 0`.
#[derive(Clone)]
pub struct Nonlinearity1D {
    f: ScalarFn,
    antiderivative: ScalarFn,
    extension: String,
}

impl std::fmt::Debug for Nonlinearity1D {
    fn fmt(&self, fmt: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fmt.debug_struct("Nonlinearity1D")
            .field("extension", &self.extension)
            .finish_non_exhaustive()
    }
}

impl Nonlinearity1D {
    pub fn new<F, G>(f: F, antiderivative: G, extension: impl Into<String>) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Nonlinearity1D {
            f: Arc::new(f),
            antiderivative: Arc::new(antiderivative),
            extension: extension.into(),
        }
    }

    /// `f(s) = |s|^q`, `F(s) = s |s|^q / (q + 1)`.
    pub fn power(q: f64) -> Result<Self> {
        if !(q > 1.0) || !q.is_finite() {
            return Err(Error::InvalidParameter(format!("exponent q must exceed 1, got {q}")));
        }
        Ok(Self::new(
            move |s: f64| s.abs().powf(q),
            move |s: f64| s * s.abs().powf(q) / (q + 1.0),
            format!("f(s) = |s|^{q} for s < 0"),
        ))
    }

    /// `f(s) = s`, `F(s) = s^2 / 2`.
    pub fn linear() -> Self {
        Self::new(|s| s, |s| 0.5 * s * s, "f(s) = s for s < 0")
    }

    pub fn f(&self, s: f64) -> f64 {
        (self.f)(s)
    }

    pub fn antiderivative(&self, s: f64) -> f64 {
        (self.antiderivative)(s)
    }

    /// How `f` is continued to negative arguments.
    pub fn extension(&self) -> &str {
        &self.extension
    }

    /// Largest `|F'(s) - f(s)|` (central differences) over `samples` points of `[-a, a]`.
    pub fn antiderivative_defect(&self, a: f64, samples: usize) -> f64 {
        let h = 1e-5 * a.max(1.0);
        (0..samples)
            .map(|i| {
                let s = -a + 2.0 * a * (i as f64 + 0.5) / samples as f64;
                let fd = (self.antiderivative(s + h) - self.antiderivative(s - h)) / (2.0 * h);
                (fd - self.f(s)).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// `(t, (u, u', ..., u^{(2m-1)}), H)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ODEState {
    pub t: f64,
    pub derivs: Vec<f64>,
    pub h: f64,
}

impl ODEState {
    pub fn new(t: f64, derivs: Vec<f64>, nl: &Nonlinearity1D, m: usize) -> Result<Self> {
        let h = first_integral(&derivs, nl, m)?;
        Ok(ODEState { t, derivs, h })
    }

    /// State at `t = 0` with `u = ... = u^{(m-1)} = 0` and the given higher derivatives.
    pub fn dirichlet(free: &[f64], nl: &Nonlinearity1D, m: usize) -> Result<Self> {
        if free.len() != m {
            return Err(Error::DimensionMismatch { expected: m, got: free.len() });
        }
        let mut derivs = vec![0.0; m];
        derivs.extend_from_slice(free);
        Self::new(0.0, derivs, nl, m)
    }

    pub fn u(&self) -> f64 {
        self.derivs[0]
    }
}

fn check_order(derivs: &[f64], m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidParameter("order m must be at least 1".into()));
    }
    if derivs.len() != 2 * m {
        return Err(Error::DimensionMismatch {
            expected: 2 * m,
            got: derivs.len(),
        });
    }
    Ok(())
}

fn sign(i: usize) -> f64 {
    if i % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// The terms of `H` in summation order.
fn first_integral_terms<'a>(d: &'a [f64], nl: &'a Nonlinearity1D, m: usize) -> impl Iterator<Item = f64> + 'a {
    let mixed = (1..m).map(move |i| sign(i) * d[i] * d[2 * m - i]);
    let top = sign(m) * 0.5 * d[m] * d[m];
    let potential = sign(m) * nl.antiderivative(d[0]);
    mixed.chain([top, potential])
}

pub fn first_integral(derivs: &[f64], nl: &Nonlinearity1D, m: usize) -> Result<f64> {
    check_order(derivs, m)?;
    Ok(first_integral_terms(derivs, nl, m).sum())
}

/// `1 + sum |terms of H|`, the scale against which drift is measured.
fn first_integral_scale(derivs: &[f64], nl: &Nonlinearity1D, m: usize) -> f64 {
    1.0 + first_integral_terms(derivs, nl, m).map(f64::abs).sum::<f64>()
}

/// The first-order system `y_i' = y_{i+1}`, `y_{2m-1}' = (-1)^m f(y_0)`.
fn vector_field(y: &[f64], nl: &Nonlinearity1D, m: usize, out: &mut [f64]) {
    let k = 2 * m;
    out[..k - 1].copy_from_slice(&y[1..k]);
    out[k - 1] = sign(m) * nl.f(y[0]);
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    /// Relative and absolute local error tolerance.
    pub tol: f64,
    /// Largest accepted `|dH| / (|h| * scale)` per step.
    pub drift_rate: f64,
    /// Integration stops with `BlowUp` once `|u|` exceeds this.
    pub blowup_cap: f64,
    pub max_steps: usize,
    /// Smallest step before `StepFailure`.
    pub min_step: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            tol: 1e-12,
            drift_rate: 1e-10,
            blowup_cap: 1e8,
            max_steps: 2_000_000,
            min_step: 1e-14,
        }
    }
}

impl IntegratorConfig {
    pub fn with_tolerance(tol: f64) -> Self {
        IntegratorConfig {
            tol,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || !(self.drift_rate > 0.0) || !(self.blowup_cap > 0.0) || !(self.min_step > 0.0) {
            return Err(Error::InvalidParameter(
                "integrator tolerances and caps must be positive".into(),
            ));
        }
        Ok(())
    }
}

pub const TRAJECTORY_SCHEMA_VERSION: u32 = 1;

/// Accepted states in time order, starting with the initial one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub m: usize,
    pub states: Vec<ODEState>,
}

impl Trajectory {
    pub fn last(&self) -> &ODEState {
        self.states.last().expect("trajectory holds the initial state")
    }

    /// `max_t |H(t) - H(0)|`.
    pub fn max_drift(&self) -> f64 {
        let h0 = self.states[0].h;
        self.states.iter().fold(0.0, |m, s| m.max((s.h - h0).abs()))
    }

    pub fn max_abs_u(&self) -> f64 {
        self.states.iter().fold(0.0, |m, s| m.max(s.u().abs()))
    }

    /// CSV with header `schema_version,t,u,u1,...,u{2m-1},H`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["schema_version".to_string(), "t".to_string(), "u".to_string()];
        header.extend((1..2 * self.m).map(|i| format!("u{i}")));
        header.push("H".into());
        w.write_record(&header)?;
        for s in &self.states {
            let mut row = vec![TRAJECTORY_SCHEMA_VERSION.to_string(), s.t.to_string()];
            row.extend(s.derivs.iter().map(|d| d.to_string()));
            row.push(s.h.to_string());
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B_STAR: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Relative size of `H` changes attributed to rounding alone.
const ROUNDOFF_FLOOR: f64 = 64.0 * f64::EPSILON;

/// Integrates from `initial` to `t_end` (either direction) without constraints on the
/// initial data.
pub fn propagate(
    initial: &ODEState,
    nl: &Nonlinearity1D,
    m: usize,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    check_order(&initial.derivs, m)?;
    cfg.validate()?;
    let dim = 2 * m;
    let dir = if t_end >= initial.t { 1.0 } else { -1.0 };
    let span = (t_end - initial.t).abs();
    let mut states = vec![ODEState::new(initial.t, initial.derivs.clone(), nl, m)?];
    if span == 0.0 {
        return Ok(Trajectory { m, states });
    }
    let mut t = initial.t;
    let mut y = initial.derivs.clone();
    let mut hval = states[0].h;
    let mut k = vec![vec![0.0; dim]; 7];
    vector_field(&y, nl, m, &mut k[0]);
    let mut step = dir * (0.01 * span).min(1e-3);
    let mut stage = vec![0.0; dim];
    let mut y_new = vec![0.0; dim];
    let mut err = vec![0.0; dim];
    let mut steps = 0;
    while dir * (t_end - t) > 0.0 {
        if steps >= cfg.max_steps {
            return Err(Error::StepFailure { t, h: step });
        }
        steps += 1;
        if dir * (t + step - t_end) > 0.0 {
            step = t_end - t;
        }
        for s in 1..7 {
            for i in 0..dim {
                let acc: f64 = (0..s).map(|j| A[s][j] * k[j][i]).sum();
                stage[i] = y[i] + step * acc;
            }
            vector_field(&stage, nl, m, &mut k[s]);
            if s == 6 {
                y_new.copy_from_slice(&stage);
            }
        }
        for i in 0..dim {
            err[i] = step * (0..7).map(|j| (B[j] - B_STAR[j]) * k[j][i]).sum::<f64>();
        }
        let norm = (err
            .iter()
            .zip(&y)
            .zip(&y_new)
            .map(|((e, a), b)| {
                let sc = cfg.tol * (1.0 + a.abs().max(b.abs()));
                (e / sc).powi(2)
            })
            .sum::<f64>()
            / dim as f64)
            .sqrt();
        let h_new = first_integral(&y_new, nl, m)?;
        let scale = first_integral_scale(&y, nl, m).max(first_integral_scale(&y_new, nl, m));
        let drift_ok = (h_new - hval).abs() <= (cfg.drift_rate * step.abs()).max(ROUNDOFF_FLOOR) * scale;
        if norm.is_finite() && norm <= 1.0 && drift_ok {
            t += step;
            y.copy_from_slice(&y_new);
            hval = h_new;
            k.swap(0, 6);
            states.push(ODEState {
                t,
                derivs: y.clone(),
                h: hval,
            });
            if y[0].abs() > cfg.blowup_cap || !y[0].is_finite() {
                return Err(Error::BlowUp { t });
            }
            let factor = if norm == 0.0 { 5.0 } else { (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0) };
            step *= factor;
        } else {
            let factor = if norm.is_finite() && norm > 1.0 {
                (0.9 * norm.powf(-0.2)).clamp(0.1, 0.9)
            } else {
                0.5
            };
            step *= factor;
            if step.abs() < cfg.min_step {
                return Err(Error::StepFailure { t, h: step.abs() });
            }
        }
    }
    Ok(Trajectory { m, states })
}

/// Integrates Dirichlet data `u(0) = ... = u^{(m-1)}(0) = 0` from `initial` to `t_end`.
pub fn integrate(
    initial: &ODEState,
    nl: &Nonlinearity1D,
    m: usize,
    t_end: f64,
    tol: f64,
) -> Result<Trajectory> {
    check_order(&initial.derivs, m)?;
    if initial.derivs[..m].iter().any(|&d| d != 0.0) {
        return Err(Error::InvalidParameter(
            "Dirichlet data require u = ... = u^(m-1) = 0 initially".into(),
        ));
    }
    propagate(initial, nl, m, t_end, &IntegratorConfig::with_tolerance(tol))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ScanVerdict {
    StaysBounded { t_end: f64 },
    BlowsUp { t: f64 },
    Undetermined { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanEntry {
    /// `(u^{(m)}(0), ..., u^{(2m-1)}(0))`
    pub initial: Vec<f64>,
    pub verdict: ScanVerdict,
    pub h0: f64,
    /// `max |H(t) - H(0)|` along the computed part of the trajectory, if one was kept.
    pub max_drift: Option<f64>,
    pub max_abs_u: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub schema_version: u32,
    pub m: usize,
    pub extension: String,
    pub t_end: f64,
    pub bound_cap: f64,
    pub tol: f64,
    pub entries: Vec<ScanEntry>,
}

/// Integrates every grid point of free initial derivatives to `t_end`, declaring blow-up
/// once `|u|` exceeds `bound_cap`. Verdicts are relative to that horizon.
pub fn bounded_solution_scan(
    nl: &Nonlinearity1D,
    m: usize,
    grid: &[Vec<f64>],
    t_end: f64,
    bound_cap: f64,
    tol: f64,
) -> Result<ScanReport> {
    if !(t_end > 0.0) || !(bound_cap > 0.0) {
        return Err(Error::InvalidParameter("t_end and bound_cap must be positive".into()));
    }
    let cfg = IntegratorConfig {
        tol,
        blowup_cap: bound_cap,
        ..IntegratorConfig::default()
    };
    let entries = grid
        .par_iter()
        .map(|free| -> Result<ScanEntry> {
            let start = ODEState::dirichlet(free, nl, m)?;
            let (verdict, traj) = match propagate(&start, nl, m, t_end, &cfg) {
                Ok(traj) => (ScanVerdict::StaysBounded { t_end }, Some(traj)),
                Err(Error::BlowUp { t }) => (ScanVerdict::BlowsUp { t }, None),
                Err(Error::StepFailure { t, h }) => (
                    ScanVerdict::Undetermined {
                        reason: format!("step failure at t = {t} with h = {h}"),
                    },
                    None,
                ),
                Err(e) => return Err(e),
            };
            Ok(ScanEntry {
                initial: free.clone(),
                verdict,
                h0: start.h,
                max_drift: traj.as_ref().map(Trajectory::max_drift),
                max_abs_u: traj.as_ref().map(Trajectory::max_abs_u),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanReport {
        schema_version: 1,
        m,
        extension: nl.extension().to_string(),
        t_end,
        bound_cap,
        tol,
        entries,
    })
}

/// The tensor grid `values^m` of free initial derivatives.
pub fn tensor_grid(values: &[f64], m: usize) -> Vec<Vec<f64>> {
    (0..m).fold(vec![Vec::new()], |acc, _| {
        acc.into_iter()
            .flat_map(|prefix| {
                values.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rest_state_has_zero_integral() {
        let nl = Nonlinearity1D::power(2.0).unwrap();
        for m in 1..4 {
            assert_eq!(first_integral(&vec![0.0; 2 * m], &nl, m).unwrap(), 0.0);
        }
    }

    #[test]
    fn sine_integral() {
        let nl = Nonlinearity1D::linear();
        for t in [0.0, 0.3, 1.7, 4.0] {
            let h = first_integral(&[f64::sin(t), f64::cos(t)], &nl, 1).unwrap();
            assert!((h + 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn sine_trajectory() {
        let nl = Nonlinearity1D::linear();
        let start = ODEState::dirichlet(&[1.0], &nl, 1).unwrap();
        let traj = integrate(&start, &nl, 1, std::f64::consts::PI, 1e-12).unwrap();
        let end = traj.last();
        assert!(end.u().abs() < 1e-9 && (end.derivs[1] + 1.0).abs() < 1e-9);
        assert!(traj.max_drift() < 1e-10);
    }

    #[test]
    fn zero_data_stays_zero() {
        let nl = Nonlinearity1D::power(2.0).unwrap();
        let start = ODEState::dirichlet(&[0.0, 0.0], &nl, 2).unwrap();
        let traj = integrate(&start, &nl, 2, 5.0, 1e-10).unwrap();
        assert!(traj.states.iter().all(|s| s.derivs.iter().all(|&d| d == 0.0)));
    }

    #[test]
    fn power_antiderivative() {
        for q in [2.0, 2.5, 3.0] {
            let nl = Nonlinearity1D::power(q).unwrap();
            assert!(nl.antiderivative_defect(2.0, 100) < 1e-6);
        }
    }

    #[test]
    fn tensor_grid_shape() {
        let g = tensor_grid(&[0.0, 0.5, 1.0], 2);
        assert_eq!(g.len(), 9);
        assert_eq!(g[5], vec![0.5, 1.0]);
    }

    #[test]
    fn non_dirichlet_start_rejected() {
        let nl = Nonlinearity1D::linear();
        let s = ODEState::new(0.0, vec![0.1, 1.0], &nl, 1).unwrap();
        assert!(integrate(&s, &nl, 1, 1.0, 1e-10).is_err());
    }
}
