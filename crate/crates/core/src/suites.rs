//! Verification suites behind `polyharm verify`.
//!
//! Each suite samples deterministic inputs from the seed, checks one group of
//! properties and returns a [`Report`] with one case per property.

use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::conformal::{distance_identity, green_covariance_sides, ConformalMap};
use crate::error::{Error, Result};
use crate::kernels::derivative::finite_difference;
use crate::kernels::geometry::{dist_sq, dot, norm_sq, BallGeometry};
use crate::kernels::{bubble_source, green, GreenFunction, KernelParams, Point};
use crate::movingplane::{check_reflection_inequalities, kernel_pointwise_bound_check, ReflectionSpec};
use crate::ode1d::{first_integral, integrate, Nonlinearity1D, ODEState};
use crate::quadrature::{cap_surface_integral, spherical_average, CapRange, QuadratureSpec};
use crate::report::{Case, Report};
use crate::representation::{
    corpus, default_schedule, gaussian_dipole, green_poisson_breakdown, green_poisson_reconstruct,
    halfspace_representation, ManufacturedSolution, Polynomial,
};
use crate::rescale::{derivative_exponent, log_log_slope, lower_order_vanishing, rescale_field, CoefficientMap, RescaleSpec};
use crate::sampling::{ball_point, ball_uniforms, LowDiscrepancy};
use crate::semilinear::{picard_solve_with, GreenOperator, GridFunction, Lattice, PicardConfig, PicardVerdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteName {
    Kernels,
    Conformal,
    Representation,
    Halfspace,
    Reflection,
    Caps,
    Picard,
    Ode,
    Rescale,
    Averages,
}

impl SuiteName {
    pub const ALL: [SuiteName; 10] = [
        SuiteName::Kernels,
        SuiteName::Conformal,
        SuiteName::Representation,
        SuiteName::Halfspace,
        SuiteName::Reflection,
        SuiteName::Caps,
        SuiteName::Picard,
        SuiteName::Ode,
        SuiteName::Rescale,
        SuiteName::Averages,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SuiteName::Kernels => "kernels",
            SuiteName::Conformal => "conformal",
            SuiteName::Representation => "representation",
            SuiteName::Halfspace => "halfspace",
            SuiteName::Reflection => "reflection",
            SuiteName::Caps => "caps",
            SuiteName::Picard => "picard",
            SuiteName::Ode => "ode",
            SuiteName::Rescale => "rescale",
            SuiteName::Averages => "averages",
        }
    }
}

impl FromStr for SuiteName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SuiteName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown suite {s:?}")))
    }
}

impl std::fmt::Display for SuiteName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Inputs shared by all suites. `samples` overrides each suite's default sample count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    pub params: KernelParams,
    pub seed: u64,
    pub samples: Option<usize>,
}

impl SuiteConfig {
    pub fn new(params: KernelParams, seed: u64) -> Self {
        SuiteConfig {
            params,
            seed,
            samples: None,
        }
    }

    fn samples_or(&self, default: usize) -> usize {
        self.samples.unwrap_or(default)
    }
}

pub fn run_suite(name: SuiteName, cfg: &SuiteConfig) -> Result<Report> {
    let cases = match name {
        SuiteName::Kernels => kernels(cfg)?,
        SuiteName::Conformal => conformal(cfg)?,
        SuiteName::Representation => representation(cfg)?,
        SuiteName::Halfspace => halfspace(cfg)?,
        SuiteName::Reflection => reflection(cfg)?,
        SuiteName::Caps => caps(cfg)?,
        SuiteName::Picard => picard(cfg)?,
        SuiteName::Ode => ode(cfg)?,
        SuiteName::Rescale => rescale(cfg)?,
        SuiteName::Averages => averages(cfg)?,
    };
    Ok(Report::new(name.as_str(), cases))
}

/// `count` pairs of distinct points of the ball of radius `radius`.
fn ball_pairs(n: usize, count: usize, radius: f64, seed: u64) -> Vec<(Vec<f64>, Vec<f64>)> {
    let k = ball_uniforms(n);
    let mut ld = LowDiscrepancy::new(2 * k, seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let u = ld.next_point();
        let x = ball_point(&u[..k], n, radius);
        let y = ball_point(&u[k..], n, radius);
        if dist_sq(&x, &y) > 1e-12 {
            out.push((x, y));
        }
    }
    out
}

fn ball_points(n: usize, count: usize, radius: f64, seed: u64) -> Vec<Vec<f64>> {
    let k = ball_uniforms(n);
    let mut ld = LowDiscrepancy::new(k, seed);
    (0..count).map(|_| ball_point(&ld.next_point(), n, radius)).collect()
}

/// The classical Dirichlet Green function of the Laplacian on the unit ball,
/// `c_N (|x - y|^{2-N} - [x, y]^{2-N})` with `[x, y]^2 = |x - y|^2 + (1 - |x|^2)(1 - |y|^2)`
/// (logarithms for `N = 2`).
pub fn image_charge_green(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let r2 = dist_sq(x, y);
    let gap = (1.0 - norm_sq(x)) * (1.0 - norm_sq(y));
    let bracket = r2 + gap;
    match n {
        1 => 0.5 * ((1.0 - x[0] * y[0]) - (x[0] - y[0]).abs()),
        2 => (gap / r2).ln_1p() / (4.0 * std::f64::consts::PI),
        3 => {
            let (r, b) = (r2.sqrt(), bracket.sqrt());
            gap / (r * b * (r + b)) / (4.0 * std::f64::consts::PI)
        }
        _ => {
            let e = (2.0 - n as f64) / 2.0;
            let c = 1.0 / ((n as f64 - 2.0) * crate::quadrature::sphere_area(n));
            c * (r2.powf(e) - bracket.powf(e))
        }
    }
}

fn kernels(cfg: &SuiteConfig) -> Result<Vec<Case>> {
    let p = cfg.params;
    let (n, m) = (p.dim(), p.order());
    let pairs = ball_pairs(n, cfg.samples_or(10_000), 1.0, cfg.seed);
    let g = GreenFunction::new(p, BallGeometry::unit_ball());
    let values: Vec<(f64, f64)> = pairs
        .par_iter()
        .map(|(x, y)| Ok((g.eval(x, y)?, g.eval(y, x)?)))
        .collect::<Result<_>>()?;
    let mut cases = Vec::new();
    if m == 1 {
        let worst = pairs
            .iter()
            .zip(&values)
            .map(|((x, y), (gxy, _))| {
                let c = image_charge_green(x, y);
                (gxy - c).abs() / c.abs().max(f64::MIN_POSITIVE)
            })
            .fold(0.0, f64::max);
        cases.push(Case::at_most(
            "classical_agreement",
            worst,
            1e-10,
            json!({"pairs": pairs.len(), "max_rel_error": worst}),
        ));
    }
    let asym = values
        .iter()
        .map(|(a, b)| (a - b).abs() / a.abs().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    cases.push(Case::at_most("symmetry", asym, 1e-12, json!({"max_rel_asymmetry": asym})));
    let min = values.iter().map(|v| v.0).fold(f64::INFINITY, f64::min);
    cases.push(Case::at_least("positivity", min, 0.0, json!({"min_value": min})));
    if n >= 2 {
        // psi^{m-1/2} r^{2m-1} <= 1 bounds the profile integral, so the ratio stays
        // below k / (2m - 1)
        let bound = kernel_pointwise_bound_check(&p, cfg.samples_or(10_000), cfg.seed)?;
        let limit = p.k_norm() / (2.0 * m as f64 - 1.0);
        cases.push(Case::at_most(
            "pointwise_bound",
            bound.max_ratio,
            limit,
            json!({"empirical_c": bound.max_ratio, "analytic_bound": limit}),
        ));
    }
    Ok(cases)
}

fn conformal(cfg: &SuiteConfig) -> Result<Vec<Case>> {
    let p = cfg.params;
    let n = p.dim();
    let pairs = ball_pairs(n, cfg.samples_or(10_000), 0.999, cfg.seed);
    let map = ConformalMap::new(p);
    let ball = GreenFunction::new(p, BallGeometry::unit_ball());
    let stats: Vec<(f64, f64, f64)> = pairs
        .par_iter()
        .map(|(x, y)| {
            let (lhs, rhs) = green_covariance_sides(&p, x, y)?;
            let g1 = ball.eval(x, y)?;
            let (direct, closed) = distance_identity(&map, x, y)?;
            let back = map.phi_inverse(&map.phi(x)?)?;
            Ok((
                (lhs - rhs).abs() / (1.0 + g1),
                (direct - closed).abs() / closed,
                dist_sq(&back, x).sqrt(),
            ))
        })
        .collect::<Result<_>>()?;
    let max_of = |f: fn(&(f64, f64, f64)) -> f64| stats.iter().map(f).fold(0.0, f64::max);
    let cov = max_of(|s| s.0);
    let dist = max_of(|s| s.1);
    let inv = max_of(|s| s.2);
    Ok(vec![
        Case::at_most(
            "green_covariance",
            cov,
            1e-10,
            json!({"pairs": pairs.len(), "max_scaled_residual": cov}),
        ),
        Case::at_most("distance_identity", dist, 1e-12, json!({"max_rel_error": dist})),
        Case::at_most("phi_involution", inv, 1e-12, json!({"max_round_trip_error": inv})),
    ])
}

fn bubble(n: usize, m: usize) -> Result<ManufacturedSolution> {
    let b = Polynomial::constant(n, 1.0)
        .sub(&Polynomial::norm_sq(n))
        .pow(m as u32);
    ManufacturedSolution::from_polynomial(format!("(1-|x|^2)^{m}"), &b, m)
}

fn representation(cfg: &SuiteConfig) -> Result<Vec<Case>> {
    let p = cfg.params;
    let (n, m) = (p.dim(), p.order());
    let ball = BallGeometry::unit_ball();
    let points = ball_points(n, cfg.samples_or(20), 0.8, cfg.seed);
    let ms = bubble(n, m)?;
    let spec = QuadratureSpec::default();
    let mut cases = Vec::new();

    let symbolic = ms.source(&vec![0.0; n]);
    let closed = bubble_source(m, n);
    cases.push(Case::at_most(
        "bubble_source_constant",
        (symbolic - closed).abs(),
        1e-9 * closed,
        json!({"symbolic": symbolic, "closed_form": closed}),
    ));

    let errors: Vec<f64> = points
        .par_iter()
        .map(|x| Ok((green_poisson_reconstruct(&ms, &ball, x, &spec)? - ms.value(x)).abs()))
        .collect::<Result<_>>()?;
    let worst = errors.iter().copied().fold(0.0, f64::max);
    cases.push(Case::at_most(
        "bubble_reproduction",
        worst,
        1e-5,
        json!({"points": points.len(), "max_error": worst}),
    ));

    // a 1% error in the normalization must be visible
    let origin = vec![0.0; n];
    let perturbed: Vec<f64> = [0.99, 1.01]
        .iter()
        .map(|s| {
            let q = p.with_normalization(p.k_norm() * s)?;
            let g = GreenFunction::new(q, ball);
            Ok((green_poisson_breakdown(&ms, &g, &origin, &spec)?.total - 1.0).abs())
        })
        .collect::<Result<_>>()?;
    let weakest = perturbed.iter().copied().fold(f64::INFINITY, f64::min);
    cases.push(Case::at_least(
        "normalization_sensitivity",
        weakest,
        1e-5,
        json!({"errors_at_minus_plus_one_percent": perturbed}),
    ));

    if n >= 2 {
        let loose = QuadratureSpec::with_tolerance(1e-6);
        for field in corpus(n, m)? {
            let worst = points
                .par_iter()
                .map(|x| {
                    let v = field.value(x);
                    Ok((green_poisson_reconstruct(&field, &ball, x, &loose)? - v).abs() / (1.0 + v.abs()))
                })
                .collect::<Result<Vec<f64>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            cases.push(Case::at_most(
                format!("identity: {}", field.descriptor()),
                worst,
                1e-5,
                json!({"max_scaled_error": worst}),
            ));
        }
    }
    Ok(cases)
}

/// Radii `2^k x_1`, `k = 2..=12`, at which both points lie in `B_R^+`.
fn monotone_radii(x: &[f64], y: &[f64]) -> Vec<f64> {
    (2..=12)
        .map(|k| x[0] * f64::from(1u32 << k))
        .filter(|&r| {
            let g = BallGeometry::shifted_ball(r).expect("positive radius");
            g.contains_open(x) && g.contains_open(y)
        })
        .collect()
}

fn halfspace(cfg: &SuiteConfig) -> Result<Vec<Case>> {
    let p = cfg.params;
    let (n, m) = (p.dim(), p.order());
    let count = cfg.samples_or(1000);
    // points of (0, 1] x (-1, 1)^{N-1} lying in B_R^+ for R = 4096 x_1
    let mut ld = LowDiscrepancy::new(2 * n, cfg.seed);
    let pt = |w: &[f64]| -> Vec<f64> {
        w.iter()
            .enumerate()
            .map(|(i, c)| if i == 0 { *c } else { 2.0 * c - 1.0 })
            .collect()
    };
    let mut pairs: Vec<(Vec<f64>, Vec<f64>)> = Vec::with_capacity(count);
    while pairs.len() < count {
        let u = ld.next_point();
        let (x, y) = (pt(&u[..n]), pt(&u[n..]));
        let far = BallGeometry::shifted_ball(4096.0 * x[0])?;
        if far.contains_open(&x) && far.contains_open(&y) && dist_sq(&x, &y) > 1e-12 {
            pairs.push((x, y));
        }
    }
    let hs = GreenFunction::new(p, BallGeometry::half_space());
    let stats: Vec<(f64, f64)> = pairs
        .par_iter()
        .map(|(x, y)| {
            let mut worst_drop = 0.0f64;
            let mut prev = 0.0;
            for r in monotone_radii(x, y) {
                let g = green(&p, &BallGeometry::shifted_ball(r)?, x, y)?;
                worst_drop = worst_drop.max(prev - g);
                prev = g;
            }
            let far = green(&p, &BallGeometry::shifted_ball(4096.0 * x[0])?, x, y)?;
            Ok((worst_drop, (far - hs.eval(x, y)?).abs()))
        })
        .collect::<Result<_>>()?;
    let drop = stats.iter().map(|s| s.0).fold(0.0, f64::max);
    let gap = stats.iter().map(|s| s.1).fold(0.0, f64::max);
    let mut cases = vec![
        Case::at_most(
            "kernel_monotone_in_radius",
            drop,
            1e-10,
            json!({"pairs": count, "largest_decrease": drop}),
        ),
        Case::at_most(
            "kernel_limit_at_4096_x1",
            gap,
            1e-6,
            json!({"largest_gap": gap}),
        ),
    ];

    let spec = QuadratureSpec::with_tolerance(1e-8);
    let mut x = vec![0.0; n];
    x[0] = 1.0;
    if n >= 2 {
        x[1] = 0.3;
    }
    let source = |y: &[f64]| {
        let mut d = y.to_vec();
        d[0] -= 1.5;
        (-norm_sq(&d)).exp()
    };
    let seq = halfspace_representation(&p, source, None, &x, &default_schedule(x[0]), 1.0, &spec);
    let (margin, details) = match &seq {
        Ok(r) => (1.0, json!({"values": r.sequence.iter().map(|s| s.value).collect::<Vec<_>>()})),
        Err(e) => (-1.0, json!({"error": e.to_string()})),
    };
    cases.push(Case::from_margin("truncations_nondecreasing", margin, details));

    if n == 3 && m == 1 {
        let ms = gaussian_dipole(1.5)?;
        let x = [2.0, 0.3, -0.2];
        let r = halfspace_representation(&p, |y: &[f64]| ms.source(y), Some(&ms), &x, &default_schedule(x[0]), 1.0, &spec)?;
        let k = r.sequence.len();
        let gap = r.sequence[k - 1].value - r.sequence[k - 2].value;
        cases.push(Case::at_most(
            "dipole_cauchy_gap",
            gap,
            1e-4,
            json!({"last_gap": gap, "limit": ms.value(&x), "value": r.value}),
        ));
        let radii: Vec<f64> = r.tail_bounds.iter().map(|t| t.radius).collect();
        let far: Vec<f64> = r.tail_bounds.iter().map(|t| t.far_part()).collect();
        let slope = log_log_slope(&radii, &far)?;
        cases.push(Case::at_most(
            "tail_bound_decay",
            slope,
            -0.35,
            json!({"fitted_exponent": slope, "far_parts": far}),
        ));
    }
    Ok(cases)
}

fn reflection(cfg: &SuiteConfig) -> Result<Vec<Case>> {
    let p = cfg.params;
    let n = p.dim();
    if n < 2 {
        return Err(Error::InvalidParameter("reflections need N >= 2".into()));
    }
    let total = cfg.samples_or(100_000);
    let lambdas = [0.1, 0.35, 0.7];
    let per = total.div_ceil(lambdas.len());
    let mut merged: Vec<(String, usize, f64, usize)> = Vec::new();
    for (k, &lam) in lambdas.iter().enumerate() {
        let spec = ReflectionSpec::along_second_axis(n, lam)?;
        for r in check_reflection_inequalities(&p, &spec, per, 1e-12, cfg.seed + k as u64)? {
            match merged.iter_mut().find(|e| e.0 == r.inequality_id) {
                Some(e) => {
                    e.1 += r.samples;
                    e.2 = e.2.min(r.min_margin);
                    e.3 += r.violations;
                }
                None => merged.push((r.inequality_id, r.samples, r.min_margin, r.violations)),
            }
        }
    }
    Ok(merged
        .into_iter()
        .map(|(id, samples, min_margin, violations)| {
            let margin = if violations == 0 { min_margin + 1e-12 } else { -(violations as f64) };
            Case::from_margin(
                id,
                margin,
                json!({"samples": samples, "min_margin": min_margin, "violations": violations, "lambdas": lambdas}),
            )
        })
        .collect())
}

fn caps(cfg: &SuiteConfig) -> Result<Vec<Case>> {
    let n = cfg.params.dim();
    if n < 2 {
        return Err(Error::InvalidParameter("cap integrals need N >= 2".into()));
    }
    let spec = QuadratureSpec::with_tolerance(1e-10);
    let radii: Vec<f64> = (2..=9).map(|k| f64::from(1u32 << k)).collect();
    let mut x = vec![0.0; n];
    x[0] = 1.0;
    let band: Vec<f64> = radii
        .iter()
        .map(|&r| cap_surface_integral(&CapRange::new(1.0, 2.0 * r, r)?, &x, &spec))
        .collect::<Result<_>>()?;
    let slope = log_log_slope(&radii, &band)?;
    let mut cases = vec![Case::within(
        "band_decay_exponent",
        slope,
        -0.65,
        -0.35,
        json!({"radii": radii, "integrals": band, "fitted_exponent": slope}),
    )];
    for x1 in [0.25, 0.5, 1.0] {
        x[0] = x1;
        let c: Vec<f64> = radii
            .iter()
            .map(|&r| Ok(x1 * cap_surface_integral(&CapRange::new(0.0, 2.0 * r, r)?, &x, &spec)?))
            .collect::<Result<_>>()?;
        let mean = c.iter().sum::<f64>() / c.len() as f64;
        let spread = c.iter().map(|v| (v / mean - 1.0).abs()).fold(0.0, f64::max);
        cases.push(Case::at_most(
            format!("whole_sphere_c_over_x1 (x1 = {x1})"),
            spread,
            0.2,
            json!({"c": c, "mean": mean}),
        ));
    }
    Ok(cases)
}

/// Lattice sizes that keep the dense operator at a few thousand nodes.
pub fn default_lattice(n: usize) -> Result<Lattice> {
    let (radial, level) = match n {
        1 => (32, 1),
        2 => (16, 32),
        3 => (16, 8),
        4 => (12, 4),
        5 => (12, 3),
        _ => (10, 2),
    };
    Lattice::polar_ball(n, radial, level, false)
}

fn picard(cfg: &SuiteConfig) -> Result<Vec<Case>> {
    let p = cfg.params;
    let lattice = Arc::new(default_lattice(p.dim())?);
    let op = GreenOperator::new(Arc::clone(&lattice), p)?;
    let v0 = GridFunction::constant(lattice, p, 1e-2)?;
    let pc = PicardConfig::default();
    let out = picard_solve_with(&op, &v0, &pc)?;
    let norms: Vec<f64> = out.history.iter().map(|h| h.sup_norm).collect();
    let rise = norms
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    let audit = out.audit_residual.unwrap_or(f64::INFINITY);
    Ok(vec![
        Case::from_margin(
            "converged",
            if out.verdict == PicardVerdict::Converged { 1.0 } else { -1.0 },
            json!({"verdict": out.verdict, "iterations": out.history.len(), "nodes": op.lattice().len()}),
        ),
        Case::at_most(
            "sup_norms_decrease",
            rise,
            0.0,
            json!({"initial_sup_norm": v0.sup_norm(), "sup_norms": norms}),
        ),
        Case::at_most(
            "limit_is_zero",
            out.iterate.sup_norm(),
            pc.contraction_tol,
            json!({"final_sup_norm": out.iterate.sup_norm()}),
        ),
        Case::at_most(
            "audit_residual",
            audit,
            pc.contraction_tol,
            json!({"audit_residual": out.audit_residual}),
        ),
    ])
}

fn ode(cfg: &SuiteConfig) -> Result<Vec<Case>> {
    let p = cfg.params;
    let m = p.order();
    let nl = Nonlinearity1D::power(p.exponent())?;
    let free: Vec<f64> = (0..m).map(|i| 0.01 / (i + 1) as f64).collect();
    let start = ODEState::dirichlet(&free, &nl, m)?;
    let traj = integrate(&start, &nl, m, 10.0, 1e-12)?;
    let drift = traj.max_drift();
    let linear = Nonlinearity1D::linear();
    let sine = integrate(&ODEState::dirichlet(&[1.0], &linear, 1)?, &linear, 1, 10.0, 1e-12)?;
    let h_err = sine
        .states
        .iter()
        .map(|s| Ok((first_integral(&s.derivs, &linear, 1)? + 0.5).abs()))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let u_err = sine
        .states
        .iter()
        .map(|s| (s.u() - s.t.sin()).abs())
        .fold(0.0, f64::max);
    Ok(vec![
        Case::at_most(
            "first_integral_drift",
            drift,
            1e-8,
            json!({"m": m, "q": p.exponent(), "free_data": free, "steps": traj.states.len(), "max_drift": drift, "extension": nl.extension()}),
        ),
        Case::at_most("sine_first_integral", h_err, 1e-10, json!({"max_error": h_err})),
        Case::at_most("sine_trajectory", u_err, 1e-8, json!({"max_error": u_err})),
    ])
}

const SUP_NORMS: [f64; 4] = [1e1, 1e2, 1e3, 1e4];

fn rescale(cfg: &SuiteConfig) -> Result<Vec<Case>> {
    let p = cfg.params;
    let (n, m) = (p.dim(), p.order());
    let center = Point((0..n).map(|i| 0.1 * (i + 1) as f64).collect());
    let samples = ball_points(n, 16, 1.0, cfg.seed).into_iter().map(Point).collect::<Vec<_>>();
    let mut cases = Vec::new();
    for order in 0..2 * m {
        let mut alpha = vec![0; n];
        alpha[0] = order;
        let c = CoefficientMap::new(alpha, |x: &[f64]| 1.5 + 0.5 * x[0].cos());
        let r = lower_order_vanishing(&p, &center, &SUP_NORMS, &c, &samples)?;
        cases.push(Case::at_most(
            format!("coefficient_exponent |alpha| = {order}"),
            r.relative_error,
            0.05,
            json!({"fitted": r.fitted_slope, "expected": r.expected_slope}),
        ));
    }
    let u = |x: &[f64]| (x[0] + 0.5 * x.get(1).copied().unwrap_or(0.0)).exp();
    for order in 1..=2 * m {
        let mut alpha = vec![0; n];
        alpha[0] = order;
        let origin = vec![0.0; n];
        let values: Vec<f64> = SUP_NORMS
            .iter()
            .map(|&big| {
                let s = RescaleSpec::new(big, center.clone(), p)?;
                let v = rescale_field(&s, u);
                Ok(finite_difference(&|y: &[f64]| v.eval(y), &origin, &alpha, 0.1).abs())
            })
            .collect::<Result<_>>()?;
        let fitted = log_log_slope(&SUP_NORMS, &values)?;
        let expected = derivative_exponent(&p, order);
        let rel = ((fitted - expected) / expected).abs();
        cases.push(Case::at_most(
            format!("derivative_exponent |alpha| = {order}"),
            rel,
            0.05,
            json!({"fitted": fitted, "expected": expected}),
        ));
    }
    Ok(cases)
}

fn averages(cfg: &SuiteConfig) -> Result<Vec<Case>> {
    let n = cfg.params.dim();
    let spec = QuadratureSpec::default();
    let radii = [0.5, 1.0, 2.0];
    let a: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * i as f64).collect();
    let mut worst = [0.0f64; 3];
    for &r in &radii {
        let c = spherical_average(&|_: &[f64]| 3.25, n, r, &spec)?;
        worst[0] = worst[0].max((c - 3.25).abs());
        let l = spherical_average(&|x: &[f64]| dot(&a, x) - 0.75, n, r, &spec)?;
        worst[1] = worst[1].max((l + 0.75).abs());
        // x^T diag(a) x averages to r^2 tr(diag a) / N
        let q = spherical_average(&|x: &[f64]| x.iter().zip(&a).map(|(xi, ai)| ai * xi * xi).sum(), n, r, &spec)?;
        let want = r * r * a.iter().sum::<f64>() / n as f64;
        worst[2] = worst[2].max((q - want).abs());
    }
    let mut cases: Vec<Case> = ["average_constant", "average_linear", "average_quadratic"]
        .iter()
        .zip(worst)
        .map(|(name, w)| Case::at_most(*name, w, 1e-8, json!({"max_error": w, "radii": radii})))
        .collect();

    let count = cfg.samples_or(100);
    let mut ld = LowDiscrepancy::new(5, cfg.seed);
    let mut min_gap = f64::INFINITY;
    for k in 0..count {
        let u = ld.next_point();
        let (b0, b1, b2, r) = (4.0 * u[0] - 2.0, 4.0 * u[1] - 2.0, 3.0 * u[2], 0.25 + 1.75 * u[3]);
        let w = move |x: &[f64]| b0 * x[0] + b1 * x[n - 1] * x[n - 1] + b2 * (3.0 * x[0]).sin();
        let convex: fn(f64) -> f64 = match k % 3 {
            0 => f64::exp,
            1 => |t| t * t,
            _ => |t| t.abs().powi(3),
        };
        let mean = spherical_average(&w, n, r, &spec)?;
        let mean_of_convex = spherical_average(&|x: &[f64]| convex(w(x)), n, r, &spec)?;
        min_gap = min_gap.min(mean_of_convex - convex(mean));
        let _ = u[4];
    }
    cases.push(Case::at_least(
        "jensen",
        min_gap,
        -1e-10,
        json!({"samples": count, "min_gap": min_gap}),
    ));
    Ok(cases)
}
