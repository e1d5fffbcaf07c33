//! Reflections across hyperplanes `{x . e = lambda}` with `e` orthogonal to `e_1`,
//! sampled checks of the reflection inequalities of the ball Green function, and
//! axial-symmetry measurements of lattice fields.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::geometry::{dist, dot, norm_sq, BallGeometry};
use crate::kernels::{GreenFunction, KernelParams, Point};
use crate::sampling::{ball_point, ball_uniforms, direction_uniforms, unit_direction, LowDiscrepancy};
use crate::semilinear::GridFunction;

/// Direction `e` (unit, orthogonal to `e_1`) and offset `lambda >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReflectionSpec {
    direction: Point,
    lambda: f64,
}

impl ReflectionSpec {
    pub fn new(direction: Vec<f64>, lambda: f64) -> Result<Self> {
        if direction.len() < 2 {
            return Err(Error::InvalidParameter(
                "reflections orthogonal to e_1 need N >= 2".into(),
            ));
        }
        if (norm_sq(&direction).sqrt() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter("reflection direction must be a unit vector".into()));
        }
        if direction[0].abs() > 1e-12 {
            return Err(Error::InvalidParameter(
                "reflection direction must be orthogonal to e_1".into(),
            ));
        }
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!("lambda must be non-negative, got {lambda}")));
        }
        Ok(ReflectionSpec {
            direction: Point(direction),
            lambda,
        })
    }

    /// Reflection across `{x_2 = lambda}` in `R^n`.
    pub fn along_second_axis(n: usize, lambda: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(
                "reflections orthogonal to e_1 need N >= 2".into(),
            ));
        }
        Self::new(Point::unit(n, 1).0, lambda)
    }

    pub fn direction(&self) -> &[f64] {
        &self.direction
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn dim(&self) -> usize {
        self.direction.len()
    }

    /// Signed distance `x . e - lambda` to the hyperplane.
    pub fn offset(&self, x: &[f64]) -> f64 {
        dot(x, &self.direction) - self.lambda
    }
}

/// `x^lambda = x - 2 (x . e - lambda) e`.
pub fn reflect(spec: &ReflectionSpec, x: &[f64]) -> Point {
    let t = 2.0 * spec.offset(x);
    Point(x.iter().zip(spec.direction.iter()).map(|(a, e)| a - t * e).collect())
}

/// The sets on which the reflection inequalities are stated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SampleLabel {
    /// `H_lambda cap B = {x in B : x . e > lambda}`
    HLambdaCapB,
    /// `J_lambda = {x in B : x . e < lambda, x^lambda not in B}`
    JLambda,
    /// `W_mu = {x in H_mu cap B : v(x^mu) - v(x) < 0}` for a field `v`
    WMu,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub points: Vec<Point>,
    pub label: SampleLabel,
}

/// Builds a point from its coordinate `t` along `e` and its component orthogonal to `e`.
fn assemble(spec: &ReflectionSpec, t: f64, orth: &[f64]) -> Vec<f64> {
    // orth lives in the (N-1)-dimensional complement spanned by a frame orthogonal to e
    let e = spec.direction();
    let n = e.len();
    let frame = crate::quadrature::sphere::frame_from_axis(e);
    let mut x: Vec<f64> = e.iter().map(|c| t * c).collect();
    for (k, c) in orth.iter().enumerate() {
        for i in 0..n {
            x[i] += c * frame[k + 1][i];
        }
    }
    x
}

/// Number of uniforms one call of [`h_lambda_point`] consumes.
fn h_lambda_uniforms(n: usize) -> usize {
    1 + ball_uniforms(n - 1)
}

/// A point of `H_lambda cap B`: its `e`-coordinate is uniform on `(lambda, 1)` and the
/// orthogonal part uniform in the admissible `(N-1)`-ball.
fn h_lambda_point(spec: &ReflectionSpec, u: &[f64]) -> Vec<f64> {
    let n = spec.dim();
    let lam = spec.lambda;
    let t = lam + (1.0 - lam) * u[0];
    let rad = (1.0 - t * t).max(0.0).sqrt();
    let orth = ball_point(&u[1..], n - 1, rad);
    assemble(spec, t, &orth)
}

fn j_lambda_uniforms(n: usize) -> usize {
    2 + direction_uniforms(n - 1)
}

/// A point of `J_lambda`: `e`-coordinate `s in (-1, lambda)`, orthogonal radius between
/// `sqrt(1 - (2 lambda - s)^2)` (reflection leaves the ball) and `sqrt(1 - s^2)`.
fn j_lambda_point(spec: &ReflectionSpec, u: &[f64]) -> Vec<f64> {
    let n = spec.dim();
    let lam = spec.lambda;
    let s = -1.0 + (1.0 + lam) * u[0];
    let outer = (1.0 - s * s).max(0.0).sqrt();
    let refl = 2.0 * lam - s;
    let inner = (1.0 - refl * refl).max(0.0).sqrt();
    let rho = inner + (outer - inner) * u[1];
    let dir = unit_direction(&u[2..], n - 1);
    let orth: Vec<f64> = dir.iter().map(|c| rho * c).collect();
    assemble(spec, s, &orth)
}

/// Points of `H_lambda cap B` from a seeded low-discrepancy stream.
pub fn sample_h_lambda(spec: &ReflectionSpec, count: usize, seed: u64) -> SampleSet {
    let n = spec.dim();
    let mut ld = LowDiscrepancy::new(h_lambda_uniforms(n), seed);
    let ball = BallGeometry::unit_ball();
    let mut points = Vec::with_capacity(count);
    while points.len() < count {
        let p = h_lambda_point(spec, &ld.next_point());
        if spec.offset(&p) > 0.0 && ball.contains_open(&p) {
            points.push(Point(p));
        }
    }
    SampleSet {
        points,
        label: SampleLabel::HLambdaCapB,
    }
}

/// Points of `J_lambda` (empty for `lambda = 0`).
pub fn sample_j_lambda(spec: &ReflectionSpec, count: usize, seed: u64) -> SampleSet {
    let n = spec.dim();
    let ball = BallGeometry::unit_ball();
    let mut points = Vec::with_capacity(count);
    if spec.lambda > 0.0 {
        let mut ld = LowDiscrepancy::new(j_lambda_uniforms(n), seed);
        while points.len() < count {
            let p = j_lambda_point(spec, &ld.next_point());
            if in_j_lambda(spec, &p) && ball.contains_open(&p) {
                points.push(Point(p));
            }
        }
    }
    SampleSet {
        points,
        label: SampleLabel::JLambda,
    }
}

fn in_j_lambda(spec: &ReflectionSpec, p: &[f64]) -> bool {
    spec.offset(p) < 0.0 && norm_sq(p) < 1.0 && norm_sq(&reflect(spec, p)) >= 1.0
}

/// Points of `W_mu` for the field `v`, filtered from `candidates` samples of `H_mu cap B`.
pub fn sample_w_mu<V>(spec: &ReflectionSpec, v: &V, candidates: usize, seed: u64) -> SampleSet
where
    V: Fn(&[f64]) -> f64,
{
    let h = sample_h_lambda(spec, candidates, seed);
    let points = h
        .points
        .into_iter()
        .filter(|p| v(&reflect(spec, p)) - v(p) < 0.0)
        .collect();
    SampleSet {
        points,
        label: SampleLabel::WMu,
    }
}

/// Outcome of one sampled inequality family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub inequality_id: String,
    pub samples: usize,
    pub min_margin: f64,
    pub violations: usize,
}

impl InequalityReport {
    fn new(id: &str) -> Self {
        InequalityReport {
            inequality_id: id.into(),
            samples: 0,
            min_margin: f64::INFINITY,
            violations: 0,
        }
    }

    fn record(&mut self, margin: f64, tol: f64) {
        self.samples += 1;
        self.min_margin = self.min_margin.min(margin);
        if margin < -tol {
            self.violations += 1;
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.samples += other.samples;
        self.min_margin = self.min_margin.min(other.min_margin);
        self.violations += other.violations;
        self
    }
}

pub const REFLECTED_PAIR: &str = "reflected_pair";
pub const REFLECTED_DIFFERENCE: &str = "reflected_difference";
pub const EXTERIOR_REFLECTION: &str = "exterior_reflection";

/// The three margins for one tuple `(x, y, z)` with `x, y in H_lambda cap B` and
/// `z in J_lambda`:
///
/// 1. `G(x^l, y^l) - G(x, y^l)`
/// 2. `G(x^l, y^l) - G(x, y) - G(x, y^l) + G(x^l, y)`
/// 3. `G(x^l, z) - G(x, z)`
pub fn reflection_margins(
    green: &GreenFunction,
    spec: &ReflectionSpec,
    x: &[f64],
    y: &[f64],
    z: Option<&[f64]>,
) -> Result<(f64, f64, Option<f64>)> {
    let xl = reflect(spec, x);
    let yl = reflect(spec, y);
    let g_xl_yl = green.eval(&xl, &yl)?;
    let g_x_yl = green.eval(x, &yl)?;
    let g_x_y = green.eval(x, y)?;
    let g_xl_y = green.eval(&xl, y)?;
    let first = g_xl_yl - g_x_yl;
    let second = (g_xl_yl - g_x_y) - (g_x_yl - g_xl_y);
    let third = match z {
        Some(z) => Some(green.eval(&xl, z)? - green.eval(x, z)?),
        None => None,
    };
    Ok((first, second, third))
}

/// Samples `n_samples` admissible tuples and reports the minimal margin and the number
/// of violations below `-margin_tol` for each inequality family. The domain is the
/// unit ball; `lambda` must lie in `(0, 1)`.
pub fn check_reflection_inequalities(
    params: &KernelParams,
    spec: &ReflectionSpec,
    n_samples: usize,
    margin_tol: f64,
    seed: u64,
) -> Result<Vec<InequalityReport>> {
    if spec.dim() != params.dim() {
        return Err(Error::DimensionMismatch {
            expected: params.dim(),
            got: spec.dim(),
        });
    }
    if !(spec.lambda > 0.0 && spec.lambda < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "lambda must lie in (0, 1), got {}",
            spec.lambda
        )));
    }
    if n_samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    let green = GreenFunction::new(*params, BallGeometry::unit_ball());
    let xs = sample_h_lambda(spec, n_samples, seed);
    let ys = sample_h_lambda(spec, n_samples, seed.wrapping_add(0x9e37_79b9));
    let zs = sample_j_lambda(spec, n_samples, seed.wrapping_add(0x7f4a_7c15));
    let empty = || {
        [
            InequalityReport::new(REFLECTED_PAIR),
            InequalityReport::new(REFLECTED_DIFFERENCE),
            InequalityReport::new(EXTERIOR_REFLECTION),
        ]
    };
    let merged = (0..n_samples)
        .into_par_iter()
        .map(|i| -> Result<[InequalityReport; 3]> {
            let mut r = empty();
            let (x, y, z) = (&xs.points[i], &ys.points[i], &zs.points[i]);
            // coincident draws carry no information about the inequalities
            if dist(x, y) == 0.0 {
                return Ok(r);
            }
            let (a, b, c) = reflection_margins(&green, spec, x, y, Some(z))?;
            r[0].record(a, margin_tol);
            r[1].record(b, margin_tol);
            if let Some(c) = c {
                r[2].record(c, margin_tol);
            }
            Ok(r)
        })
        .try_reduce(empty, |a, b| {
            let [a0, a1, a2] = a;
            let [b0, b1, b2] = b;
            Ok([a0.merge(b0), a1.merge(b1), a2.merge(b2)])
        })?;
    Ok(merged.to_vec())
}

/// Largest relative spread `(max - min) / (1 + |mean|)` over the rotation orbits
/// about the first axis recorded in the lattice.
pub fn axial_symmetry_defect(field: &GridFunction) -> Result<f64> {
    let lattice = field.lattice();
    let mut orbits: BTreeMap<(usize, usize), (f64, f64, f64, usize)> = BTreeMap::new();
    for (node, &v) in lattice.nodes().iter().zip(field.values()) {
        let key = node.orbit.ok_or(Error::IncompatibleLattice)?;
        let e = orbits
            .entry(key)
            .or_insert((f64::INFINITY, f64::NEG_INFINITY, 0.0, 0));
        e.0 = e.0.min(v);
        e.1 = e.1.max(v);
        e.2 += v;
        e.3 += 1;
    }
    Ok(orbits
        .values()
        .map(|&(lo, hi, sum, count)| (hi - lo) / (1.0 + (sum / count as f64).abs()))
        .fold(0.0, f64::max))
}

/// Empirical constant in `G_1(x, y) <= c |x - y|^{1-N}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub samples: usize,
    pub max_ratio: f64,
    pub min_ratio: f64,
    pub worst_pair: (Point, Point),
}

/// Samples `n_samples` pairs of the unit ball and records `G_1(x,y) |x-y|^{N-1}`.
pub fn kernel_pointwise_bound_check(params: &KernelParams, n_samples: usize, seed: u64) -> Result<BoundReport> {
    let n = params.dim();
    if n < 2 {
        return Err(Error::InvalidParameter("the pointwise bound is stated for N >= 2".into()));
    }
    if n_samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    let green = GreenFunction::new(*params, BallGeometry::unit_ball());
    let k = ball_uniforms(n);
    let mut ld = LowDiscrepancy::new(2 * k, seed);
    let mut report = BoundReport {
        samples: 0,
        max_ratio: 0.0,
        min_ratio: f64::INFINITY,
        worst_pair: (Point::origin(n), Point::origin(n)),
    };
    while report.samples < n_samples {
        let u = ld.next_point();
        let x = ball_point(&u[..k], n, 1.0);
        let y = ball_point(&u[k..], n, 1.0);
        if x == y {
            continue;
        }
        let ratio = green.eval(&x, &y)? * dist(&x, &y).powi(n as i32 - 1);
        report.samples += 1;
        report.min_ratio = report.min_ratio.min(ratio);
        if ratio > report.max_ratio {
            report.max_ratio = ratio;
            report.worst_pair = (Point(x), Point(y));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reflection_examples() {
        let s = ReflectionSpec::along_second_axis(3, 0.0).unwrap();
        assert_eq!(reflect(&s, &[0.0, 1.0, 0.0]).0, vec![0.0, -1.0, 0.0]);
        let s = ReflectionSpec::along_second_axis(3, 0.4).unwrap();
        let on_plane = [0.3, 0.4, -0.2];
        assert_eq!(reflect(&s, &on_plane).0, on_plane.to_vec());
    }

    #[test]
    fn spec_validation() {
        assert!(ReflectionSpec::new(vec![1.0, 0.0, 0.0], 0.2).is_err());
        assert!(ReflectionSpec::new(vec![0.0, 0.6, 0.6], 0.2).is_err());
        assert!(ReflectionSpec::new(vec![0.0, 0.6, 0.8], -0.1).is_err());
    }

    #[test]
    fn samples_satisfy_predicates() {
        let s = ReflectionSpec::new(vec![0.0, 0.6, 0.8], 0.3).unwrap();
        for p in sample_h_lambda(&s, 200, 3).points {
            assert!(s.offset(&p) > 0.0 && norm_sq(&p) < 1.0);
        }
        for p in sample_j_lambda(&s, 200, 3).points {
            assert!(in_j_lambda(&s, &p));
        }
    }

    #[test]
    fn margins_vanish_on_the_plane() {
        let p = KernelParams::kernel(3, 1).unwrap();
        let g = GreenFunction::new(p, BallGeometry::unit_ball());
        let s = ReflectionSpec::along_second_axis(3, 0.3).unwrap();
        let x = [0.1, 0.3, 0.2];
        let y = [-0.2, 0.5, 0.1];
        let z = [0.0, 0.2, 0.9];
        let (a, b, c) = reflection_margins(&g, &s, &x, &y, Some(&z)).unwrap();
        assert!(a.abs() < 1e-15 && b.abs() < 1e-15 && c.unwrap().abs() < 1e-15);
    }

    #[test]
    fn classical_inequalities_hold() {
        let p = KernelParams::kernel(3, 1).unwrap();
        let s = ReflectionSpec::along_second_axis(3, 0.3).unwrap();
        let reports = check_reflection_inequalities(&p, &s, 2000, 1e-12, 11).unwrap();
        assert_eq!(reports.len(), 3);
        for r in reports {
            assert_eq!(r.samples, 2000);
            assert_eq!(r.violations, 0, "{}", r.inequality_id);
        }
    }
}
