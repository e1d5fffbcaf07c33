//! Product rules on unit spheres and an adaptive integrator over directions.
//!
//! `S^d` is sliced by its first coordinate `t`: a Gauss rule for the weight
//! `(1 - t^2)^{(d-2)/2}` picks the slices and each slice carries a scaled copy of
//! a rule on `S^{d-1}`. The circle uses the trapezoidal rule and `S^0` its two points.
//! Every node remembers its slice, which is the rotation orbit about the first axis.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use once_cell::sync::Lazy;

use super::gauss::gegenbauer;
use super::gauss_kronrod::{integrate_adaptive, kronrod15, CANCELLATION_FLOOR};
use super::{Estimate, QuadratureSpec};
use crate::error::{Error, Result};

/// Area of the unit sphere `S^{n-1}` in `R^n`.
pub fn sphere_area(n: usize) -> f64 {
    n as f64 * crate::kernels::unit_ball_volume(n)
}

/// Product rule on `S^d`, stored with row-major points in `R^{d+1}`.
#[derive(Debug, Clone)]
pub struct SphereRule {
    ambient: usize,
    points: Vec<f64>,
    weights: Vec<f64>,
    slices: Vec<usize>,
}

impl SphereRule {
    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.ambient..(i + 1) * self.ambient]
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    /// Index of the first-coordinate slice containing node `i`.
    pub fn slice(&self, i: usize) -> usize {
        self.slices[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.points
            .chunks_exact(self.ambient)
            .zip(self.weights.iter().copied())
    }

    fn build(d: usize, level: usize) -> SphereRule {
        match d {
            0 => SphereRule {
                ambient: 1,
                points: vec![-1.0, 1.0],
                weights: vec![1.0, 1.0],
                slices: vec![0, 1],
            },
            1 => {
                let n = 2 * level.max(1);
                let mut points = Vec::with_capacity(2 * n);
                let mut slices = Vec::with_capacity(n);
                for j in 0..n {
                    let a = 2.0 * PI * (j as f64 + 0.5) / n as f64;
                    points.push(a.cos());
                    points.push(a.sin());
                    slices.push(j.min(n - 1 - j));
                }
                SphereRule {
                    ambient: 2,
                    points,
                    weights: vec![2.0 * PI / n as f64; n],
                    slices,
                }
            }
            _ => {
                let sub = sphere_rule(d - 1, level);
                let t_rule = gegenbauer(level.max(1), (d as f64 - 2.0) / 2.0);
                let ambient = d + 1;
                let count = t_rule.len() * sub.len();
                let mut points = Vec::with_capacity(count * ambient);
                let mut weights = Vec::with_capacity(count);
                let mut slices = Vec::with_capacity(count);
                for (k, (&t, &wt)) in t_rule.nodes.iter().zip(&t_rule.weights).enumerate() {
                    let s = (1.0 - t * t).sqrt();
                    for (p, w) in sub.iter() {
                        points.push(t);
                        points.extend(p.iter().map(|c| s * c));
                        weights.push(wt * w);
                        slices.push(k);
                    }
                }
                SphereRule {
                    ambient,
                    points,
                    weights,
                    slices,
                }
            }
        }
    }
}

static RULES: Lazy<Mutex<HashMap<(usize, usize), Arc<SphereRule>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Product rule on `S^d` with `level` slices per polar level, exact for
/// polynomials of degree `2 * level - 1`.
pub fn sphere_rule(d: usize, level: usize) -> Arc<SphereRule> {
    let key = (d, if d == 0 { 0 } else { level.max(1) });
    if let Some(r) = RULES.lock().expect("sphere rule cache poisoned").get(&key) {
        return Arc::clone(r);
    }
    let rule = Arc::new(SphereRule::build(d, level));
    RULES
        .lock()
        .expect("sphere rule cache poisoned")
        .insert(key, Arc::clone(&rule));
    rule
}

/// Number of nodes of `sphere_rule(d, level)` without building it.
fn rule_size(d: usize, level: usize) -> usize {
    match d {
        0 => 2,
        1 => 2 * level.max(1),
        _ => level.max(1) * rule_size(d - 1, level),
    }
}

/// Orthonormal frame of `R^n` whose first vector is `axis` (unit length).
/// Built from the Householder reflection that sends `e_1` to `axis`.
pub fn frame_from_axis(axis: &[f64]) -> Vec<Vec<f64>> {
    let n = axis.len();
    let mut v: Vec<f64> = axis.iter().map(|a| -a).collect();
    v[0] += 1.0;
    let vv: f64 = v.iter().map(|c| c * c).sum();
    (0..n)
        .map(|k| {
            let mut col = vec![0.0; n];
            col[k] = 1.0;
            if vv > 1e-30 {
                let f = 2.0 * v[k] / vv;
                col.iter_mut().zip(&v).for_each(|(c, vi)| *c -= f * vi);
            }
            col
        })
        .collect()
}

/// Largest inner rule allowed by the dimension-adaptive probe.
const MAX_INNER_NODES: usize = 20_000;

/// Integrates `g` over the unit sphere `S^{n-1}` in polar form around `axis`:
/// adaptive Gauss-Kronrod in the polar angle, a probed product rule on the
/// orthogonal `S^{n-2}`.
pub fn integrate_directions<G>(n: usize, axis: &[f64], g: &G, spec: &QuadratureSpec) -> Result<Estimate>
where
    G: Fn(&[f64]) -> f64,
{
    if n == 0 || axis.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: axis.len(),
        });
    }
    if n == 1 {
        let value = g(&[axis[0]]) + g(&[-axis[0]]);
        return Ok(Estimate { value, error: 0.0 });
    }
    let frame = frame_from_axis(axis);
    let d = n - 2;
    let tol = spec.target_rel_error;

    // directions orthogonal to the axis for the inner rule
    let embed = |rule: &SphereRule| -> Vec<(Vec<f64>, f64)> {
        rule.iter()
            .map(|(p, w)| {
                let mut v = vec![0.0; n];
                for (k, c) in p.iter().enumerate() {
                    v.iter_mut().zip(&frame[k + 1]).for_each(|(a, b)| *a += c * b);
                }
                (v, w)
            })
            .collect()
    };
    // weighted sum over a slice and the matching sum of absolute values
    let slice_sums = |nodes: &[(Vec<f64>, f64)], phi: f64, buf: &mut Vec<f64>| -> (f64, f64) {
        let (s, c) = phi.sin_cos();
        let (mut acc, mut mag) = (0.0, 0.0);
        for (v, w) in nodes {
            buf.iter_mut()
                .zip(&frame[0])
                .zip(v)
                .for_each(|((b, a), o)| *b = c * a + s * o);
            let t = w * g(buf);
            acc += t;
            mag += t.abs();
        }
        (acc, mag)
    };

    let inner = if d == 0 {
        embed(&sphere_rule(0, 1))
    } else {
        let probes = [0.37, 1.21, 1.93, 2.71];
        let mut buf = vec![0.0; n];
        let mut level = 1;
        let mut current = embed(&sphere_rule(d, level));
        let mut values: Vec<f64> = probes.iter().map(|&p| slice_sums(&current, p, &mut buf).0).collect();
        loop {
            let next_level = 2 * level;
            if rule_size(d, next_level) > MAX_INNER_NODES {
                break;
            }
            let next = embed(&sphere_rule(d, next_level));
            let sums: Vec<(f64, f64)> = probes.iter().map(|&p| slice_sums(&next, p, &mut buf)).collect();
            let scale = sums
                .iter()
                .fold(0.0f64, |m, (v, a)| m.max(v.abs()).max(CANCELLATION_FLOOR * a));
            let next_values: Vec<f64> = sums.iter().map(|s| s.0).collect();
            let diff = values
                .iter()
                .zip(&next_values)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            level = next_level;
            current = next;
            values = next_values;
            if diff <= (0.1 * tol * scale).max(spec.abs_tolerance) || scale == 0.0 {
                break;
            }
        }
        current
    };

    let weight_power = (n - 2) as i32;
    let outer = |phi: f64| {
        let mut buf = vec![0.0; n];
        phi.sin().powi(weight_power) * slice_sums(&inner, phi, &mut buf).0
    };
    // slices may cancel exactly by symmetry, so the cancellation floor has to come
    // from the absolute values of their terms
    let outer_abs = |phi: f64| {
        let mut buf = vec![0.0; n];
        phi.sin().powi(weight_power) * slice_sums(&inner, phi, &mut buf).1
    };
    let magnitude = kronrod15(&outer_abs, 0.0, PI).0;
    let abs_tol = spec.abs_tolerance.max(tol * CANCELLATION_FLOOR * magnitude);
    let r = integrate_adaptive(&outer, 0.0, PI, tol, abs_tol, spec.max_subdivisions);
    if !r.converged {
        return Err(Error::BudgetExceeded {
            max_subdivisions: spec.max_subdivisions,
            estimated_error: r.error,
        });
    }
    Ok(Estimate {
        value: r.value,
        error: r.error,
    })
}
