//! Seeded low-discrepancy point generation.
//!
//! Points come from the additive recurrence `frac(s + k a)` with
//! `a_j = phi_d^{-(j+1)}`, `phi_d` the positive root of `x^{d+1} = x + 1`
//! (the generalized golden ratio). The seed fixes the random shift `s`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Stream of points in the open unit cube `(0, 1)^d`.
#[derive(Debug, Clone)]
pub struct LowDiscrepancy {
    alpha: Vec<f64>,
    shift: Vec<f64>,
    index: u64,
}

fn generalized_golden_ratio(d: usize) -> f64 {
    let p = (d + 1) as i32;
    let mut x = 2.0f64;
    for _ in 0..60 {
        let f = x.powi(p) - x - 1.0;
        let df = p as f64 * x.powi(p - 1) - 1.0;
        let step = f / df;
        x -= step;
        if step.abs() < 1e-16 {
            break;
        }
    }
    x
}

impl LowDiscrepancy {
    pub fn new(dim: usize, seed: u64) -> Self {
        let g = generalized_golden_ratio(dim);
        let alpha = (1..=dim).map(|j| g.powi(-(j as i32))).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shift = (0..dim).map(|_| rng.gen::<f64>()).collect();
        LowDiscrepancy {
            alpha,
            shift,
            index: 1,
        }
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    pub fn next_point(&mut self) -> Vec<f64> {
        let k = self.index as f64;
        self.index += 1;
        self.alpha
            .iter()
            .zip(&self.shift)
            .map(|(a, s)| {
                let v = (s + k * a).fract();
                v.clamp(1e-300, 1.0 - f64::EPSILON)
            })
            .collect()
    }
}

/// Uniforms consumed by [`unit_direction`] in `R^k`.
pub fn direction_uniforms(k: usize) -> usize {
    2 * k.div_ceil(2)
}

/// A unit vector in `R^k` from `direction_uniforms(k)` uniforms (Box-Muller, normalized).
pub fn unit_direction(u: &[f64], k: usize) -> Vec<f64> {
    let mut g = Vec::with_capacity(k + 1);
    for pair in u.chunks_exact(2).take(k.div_ceil(2)) {
        let r = (-2.0 * pair[0].ln()).sqrt();
        let (s, c) = (2.0 * std::f64::consts::PI * pair[1]).sin_cos();
        g.push(r * c);
        g.push(r * s);
    }
    g.truncate(k);
    let norm = g.iter().map(|c| c * c).sum::<f64>().sqrt();
    if norm == 0.0 {
        let mut e = vec![0.0; k];
        e[0] = 1.0;
        return e;
    }
    g.iter().map(|c| c / norm).collect()
}

/// Uniforms consumed by [`ball_point`] in `R^k`.
pub fn ball_uniforms(k: usize) -> usize {
    1 + direction_uniforms(k)
}

/// A point of the open ball of radius `radius` in `R^k`, uniformly distributed when
/// the uniforms are.
pub fn ball_point(u: &[f64], k: usize, radius: f64) -> Vec<f64> {
    if k == 0 {
        return Vec::new();
    }
    let r = radius * u[0].powf(1.0 / k as f64);
    unit_direction(&u[1..], k).into_iter().map(|c| r * c).collect()
}
