//! Gauss rules for the weights `(1 - t^2)^a` on `[-1, 1]` (Legendre for `a = 0`).
//!
//! Nodes come from the Golub-Welsch eigenproblem and are then polished by Newton
//! steps on the orthonormal recurrence; weights are Christoffel numbers.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use nalgebra::{DMatrix, SymmetricEigen};
use once_cell::sync::Lazy;

/// A one-dimensional rule: nodes ascending, weights positive.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Affine image on `[lo, hi]` (Legendre rules only).
    pub fn mapped(&self, lo: f64, hi: f64) -> Rule {
        let c = 0.5 * (lo + hi);
        let h = 0.5 * (hi - lo);
        Rule {
            nodes: self.nodes.iter().map(|t| c + h * t).collect(),
            weights: self.weights.iter().map(|w| w * h).collect(),
        }
    }
}

/// `\int_{-1}^{1} (1 - t^2)^a dt` for integer or half-integer `a >= -1/2`.
pub fn gegenbauer_mass(a: f64) -> f64 {
    let twice = (2.0 * a).round() as i64;
    debug_assert!((2.0 * a - twice as f64).abs() < 1e-12 && twice >= -1);
    let (mut value, mut k) = if twice % 2 == 0 {
        (2.0, 0)
    } else {
        (std::f64::consts::PI, -1)
    };
    while k < twice {
        k += 2;
        let ak = k as f64 / 2.0;
        value *= 2.0 * ak / (2.0 * ak + 1.0);
    }
    value
}

/// Monic recurrence coefficient `beta_k` (k >= 1) for the weight `(1-t^2)^a`.
fn beta(k: usize, lambda: f64) -> f64 {
    let k = k as f64;
    if k == 1.0 {
        1.0 / (2.0 * (1.0 + lambda))
    } else {
        k * (k + 2.0 * lambda - 1.0) / (4.0 * (k + lambda) * (k + lambda - 1.0))
    }
}

fn compute_rule(n: usize, a: f64) -> Rule {
    assert!(n >= 1);
    let lambda = a + 0.5;
    let mass = gegenbauer_mass(a);
    let off: Vec<f64> = (1..n).map(|k| beta(k, lambda).sqrt()).collect();
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for (i, &b) in off.iter().enumerate() {
        jac[(i, i + 1)] = b;
        jac[(i + 1, i)] = b;
    }
    let mut nodes: Vec<f64> = SymmetricEigen::new(jac).eigenvalues.iter().copied().collect();
    nodes.sort_by(f64::total_cmp);

    let sqrt_bn = beta(n, lambda).sqrt();
    let p0 = 1.0 / mass.sqrt();
    // orthonormal values p_0..p_{n-1} and the pair (p_n, p_n')
    let eval = |t: f64| -> (f64, f64, f64) {
        let (mut p_prev, mut p) = (0.0, p0);
        let (mut d_prev, mut d) = (0.0, 0.0);
        let mut sum_sq = p * p;
        for k in 0..n {
            let b_next = if k + 1 < n { off[k] } else { sqrt_bn };
            let b_cur = if k == 0 { 0.0 } else { off[k - 1] };
            let p_next = (t * p - b_cur * p_prev) / b_next;
            let d_next = (p + t * d - b_cur * d_prev) / b_next;
            p_prev = p;
            p = p_next;
            d_prev = d;
            d = d_next;
            if k + 1 < n {
                sum_sq += p * p;
            }
        }
        (p, d, sum_sq)
    };
    let mut weights = Vec::with_capacity(n);
    for t in nodes.iter_mut() {
        for _ in 0..3 {
            let (p, d, _) = eval(*t);
            if d == 0.0 {
                break;
            }
            let step = p / d;
            *t -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, _, s) = eval(*t);
        weights.push(1.0 / s);
    }
    // enforce exact symmetry
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let t = 0.5 * (nodes[j] - nodes[i]);
        nodes[i] = -t;
        nodes[j] = t;
        let w = 0.5 * (weights[i] + weights[j]);
        weights[i] = w;
        weights[j] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Rule { nodes, weights }
}

static CACHE: Lazy<Mutex<HashMap<(usize, i64), Arc<Rule>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// `n`-point Gauss rule for `(1 - t^2)^a`, `a` an integer or half-integer `>= -1/2`.
pub fn gegenbauer(n: usize, a: f64) -> Arc<Rule> {
    let key = (n, (2.0 * a).round() as i64);
    if let Some(r) = CACHE.lock().expect("rule cache poisoned").get(&key) {
        return Arc::clone(r);
    }
    let rule = Arc::new(compute_rule(n, a));
    CACHE
        .lock()
        .expect("rule cache poisoned")
        .insert(key, Arc::clone(&rule));
    rule
}

/// `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn legendre(n: usize) -> Arc<Rule> {
    gegenbauer(n, 0.0)
}
