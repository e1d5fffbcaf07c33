//! Independent reference values shared by the integration tests.

#![allow(dead_code)]

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Volume of the unit ball by the recursion `e_N = 2 pi e_{N-2} / N`.
pub fn ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / n as f64 * ball_volume(n - 2),
    }
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `1 / (N e_N 4^{m-1} ((m-1)!)^2)`
pub fn boggio_constant(n: usize, m: usize) -> f64 {
    1.0 / (n as f64 * ball_volume(n) * 4f64.powi(m as i32 - 1) * factorial(m - 1).powi(2))
}

/// `2^m m! prod_{j<m} (N + 2j)`
pub fn bubble_constant(n: usize, m: usize) -> f64 {
    2f64.powi(m as i32) * factorial(m) * (0..m).map(|j| (n + 2 * j) as f64).product::<f64>()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
        return left + right + (left + right - whole) / 15.0;
    }
    simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson quadrature.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson(&f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Boggio's formula in the form
/// `k |x - y|^{2m-N} int_1^{A} (v^2 - 1)^{m-1} v^{1-N} dv`, `A = [x, y] / |x - y|`,
/// integrated in `t = log v`.
pub fn boggio_from_ratio(n: usize, m: usize, r: f64, ratio: f64) -> f64 {
    let upper = ratio.ln();
    let integrand = |t: f64| (2.0 * t).exp_m1().powi(m as i32 - 1) * ((2.0 - n as f64) * t).exp();
    let scale = integrand(upper).abs().max(integrand(0.0).abs()).max(1e-300) * upper;
    let profile = integrate(integrand, 0.0, upper, 1e-15 * scale);
    boggio_constant(n, m) * r.powf(2.0 * m as f64 - n as f64) * profile
}

/// Ball of radius one.
pub fn boggio_ball(m: usize, x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let r = dist(x, y);
    let bracket = (dot(x, x) * dot(y, y) - 2.0 * dot(x, y) + 1.0).sqrt();
    boggio_from_ratio(n, m, r, bracket / r)
}

/// Half-space `{x_1 > 0}`: the ratio is `|x - y*| / |x - y|` with `y*` the mirror image.
pub fn boggio_half_space(m: usize, x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let mut mirror = y.to_vec();
    mirror[0] = -mirror[0];
    let r = dist(x, y);
    boggio_from_ratio(n, m, r, dist(x, &mirror) / r)
}

/// The classical Dirichlet Green function of `-Delta` on the unit ball by image charges,
/// written through `[x, y]^2 - |x - y|^2 = (1 - |x|^2)(1 - |y|^2)` to avoid cancellation.
pub fn image_charge(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let r = dist(x, y);
    let bracket = (dot(x, x) * dot(y, y) - 2.0 * dot(x, y) + 1.0).sqrt();
    let gap = (1.0 - dot(x, x)) * (1.0 - dot(y, y));
    match n {
        2 => (gap / (r * r)).ln_1p() / (4.0 * PI),
        3 => gap / (r * bracket * (r + bracket)) / (4.0 * PI),
        _ => (r.powf(2.0 - n as f64) - bracket.powf(2.0 - n as f64)) / (n as f64 * (n as f64 - 2.0) * ball_volume(n)),
    }
}

/// Uniform point of the ball of radius `radius`.
pub fn ball_point<R: Rng>(rng: &mut R, n: usize, radius: f64) -> Vec<f64> {
    loop {
        let p: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if dot(&p, &p) < 1.0 {
            return p.into_iter().map(|c| c * radius).collect();
        }
    }
}

/// `(-Delta)^k` of the radial polynomial `sum_j c_j |x|^{2j}` in dimension `n`,
/// using `Delta |x|^{2j} = 2j (2j + n - 2) |x|^{2j - 2}`.
pub fn radial_neg_laplacian(coeffs: &[f64], n: usize, k: usize) -> Vec<f64> {
    let mut c = coeffs.to_vec();
    for _ in 0..k {
        c = (1..c.len())
            .map(|j| -c[j] * (2 * j) as f64 * (2 * j + n - 2) as f64)
            .collect();
        if c.is_empty() {
            c.push(0.0);
        }
    }
    c
}

/// Coefficients of `(1 - s)^m` in `s = |x|^2`.
pub fn bubble_coefficients(m: usize) -> Vec<f64> {
    (0..=m)
        .map(|j| {
            let binom = factorial(m) / (factorial(j) * factorial(m - j));
            if j % 2 == 0 { binom } else { -binom }
        })
        .collect()
}
