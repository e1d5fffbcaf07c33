//! Finite-difference derivatives `D_y^k G(x, y)` for bound checks.
//!
//! Tensor products of second-order central stencils with step
//! `h = max(1e-5, 1e-2 |x - y|)`, followed by one Richardson step on `h, h/2`.

use super::geometry::{check_dim, dist, BallGeometry};
use super::{GreenFunction, KernelParams};
use crate::error::{Error, Result};

/// Offsets (in units of `h`) and weights of the central stencil for the `k`-th
/// derivative, second-order accurate. Odd orders average the two half-shifted
/// even stencils, so offsets are integers in both cases.
pub fn central_stencil(k: usize) -> Vec<(i64, f64)> {
    if k == 0 {
        return vec![(0, 1.0)];
    }
    // k-th central difference delta^k with offsets j - k/2 (half-integers when k is odd)
    let mut binom = vec![1.0f64];
    for _ in 0..k {
        let mut next = vec![0.0; binom.len() + 1];
        for (i, b) in binom.iter().enumerate() {
            next[i] += b;
            next[i + 1] -= b;
        }
        binom = next;
    }
    // binom[j] = (-1)^j C(k, j); delta^k f = sum_j (-1)^j C(k,j) f(x + (k/2 - j) h)
    if k % 2 == 0 {
        let half = (k / 2) as i64;
        binom
            .iter()
            .enumerate()
            .map(|(j, &c)| (half - j as i64, c))
            .collect()
    } else {
        // mean of delta^k at x + h/2 and x - h/2
        let mut out: Vec<(i64, f64)> = Vec::new();
        let mut push = |off: i64, w: f64| {
            if let Some(e) = out.iter_mut().find(|e| e.0 == off) {
                e.1 += w;
            } else {
                out.push((off, w));
            }
        };
        let top = k.div_ceil(2) as i64;
        for (j, &c) in binom.iter().enumerate() {
            push(top - j as i64, 0.5 * c);
            push(top - 1 - j as i64, 0.5 * c);
        }
        out.retain(|e| e.1 != 0.0);
        out.sort_by_key(|e| -e.0);
        out
    }
}

fn tensor_difference<F: Fn(&[f64]) -> f64 + ?Sized>(
    f: &F,
    y: &[f64],
    stencils: &[Vec<(i64, f64)>],
    h: f64,
    order: usize,
) -> f64 {
    let n = y.len();
    let mut idx = vec![0usize; n];
    let mut acc = 0.0;
    let mut p = vec![0.0; n];
    loop {
        let mut w = 1.0;
        for i in 0..n {
            let (off, c) = stencils[i][idx[i]];
            w *= c;
            p[i] = y[i] + off as f64 * h;
        }
        acc += w * f(&p);
        let mut i = 0;
        loop {
            if i == n {
                return acc / h.powi(order as i32);
            }
            idx[i] += 1;
            if idx[i] < stencils[i].len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// `D^k f(y)` by tensor central differences with step `h` and one Richardson step.
pub fn finite_difference<F: Fn(&[f64]) -> f64 + ?Sized>(f: &F, y: &[f64], multiindex: &[usize], h: f64) -> f64 {
    let order: usize = multiindex.iter().sum();
    let stencils: Vec<Vec<(i64, f64)>> = multiindex.iter().map(|&k| central_stencil(k)).collect();
    let coarse = tensor_difference(f, y, &stencils, h, order);
    let fine = tensor_difference(f, y, &stencils, 0.5 * h, order);
    (4.0 * fine - coarse) / 3.0
}

/// `D_y^k G(x, y)` for a multi-index `k` with `|k| <= 2m` on a finite ball.
pub fn kernel_derivative(
    params: &KernelParams,
    geom: &BallGeometry,
    x: &[f64],
    y: &[f64],
    multiindex: &[usize],
) -> Result<f64> {
    let n = params.dim();
    check_dim(n, x)?;
    check_dim(n, y)?;
    if multiindex.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: multiindex.len(),
        });
    }
    if geom.is_half_space() {
        return Err(Error::InvalidParameter(
            "finite-difference derivatives need a finite ball".into(),
        ));
    }
    let order: usize = multiindex.iter().sum();
    if order > 2 * params.order() {
        return Err(Error::InvalidParameter(format!(
            "derivative order {order} exceeds 2m = {}",
            2 * params.order()
        )));
    }
    let green = GreenFunction::new(*params, *geom);
    if order == 0 {
        return green.eval(x, y);
    }
    if x == y {
        return Err(Error::CoincidentPoints);
    }
    geom.check_closed(x)?;
    geom.check_closed(y)?;
    let distance = dist(x, y);
    let h = (1e-2 * distance).max(1e-5);
    let stencils: Vec<Vec<(i64, f64)>> = multiindex.iter().map(|&k| central_stencil(k)).collect();
    let reach: f64 = stencils
        .iter()
        .map(|s| {
            let r = s.iter().map(|e| e.0.abs()).max().unwrap_or(0) as f64;
            r * r
        })
        .sum::<f64>()
        .sqrt()
        * h;
    if reach >= 0.5 * distance {
        return Err(Error::StepUnderflow {
            stencil: reach,
            distance,
        });
    }
    Ok(finite_difference(&|p: &[f64]| green.eval_unchecked(x, p), y, multiindex, h))
}
