//! The radial profile `P(t) = \int_0^t z^{m-1} (1+z)^{-N/2} dz` of Boggio's formula.
//!
//! For integer `m` the substitution `w = 1 + z` and a binomial expansion of
//! `(w-1)^{m-1}` give a finite sum of elementary terms. Small `|t|` uses the power
//! series instead (the finite sum cancels to `O(t^m)` there), and an adaptive
//! Gauss-Kronrod evaluation takes over when the finite sum loses too many digits.

use crate::error::{Error, Result};
use crate::quadrature::gauss_kronrod::integrate_adaptive;

/// Cancellation factor above which the closed form is abandoned.
const CANCELLATION_LIMIT: f64 = 1e3;
/// Radius of the region where the power series is used.
const SERIES_RADIUS: f64 = 0.5;

#[derive(Debug, Clone, Copy)]
enum Term {
    /// `c * ln(1+t)`
    Log(f64),
    /// `c * ((1+t)^e - 1) / e`
    Power { coeff: f64, exponent: f64 },
}

/// Precomputed evaluation data for one `(m, N)` pair.
#[derive(Debug, Clone)]
pub struct Profile {
    m: usize,
    n: usize,
    half_n: f64,
    terms: Vec<Term>,
    at_infinity: Option<f64>,
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut b = 1.0;
    for i in 0..k {
        b = b * (n - i) as f64 / (i + 1) as f64;
    }
    b
}

impl Profile {
    pub fn new(m: usize, n: usize) -> Self {
        let half_n = n as f64 / 2.0;
        let mut terms = Vec::with_capacity(m);
        let mut limit = 0.0;
        let mut converges = true;
        for j in 0..m {
            let sign = if (m - 1 - j) % 2 == 0 { 1.0 } else { -1.0 };
            let coeff = sign * binomial(m - 1, j);
            // exponent of w after integrating w^{j - N/2}
            let twice_e = 2 * (j + 1) as i64 - n as i64;
            if twice_e == 0 {
                terms.push(Term::Log(coeff));
                converges = false;
            } else {
                let exponent = twice_e as f64 / 2.0;
                if exponent > 0.0 {
                    converges = false;
                }
                limit += -coeff / exponent;
                terms.push(Term::Power { coeff, exponent });
            }
        }
        Profile {
            m,
            n,
            half_n,
            terms,
            at_infinity: converges.then_some(limit),
        }
    }

    pub fn order(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `P(inf)`, finite exactly when `N > 2m`.
    pub fn at_infinity(&self) -> Option<f64> {
        self.at_infinity
    }

    /// Integrand `P'(t) = t^{m-1} (1+t)^{-N/2}`.
    #[inline]
    pub fn derivative(&self, t: f64) -> f64 {
        t.powi(self.m as i32 - 1) * (1.0 + t).powf(-self.half_n)
    }

    /// `P(t)` for `t >= 0`, with `t = +inf` allowed when the integral converges.
    pub fn value(&self, t: f64) -> Result<f64> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "profile argument must be non-negative, got {t}"
            )));
        }
        if t.is_infinite() {
            return self.at_infinity.ok_or(Error::InfiniteProfile {
                n: self.n,
                m: self.m,
            });
        }
        Ok(self.value_extended(t))
    }

    /// `P(t)` for any finite `t > -1`. Negative arguments arise when the kernel
    /// formula is continued analytically across the boundary (finite differences
    /// and Taylor jets at boundary points).
    pub fn value_extended(&self, t: f64) -> f64 {
        debug_assert!(t > -1.0);
        if t == 0.0 {
            return 0.0;
        }
        if t.abs() <= SERIES_RADIUS {
            return self.series(t);
        }
        let (sum, magnitude) = self.closed_form(t);
        if magnitude <= CANCELLATION_LIMIT * sum.abs() {
            sum
        } else {
            self.quadrature(t)
        }
    }

    fn series(&self, t: f64) -> f64 {
        // sum_k binom(-N/2, k) t^{m+k} / (m+k)
        let mut b = 1.0;
        let mut tp = t.powi(self.m as i32);
        let mut acc = 0.0;
        for k in 0..400 {
            let term = b * tp / (self.m + k) as f64;
            acc += term;
            if term.abs() <= 1e-17 * acc.abs() && k > 2 {
                break;
            }
            b *= (-self.half_n - k as f64) / (k + 1) as f64;
            tp *= t;
        }
        acc
    }

    fn closed_form(&self, t: f64) -> (f64, f64) {
        let l = t.ln_1p();
        let mut sum = 0.0;
        let mut mag = 0.0;
        for term in &self.terms {
            let v = match *term {
                Term::Log(c) => c * l,
                Term::Power { coeff, exponent } => coeff * (exponent * l).exp_m1() / exponent,
            };
            sum += v;
            mag += v.abs();
        }
        (sum, mag)
    }

    fn quadrature(&self, t: f64) -> f64 {
        // z = e^w - 1 turns the integrand into a smooth function on [0, ln(1+t)]
        let m = self.m as i32;
        let hn = self.half_n;
        let f = |w: f64| w.exp_m1().powi(m - 1) * (w * (1.0 - hn)).exp();
        let upper = t.ln_1p();
        let (lo, hi) = if upper >= 0.0 { (0.0, upper) } else { (upper, 0.0) };
        let sign = if upper >= 0.0 { 1.0 } else { -1.0 };
        let r = integrate_adaptive(&f, lo, hi, 1e-14, 0.0, 2000);
        sign * r.value
    }
}
