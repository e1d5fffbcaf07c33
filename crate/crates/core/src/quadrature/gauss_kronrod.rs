//! Globally adaptive 7/15-point Gauss-Kronrod integration on finite intervals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for the nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub subdivisions: usize,
    pub converged: bool,
}

/// Fraction of `\int |f|` that bounds the accepted error when the integral itself
/// cancels to (nearly) zero.
pub(crate) const CANCELLATION_FLOOR: f64 = 1e-2;

/// One 15-point Kronrod estimate: value, error estimate and `\int |f|`.
pub fn kronrod15<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64) -> (f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv = [(0.0, 0.0); 7];
    for (j, slot) in fv.iter_mut().enumerate() {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        *slot = (f1, f2);
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for (j, &(f1, f2)) in fv.iter().enumerate() {
        res_asc += WGK[j] * ((f1 - mean).abs() + (f2 - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * res_abs;
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) && err < floor {
        err = floor;
    }
    (value, err, res_abs)
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    magnitude: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Integrates `f` over `[a, b]` until the estimated error drops below
/// `max(abs_tol, rel_tol * |I|)` or `max_subdivisions` bisections have been spent.
pub fn integrate_adaptive<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_subdivisions: usize,
) -> QuadResult {
    integrate_panels(f, &[a, b], rel_tol, abs_tol, max_subdivisions)
}

/// Like [`integrate_adaptive`] but starting from the given breakpoints.
pub fn integrate_panels<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    breakpoints: &[f64],
    rel_tol: f64,
    abs_tol: f64,
    max_subdivisions: usize,
) -> QuadResult {
    let mut heap = BinaryHeap::with_capacity(2 * breakpoints.len() + 16);
    let mut total = 0.0;
    let mut total_err = 0.0;
    let mut total_abs = 0.0;
    for w in breakpoints.windows(2) {
        if w[0] == w[1] {
            continue;
        }
        let (v, e, s) = kronrod15(f, w[0], w[1]);
        total += v;
        total_err += e;
        total_abs += s;
        heap.push(Panel {
            a: w[0],
            b: w[1],
            value: v,
            error: e,
            magnitude: s,
        });
    }
    let target = |value: f64, magnitude: f64| {
        abs_tol.max(rel_tol * value.abs().max(CANCELLATION_FLOOR * magnitude))
    };
    let mut subdivisions = 0;
    loop {
        if total_err <= target(total, total_abs) || !total_err.is_finite() {
            break;
        }
        if subdivisions >= max_subdivisions {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            // interval can no longer be split in floating point
            heap.push(Panel {
                error: 0.0,
                ..worst
            });
            total_err -= worst.error;
            continue;
        }
        let (v1, e1, s1) = kronrod15(f, worst.a, mid);
        let (v2, e2, s2) = kronrod15(f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        total_abs += s1 + s2 - worst.magnitude;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
            magnitude: s1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
            magnitude: s2,
        });
        subdivisions += 1;
    }
    // re-sum in interval order so the result does not depend on update history
    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value: f64 = panels.iter().map(|p| p.value).sum();
    let error: f64 = panels.iter().map(|p| p.error).sum();
    let magnitude: f64 = panels.iter().map(|p| p.magnitude).sum();
    QuadResult {
        value,
        error,
        subdivisions,
        converged: error <= target(value, magnitude),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_low_degree_polynomials() {
        let (v, _, _) = kronrod15(&|x: f64| x.powi(20) - 3.0 * x.powi(7) + 1.0, -1.0, 1.0);
        assert!((v - (2.0 / 21.0 + 2.0)).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let r = integrate_adaptive(&|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, 1e-12, 0.0, 500);
        assert!(r.converged);
        assert!((r.value - 2.0).abs() < 1e-10);
    }

    #[test]
    fn reversed_interval_changes_sign() {
        let f = |x: f64| x.exp();
        let r = integrate_adaptive(&f, 1.0, 0.0, 1e-13, 0.0, 100);
        assert!((r.value + (1f64.exp() - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let r = integrate_adaptive(&|x: f64| (1.0 / x).sin() / x, 1e-6, 1.0, 1e-14, 0.0, 3);
        assert!(!r.converged);
        assert_eq!(r.subdivisions, 3);
    }
}
