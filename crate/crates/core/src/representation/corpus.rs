//! Manufactured solutions used to exercise the representation formulas.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{FieldFn, GradientFn, ManufacturedSolution, Polynomial};
use crate::error::{Error, Result};

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

/// The fields for dimension `n >= 2` and order `m`: polynomials of several degrees,
/// the Dirichlet bubble and two of its perturbations, and the harmonic
/// `e^{x_1} cos x_2`.
pub fn corpus(n: usize, m: usize) -> Result<Vec<ManufacturedSolution>> {
    if n < 2 || m == 0 {
        return Err(Error::InvalidParameter(format!(
            "the corpus needs N >= 2 and m >= 1, got N = {n}, m = {m}"
        )));
    }
    let x = |i: usize| Polynomial::coordinate(n, i);
    let one = Polynomial::constant(n, 1.0);
    let bubble = one.sub(&Polynomial::norm_sq(n)).pow(m as u32);
    let polys = [
        (format!("(1-|x|^2)^{m}"), bubble.clone()),
        ("x1".to_string(), x(0)),
        ("x1^2 - x2^2".to_string(), x(0).mul(&x(0)).sub(&x(1).mul(&x(1)))),
        ("x1^3 + x1 x2 + 1".to_string(), x(0).pow(3).add(&x(0).mul(&x(1))).add(&one)),
        ("|x|^4 + x2".to_string(), Polynomial::norm_sq(n).pow(2).add(&x(1))),
        (
            format!("(1-|x|^2)^{m} (1 + x1 + x2^2)"),
            bubble.mul(&one.add(&x(0)).add(&x(1).mul(&x(1)))),
        ),
    ];
    let mut out = Vec::with_capacity(polys.len() + 1);
    for (name, p) in polys {
        out.push(ManufacturedSolution::from_polynomial(name, &p, m)?);
    }
    out.push(exp_cos(n, m)?);
    Ok(out)
}

/// `e^{x_1} cos x_2`, harmonic, so every Laplacian power beyond the first vanishes.
fn exp_cos(n: usize, m: usize) -> Result<ManufacturedSolution> {
    let mut powers: Vec<FieldFn> = vec![Arc::new(|x: &[f64]| x[0].exp() * x[1].cos())];
    let mut gradients: Vec<GradientFn> = vec![Arc::new(|x: &[f64]| {
        let mut g = vec![0.0; x.len()];
        g[0] = x[0].exp() * x[1].cos();
        g[1] = -x[0].exp() * x[1].sin();
        g
    })];
    for _ in 0..m {
        powers.push(Arc::new(|_: &[f64]| 0.0));
        gradients.push(Arc::new(|x: &[f64]| vec![0.0; x.len()]));
    }
    ManufacturedSolution::new("exp(x1) cos(x2)", n, m, powers, gradients, Arc::new(|_: &[f64]| 0.0))
}

/// Newtonian potential of the unit Gaussian `e^{-|z|^2}` in `R^3`: `(sqrt(pi)/4) erf(r)/r`.
fn gaussian_potential(r: f64) -> f64 {
    if r < 1e-4 {
        0.5 * (1.0 - r * r / 3.0)
    } else {
        0.25 * std::f64::consts::PI.sqrt() * libm::erf(r) / r
    }
}

/// Radial derivative of [`gaussian_potential`].
fn gaussian_potential_slope(r: f64) -> f64 {
    if r < 1e-4 {
        -r / 3.0
    } else {
        0.5 * (-r * r).exp() / r - 0.25 * std::f64::consts::PI.sqrt() * libm::erf(r) / (r * r)
    }
}

/// Gaussian charge at `a e_1` minus its mirror image at `-a e_1` in `R^3`, order one.
///
/// The field vanishes on `{y_1 = 0}` and at infinity, and its source
/// `e^{-|y - a e_1|^2} - e^{-|y + a e_1|^2}` is positive in the half-space.
pub fn gaussian_dipole(a: f64) -> Result<ManufacturedSolution> {
    if !(a > 0.0) {
        return Err(Error::InvalidParameter(format!("charge height must be positive, got {a}")));
    }
    let sep = move |y: &[f64], s: f64| -> (Vec<f64>, f64) {
        let d: Vec<f64> = y.iter().enumerate().map(|(i, c)| if i == 0 { c - s * a } else { *c }).collect();
        let r = d.iter().map(|c| c * c).sum::<f64>().sqrt();
        (d, r)
    };
    let value: FieldFn = Arc::new(move |y: &[f64]| {
        gaussian_potential(sep(y, 1.0).1) - gaussian_potential(sep(y, -1.0).1)
    });
    let gradient: GradientFn = Arc::new(move |y: &[f64]| {
        let mut g = vec![0.0; y.len()];
        for (s, sign) in [(1.0, 1.0), (-1.0, -1.0)] {
            let (d, r) = sep(y, s);
            // slope / r is finite at r = 0
            let f = if r < 1e-4 { -1.0 / 3.0 } else { gaussian_potential_slope(r) / r };
            g.iter_mut().zip(&d).for_each(|(gi, di)| *gi += sign * f * di);
        }
        g
    });
    let source: FieldFn = Arc::new(move |y: &[f64]| (-sep(y, 1.0).1.powi(2)).exp() - (-sep(y, -1.0).1.powi(2)).exp());
    ManufacturedSolution::new(
        format!("gaussian dipole, a = {a}"),
        3,
        1,
        vec![value],
        vec![gradient],
        source,
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub descriptor: String,
    pub dimension: usize,
    pub order: usize,
}

/// JSON listing of a corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn from_solutions<'a>(solutions: impl IntoIterator<Item = &'a ManufacturedSolution>) -> Self {
        Manifest {
            schema_version: MANIFEST_SCHEMA_VERSION,
            entries: solutions
                .into_iter()
                .map(|s| ManifestEntry {
                    descriptor: s.descriptor().to_string(),
                    dimension: s.dim(),
                    order: s.order(),
                })
                .collect(),
        }
    }

    /// The corpora for every pair in `dims x orders`.
    pub fn for_grid(dims: &[usize], orders: &[usize]) -> Result<Self> {
        let mut all = Vec::new();
        for &m in orders {
            for &n in dims {
                all.extend(corpus(n, m)?);
            }
        }
        Ok(Self::from_solutions(&all))
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(file), self)?;
        Ok(())
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Ok(serde_json::from_reader(std::io::BufReader::new(file))?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_and_sources() {
        for m in 1..=3 {
            for n in [2, 3, 5] {
                let c = corpus(n, m).unwrap();
                assert!(c.len() >= 5);
                let bubble = &c[0];
                let want = crate::kernels::bubble_source(m, n);
                assert!((bubble.source(&vec![0.1; n]) - want).abs() < 1e-9 * want);
            }
        }
        assert!(corpus(1, 1).is_err());
    }

    #[test]
    fn dipole_solves_its_equation() {
        let ms = gaussian_dipole(1.5).unwrap();
        let h = 1e-3;
        for y in [[0.7, 0.2, -0.4], [1.5, 0.0, 0.0], [3.0, 1.0, 2.0]] {
            let mut lap = -6.0 * ms.value(&y);
            let grad = ms.laplacian_gradient(0).unwrap()(&y);
            for i in 0..3 {
                let mut p = y;
                p[i] += h;
                let up = ms.value(&p);
                p[i] -= 2.0 * h;
                let down = ms.value(&p);
                lap += up + down;
                assert!(((up - down) / (2.0 * h) - grad[i]).abs() < 1e-6);
            }
            lap /= h * h;
            assert!((-lap - ms.source(&y)).abs() < 1e-5, "{y:?}");
        }
        assert_eq!(ms.value(&[0.0, 0.3, 0.1]), 0.0);
    }

    #[test]
    fn manifest_round_trip() {
        let man = Manifest::for_grid(&[2, 3], &[1]).unwrap();
        assert_eq!(man.entries.len(), 14);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("manifest.json");
        man.write_json(&p).unwrap();
        assert_eq!(Manifest::read_json(&p).unwrap(), man);
    }
}
