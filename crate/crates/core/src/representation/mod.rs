//! Green-Poisson representation on balls and its half-space limit.
//!
//! For a smooth `v` on a finite ball `B` and `x` in `B`,
//!
//! `v(x) = (-1)^m sum_i \oint_{dB} (Delta^{i-1} v d_nu Delta^{m-i} G - Delta^{m-i} G d_nu Delta^{i-1} v)
//!        + \int_B G(x, .) (-Delta)^m v`.
//!
//! Dirichlet conditions on `G` remove every boundary term of order below `m`. What is
//! left are the pairs `i <= m/2` and, for odd `m`, the single term
//! `-\oint Delta^{(m-1)/2} v d_nu Delta^{(m-1)/2} G`.

pub mod corpus;
pub mod halfspace;
pub mod polynomial;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use corpus::{corpus, gaussian_dipole, Manifest, ManifestEntry};
pub use halfspace::{
    boundary_smallness_profile, default_schedule, halfspace_representation, HalfSpaceRepresentation, TailBound,
    TruncatedIntegral,
};
pub use polynomial::Polynomial;

use crate::error::{Error, Result};
use crate::kernels::derivative::finite_difference;
use crate::kernels::geometry::{check_dim, dot, BallGeometry};
use crate::kernels::{BallKernelJet, GreenFunction, KernelParams};
use crate::quadrature::{integrate_ball, sphere_integral_about, Estimate, QuadratureSpec};
use crate::sampling::{direction_uniforms, unit_direction, LowDiscrepancy};

pub type FieldFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type GradientFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// A field together with the Laplacian powers, their gradients and the source
/// `(-Delta)^m v` the representation formulas consume.
#[derive(Clone)]
pub struct ManufacturedSolution {
    descriptor: String,
    dim: usize,
    order: usize,
    laplacian_powers: Vec<FieldFn>,
    laplacian_gradients: Vec<GradientFn>,
    source: FieldFn,
    dirichlet: Option<BallGeometry>,
}

impl std::fmt::Debug for ManufacturedSolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ManufacturedSolution")
            .field("descriptor", &self.descriptor)
            .field("dim", &self.dim)
            .field("order", &self.order)
            .field("laplacian_powers", &self.laplacian_powers.len())
            .field("dirichlet", &self.dirichlet)
            .finish()
    }
}

impl ManufacturedSolution {
    /// `laplacian_powers[i] = Delta^i v` (so the first entry is `v` itself) and
    /// `laplacian_gradients[i] = grad Delta^i v`, as far as the caller supplies them.
    pub fn new(
        descriptor: impl Into<String>,
        dim: usize,
        order: usize,
        laplacian_powers: Vec<FieldFn>,
        laplacian_gradients: Vec<GradientFn>,
        source: FieldFn,
    ) -> Result<Self> {
        if dim == 0 || order == 0 {
            return Err(Error::InvalidParameter("dimension and order must be positive".into()));
        }
        if laplacian_powers.is_empty() {
            return Err(Error::MissingLaplacianPower(0));
        }
        Ok(ManufacturedSolution {
            descriptor: descriptor.into(),
            dim,
            order,
            laplacian_powers,
            laplacian_gradients,
            source,
            dirichlet: None,
        })
    }

    /// All Laplacian powers, gradients and the source computed exactly.
    pub fn from_polynomial(descriptor: impl Into<String>, p: &Polynomial, order: usize) -> Result<Self> {
        let mut powers = Vec::with_capacity(order + 1);
        let mut gradients = Vec::with_capacity(order + 1);
        let mut current = p.clone();
        let mut source = Polynomial::zero(p.dim());
        for i in 0..=order {
            if i == order {
                source = current.scale(if order % 2 == 0 { 1.0 } else { -1.0 });
            }
            let value = current.clone();
            powers.push(Arc::new(move |x: &[f64]| value.eval(x)) as FieldFn);
            let grad = current.gradient();
            gradients.push(Arc::new(move |x: &[f64]| grad.iter().map(|g| g.eval(x)).collect()) as GradientFn);
            current = current.laplacian();
        }
        Self::new(
            descriptor,
            p.dim(),
            order,
            powers,
            gradients,
            Arc::new(move |x: &[f64]| source.eval(x)),
        )
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        (self.laplacian_powers[0])(x)
    }

    pub fn source(&self, x: &[f64]) -> f64 {
        (self.source)(x)
    }

    /// `Delta^i v`
    pub fn laplacian_power(&self, i: usize) -> Result<&FieldFn> {
        self.laplacian_powers.get(i).ok_or(Error::MissingLaplacianPower(i))
    }

    /// `grad Delta^i v`
    pub fn laplacian_gradient(&self, i: usize) -> Result<&GradientFn> {
        self.laplacian_gradients.get(i).ok_or(Error::MissingLaplacianPower(i))
    }

    /// The ball on whose boundary Dirichlet conditions of order `m` have been verified.
    pub fn dirichlet_boundary(&self) -> Option<&BallGeometry> {
        self.dirichlet.as_ref()
    }

    /// Largest `|d_nu^k v|`, `k < m`, over `samples` boundary points of the finite ball
    /// `geom`, by central differences along the normal.
    pub fn dirichlet_defect(&self, geom: &BallGeometry, samples: usize, seed: u64) -> Result<f64> {
        if geom.is_half_space() {
            return Err(Error::InvalidParameter("Dirichlet checks need a finite ball".into()));
        }
        let n = self.dim;
        let center = geom.center(n);
        let r = geom.radius();
        let v = &self.laplacian_powers[0];
        let mut ld = LowDiscrepancy::new(direction_uniforms(n).max(1), seed);
        let mut worst = 0.0f64;
        for _ in 0..samples {
            let nu = if n == 1 {
                vec![if ld.next_point()[0] < 0.5 { -1.0 } else { 1.0 }]
            } else {
                unit_direction(&ld.next_point(), n)
            };
            let y: Vec<f64> = center.iter().zip(&nu).map(|(c, d)| c + r * d).collect();
            let along = |t: &[f64]| {
                let p: Vec<f64> = y.iter().zip(&nu).map(|(a, d)| a + t[0] * d).collect();
                v(&p)
            };
            for k in 0..self.order {
                let d = finite_difference(&along, &[0.0], &[k], 1e-3 * r);
                worst = worst.max(d.abs());
            }
        }
        Ok(worst)
    }

    /// Sets the Dirichlet flag for `geom` when the defect over 100 boundary samples is
    /// below `1e-8`; returns whether it was set.
    pub fn mark_dirichlet(&mut self, geom: &BallGeometry) -> Result<bool> {
        let ok = self.dirichlet_defect(geom, 100, 0)? < 1e-8;
        self.dirichlet = ok.then_some(*geom);
        Ok(ok)
    }
}

/// The terms of the representation formula at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionBreakdown {
    /// `\int_B G(x, .) (-Delta)^m v`
    pub volume: Estimate,
    /// Signed contribution of the pair `i = 1, 2, ...`.
    pub boundary_pairs: Vec<f64>,
    /// The odd-order term, `None` for even `m`.
    pub middle: Option<f64>,
    pub total: f64,
}

/// [`green_poisson_reconstruct`] with an explicit kernel and the individual terms.
pub fn green_poisson_breakdown(
    ms: &ManufacturedSolution,
    green: &GreenFunction,
    x: &[f64],
    spec: &QuadratureSpec,
) -> Result<ReconstructionBreakdown> {
    let params = green.params();
    let (n, m) = (params.dim(), params.order());
    if ms.dim != n || ms.order != m {
        return Err(Error::InvalidParameter(format!(
            "field of order {} in dimension {} used with kernel of order {m} in dimension {n}",
            ms.order, ms.dim
        )));
    }
    let geom = green.geometry();
    if geom.is_half_space() {
        return Err(Error::InvalidParameter("reconstruction needs a finite ball".into()));
    }
    check_dim(n, x)?;
    if !geom.contains_open(x) {
        return Err(Error::OutsideDomain { point: x.to_vec() });
    }
    let pairs = m / 2;
    // fetch every required power up front so a missing one fails before any quadrature
    for i in 0..pairs {
        ms.laplacian_power(i)?;
        ms.laplacian_gradient(i)?;
    }
    if m % 2 == 1 {
        ms.laplacian_power((m - 1) / 2)?;
    }

    let center = geom.center(n);
    let radius = geom.radius();
    let axis: Vec<f64> = {
        let d: Vec<f64> = x.iter().zip(center.iter()).map(|(a, c)| a - c).collect();
        let len = dot(&d, &d).sqrt();
        if len > 1e-12 * radius {
            d.iter().map(|c| c / len).collect()
        } else {
            let mut e = vec![0.0; n];
            e[0] = 1.0;
            e
        }
    };
    let jet = BallKernelJet::new(green, x)?;
    let normal = |y: &[f64]| -> Vec<f64> { y.iter().zip(center.iter()).map(|(a, c)| (a - c) / radius).collect() };
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    let surface_spec = QuadratureSpec {
        abs_tolerance: spec.abs_tolerance.max(1e-2 * spec.target_rel_error),
        ..*spec
    };

    let mut boundary_pairs = Vec::with_capacity(pairs);
    for i in 1..=pairs {
        let lap_v = ms.laplacian_power(i - 1)?;
        let grad_v = ms.laplacian_gradient(i - 1)?;
        let k = m - i;
        let integrand = |y: &[f64]| -> f64 {
            let nu = normal(y);
            let g = jet.laplacian_power(y, k).unwrap_or(f64::NAN);
            let dg = jet.directional_laplacian_power(y, k, &nu).unwrap_or(f64::NAN);
            lap_v(y) * dg - g * dot(&grad_v(y), &nu)
        };
        let est = sphere_integral_about(&integrand, &center, radius, &axis, &surface_spec)?;
        boundary_pairs.push(sign * est.value);
    }
    let middle = if m % 2 == 1 {
        let k = (m - 1) / 2;
        let lap_v = ms.laplacian_power(k)?;
        let integrand = |y: &[f64]| -> f64 {
            let nu = normal(y);
            lap_v(y) * jet.directional_laplacian_power(y, k, &nu).unwrap_or(f64::NAN)
        };
        Some(-sphere_integral_about(&integrand, &center, radius, &axis, &surface_spec)?.value)
    } else {
        None
    };
    let volume_integrand = |y: &[f64]| -> f64 {
        if y == x {
            0.0
        } else {
            green.eval_unchecked(x, y) * ms.source(y)
        }
    };
    let volume = integrate_ball(&volume_integrand, geom, n, spec, Some(x))?;
    let total = volume.value + boundary_pairs.iter().sum::<f64>() + middle.unwrap_or(0.0);
    if !total.is_finite() {
        return Err(Error::InvalidParameter(
            "representation terms are not finite; is x too close to the boundary?".into(),
        ));
    }
    Ok(ReconstructionBreakdown {
        volume,
        boundary_pairs,
        middle,
        total,
    })
}

/// `v(x)` recovered from the boundary data and source of `ms` on the finite ball `geom`.
pub fn green_poisson_reconstruct(
    ms: &ManufacturedSolution,
    geom: &BallGeometry,
    x: &[f64],
    spec: &QuadratureSpec,
) -> Result<f64> {
    let params = KernelParams::kernel(ms.dim, ms.order)?;
    let green = GreenFunction::new(params, *geom);
    Ok(green_poisson_breakdown(ms, &green, x, spec)?.total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bubble(n: usize, m: usize) -> ManufacturedSolution {
        let b = Polynomial::constant(n, 1.0).sub(&Polynomial::norm_sq(n)).pow(m as u32);
        ManufacturedSolution::from_polynomial("bubble", &b, m).unwrap()
    }

    #[test]
    fn bubble_is_dirichlet() {
        let mut ms = bubble(3, 2);
        assert!(ms.mark_dirichlet(&BallGeometry::unit_ball()).unwrap());
        let x1 = Polynomial::coordinate(3, 0);
        let mut lin = ManufacturedSolution::from_polynomial("x1", &x1, 1).unwrap();
        assert!(!lin.mark_dirichlet(&BallGeometry::unit_ball()).unwrap());
    }

    #[test]
    fn bubble_at_center() {
        let spec = QuadratureSpec::default();
        let ball = BallGeometry::unit_ball();
        for (n, m) in [(3, 1), (3, 2), (2, 2), (5, 3)] {
            let v = green_poisson_reconstruct(&bubble(n, m), &ball, &vec![0.0; n], &spec).unwrap();
            assert!((v - 1.0).abs() < 1e-6, "n={n} m={m}: {v}");
        }
    }

    #[test]
    fn harmonic_reproduction() {
        let spec = QuadratureSpec::default();
        let ball = BallGeometry::unit_ball();
        let ms = ManufacturedSolution::from_polynomial("x1", &Polynomial::coordinate(3, 0), 1).unwrap();
        let x = [0.3, -0.2, 0.4];
        let b = green_poisson_breakdown(&ms, &GreenFunction::new(KernelParams::kernel(3, 1).unwrap(), ball), &x, &spec)
            .unwrap();
        assert_eq!(b.volume.value, 0.0);
        assert!(b.boundary_pairs.is_empty());
        assert!((b.total - 0.3).abs() < 1e-6);
    }

    #[test]
    fn even_order_has_no_middle_term() {
        let spec = QuadratureSpec::default();
        let ball = BallGeometry::unit_ball();
        let g = GreenFunction::new(KernelParams::kernel(3, 2).unwrap(), ball);
        let b = green_poisson_breakdown(&bubble(3, 2), &g, &[0.1, 0.2, 0.0], &spec).unwrap();
        assert!(b.middle.is_none());
        assert_eq!(b.boundary_pairs.len(), 1);
    }

    #[test]
    fn missing_power_is_reported() {
        let one: FieldFn = Arc::new(|_: &[f64]| 0.0);
        let ms = ManufacturedSolution::new("partial", 3, 3, vec![one.clone()], vec![], one).unwrap();
        let r = green_poisson_reconstruct(&ms, &BallGeometry::unit_ball(), &[0.0; 3], &QuadratureSpec::default());
        assert_eq!(r, Err(Error::MissingLaplacianPower(0)));
    }
}
