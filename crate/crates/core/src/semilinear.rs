//! The integral equation `v(x) = \int_B G_1(x, y) h(y, v(y)) dy` on a polar lattice of
//! the unit ball, with `h(y, t) = 2^{2m} |y + e_1|^{-alpha} t^q`, and its Picard iteration.

use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conformal::{pole_distance_sq, SemilinearWeight};
use crate::error::{Error, Result};
use crate::kernels::geometry::BallGeometry;
use crate::kernels::{unit_ball_torsion, GreenFunction, KernelParams, Point};
use crate::quadrature::gauss::legendre;
use crate::quadrature::{sphere_rule, QuadratureSpec};

/// Lattice nodes closer than this to the pole `-e_1` are dropped.
pub const POLE_EXCLUSION: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeNode {
    pub point: Point,
    pub weight: f64,
    pub boundary: bool,
    /// `(radial index, slice index)`: nodes sharing it form one rotation orbit about
    /// the first axis.
    pub orbit: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    dim: usize,
    nodes: Vec<LatticeNode>,
    excluded: usize,
}

impl Lattice {
    /// Gauss-Legendre radii (clustered toward both `0` and `1`) times a product rule on
    /// the unit sphere with `angular_level` slices. Weights integrate polynomials of
    /// radial degree `< 2 radial` exactly; `boundary_shell` appends zero-weight nodes on
    /// the unit sphere.
    pub fn polar_ball(n: usize, radial: usize, angular_level: usize, boundary_shell: bool) -> Result<Self> {
        if n == 0 || radial == 0 || angular_level == 0 {
            return Err(Error::InvalidParameter(
                "lattice needs N, radial and angular counts of at least 1".into(),
            ));
        }
        let dirs = sphere_rule(n - 1, angular_level);
        let radii = legendre(radial).mapped(0.0, 1.0);
        let mut shells: Vec<(f64, f64, bool)> = radii
            .nodes
            .iter()
            .zip(&radii.weights)
            .map(|(&r, &w)| (r, w * r.powi(n as i32 - 1), false))
            .collect();
        if boundary_shell {
            shells.push((1.0, 0.0, true));
        }
        let mut nodes = Vec::with_capacity(shells.len() * dirs.len());
        let mut excluded = 0;
        let mut dropped_weight = 0.0;
        for (k, &(r, wr, boundary)) in shells.iter().enumerate() {
            for i in 0..dirs.len() {
                let point: Vec<f64> = dirs.point(i).iter().map(|c| r * c).collect();
                let weight = wr * dirs.weight(i);
                if pole_distance_sq(&point).sqrt() < POLE_EXCLUSION {
                    excluded += 1;
                    dropped_weight += weight;
                    continue;
                }
                nodes.push(LatticeNode {
                    point: Point(point),
                    weight,
                    boundary,
                    orbit: Some((k, dirs.slice(i))),
                });
            }
        }
        if dropped_weight > 0.0 {
            let kept: f64 = nodes.iter().map(|p| p.weight).sum();
            let factor = (kept + dropped_weight) / kept;
            nodes.iter_mut().for_each(|p| p.weight *= factor);
        }
        Ok(Lattice { dim: n, nodes, excluded })
    }

    /// A lattice from explicit nodes; weights must be non-negative and finite.
    pub fn from_nodes(dim: usize, nodes: Vec<LatticeNode>) -> Result<Self> {
        for node in &nodes {
            if node.point.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: node.point.dim(),
                });
            }
            if !(node.weight >= 0.0) || !node.weight.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "lattice weight must be non-negative, got {}",
                    node.weight
                )));
            }
        }
        Ok(Lattice {
            dim,
            nodes,
            excluded: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[LatticeNode] {
        &self.nodes
    }

    /// Number of nodes dropped near the pole.
    pub fn excluded(&self) -> usize {
        self.excluded
    }

    pub fn total_weight(&self) -> f64 {
        self.nodes.iter().map(|p| p.weight).sum()
    }

    /// Lattice quadrature of `f`.
    pub fn integrate<F: Fn(&[f64]) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().map(|p| p.weight * f(&p.point)).sum()
    }
}

/// Values sampled on a lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    lattice: Arc<Lattice>,
    values: Vec<f64>,
    params: KernelParams,
}

impl GridFunction {
    pub fn new(lattice: Arc<Lattice>, params: KernelParams, values: Vec<f64>) -> Result<Self> {
        if values.len() != lattice.len() {
            return Err(Error::DimensionMismatch {
                expected: lattice.len(),
                got: values.len(),
            });
        }
        if lattice.dim() != params.dim() {
            return Err(Error::DimensionMismatch {
                expected: params.dim(),
                got: lattice.dim(),
            });
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("grid values must be finite, got {v}")));
        }
        Ok(GridFunction {
            lattice,
            values,
            params,
        })
    }

    pub fn constant(lattice: Arc<Lattice>, params: KernelParams, c: f64) -> Result<Self> {
        let values = vec![c; lattice.len()];
        Self::new(lattice, params, values)
    }

    pub fn from_fn<F: Fn(&[f64]) -> f64>(lattice: Arc<Lattice>, params: KernelParams, f: F) -> Result<Self> {
        let values = lattice.nodes().iter().map(|p| f(&p.point)).collect();
        Self::new(lattice, params, values)
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn params(&self) -> &KernelParams {
        &self.params
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `sup |self - other|`.
    pub fn distance(&self, other: &GridFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        let values = self.values.iter().map(|v| s * v).collect();
        Self::new(Arc::clone(&self.lattice), self.params, values)
    }

    fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(Arc::clone(&self.lattice), self.params, values)
    }
}

/// The discretized operator `T[v](x_i) = sum_j K_ij h(x_j, v_j)`.
///
/// Off the diagonal `K_ij = w_j G_1(x_i, x_j)`. The diagonal collects the kernel mass the
/// lattice misses near the singularity: `K_ii = \int_B G_1(x_i, y) dy - sum_{j != i} K_ij`,
/// clamped at zero, so constants are integrated exactly.
#[derive(Debug, Clone)]
pub struct GreenOperator {
    lattice: Arc<Lattice>,
    params: KernelParams,
    matrix: Vec<f64>,
    weights: Vec<f64>,
    clamped: usize,
}

impl GreenOperator {
    pub fn new(lattice: Arc<Lattice>, params: KernelParams) -> Result<Self> {
        if lattice.dim() != params.dim() {
            return Err(Error::DimensionMismatch {
                expected: params.dim(),
                got: lattice.dim(),
            });
        }
        let ball = BallGeometry::unit_ball();
        for (i, node) in lattice.nodes().iter().enumerate() {
            let d = pole_distance_sq(&node.point).sqrt();
            if d < POLE_EXCLUSION {
                return Err(Error::PoleProximity { node: i, distance: d });
            }
            if !ball.contains_closed(&node.point) {
                return Err(Error::OutsideDomain {
                    point: node.point.0.clone(),
                });
            }
        }
        let green = GreenFunction::new(params, ball);
        let weight = SemilinearWeight::new(params);
        let n = lattice.len();
        let nodes = lattice.nodes();
        let mut matrix = vec![0.0; n * n];
        let clamped: usize = matrix
            .par_chunks_mut(n.max(1))
            .enumerate()
            .map(|(i, row)| {
                let x = &nodes[i].point;
                let mut off = 0.0;
                for (j, node) in nodes.iter().enumerate() {
                    if j != i && node.weight > 0.0 && node.point != *x {
                        let k = node.weight * green.eval_unchecked(x, &node.point);
                        row[j] = k;
                        off += k;
                    }
                }
                let mass = unit_ball_torsion(params.order(), params.dim(), x);
                let diag = mass - off;
                row[i] = diag.max(0.0);
                usize::from(diag < 0.0 && nodes[i].weight > 0.0)
            })
            .sum();
        let weights = nodes
            .iter()
            .map(|p| weight.weight(&p.point))
            .collect::<Result<Vec<_>>>()?;
        Ok(GreenOperator {
            lattice,
            params,
            matrix,
            weights,
            clamped,
        })
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn params(&self) -> &KernelParams {
        &self.params
    }

    /// Rows whose singular-cell mass came out negative and was set to zero.
    pub fn clamped_cells(&self) -> usize {
        self.clamped
    }

    /// `sum_j K_ij 2^{2m} |x_j + e_1|^{-alpha}`: the value of `T` on `v = 1` at node `i`.
    pub fn weighted_mass(&self, i: usize) -> f64 {
        let n = self.lattice.len();
        self.matrix[i * n..(i + 1) * n]
            .iter()
            .zip(&self.weights)
            .map(|(k, w)| k * w)
            .sum()
    }

    pub fn apply(&self, v: &GridFunction) -> Result<GridFunction> {
        if !Arc::ptr_eq(v.lattice(), &self.lattice) && **v.lattice() != *self.lattice {
            return Err(Error::IncompatibleLattice);
        }
        if let Some((i, &value)) = v.values().iter().enumerate().find(|(_, &t)| t < 0.0) {
            return Err(Error::NegativeInput { node: i, value });
        }
        let q = self.params.exponent();
        let h: Vec<f64> = v
            .values()
            .iter()
            .zip(&self.weights)
            .map(|(&t, w)| w * t.powf(q))
            .collect();
        let n = self.lattice.len();
        let out: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|i| {
                self.matrix[i * n..(i + 1) * n]
                    .iter()
                    .zip(&h)
                    .map(|(k, hj)| k * hj)
                    .sum()
            })
            .collect();
        GridFunction::new(Arc::clone(&self.lattice), v.params, out)
    }
}

/// One application of the Green operator on the lattice of `v`.
pub fn apply_green_operator(v: &GridFunction, spec: &QuadratureSpec) -> Result<GridFunction> {
    spec.validate()?;
    GreenOperator::new(Arc::clone(v.lattice()), v.params)?.apply(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PicardConfig {
    pub max_iters: usize,
    pub contraction_tol: f64,
    pub divergence_cap: f64,
    pub damping: f64,
}

impl Default for PicardConfig {
    fn default() -> Self {
        PicardConfig {
            max_iters: 200,
            contraction_tol: 1e-12,
            divergence_cap: 1e6,
            damping: 1.0,
        }
    }
}

impl PicardConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.contraction_tol > 0.0) {
            return Err(Error::InvalidParameter("contraction_tol must be positive".into()));
        }
        if !(self.divergence_cap > 1.0) {
            return Err(Error::InvalidParameter("divergence_cap must exceed 1".into()));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidParameter("damping must lie in (0, 1]".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("max_iters must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PicardVerdict {
    Converged,
    Diverged,
    Inconclusive,
}

pub const HISTORY_SCHEMA_VERSION: u32 = 1;

/// One row of the iteration history: sup-norm of the new iterate and the sup-norm of
/// the increment that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistoryRow {
    pub iter: usize,
    pub sup_norm: f64,
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct PicardOutcome {
    pub verdict: PicardVerdict,
    pub iterate: GridFunction,
    pub history: Vec<HistoryRow>,
    /// `sup |T[v] - v|` for the returned iterate when the iteration converged.
    pub audit_residual: Option<f64>,
}

/// `v_{k+1} = (1 - d) v_k + d T[v_k]` until the increment drops below the tolerance,
/// the sup-norm exceeds the cap, or the budget runs out. A converged iterate is audited
/// by one more application of `T` and downgraded to `Inconclusive` if it is not a fixed
/// point to the tolerance.
pub fn picard_solve(v0: &GridFunction, cfg: &PicardConfig, spec: &QuadratureSpec) -> Result<PicardOutcome> {
    spec.validate()?;
    let op = GreenOperator::new(Arc::clone(v0.lattice()), v0.params)?;
    picard_solve_with(&op, v0, cfg)
}

/// [`picard_solve`] with an already assembled operator.
pub fn picard_solve_with(op: &GreenOperator, v0: &GridFunction, cfg: &PicardConfig) -> Result<PicardOutcome> {
    cfg.validate()?;
    let d = cfg.damping;
    let mut v = v0.clone();
    let mut history = Vec::new();
    for iter in 1..=cfg.max_iters {
        let tv = op.apply(&v)?;
        let next_values: Vec<f64> = v
            .values()
            .iter()
            .zip(tv.values())
            .map(|(a, b)| (1.0 - d) * a + d * b)
            .collect();
        if next_values.iter().any(|x| !x.is_finite()) {
            history.push(HistoryRow {
                iter,
                sup_norm: f64::INFINITY,
                residual: f64::INFINITY,
            });
            return Ok(PicardOutcome {
                verdict: PicardVerdict::Diverged,
                iterate: v,
                history,
                audit_residual: None,
            });
        }
        let next = v.with_values(next_values)?;
        let residual = next.distance(&v);
        let sup_norm = next.sup_norm();
        history.push(HistoryRow {
            iter,
            sup_norm,
            residual,
        });
        v = next;
        if sup_norm > cfg.divergence_cap {
            return Ok(PicardOutcome {
                verdict: PicardVerdict::Diverged,
                iterate: v,
                history,
                audit_residual: None,
            });
        }
        if residual < cfg.contraction_tol {
            let audit = op.apply(&v)?.distance(&v);
            let verdict = if audit < cfg.contraction_tol {
                PicardVerdict::Converged
            } else {
                PicardVerdict::Inconclusive
            };
            return Ok(PicardOutcome {
                verdict,
                iterate: v,
                history,
                audit_residual: Some(audit),
            });
        }
    }
    Ok(PicardOutcome {
        verdict: PicardVerdict::Inconclusive,
        iterate: v,
        history,
        audit_residual: None,
    })
}

/// CSV with header `schema_version,iter,sup_norm,residual`.
pub fn write_history_csv<W: Write>(history: &[HistoryRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["schema_version", "iter", "sup_norm", "residual"])?;
    for row in history {
        w.serialize((HISTORY_SCHEMA_VERSION, row.iter, row.sup_norm, row.residual))?;
    }
    w.flush()?;
    Ok(())
}

/// `hbar s^q` for `s >= 0` and `kbar |s|^q` for `s < 0`.
pub fn limit_nonlinearity(hbar: f64, kbar: f64, q: f64, s: f64) -> f64 {
    if s >= 0.0 {
        hbar * s.powf(q)
    } else {
        kbar * (-s).powf(q)
    }
}
