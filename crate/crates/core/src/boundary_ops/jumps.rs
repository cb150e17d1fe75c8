//! Two-sided off-curve probes of the boundary limits of the layer potentials.

use serde::Serialize;

use crate::error::Result;
use crate::geometry::Boundary;
use crate::kernels::{conormal, LameParams, Vec2};

use super::potentials::one_sided_limit;
use super::{BoundaryField, LayerOperators, NearField, PotentialKind, Side};

/// Largest nodal violation of each limit relation, exterior then interior.
#[derive(Clone, Debug, Default, Serialize)]
pub struct JumpReport {
    pub s_trace: [f64; 2],
    pub s_conormal: [f64; 2],
    pub d_trace: [f64; 2],
    pub dsharp_trace: [f64; 2],
    pub s_normal_derivative: [f64; 2],
    /// Jump of the conormal of `𝒟♯[φ]` against its tangential-derivative formula.
    pub dsharp_conormal_jump: f64,
    /// One-sided conormals of `𝒟♯[φ]` against the Dirichlet-to-Neumann route.
    pub dsharp_conormal: [f64; 2],
}

impl JumpReport {
    pub fn max_violation(&self) -> f64 {
        [self.s_trace, self.s_conormal, self.d_trace, self.dsharp_trace, self.s_normal_derivative, self.dsharp_conormal]
            .iter()
            .flat_map(|a| a.iter())
            .copied()
            .chain(std::iter::once(self.dsharp_conormal_jump))
            .fold(0.0, f64::max)
    }

    /// Largest violation among the four trace relations and the conormal jump.
    pub fn max_core_violation(&self) -> f64 {
        [self.s_trace, self.s_conormal, self.d_trace, self.dsharp_trace, self.s_normal_derivative]
            .iter()
            .flat_map(|a| a.iter())
            .copied()
            .chain(std::iter::once(self.dsharp_conormal_jump))
            .fold(0.0, f64::max)
    }
}

/// `∂_τ((φ·τ) n + λ/(2μ+λ) (φ·n) τ)`
pub fn dsharp_conormal_jump_formula(p: &LameParams, ops: &LayerOperators, phi: &[Vec2]) -> BoundaryField {
    let nodes = ops.nodes();
    let c = p.lambda / (2.0 * p.mu + p.lambda);
    let g: Vec<Vec2> = (0..nodes.len())
        .map(|j| {
            let (t, n) = (nodes.tangent[j], nodes.normal[j]);
            n * phi[j].dot(&t) + t * (c * phi[j].dot(&n))
        })
        .collect();
    nodes.tangential_derivative_vec(&g)
}

/// Probes every `stride`-th node at offsets up to `δ` along `±n` and
/// compares the extrapolated limits with the on-curve operators.
pub fn check_jumps(
    p: &LameParams,
    boundary: &dyn Boundary,
    phi: &[Vec2],
    delta: f64,
    stride: usize,
) -> Result<JumpReport> {
    let nodes = boundary.nodes();
    let ops = LayerOperators::new(p, nodes);
    let near = NearField::new(p, boundary, phi, 0.25 * delta)?;
    let sides = [Side::Exterior, Side::Interior];
    let mut rep = JumpReport::default();
    let s_tr = ops.s_trace(phi);
    let s_con: Vec<BoundaryField> = sides.iter().map(|s| ops.s_conormal(phi, *s)).collect();
    let d_tr: Vec<BoundaryField> = sides.iter().map(|s| ops.d_trace(phi, *s)).collect();
    let ds_tr: Vec<BoundaryField> = sides.iter().map(|s| ops.dsharp_trace(phi, *s)).collect();
    let s_dn: Vec<BoundaryField> = sides.iter().map(|s| ops.s_normal_derivative(phi, *s)).collect();
    let ds_con: Vec<BoundaryField> = sides.iter().map(|s| ops.dsharp_conormal(phi, *s)).collect();
    let jump = dsharp_conormal_jump_formula(p, &ops, phi);
    let upd = |slot: &mut f64, a: Vec2, b: Vec2| *slot = slot.max((a - b).norm());
    for i in (0..nodes.len()).step_by(stride.max(1)) {
        let (x, n) = (nodes.points[i], nodes.normal[i]);
        let mut sharp_conormals = [Vec2::zeros(); 2];
        for (k, side) in sides.iter().enumerate() {
            let s = side.sign();
            let sv0 = one_sided_limit(|y| near.value(PotentialKind::Single, y), &x, &n, s, delta);
            upd(&mut rep.s_trace[k], sv0, s_tr[i]);
            let gs = one_sided_limit(|y| near.gradient(PotentialKind::Single, y).unwrap(), &x, &n, s, delta);
            upd(&mut rep.s_conormal[k], conormal(p, &gs, &n), s_con[k][i]);
            upd(&mut rep.s_normal_derivative[k], gs * n, s_dn[k][i]);
            let dv = one_sided_limit(|y| near.value(PotentialKind::Double, y), &x, &n, s, delta);
            upd(&mut rep.d_trace[k], dv, d_tr[k][i]);
            let sv = one_sided_limit(|y| near.value(PotentialKind::Sharp, y), &x, &n, s, delta);
            upd(&mut rep.dsharp_trace[k], sv, ds_tr[k][i]);
            let gd = one_sided_limit(|y| near.gradient(PotentialKind::Sharp, y).unwrap(), &x, &n, s, delta);
            sharp_conormals[k] = conormal(p, &gd, &n);
            upd(&mut rep.dsharp_conormal[k], sharp_conormals[k], ds_con[k][i]);
        }
        upd(&mut rep.dsharp_conormal_jump, sharp_conormals[0] - sharp_conormals[1], jump[i]);
    }
    Ok(rep)
}
