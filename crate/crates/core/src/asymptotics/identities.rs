//! Interface identities of transmission pairs and the reciprocity and
//! integration-by-parts relations used by the corrector.

use serde::Serialize;

use crate::boundary_ops::{inner, BoundaryField, Side};
use crate::error::{Error, Result};
use crate::geometry::CurveNodes;
use crate::kernels::{conormal, rigid_motion, strain, LameParams, Mat2};
use crate::transmission::TwoPhaseSolution;

use super::{conormals, InterfaceTensors};

/// Largest nodal violation of each identity, relative to the size of the
/// quantities compared.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct IdentityReport {
    /// `(ℂ_l∇̂wᵉ)τ = (𝕄_{l,k}∇̂wⁱ)τ`
    pub identity1: f64,
    /// `(ℂ_k∇̂wⁱ)τ = (𝕄_{k,l}∇̂wᵉ)τ`
    pub identity2: f64,
    /// `∇wᵉn - ∇wⁱn = (𝕂_{l,k}∇̂wⁱ)n`
    pub identity3: f64,
    /// `∇wᵉn - ∇wⁱn = -(𝕂_{k,l}∇̂wᵉ)n`
    pub identity3_reversed: f64,
}

impl IdentityReport {
    pub fn max(&self) -> f64 {
        self.identity1.max(self.identity2).max(self.identity3).max(self.identity3_reversed)
    }
}

/// Checks the identities for given interface gradients of a pair `w` with
/// material `l` outside and `k` inside.
pub fn tensor_identities_from_gradients(
    outer: &LameParams,
    inner_p: &LameParams,
    nodes: &CurveNodes,
    grad_in: &[Mat2],
    grad_out: &[Mat2],
) -> Result<IdentityReport> {
    let n = nodes.len();
    if grad_in.len() != n || grad_out.len() != n {
        return Err(Error::SizeMismatch { expected: n, got: grad_in.len().min(grad_out.len()) });
    }
    let lk = InterfaceTensors::new(*outer, *inner_p);
    let kl = InterfaceTensors::new(*inner_p, *outer);
    let (cl, ck) = (outer.tensor(), inner_p.tensor());
    let scale = grad_in.iter().chain(grad_out).map(|g| g.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut r = IdentityReport::default();
    for j in 0..n {
        let (t, nn) = (nodes.tangent[j], nodes.normal[j]);
        let (ei, ee) = (strain(&grad_in[j]), strain(&grad_out[j]));
        let jump = grad_out[j] * nn - grad_in[j] * nn;
        let stress_scale = scale * (cl.lambda.abs() + cl.mu + ck.lambda.abs() + ck.mu);
        r.identity1 = r.identity1.max((cl.apply(&ee) * t - lk.m_tau(&ei, &t)).norm() / stress_scale);
        r.identity2 = r.identity2.max((ck.apply(&ei) * t - kl.m_tau(&ee, &t)).norm() / stress_scale);
        r.identity3 = r.identity3.max((jump - lk.k_n(&ei, &t, &nn)).norm() / scale);
        r.identity3_reversed = r.identity3_reversed.max((jump + kl.k_n(&ee, &t, &nn)).norm() / scale);
    }
    Ok(r)
}

/// The identities for a solved pair, with on-curve gradients from the
/// interior and exterior representations.
pub fn tensor_identities_check(w: &TwoPhaseSolution) -> Result<IdentityReport> {
    tensor_identities_from_gradients(
        w.background_material(),
        w.core_material(),
        w.base.nodes(),
        &w.interior_gradient(),
        &w.exterior_gradient()?,
    )
}

/// `∫ ∂/∂τ(h(ℂ₀∇̂uᵉ)τ)·θ₃ dσ + ∫ h ∂uᵉ/∂ν₀·τ dσ`, which vanishes.
pub fn integration_by_parts_check(w: &TwoPhaseSolution, h: &[f64]) -> Result<f64> {
    let nodes = w.base.nodes();
    if h.len() != nodes.len() {
        return Err(Error::SizeMismatch { expected: nodes.len(), got: h.len() });
    }
    let p0 = w.background_material();
    let grads = w.exterior_gradient()?;
    let c = p0.tensor();
    let stress: BoundaryField = (0..nodes.len()).map(|j| c.apply(&strain(&grads[j])) * nodes.tangent[j] * h[j]).collect();
    let d = nodes.tangential_derivative_vec(&stress);
    let theta: BoundaryField = nodes.points.iter().map(|x| rigid_motion(2, x)).collect();
    let tr: BoundaryField = (0..nodes.len()).map(|j| conormal(p0, &grads[j], &nodes.normal[j])).collect();
    let ht: BoundaryField = (0..nodes.len()).map(|j| nodes.tangent[j] * h[j]).collect();
    Ok(inner(nodes, &d, &theta) + inner(nodes, &tr, &ht))
}

/// Betti reciprocity between two solved pairs on the same curve:
/// `∫ g·∂f/∂ν - f·∂g/∂ν` over `∂D` for the interior fields and for the
/// scattered exterior fields `𝒮₀[φ₀⁰]`. Both vanish.
pub fn reciprocity_check(f: &TwoPhaseSolution, g: &TwoPhaseSolution) -> Result<(f64, f64)> {
    let nodes = f.base.nodes();
    if g.base.nodes().len() != nodes.len() {
        return Err(Error::SizeMismatch { expected: nodes.len(), got: g.base.nodes().len() });
    }
    let (i, o) = (&f.system.inner, &f.system.outer);
    let (fi, gi) = (i.s_trace(&f.phi_in), i.s_trace(&g.phi_in));
    let (tfi, tgi) = (
        conormals(i.params(), nodes, &f.interior_gradient()),
        conormals(i.params(), nodes, &g.interior_gradient()),
    );
    let interior = inner(nodes, &gi, &tfi) - inner(nodes, &fi, &tgi);
    let (fe, ge) = (o.s_trace(&f.phi_out), o.s_trace(&g.phi_out));
    let (tfe, tge) = (o.s_conormal(&f.phi_out, Side::Exterior), o.s_conormal(&g.phi_out, Side::Exterior));
    let exterior = inner(nodes, &ge, &tfe) - inner(nodes, &fe, &tge);
    let scale = (inner(nodes, &gi, &gi) * inner(nodes, &tfi, &tfi)).sqrt().max(f64::MIN_POSITIVE);
    let scale_e = (inner(nodes, &ge, &ge) * inner(nodes, &tfe, &tfe)).sqrt().max(f64::MIN_POSITIVE);
    Ok((interior.abs() / scale, exterior.abs() / scale_e))
}
