//! The corrector `u₁`, by the recursive densities and, independently, by a
//! transmission solve with the interface jumps as data.

use serde::Serialize;

use crate::boundary_ops::{
    eval_dsharp, eval_dsharp_gradient, eval_single_layer, eval_single_layer_gradient, max_norm, psi_moments,
    BoundaryField, Side,
};
use crate::error::{Error, Result};
use crate::geometry::{CurveNodes, Point};
use crate::kernels::{LameParams, Mat2, Vec2};
use crate::transmission::TwoPhaseSolution;

use super::{add, conormals, scale, sub, Expansion};

/// `u₁ = 𝒮₀[a] + 𝒟♯₀[b]` outside and `𝒮₁[c]` inside.
pub struct CorrectorSolution {
    pub background: LameParams,
    pub core: LameParams,
    pub nodes: CurveNodes,
    /// `φ₁¹`
    pub phi_in: BoundaryField,
    /// `φ₀¹`; zero for the jump route.
    pub phi_out: BoundaryField,
    /// Single layer density outside, `a`.
    pub exterior_single: BoundaryField,
    /// `𝒟♯` density outside, `b = hφ₀⁰`; zero for the jump route.
    pub exterior_sharp: BoundaryField,
    pub residual: f64,
}

/// Interface conditions of `u₁` measured against the closed forms.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct JumpCheck {
    pub value: f64,
    pub traction: f64,
    /// Sizes of the prescribed jumps, for scale.
    pub value_scale: f64,
    pub traction_scale: f64,
}

/// Solves `𝒬₀(φ₁¹, φ₀¹) = ℋ₁ + 𝒬₁(φ₀⁰) - 𝒵(φ₁⁰)` and assembles `u₁`.
pub fn solve_corrector(exp: &Expansion, zeroth: &TwoPhaseSolution) -> Result<CorrectorSolution> {
    check_compatible(exp, zeroth)?;
    let (h1v, h1t) = exp.make_h1(&zeroth.background)?;
    let (q1v, q1t) = exp.op_q1(&zeroth.phi_out)?;
    let (zv, zt) = exp.op_z(&zeroth.phi_in)?;
    let f = sub(&add(&h1v, &q1v), &zv);
    let g = sub(&add(&h1t, &q1t), &zt);
    let (phi_in, phi_out, residual) = exp.system.solve(&f, &g)?;
    let exterior_single = sub(&phi_out, &scale(exp.kappa_h(), &zeroth.phi_out));
    let exterior_sharp = scale(exp.h(), &zeroth.phi_out);
    Ok(CorrectorSolution {
        background: *exp.system.outer.params(),
        core: *exp.system.inner.params(),
        nodes: exp.nodes().clone(),
        phi_in,
        phi_out,
        exterior_single,
        exterior_sharp,
        residual,
    })
}

/// `u₁` as the decaying solution of the transmission problem whose value
/// and traction jumps are given by the interface tensors.
pub fn solve_corrector_from_jumps(exp: &Expansion, zeroth: &TwoPhaseSolution) -> Result<CorrectorSolution> {
    check_compatible(exp, zeroth)?;
    let (f, g) = exp.corrector_jumps(&zeroth.interior_gradient())?;
    let (a, b, residual) = exp.system.solve(&f, &g)?;
    let n = a.len();
    Ok(CorrectorSolution {
        background: *exp.system.outer.params(),
        core: *exp.system.inner.params(),
        nodes: exp.nodes().clone(),
        phi_in: a,
        phi_out: vec![Vec2::zeros(); n],
        exterior_single: b,
        exterior_sharp: vec![Vec2::zeros(); n],
        residual,
    })
}

fn check_compatible(exp: &Expansion, zeroth: &TwoPhaseSolution) -> Result<()> {
    let (a, b) = (exp.nodes(), zeroth.base.nodes());
    if a.len() != b.len() || a.points.iter().zip(&b.points).any(|(x, y)| (x - y).norm() > 1e-14) {
        return Err(Error::Invalid("corrector and zeroth-order solution live on different curves".into()));
    }
    if exp.system.outer.params() != zeroth.background_material() || exp.system.inner.params() != zeroth.core_material() {
        return Err(Error::Invalid("corrector and zeroth-order solution use different materials".into()));
    }
    Ok(())
}

impl CorrectorSolution {
    fn inside(&self, x: &Point) -> bool {
        self.nodes.contains(*x)
    }

    /// `u₁` at points away from `∂D`.
    pub fn eval_field(&self, points: &[Point]) -> Result<Vec<Vec2>> {
        points
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let pts = std::slice::from_ref(x);
                let r = if self.inside(x) {
                    eval_single_layer(&self.core, &self.nodes, &self.phi_in, pts).map(|v| v[0])
                } else {
                    let s = eval_single_layer(&self.background, &self.nodes, &self.exterior_single, pts);
                    let d = eval_dsharp(&self.background, &self.nodes, &self.exterior_sharp, pts);
                    s.and_then(|s| d.map(|d| s[0] + d[0]))
                };
                r.map_err(|e| match e {
                    Error::TooClose { distance, guard, .. } => Error::TooClose { index: i, distance, guard },
                    other => other,
                })
            })
            .collect()
    }

    /// `∇u₁` at points outside `D`.
    pub fn eval_exterior_gradient(&self, points: &[Point]) -> Result<Vec<Mat2>> {
        if points.iter().any(|x| self.inside(x)) {
            return Err(Error::Geometry("exterior gradient requested inside the inclusion".into()));
        }
        let s = eval_single_layer_gradient(&self.background, &self.nodes, &self.exterior_single, points)?;
        let d = eval_dsharp_gradient(&self.background, &self.nodes, &self.exterior_sharp, points)?;
        Ok(s.iter().zip(&d).map(|(a, b)| a + b).collect())
    }

    /// `∂u₁/∂ν₀` on a curve outside `D`.
    pub fn eval_conormal_on_curve(&self, s: &CurveNodes) -> Result<BoundaryField> {
        Ok(conormals(&self.background, s, &self.eval_exterior_gradient(&s.points)?))
    }

    /// Rigid moments of `φ₀¹ - κhφ₀⁰ + ∂/∂τ(h(φ₀⁰·τ)n + λ₀/(2μ₀+λ₀) h(φ₀⁰·n)τ)`,
    /// the density whose exterior traction is that of `u₁`.
    pub fn decay_moments(&self, exp: &Expansion, zeroth: &TwoPhaseSolution) -> [f64; 3] {
        let p0 = self.background;
        let c = p0.lambda / (2.0 * p0.mu + p0.lambda);
        let nodes = &self.nodes;
        let w: BoundaryField = (0..nodes.len())
            .map(|j| {
                let (t, n, f) = (nodes.tangent[j], nodes.normal[j], zeroth.phi_out[j]);
                n * f.dot(&t) + t * (c * f.dot(&n))
            })
            .collect();
        let combo = add(&self.exterior_single, &exp.d_tau_h(&w));
        psi_moments(nodes, &combo)
    }

    /// Boundary traces `(u₁ⁱ, u₁ᵉ, ∂u₁/∂ν₁|₋, ∂u₁/∂ν₀|₊)` on `∂D`.
    pub fn traces(&self, exp: &Expansion) -> (BoundaryField, BoundaryField, BoundaryField, BoundaryField) {
        let (o, i) = (&exp.system.outer, &exp.system.inner);
        let vi = i.s_trace(&self.phi_in);
        let ti = i.s_conormal(&self.phi_in, Side::Interior);
        let mut ve = o.s_trace(&self.exterior_single);
        let mut te = o.s_conormal(&self.exterior_single, Side::Exterior);
        if max_norm(&self.exterior_sharp) > 0.0 {
            ve = add(&ve, &o.dsharp_trace(&self.exterior_sharp, Side::Exterior));
            te = add(&te, &o.dsharp_conormal(&self.exterior_sharp, Side::Exterior));
        }
        (vi, ve, ti, te)
    }

    /// Compares the traces of `u₁` with the jumps implied by `∇uⁱ`.
    pub fn check_jumps(&self, exp: &Expansion, zeroth: &TwoPhaseSolution) -> Result<JumpCheck> {
        let (f, g) = exp.corrector_jumps(&zeroth.interior_gradient())?;
        let (vi, ve, ti, te) = self.traces(exp);
        Ok(JumpCheck {
            value: crate::boundary_ops::max_diff(&sub(&vi, &ve), &f),
            traction: crate::boundary_ops::max_diff(&sub(&ti, &te), &g),
            value_scale: max_norm(&f),
            traction_scale: max_norm(&g),
        })
    }
}
