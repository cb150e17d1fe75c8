//! First-order expansion of the coated field in the layer thickness.
//!
//! With `u` the uncoated field, `u_ε = u + ε u₁ + o(ε)` away from the
//! inclusion. The corrector densities solve `𝒬₀(φ₁¹, φ₀¹) = ℋ₁ + 𝒬₁(φ₀⁰) - 𝒵(φ₁⁰)`
//! and
//!
//! ```text
//! u₁ = 𝒮₀[φ₀¹ - κhφ₀⁰] + 𝒟♯₀[hφ₀⁰]   outside,      u₁ = 𝒮₁[φ₁¹]   inside.
//! ```

use std::sync::{Arc, OnceLock};

use crate::boundary_ops::{BoundaryField, LayerOperators, Side};
use crate::error::{Error, Result};
use crate::geometry::{ClosedCurve, CurveNodes, ThicknessProfile};
use crate::kernels::{conormal, strain, LameParams, Mat2, Vec2};
use crate::transmission::{BackgroundField, TwoPhaseSystem};

mod certify;
mod corrector;
mod identities;

pub use certify::{
    corrector_functional,
    certify_theorem_1_1, certify_theorem_1_2, measurement_functional, rhs_functional, ExpansionSetup, Thm11Report,
    Thm11Row, Thm12Report, Thm12Row, ERROR_FLOOR, SLOPE_E0, SLOPE_E1,
};
pub use corrector::{solve_corrector, solve_corrector_from_jumps, CorrectorSolution, JumpCheck};
pub use identities::{
    integration_by_parts_check, reciprocity_check, tensor_identities_check, tensor_identities_from_gradients,
    IdentityReport,
};

/// Closed forms of `𝕄_{l,k}` and `𝕂_{l,k}` for the pair of materials
/// `l` (outside the interface) and `k` (inside).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterfaceTensors {
    pub outer: LameParams,
    pub inner: LameParams,
}

impl InterfaceTensors {
    pub fn new(outer: LameParams, inner: LameParams) -> Self {
        Self { outer, inner }
    }

    /// `(𝕄_{l,k}E)τ = c₁ tr(E) τ + 2μ_k Eτ + c₃ ⟨Eτ,τ⟩ τ`
    pub fn m_tau(&self, e: &Mat2, tau: &Vec2) -> Vec2 {
        let (l, k) = (&self.outer, &self.inner);
        let c1 = l.lambda * (k.lambda + 2.0 * k.mu) / (l.lambda + 2.0 * l.mu);
        let c3 = 4.0 * (l.mu - k.mu) * (l.lambda + l.mu) / (l.lambda + 2.0 * l.mu);
        let et = e * tau;
        tau * (c1 * e.trace() + c3 * et.dot(tau)) + et * (2.0 * k.mu)
    }

    /// `(𝕂_{l,k}E)n = d₁ tr(E) n + 2(μ_k/μ_l - 1) En + d₃ ⟨Eτ,τ⟩ n`
    pub fn k_n(&self, e: &Mat2, tau: &Vec2, n: &Vec2) -> Vec2 {
        let (l, k) = (&self.outer, &self.inner);
        let den = l.mu * (l.lambda + 2.0 * l.mu);
        let d1 = (l.mu * (k.lambda - l.lambda) + 2.0 * (l.mu - k.mu) * (l.lambda + l.mu)) / den;
        let d3 = 2.0 * (k.mu - l.mu) * (l.lambda + l.mu) / den;
        n * (d1 * e.trace() + d3 * (e * tau).dot(tau)) + e * n * (2.0 * (k.mu / l.mu - 1.0))
    }
}

fn add(a: &[Vec2], b: &[Vec2]) -> BoundaryField {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub(a: &[Vec2], b: &[Vec2]) -> BoundaryField {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn scale(s: &[f64], a: &[Vec2]) -> BoundaryField {
    s.iter().zip(a).map(|(c, v)| v * *c).collect()
}

/// A pair of boundary fields, the value row and the traction row.
pub type Pair = (BoundaryField, BoundaryField);

/// The expansion operators on `∂D` for background `0`, core `1`, layer `2`.
pub struct Expansion {
    pub system: Arc<TwoPhaseSystem>,
    pub layer: LameParams,
    pub profile: ThicknessProfile,
    h: Vec<f64>,
    kh: Vec<f64>,
    layer_ops: OnceLock<LayerOperators>,
}

impl Expansion {
    pub fn new(system: Arc<TwoPhaseSystem>, layer: &LameParams, profile: &ThicknessProfile) -> Result<Self> {
        layer.validate()?;
        // h ≡ 0 is allowed here; only the coated solver needs h > 0
        if !profile.cos.iter().chain(&profile.sin).chain([&profile.mean]).all(|c| c.is_finite()) {
            return Err(Error::Invalid("thickness profile has non-finite coefficients".into()));
        }
        let nodes = system.nodes();
        let h = profile.sample(nodes.len());
        let kh = h.iter().zip(&nodes.curvature).map(|(h, k)| h * k).collect();
        Ok(Self { system, layer: *layer, profile: profile.clone(), h, kh, layer_ops: OnceLock::new() })
    }

    pub fn for_curve(materials: &crate::kernels::MaterialTriple, base: &ClosedCurve, profile: &ThicknessProfile) -> Result<Self> {
        let system = Arc::new(TwoPhaseSystem::new(&materials.background, &materials.core, base.nodes())?);
        Self::new(system, &materials.layer, profile)
    }

    pub fn nodes(&self) -> &CurveNodes {
        self.system.nodes()
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    /// `κh` at the nodes.
    pub fn kappa_h(&self) -> &[f64] {
        &self.kh
    }

    fn outer(&self) -> &LayerOperators {
        &self.system.outer
    }

    fn inner(&self) -> &LayerOperators {
        &self.system.inner
    }

    fn layer_ops(&self) -> &LayerOperators {
        self.layer_ops.get_or_init(|| LayerOperators::new(&self.layer, self.nodes()))
    }

    fn check_len(&self, f: &[Vec2]) -> Result<()> {
        let n = self.nodes().len();
        if f.len() != n {
            return Err(Error::SizeMismatch { expected: n, got: f.len() });
        }
        Ok(())
    }

    /// `∂/∂τ (h v)` for a sampled vector field `v`.
    pub fn d_tau_h(&self, v: &[Vec2]) -> BoundaryField {
        self.nodes().tangential_derivative_vec(&scale(&self.h, v))
    }

    /// `(ℂ∇̂w)τ` from nodal gradients.
    fn stress_tau(&self, p: &LameParams, grads: &[Mat2]) -> BoundaryField {
        let t = p.tensor();
        grads.iter().zip(&self.nodes().tangent).map(|(g, tau)| t.apply(&strain(g)) * tau).collect()
    }

    /// `∇w n`
    fn normal_derivative(&self, grads: &[Mat2]) -> BoundaryField {
        grads.iter().zip(&self.nodes().normal).map(|(g, n)| g * n).collect()
    }

    pub fn op_q0(&self, phi: &[Vec2], psi: &[Vec2]) -> Result<Pair> {
        self.check_len(phi)?;
        self.check_len(psi)?;
        Ok(self.system.apply(phi, psi))
    }

    /// `𝒬₁(ψ)`
    pub fn op_q1(&self, psi: &[Vec2]) -> Result<Pair> {
        self.check_len(psi)?;
        let o = self.outer();
        let khpsi = scale(&self.kh, psi);
        let hpsi = scale(&self.h, psi);
        let dn = o.s_normal_derivative(psi, Side::Exterior);
        let row1 = add(&sub(&scale(&self.h, &dn), &o.s_trace(&khpsi)), &o.dsharp_trace(&hpsi, Side::Exterior));
        let grad = o.s_gradient(psi, Side::Exterior);
        let row2 = sub(
            &add(
                &sub(&scale(&self.kh, &o.s_conormal(psi, Side::Exterior)), &o.s_conormal(&khpsi, Side::Exterior)),
                &o.dsharp_conormal(&hpsi, Side::Exterior),
            ),
            &self.d_tau_h(&self.stress_tau(o.params(), &grad)),
        );
        Ok((row1, row2))
    }

    /// `𝒵(φ)`
    pub fn op_z(&self, phi: &[Vec2]) -> Result<Pair> {
        self.check_len(phi)?;
        let i = self.inner();
        let grad = i.s_gradient(phi, Side::Interior);
        let t21 = InterfaceTensors::new(self.layer, *i.params());
        let nodes = self.nodes();
        let kn: BoundaryField =
            (0..nodes.len()).map(|j| t21.k_n(&strain(&grad[j]), &nodes.tangent[j], &nodes.normal[j])).collect();
        let mt: BoundaryField = (0..nodes.len()).map(|j| t21.m_tau(&strain(&grad[j]), &nodes.tangent[j])).collect();
        let row1 = scale(&self.h, &add(&i.s_normal_derivative(phi, Side::Interior), &kn));
        let row2 = sub(&scale(&self.kh, &i.s_conormal(phi, Side::Interior)), &self.d_tau_h(&mt));
        Ok((row1, row2))
    }

    /// `ℛ₁(φ, ψ)` with the layer material.
    pub fn op_r1(&self, phi: &[Vec2], psi: &[Vec2]) -> Result<Pair> {
        self.check_len(phi)?;
        self.check_len(psi)?;
        let l = self.layer_ops();
        let row1 = scale(
            &self.h,
            &add(&l.s_normal_derivative(phi, Side::Exterior), &l.s_normal_derivative(psi, Side::Interior)),
        );
        let tr = add(&l.s_conormal(phi, Side::Exterior), &l.s_conormal(psi, Side::Interior));
        let st = add(
            &self.stress_tau(&self.layer, &l.s_gradient(phi, Side::Exterior)),
            &self.stress_tau(&self.layer, &l.s_gradient(psi, Side::Interior)),
        );
        Ok((row1, sub(&scale(&self.kh, &tr), &self.d_tau_h(&st))))
    }

    /// `ℋ₀ = (H, ∂H/∂ν₀)` on `∂D`.
    pub fn make_h0(&self, h: &BackgroundField) -> Result<Pair> {
        let p0 = self.outer().params();
        Ok((h.sample(p0, self.nodes())?, h.sample_conormal(p0, self.nodes())?))
    }

    /// `ℋ₁ = (h ∂H/∂n, κh ∂H/∂ν₀ - ∂/∂τ(h(ℂ₀∇̂H)τ))`
    pub fn make_h1(&self, h: &BackgroundField) -> Result<Pair> {
        let p0 = *self.outer().params();
        let grads = h.sample_gradient(&p0, self.nodes())?;
        let row1 = scale(&self.h, &self.normal_derivative(&grads));
        let cn = h.sample_conormal(&p0, self.nodes())?;
        let row2 = sub(&scale(&self.kh, &cn), &self.d_tau_h(&self.stress_tau(&p0, &grads)));
        Ok((row1, row2))
    }

    /// Value and traction jumps `(u₁ⁱ - u₁ᵉ, ∂u₁/∂ν₁|₋ - ∂u₁/∂ν₀|₊)` implied by
    /// the interior gradient of `u`.
    pub fn corrector_jumps(&self, grad_in: &[Mat2]) -> Result<Pair> {
        if grad_in.len() != self.nodes().len() {
            return Err(Error::SizeMismatch { expected: self.nodes().len(), got: grad_in.len() });
        }
        let p1 = *self.inner().params();
        let p0 = *self.outer().params();
        let t01 = InterfaceTensors::new(p0, p1);
        let t21 = InterfaceTensors::new(self.layer, p1);
        let nodes = self.nodes();
        let (mut f, mut m) = (Vec::with_capacity(nodes.len()), Vec::with_capacity(nodes.len()));
        for j in 0..nodes.len() {
            let e = strain(&grad_in[j]);
            let (tau, n) = (nodes.tangent[j], nodes.normal[j]);
            f.push((t01.k_n(&e, &tau, &n) - t21.k_n(&e, &tau, &n)) * self.h[j]);
            m.push(t21.m_tau(&e, &tau) - t01.m_tau(&e, &tau));
        }
        Ok((f, self.d_tau_h(&m)))
    }
}

/// Conormals of a set of gradients with the node normals.
pub(crate) fn conormals(p: &LameParams, nodes: &CurveNodes, grads: &[Mat2]) -> BoundaryField {
    grads.iter().zip(&nodes.normal).map(|(g, n)| conormal(p, g, n)).collect()
}
