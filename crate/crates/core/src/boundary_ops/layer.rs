//! All on-curve operators of one material on one curve, assembled lazily.

use std::sync::OnceLock;

use faer::Mat;

use crate::error::Result;
use crate::geometry::CurveNodes;
use crate::kernels::{LameParams, Mat2, Vec2};
use crate::linalg::DenseLu;

use super::{
    assemble_k, assemble_ksharp, assemble_ksharp_star, assemble_kstar, assemble_single_layer, flatten, unflatten,
    BoundaryField, OperatorMatrix,
};

/// Side of the curve a boundary value is taken from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `|₊`, from outside the enclosed domain.
    Exterior,
    /// `|₋`, from inside.
    Interior,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Exterior => 1.0,
            Side::Interior => -1.0,
        }
    }
}

pub struct LayerOperators {
    p: LameParams,
    nodes: CurveNodes,
    s: OnceLock<OperatorMatrix>,
    k: OnceLock<OperatorMatrix>,
    kstar: OnceLock<OperatorMatrix>,
    ksharp: OnceLock<OperatorMatrix>,
    ksharp_star: OnceLock<OperatorMatrix>,
    dtn: OnceLock<DenseLu>,
}

fn add_scaled(f: &mut [Vec2], g: &[Vec2], s: f64) {
    f.iter_mut().zip(g).for_each(|(a, b)| *a += b * s);
}

impl LayerOperators {
    pub fn new(p: &LameParams, nodes: &CurveNodes) -> Self {
        Self {
            p: *p,
            nodes: nodes.clone(),
            s: OnceLock::new(),
            k: OnceLock::new(),
            kstar: OnceLock::new(),
            ksharp: OnceLock::new(),
            ksharp_star: OnceLock::new(),
            dtn: OnceLock::new(),
        }
    }

    pub fn params(&self) -> &LameParams {
        &self.p
    }

    pub fn nodes(&self) -> &CurveNodes {
        &self.nodes
    }

    pub fn single_layer(&self) -> &OperatorMatrix {
        self.s.get_or_init(|| assemble_single_layer(&self.p, &self.nodes))
    }

    pub fn k(&self) -> &OperatorMatrix {
        self.k.get_or_init(|| assemble_k(&self.p, &self.nodes))
    }

    pub fn kstar(&self) -> &OperatorMatrix {
        self.kstar.get_or_init(|| assemble_kstar(&self.p, &self.nodes))
    }

    pub fn ksharp(&self) -> &OperatorMatrix {
        self.ksharp.get_or_init(|| assemble_ksharp(&self.p, &self.nodes))
    }

    pub fn ksharp_star(&self) -> &OperatorMatrix {
        self.ksharp_star.get_or_init(|| assemble_ksharp_star(&self.p, &self.nodes))
    }

    /// `𝒮[φ]` on the curve (continuous across it).
    pub fn s_trace(&self, phi: &[Vec2]) -> BoundaryField {
        self.single_layer().apply(phi)
    }

    /// `∂𝒮[φ]/∂ν|± = (±½ I + 𝒦*)[φ]`
    pub fn s_conormal(&self, phi: &[Vec2], side: Side) -> BoundaryField {
        let mut out = self.kstar().apply(phi);
        add_scaled(&mut out, phi, 0.5 * side.sign());
        out
    }

    /// `𝒟[φ]|± = (∓½ I + 𝒦)[φ]`
    pub fn d_trace(&self, phi: &[Vec2], side: Side) -> BoundaryField {
        let mut out = self.k().apply(phi);
        add_scaled(&mut out, phi, -0.5 * side.sign());
        out
    }

    /// `𝒟♯[φ]|± = (∓(1/2μ) I ± B n⊗n + 𝒦♯)[φ]`
    pub fn dsharp_trace(&self, phi: &[Vec2], side: Side) -> BoundaryField {
        let mut out = self.ksharp().apply(phi);
        let s = side.sign();
        let (mu, b) = (self.p.mu, self.p.kelvin_b());
        for (j, o) in out.iter_mut().enumerate() {
            let n = self.nodes.normal[j];
            *o += phi[j] * (-s / (2.0 * mu)) + n * (s * b * n.dot(&phi[j]));
        }
        out
    }

    /// `∂𝒮[φ]/∂n|± = (±(1/2μ) I ∓ B n⊗n + (𝒦♯)*)[φ]`
    pub fn s_normal_derivative(&self, phi: &[Vec2], side: Side) -> BoundaryField {
        let mut out = self.ksharp_star().apply(phi);
        let s = side.sign();
        let (mu, b) = (self.p.mu, self.p.kelvin_b());
        for (j, o) in out.iter_mut().enumerate() {
            let n = self.nodes.normal[j];
            *o += phi[j] * (s / (2.0 * mu)) - n * (s * b * n.dot(&phi[j]));
        }
        out
    }

    /// Full gradient of `𝒮[φ]` on the curve from one side,
    /// `∂_τ𝒮[φ] ⊗ τ + ∂_n𝒮[φ]|± ⊗ n`.
    pub fn s_gradient(&self, phi: &[Vec2], side: Side) -> Vec<Mat2> {
        let trace = self.s_trace(phi);
        let dtau = self.nodes.tangential_derivative_vec(&trace);
        let dn = self.s_normal_derivative(phi, side);
        (0..self.nodes.len())
            .map(|j| dtau[j] * self.nodes.tangent[j].transpose() + dn[j] * self.nodes.normal[j].transpose())
            .collect()
    }

    fn dtn_lu(&self) -> &DenseLu {
        self.dtn.get_or_init(|| {
            let n = self.nodes.len();
            let s = &self.single_layer().entries;
            let w = self.nodes.weights();
            let mut a = Mat::<f64>::zeros(2 * n + 2, 2 * n + 2);
            for j in 0..2 * n {
                for i in 0..2 * n {
                    a[(i, j)] = s[(i, j)];
                }
            }
            for j in 0..n {
                for c in 0..2 {
                    a[(2 * j + c, 2 * n + c)] = 1.0;
                    a[(2 * n + c, 2 * j + c)] = w[j];
                }
            }
            DenseLu::new(&a).expect("augmented single layer system is finite")
        })
    }

    /// Density `σ` with `∫σ = 0` and constant `c` such that `𝒮[σ] + c = f` on the curve.
    pub fn single_layer_density(&self, f: &[Vec2]) -> (BoundaryField, Vec2) {
        let n = self.nodes.len();
        let mut rhs = flatten(f);
        rhs.extend([0.0, 0.0]);
        let x = self.dtn_lu().solve(&rhs);
        (unflatten(&x[..2 * n]), Vec2::new(x[2 * n], x[2 * n + 1]))
    }

    /// Traction of the Lamé field with trace `f` on the given side. On the
    /// exterior the field is the one tending to a constant at infinity.
    pub fn dirichlet_to_neumann(&self, f: &[Vec2], side: Side) -> BoundaryField {
        let (sigma, _) = self.single_layer_density(f);
        self.s_conormal(&sigma, side)
    }

    /// `∂𝒟♯[φ]/∂ν|±`, through the Dirichlet-to-Neumann map of the trace.
    pub fn dsharp_conormal(&self, phi: &[Vec2], side: Side) -> BoundaryField {
        self.dirichlet_to_neumann(&self.dsharp_trace(phi, side), side)
    }

    /// Condition estimate of the augmented single layer system.
    pub fn dtn_condition(&self) -> f64 {
        self.dtn_lu().condition_estimate()
    }

    pub fn check_dtn(&self) -> Result<f64> {
        self.dtn_lu().check_condition()
    }
}
