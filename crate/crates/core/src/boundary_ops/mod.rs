//! Nyström discretization of the elastic layer potentials on a closed curve.
//!
//! Matrices act on densities stored node-major, component-minor: entry
//! `2j + c` is component `c` at node `j`. Quadrature is the periodic
//! trapezoid rule in `θ` with these corrections:
//!
//! * `𝒮`: the `log|x-y|` part is split off as `log(4 sin²((θ-θ')/2))` and
//!   integrated with exact circulant weights.
//! * `𝒦`, `𝒦*`, `𝒦♯`, `(𝒦♯)*`: the Cauchy part `C/(θ'-θ)` is integrated by the
//!   discrete periodic Hilbert transform, the remainder by the trapezoid rule
//!   with its analytic diagonal limit.

use std::f64::consts::PI;

use faer::Mat;

use crate::geometry::{CurveNodes, Point};
use crate::kernels::{
    column_conormal_kernel, normal_derivative_kernel, rigid_motion, LameParams, Mat2, Vec2,
};
use crate::spectral;

mod cross;
mod jumps;
mod layer;
mod potentials;

pub use cross::{cross_ops, upsampling_factor, CrossOperators};
pub use jumps::{check_jumps, dsharp_conormal_jump_formula, JumpReport};
pub use layer::{LayerOperators, Side};
pub use potentials::{
    eval_double_layer, eval_dsharp, eval_dsharp_gradient, eval_single_layer, eval_single_layer_gradient, one_sided_limit,
    NearField, PotentialKind, GUARD_MESH_WIDTHS, MAX_NEAR_FACTOR,
};

/// A 2-vector per curve node.
pub type BoundaryField = Vec<Vec2>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorKind {
    SingleLayer,
    K,
    KStar,
    KSharp,
    KSharpStar,
    CrossSingleLayer,
    CrossConormal,
}

/// Dense matrix of a boundary operator, `2·targets × 2·sources`.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    pub entries: Mat<f64>,
    pub kind: OperatorKind,
}

impl OperatorMatrix {
    pub fn targets(&self) -> usize {
        self.entries.nrows() / 2
    }

    pub fn sources(&self) -> usize {
        self.entries.ncols() / 2
    }

    pub fn apply(&self, f: &[Vec2]) -> BoundaryField {
        assert_eq!(f.len(), self.sources(), "density length does not match operator");
        unflatten(&crate::linalg::mat_vec(&self.entries, &flatten(f)))
    }

    pub fn block(&self, i: usize, j: usize) -> Mat2 {
        let e = &self.entries;
        Mat2::new(e[(2 * i, 2 * j)], e[(2 * i, 2 * j + 1)], e[(2 * i + 1, 2 * j)], e[(2 * i + 1, 2 * j + 1)])
    }
}

pub fn flatten(f: &[Vec2]) -> Vec<f64> {
    f.iter().flat_map(|v| [v.x, v.y]).collect()
}

pub fn unflatten(x: &[f64]) -> BoundaryField {
    x.chunks_exact(2).map(|c| Vec2::new(c[0], c[1])).collect()
}

/// `∫ f·θ_m dσ` for the three rigid motions.
pub fn psi_moments(nodes: &CurveNodes, f: &[Vec2]) -> [f64; 3] {
    let w = nodes.weights();
    let mut out = [0.0; 3];
    for (m, o) in out.iter_mut().enumerate() {
        *o = (0..nodes.len()).map(|j| f[j].dot(&rigid_motion(m, &nodes.points[j])) * w[j]).sum();
    }
    out
}

/// `∫ f·g dσ`
pub fn inner(nodes: &CurveNodes, f: &[Vec2], g: &[Vec2]) -> f64 {
    nodes.weights().iter().enumerate().map(|(j, w)| f[j].dot(&g[j]) * w).sum()
}

pub fn max_norm(f: &[Vec2]) -> f64 {
    f.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

pub fn max_diff(f: &[Vec2], g: &[Vec2]) -> f64 {
    f.iter().zip(g).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
}

/// Samples a function of position at the nodes.
pub fn sample(nodes: &CurveNodes, f: impl Fn(&Point) -> Vec2) -> BoundaryField {
    nodes.points.iter().map(f).collect()
}

fn set_block(m: &mut Mat<f64>, i: usize, j: usize, b: &Mat2) {
    m[(2 * i, 2 * j)] = b[(0, 0)];
    m[(2 * i, 2 * j + 1)] = b[(0, 1)];
    m[(2 * i + 1, 2 * j)] = b[(1, 0)];
    m[(2 * i + 1, 2 * j + 1)] = b[(1, 1)];
}

#[inline]
fn outer(a: &Vec2, b: &Vec2) -> Mat2 {
    a * b.transpose()
}

/// `J = n⊗τ - τ⊗n`, the same at every node.
fn jmat() -> Mat2 {
    Mat2::new(0.0, 1.0, -1.0, 0.0)
}

pub fn assemble_single_layer(p: &LameParams, nodes: &CurveNodes) -> OperatorMatrix {
    let n = nodes.len();
    let w = 2.0 * PI / n as f64;
    let a = p.kelvin_a() / (2.0 * PI);
    let b = p.kelvin_b() / (2.0 * PI);
    let r_weights = spectral::log_weights(n);
    let mut m = Mat::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        let x = nodes.points[i];
        for j in 0..n {
            let vj = nodes.speed[j];
            let rw = r_weights[(i + n - j) % n];
            let blk = if i == j {
                let t = nodes.tangent[i];
                Mat2::identity() * (a * (0.5 * rw + w * vj.ln()) * vj) - outer(&t, &t) * (b * w * vj)
            } else {
                let r = x - nodes.points[j];
                let delta = 2.0 * PI * (j as f64 - i as f64) / n as f64;
                let log4sin2 = (4.0 * (0.5 * delta).sin().powi(2)).ln();
                let smooth_log = 0.5 * r.norm_squared().ln() - 0.5 * log4sin2;
                Mat2::identity() * (a * (0.5 * rw + w * smooth_log) * vj)
                    - outer(&r, &r) * (b * w * vj / r.norm_squared())
            };
            set_block(&mut m, i, j, &blk);
        }
    }
    OperatorMatrix { entries: m, kind: OperatorKind::SingleLayer }
}

/// Shared PV assembly. `kernel(i, j)` already includes the source speed.
fn assemble_pv(
    nodes: &CurveNodes,
    kind: OperatorKind,
    kernel: impl Fn(usize, usize) -> Mat2,
    cauchy: impl Fn(usize) -> Mat2,
    diagonal: impl Fn(usize) -> Mat2,
) -> OperatorMatrix {
    let n = nodes.len();
    let w = 2.0 * PI / n as f64;
    let h = spectral::hilbert_weights(n);
    let mut m = Mat::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        let c = cauchy(i);
        for j in 0..n {
            let hilbert = c * (PI * h[(i + n - j) % n]);
            let blk = if i == j {
                diagonal(i) * w + hilbert
            } else {
                let delta = 2.0 * PI * (j as f64 - i as f64) / n as f64;
                let half_cot = 0.5 / (0.5 * delta).tan();
                (kernel(i, j) - c * half_cot) * w + hilbert
            };
            set_block(&mut m, i, j, &blk);
        }
    }
    OperatorMatrix { entries: m, kind }
}

fn pv_diag_traction(p: &LameParams, nodes: &CurveNodes, i: usize) -> Mat2 {
    let alpha = p.alpha();
    let (v, dv, k, t) = (nodes.speed[i], nodes.speed_derivative[i], nodes.curvature[i], nodes.tangent[i]);
    (jmat() * (alpha * dv / (2.0 * v))
        - (Mat2::identity() * alpha + outer(&t, &t) * (2.0 * (1.0 - alpha))) * (0.5 * v * k))
        / (2.0 * PI)
}

/// `𝒦*[φ](x) = p.v.∫ T(x-y, n(x)) φ(y) dσ(y)`, the conormal of `𝒮` minus its jump.
pub fn assemble_kstar(p: &LameParams, nodes: &CurveNodes) -> OperatorMatrix {
    let c = jmat() * (p.alpha() / (2.0 * PI));
    assemble_pv(
        nodes,
        OperatorKind::KStar,
        |i, j| column_conormal_kernel(p, &(nodes.points[i] - nodes.points[j]), &nodes.normal[i]) * nodes.speed[j],
        |_| c,
        |i| pv_diag_traction(p, nodes, i),
    )
}

/// `𝒦[φ](x) = p.v.∫ 𝕂(x-y) φ(y) dσ(y)`
pub fn assemble_k(p: &LameParams, nodes: &CurveNodes) -> OperatorMatrix {
    let c = jmat() * (p.alpha() / (2.0 * PI));
    assemble_pv(
        nodes,
        OperatorKind::K,
        |i, j| {
            -column_conormal_kernel(p, &(nodes.points[i] - nodes.points[j]), &nodes.normal[j]).transpose()
                * nodes.speed[j]
        },
        |_| c,
        |i| pv_diag_traction(p, nodes, i),
    )
}

fn sym_p(nodes: &CurveNodes, i: usize) -> Mat2 {
    let (t, nn) = (nodes.tangent[i], nodes.normal[i]);
    outer(&nn, &t) + outer(&t, &nn)
}

/// `𝒦♯[φ](x) = p.v.∫ ∂Γ(x-y)/∂n(y) φ(y) dσ(y)`
pub fn assemble_ksharp(p: &LameParams, nodes: &CurveNodes) -> OperatorMatrix {
    let a = p.kelvin_a() / (2.0 * PI);
    let b = p.kelvin_b() / (2.0 * PI);
    assemble_pv(
        nodes,
        OperatorKind::KSharp,
        |i, j| -normal_derivative_kernel(p, &(nodes.points[i] - nodes.points[j]), &nodes.normal[j]) * nodes.speed[j],
        |i| -sym_p(nodes, i) * b,
        |i| {
            let (v, dv, k, t, nn) =
                (nodes.speed[i], nodes.speed_derivative[i], nodes.curvature[i], nodes.tangent[i], nodes.normal[i]);
            Mat2::identity() * (-0.5 * a * v * k) + (outer(&t, &t) - outer(&nn, &nn)) * (b * v * k)
                - sym_p(nodes, i) * (b * dv / (2.0 * v))
        },
    )
}

/// `(𝒦♯)*[φ](x) = p.v.∫ ∂Γ(x-y)/∂n(x) φ(y) dσ(y)`
pub fn assemble_ksharp_star(p: &LameParams, nodes: &CurveNodes) -> OperatorMatrix {
    let a = p.kelvin_a() / (2.0 * PI);
    let b = p.kelvin_b() / (2.0 * PI);
    assemble_pv(
        nodes,
        OperatorKind::KSharpStar,
        |i, j| normal_derivative_kernel(p, &(nodes.points[i] - nodes.points[j]), &nodes.normal[i]) * nodes.speed[j],
        |i| sym_p(nodes, i) * b,
        |i| {
            let (v, dv, k, t, nn) =
                (nodes.speed[i], nodes.speed_derivative[i], nodes.curvature[i], nodes.tangent[i], nodes.normal[i]);
            Mat2::identity() * (-0.5 * a * v * k) + (outer(&nn, &nn) - outer(&t, &t)) * (b * v * k)
                + sym_p(nodes, i) * (b * dv / (2.0 * v))
        },
    )
}

#[cfg(test)]
/// Plain trapezoid sum of `Γ(x_i - y_j) φ_j dσ_j`, for well-separated targets.
pub(crate) fn direct_single_layer(p: &LameParams, src: &CurveNodes, density: &[Vec2], x: &Point) -> Vec2 {
    use crate::kernels::kelvin_unchecked;
    let w = src.weights();
    (0..src.len()).map(|j| kelvin_unchecked(p, &(x - src.points[j])) * density[j] * w[j]).sum()
}
