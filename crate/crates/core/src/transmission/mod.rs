//! The coated three-phase transmission problem and its two-phase limit.
//!
//! The three-phase field is represented as
//! `u_ε = H + 𝒮₀[φ̃₀]` outside `D_ε`, `𝒮₂[φ₂] + 𝒮₂[ψ̃₂]` in the layer and
//! `𝒮₁[φ₁]` in the core, with `φ₁, φ₂` on `∂D` and `ψ̃₂, φ̃₀` on `∂D_ε`.
//! The two-phase limit is `u = H + 𝒮₀[φ₀⁰]` outside and `𝒮₁[φ₁⁰]` inside.

use std::sync::Arc;

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::boundary_ops::{
    cross_ops, eval_single_layer, eval_single_layer_gradient, flatten, psi_moments, unflatten, BoundaryField,
    LayerOperators, OperatorMatrix, Side,
};
use crate::error::{Error, Result};
use crate::geometry::{ClosedCurve, CurveNodes, PerturbedCurve, Point};
use crate::kernels::{conormal, kelvin_gradient, kelvin_matrix, LameParams, MaterialTriple, Mat2, Vec2};
use crate::linalg::{solve_checked, DenseLu, RESIDUAL_LIMIT};

/// The incident field `H`, a solution of the background Lamé system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BackgroundField {
    /// `H(x) = G x + c`
    Linear {
        gradient: [[f64; 2]; 2],
        #[serde(default)]
        offset: [f64; 2],
    },
    /// Column `column` of the background Kelvin matrix centred at `source`.
    KelvinPointSource { source: [f64; 2], column: usize },
}

impl BackgroundField {
    pub fn linear(g: Mat2) -> Self {
        BackgroundField::Linear { gradient: [[g[(0, 0)], g[(0, 1)]], [g[(1, 0)], g[(1, 1)]]], offset: [0.0, 0.0] }
    }

    /// `H(x) = x`
    pub fn radial() -> Self {
        Self::linear(Mat2::identity())
    }

    /// The rigid motion `θ_m` as a background field.
    pub fn rigid(m: usize) -> Self {
        match m {
            0 => BackgroundField::Linear { gradient: [[0.0; 2]; 2], offset: [1.0, 0.0] },
            1 => BackgroundField::Linear { gradient: [[0.0; 2]; 2], offset: [0.0, 1.0] },
            _ => Self::linear(Mat2::new(0.0, 1.0, -1.0, 0.0)),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            BackgroundField::Linear { gradient, offset } => {
                if gradient.iter().flatten().chain(offset).all(|v| v.is_finite()) {
                    Ok(())
                } else {
                    Err(Error::Invalid("linear background has non-finite entries".into()))
                }
            }
            BackgroundField::KelvinPointSource { source, column } => {
                if *column > 1 {
                    return Err(Error::Invalid(format!("point source column must be 0 or 1, got {column}")));
                }
                if !source.iter().all(|v| v.is_finite()) {
                    return Err(Error::Invalid("point source location is not finite".into()));
                }
                Ok(())
            }
        }
    }

    /// Point sources must sit outside the disk of radius `radius` about `center`.
    pub fn check_clearance(&self, center: &Point, radius: f64) -> Result<()> {
        if let BackgroundField::KelvinPointSource { source, .. } = self {
            let d = (Vec2::new(source[0], source[1]) - center).norm();
            if d <= radius {
                return Err(Error::Invalid(format!(
                    "point source at distance {d} lies inside the bounding disk of radius {radius}"
                )));
            }
        }
        Ok(())
    }

    fn source(&self) -> Option<(Vec2, usize)> {
        match self {
            BackgroundField::KelvinPointSource { source, column } => Some((Vec2::new(source[0], source[1]), *column)),
            _ => None,
        }
    }

    /// `H(x)`; `p` is the background material.
    pub fn value(&self, p: &LameParams, x: &Point) -> Result<Vec2> {
        match self {
            BackgroundField::Linear { gradient, offset } => {
                let g = Mat2::new(gradient[0][0], gradient[0][1], gradient[1][0], gradient[1][1]);
                Ok(g * x + Vec2::new(offset[0], offset[1]))
            }
            _ => {
                let (z, k) = self.source().expect("point source");
                Ok(kelvin_matrix(p, &(x - z))?.column(k).into())
            }
        }
    }

    /// `∇H(x)`
    pub fn gradient(&self, p: &LameParams, x: &Point) -> Result<Mat2> {
        match self {
            BackgroundField::Linear { gradient, .. } => {
                Ok(Mat2::new(gradient[0][0], gradient[0][1], gradient[1][0], gradient[1][1]))
            }
            _ => {
                let (z, k) = self.source().expect("point source");
                let d = kelvin_gradient(p, &(x - z))?;
                let mut g = Mat2::zeros();
                for m in 0..2 {
                    g.set_column(m, &d[m].column(k));
                }
                Ok(g)
            }
        }
    }

    pub fn sample(&self, p: &LameParams, nodes: &CurveNodes) -> Result<BoundaryField> {
        nodes.points.iter().map(|x| self.value(p, x)).collect()
    }

    pub fn sample_gradient(&self, p: &LameParams, nodes: &CurveNodes) -> Result<Vec<Mat2>> {
        nodes.points.iter().map(|x| self.gradient(p, x)).collect()
    }

    /// `∂H/∂ν` at the nodes, with the node normals.
    pub fn sample_conormal(&self, p: &LameParams, nodes: &CurveNodes) -> Result<BoundaryField> {
        (0..nodes.len()).map(|j| Ok(conormal(p, &self.gradient(p, &nodes.points[j])?, &nodes.normal[j]))).collect()
    }
}

/// Copies `src * scale` into `m` with top-left corner `(r0, c0)`.
pub(crate) fn put(m: &mut Mat<f64>, r0: usize, c0: usize, src: &OperatorMatrix, scale: f64) {
    let e = &src.entries;
    for j in 0..e.ncols() {
        for i in 0..e.nrows() {
            m[(r0 + i, c0 + j)] += scale * e[(i, j)];
        }
    }
}

pub(crate) fn put_identity(m: &mut Mat<f64>, r0: usize, c0: usize, size: usize, scale: f64) {
    for i in 0..size {
        m[(r0 + i, c0 + i)] += scale;
    }
}

fn check_targets(points: &[Point]) -> Result<()> {
    if let Some(i) = points.iter().position(|x| !(x.x.is_finite() && x.y.is_finite())) {
        return Err(Error::Invalid(format!("probe point {i} is not finite")));
    }
    Ok(())
}

/// Maps a proximity error for a single point back to its index in the batch.
fn reindex<T>(r: Result<T>, index: usize) -> Result<T> {
    r.map_err(|e| match e {
        Error::TooClose { distance, guard, .. } => Error::TooClose { index, distance, guard },
        other => other,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    Core,
    Layer,
    Exterior,
}

/// Solution of the coated problem.
pub struct ThreePhaseSolution {
    pub materials: MaterialTriple,
    pub base: ClosedCurve,
    pub pert: PerturbedCurve,
    pub background: BackgroundField,
    pub phi1: BoundaryField,
    pub phi2: BoundaryField,
    pub psi2: BoundaryField,
    pub phi0: BoundaryField,
    pub residual: f64,
    pub condition: f64,
}

/// Assembles and solves the block system for `(φ₁, φ₂, ψ̃₂, φ̃₀)`.
pub fn solve_three_phase(
    materials: &MaterialTriple,
    base: &ClosedCurve,
    pert: &PerturbedCurve,
    background: &BackgroundField,
) -> Result<ThreePhaseSolution> {
    background.validate()?;
    if !(pert.epsilon() > 0.0) {
        return Err(Error::Invalid("the coated problem needs epsilon > 0".into()));
    }
    let (bd, pd) = (base.nodes(), pert.nodes());
    background.check_clearance(&bd.centroid(), pd.points.iter().map(|x| (x - bd.centroid()).norm()).fold(0.0, f64::max))?;
    let (n, m) = (bd.len(), pd.len());
    let (p0, p1, p2) = (materials.background, materials.core, materials.layer);
    let core = LayerOperators::new(&p1, bd);
    let layer_in = LayerOperators::new(&p2, bd);
    let layer_out = LayerOperators::new(&p2, pd);
    let outer = LayerOperators::new(&p0, pd);
    let out_to_in = cross_ops(&p2, pert, bd)?;
    let in_to_out = cross_ops(&p2, base, pd)?;

    let (c1, c2, c3, c4) = (0, 2 * n, 4 * n, 4 * n + 2 * m);
    let size = 4 * n + 4 * m;
    let mut a = Mat::<f64>::zeros(size, size);
    // value and traction matching on ∂D
    put(&mut a, 0, c1, core.single_layer(), 1.0);
    put(&mut a, 0, c2, layer_in.single_layer(), -1.0);
    put(&mut a, 0, c3, &out_to_in.value, -1.0);
    let r2 = 2 * n;
    put(&mut a, r2, c1, core.kstar(), 1.0);
    put_identity(&mut a, r2, c1, 2 * n, -0.5);
    put(&mut a, r2, c2, layer_in.kstar(), -1.0);
    put_identity(&mut a, r2, c2, 2 * n, -0.5);
    put(&mut a, r2, c3, &out_to_in.conormal, -1.0);
    // value and traction matching on ∂D_ε
    let r3 = 4 * n;
    put(&mut a, r3, c2, &in_to_out.value, 1.0);
    put(&mut a, r3, c3, layer_out.single_layer(), 1.0);
    put(&mut a, r3, c4, outer.single_layer(), -1.0);
    let r4 = 4 * n + 2 * m;
    put(&mut a, r4, c2, &in_to_out.conormal, 1.0);
    put(&mut a, r4, c3, layer_out.kstar(), 1.0);
    put_identity(&mut a, r4, c3, 2 * m, -0.5);
    put(&mut a, r4, c4, outer.kstar(), -1.0);
    put_identity(&mut a, r4, c4, 2 * m, -0.5);

    let mut rhs = vec![0.0; 4 * n];
    rhs.extend(flatten(&background.sample(&p0, pd)?));
    rhs.extend(flatten(&background.sample_conormal(&p0, pd)?));
    let sol = solve_checked(&a, &rhs)?;
    let x = &sol.x;
    Ok(ThreePhaseSolution {
        materials: *materials,
        base: base.clone(),
        pert: pert.clone(),
        background: background.clone(),
        phi1: unflatten(&x[c1..c2]),
        phi2: unflatten(&x[c2..c3]),
        psi2: unflatten(&x[c3..c4]),
        phi0: unflatten(&x[c4..]),
        residual: sol.residual,
        condition: sol.condition,
    })
}

impl ThreePhaseSolution {
    pub fn epsilon(&self) -> f64 {
        self.pert.epsilon()
    }

    pub fn region(&self, x: &Point) -> Region {
        if self.base.nodes().contains(*x) {
            Region::Core
        } else if self.pert.nodes().contains(*x) {
            Region::Layer
        } else {
            Region::Exterior
        }
    }

    fn value_at(&self, x: &Point) -> Result<Vec2> {
        let m = &self.materials;
        let pts = std::slice::from_ref(x);
        Ok(match self.region(x) {
            Region::Core => eval_single_layer(&m.core, self.base.nodes(), &self.phi1, pts)?[0],
            Region::Layer => {
                eval_single_layer(&m.layer, self.base.nodes(), &self.phi2, pts)?[0]
                    + eval_single_layer(&m.layer, self.pert.nodes(), &self.psi2, pts)?[0]
            }
            Region::Exterior => {
                self.background.value(&m.background, x)?
                    + eval_single_layer(&m.background, self.pert.nodes(), &self.phi0, pts)?[0]
            }
        })
    }

    fn gradient_at(&self, x: &Point) -> Result<Mat2> {
        let m = &self.materials;
        let pts = std::slice::from_ref(x);
        Ok(match self.region(x) {
            Region::Core => eval_single_layer_gradient(&m.core, self.base.nodes(), &self.phi1, pts)?[0],
            Region::Layer => {
                eval_single_layer_gradient(&m.layer, self.base.nodes(), &self.phi2, pts)?[0]
                    + eval_single_layer_gradient(&m.layer, self.pert.nodes(), &self.psi2, pts)?[0]
            }
            Region::Exterior => {
                self.background.gradient(&m.background, x)?
                    + eval_single_layer_gradient(&m.background, self.pert.nodes(), &self.phi0, pts)?[0]
            }
        })
    }

    /// `u_ε` at points away from both interfaces.
    pub fn eval_field(&self, points: &[Point]) -> Result<Vec<Vec2>> {
        check_targets(points)?;
        points.iter().enumerate().map(|(i, x)| reindex(self.value_at(x), i)).collect()
    }

    pub fn eval_gradient(&self, points: &[Point]) -> Result<Vec<Mat2>> {
        check_targets(points)?;
        points.iter().enumerate().map(|(i, x)| reindex(self.gradient_at(x), i)).collect()
    }

    /// `∂u_ε/∂ν₀` on a curve lying outside `D_ε`.
    pub fn eval_conormal_on_curve(&self, s: &CurveNodes) -> Result<BoundaryField> {
        exterior_conormal(s, |x| self.region(x) == Region::Exterior, |pts| self.eval_gradient(pts), &self.materials.background)
    }

    /// Rigid-motion moments of `φ₂` and `φ̃₀`.
    pub fn psi_moments(&self) -> ([f64; 3], [f64; 3]) {
        (psi_moments(self.base.nodes(), &self.phi2), psi_moments(self.pert.nodes(), &self.phi0))
    }
}

fn exterior_conormal(
    s: &CurveNodes,
    outside: impl Fn(&Point) -> bool,
    gradient: impl Fn(&[Point]) -> Result<Vec<Mat2>>,
    p0: &LameParams,
) -> Result<BoundaryField> {
    if let Some(i) = s.points.iter().position(|x| !outside(x)) {
        return Err(Error::Geometry(format!("measurement curve node {i} is not outside the inclusion")));
    }
    let g = gradient(&s.points)?;
    Ok((0..s.len()).map(|j| conormal(p0, &g[j], &s.normal[j])).collect())
}

/// `𝒬₀` on one curve together with its factorization.
pub struct TwoPhaseSystem {
    pub outer: LayerOperators,
    pub inner: LayerOperators,
    matrix: Mat<f64>,
    lu: DenseLu,
    pub condition: f64,
}

impl TwoPhaseSystem {
    pub fn new(background: &LameParams, core: &LameParams, nodes: &CurveNodes) -> Result<Self> {
        background.validate()?;
        core.validate()?;
        let outer = LayerOperators::new(background, nodes);
        let inner = LayerOperators::new(core, nodes);
        let n = nodes.len();
        let mut a = Mat::<f64>::zeros(4 * n, 4 * n);
        put(&mut a, 0, 0, inner.single_layer(), 1.0);
        put(&mut a, 0, 2 * n, outer.single_layer(), -1.0);
        put(&mut a, 2 * n, 0, inner.kstar(), 1.0);
        put_identity(&mut a, 2 * n, 0, 2 * n, -0.5);
        put(&mut a, 2 * n, 2 * n, outer.kstar(), -1.0);
        put_identity(&mut a, 2 * n, 2 * n, 2 * n, -0.5);
        let lu = DenseLu::new(&a)?;
        let condition = lu.check_condition()?;
        Ok(Self { outer, inner, matrix: a, lu, condition })
    }

    pub fn nodes(&self) -> &CurveNodes {
        self.outer.nodes()
    }

    /// `𝒬₀(φ, ψ) = (𝒮₁[φ] - 𝒮₀[ψ], ∂𝒮₁[φ]/∂ν₁|₋ - ∂𝒮₀[ψ]/∂ν₀|₊)`
    pub fn apply(&self, phi: &[Vec2], psi: &[Vec2]) -> (BoundaryField, BoundaryField) {
        let v1 = self.inner.s_trace(phi);
        let v0 = self.outer.s_trace(psi);
        let t1 = self.inner.s_conormal(phi, Side::Interior);
        let t0 = self.outer.s_conormal(psi, Side::Exterior);
        (
            v1.iter().zip(&v0).map(|(a, b)| a - b).collect(),
            t1.iter().zip(&t0).map(|(a, b)| a - b).collect(),
        )
    }

    /// Solves `𝒬₀(φ, ψ) = (f, g)`; returns `(φ, ψ, residual)`.
    pub fn solve(&self, f: &[Vec2], g: &[Vec2]) -> Result<(BoundaryField, BoundaryField, f64)> {
        let n = self.nodes().len();
        if f.len() != n || g.len() != n {
            return Err(Error::SizeMismatch { expected: n, got: f.len().min(g.len()) });
        }
        let mut rhs = flatten(f);
        rhs.extend(flatten(g));
        let x = self.lu.solve(&rhs);
        let residual = crate::linalg::relative_residual(&self.matrix, &x, &rhs);
        if !(residual <= RESIDUAL_LIMIT) {
            return Err(Error::Residual { residual });
        }
        Ok((unflatten(&x[..2 * n]), unflatten(&x[2 * n..]), residual))
    }
}

/// Solution of the uncoated problem.
pub struct TwoPhaseSolution {
    pub system: Arc<TwoPhaseSystem>,
    pub base: ClosedCurve,
    pub background: BackgroundField,
    /// `φ₁⁰`, density of the interior representation.
    pub phi_in: BoundaryField,
    /// `φ₀⁰`, density of the exterior representation.
    pub phi_out: BoundaryField,
    pub residual: f64,
}

/// Solves `𝒬₀(φ₁⁰, φ₀⁰) = (H, ∂H/∂ν₀)` on `∂D`.
pub fn solve_two_phase(
    background_material: &LameParams,
    core: &LameParams,
    base: &ClosedCurve,
    background: &BackgroundField,
) -> Result<TwoPhaseSolution> {
    let system = Arc::new(TwoPhaseSystem::new(background_material, core, base.nodes())?);
    solve_two_phase_with(system, base, background)
}

/// As [`solve_two_phase`], reusing an assembled system.
pub fn solve_two_phase_with(
    system: Arc<TwoPhaseSystem>,
    base: &ClosedCurve,
    background: &BackgroundField,
) -> Result<TwoPhaseSolution> {
    background.validate()?;
    let nodes = base.nodes();
    background.check_clearance(&nodes.centroid(), base.bounding_radius())?;
    let p0 = *system.outer.params();
    let f = background.sample(&p0, nodes)?;
    let g = background.sample_conormal(&p0, nodes)?;
    let (phi_in, phi_out, residual) = system.solve(&f, &g)?;
    Ok(TwoPhaseSolution { system, base: base.clone(), background: background.clone(), phi_in, phi_out, residual })
}

impl TwoPhaseSolution {
    pub fn background_material(&self) -> &LameParams {
        self.system.outer.params()
    }

    pub fn core_material(&self) -> &LameParams {
        self.system.inner.params()
    }

    pub fn is_inside(&self, x: &Point) -> bool {
        self.base.nodes().contains(*x)
    }

    fn value_at(&self, x: &Point) -> Result<Vec2> {
        let nodes = self.base.nodes();
        let pts = std::slice::from_ref(x);
        if self.is_inside(x) {
            Ok(eval_single_layer(self.core_material(), nodes, &self.phi_in, pts)?[0])
        } else {
            let p0 = self.background_material();
            Ok(self.background.value(p0, x)? + eval_single_layer(p0, nodes, &self.phi_out, pts)?[0])
        }
    }

    fn gradient_at(&self, x: &Point) -> Result<Mat2> {
        let nodes = self.base.nodes();
        let pts = std::slice::from_ref(x);
        if self.is_inside(x) {
            Ok(eval_single_layer_gradient(self.core_material(), nodes, &self.phi_in, pts)?[0])
        } else {
            let p0 = self.background_material();
            Ok(self.background.gradient(p0, x)? + eval_single_layer_gradient(p0, nodes, &self.phi_out, pts)?[0])
        }
    }

    /// `u` at points away from `∂D`.
    pub fn eval_field(&self, points: &[Point]) -> Result<Vec<Vec2>> {
        check_targets(points)?;
        points.iter().enumerate().map(|(i, x)| reindex(self.value_at(x), i)).collect()
    }

    pub fn eval_gradient(&self, points: &[Point]) -> Result<Vec<Mat2>> {
        check_targets(points)?;
        points.iter().enumerate().map(|(i, x)| reindex(self.gradient_at(x), i)).collect()
    }

    /// `∂u/∂ν₀` on a curve lying outside `D`.
    pub fn eval_conormal_on_curve(&self, s: &CurveNodes) -> Result<BoundaryField> {
        exterior_conormal(s, |x| !self.is_inside(x), |pts| self.eval_gradient(pts), self.background_material())
    }

    /// `∇uⁱ` on `∂D`, from the interior representation.
    pub fn interior_gradient(&self) -> Vec<Mat2> {
        self.system.inner.s_gradient(&self.phi_in, Side::Interior)
    }

    /// `∇uᵉ` on `∂D`, from the exterior representation.
    pub fn exterior_gradient(&self) -> Result<Vec<Mat2>> {
        let h = self.background.sample_gradient(self.background_material(), self.base.nodes())?;
        let s = self.system.outer.s_gradient(&self.phi_out, Side::Exterior);
        Ok(h.iter().zip(&s).map(|(a, b)| a + b).collect())
    }

    pub fn psi_moments(&self) -> [f64; 3] {
        psi_moments(self.base.nodes(), &self.phi_out)
    }
}

#[cfg(test)]
mod tests;
