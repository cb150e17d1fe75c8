//! ε-refinement certification of the pointwise expansion and of the
//! boundary measurement formula.

use serde::Serialize;

use crate::boundary_ops::{inner, max_diff, BoundaryField};
use crate::error::{Error, Result};
use crate::geometry::{perturb, ClosedCurve, Point, ThicknessProfile};
use crate::kernels::{strain, MaterialTriple, Mat2};
use crate::report::{fit_slope, is_monotone};
use crate::transmission::{solve_three_phase, solve_two_phase_with, BackgroundField, ThreePhaseSolution, TwoPhaseSolution};

use super::{conormals, solve_corrector, solve_corrector_from_jumps, CorrectorSolution, Expansion, InterfaceTensors};

/// Required slope of `max|u_ε - u|`.
pub const SLOPE_E0: f64 = 0.9;
/// Required slope of `max|u_ε - u - εu₁|` and of the measurement remainder.
pub const SLOPE_E1: f64 = 1.4;
/// A ladder whose errors all lie below this counts as exact.
pub const ERROR_FLOOR: f64 = 1e-9;

/// Geometry, materials and load shared by the certifications.
pub struct ExpansionSetup {
    pub materials: MaterialTriple,
    pub base: ClosedCurve,
    pub profile: ThicknessProfile,
    pub background: BackgroundField,
    pub probes: Vec<Point>,
    /// Node counts of the coated solves along the ladder; empty keeps the
    /// base resolution.
    pub coated_nodes: Vec<usize>,
}

struct Zeroth {
    exp: Expansion,
    u: TwoPhaseSolution,
    u1: CorrectorSolution,
    /// Largest gap between the two corrector routes at the probes.
    route_gap: f64,
}

fn zeroth(setup: &ExpansionSetup, background: &BackgroundField, probes: &[Point]) -> Result<Zeroth> {
    let exp = Expansion::for_curve(&setup.materials, &setup.base, &setup.profile)?;
    let u = solve_two_phase_with(exp.system.clone(), &setup.base, background)?;
    let u1 = solve_corrector(&exp, &u)?;
    let direct = solve_corrector_from_jumps(&exp, &u)?;
    let route_gap = if probes.is_empty() {
        0.0
    } else {
        max_diff(&u1.eval_field(probes)?, &direct.eval_field(probes)?)
    };
    Ok(Zeroth { exp, u, u1, route_gap })
}

fn check_ladder(ladder: &[f64]) -> Result<()> {
    if ladder.len() < 2 || ladder.iter().any(|e| !(*e > 0.0)) || ladder.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Invalid("the ε ladder needs at least two positive, strictly decreasing values".into()));
    }
    Ok(())
}

fn check_nodes(setup: &ExpansionSetup, ladder: &[f64]) -> Result<()> {
    if !setup.coated_nodes.is_empty() && setup.coated_nodes.len() != ladder.len() {
        return Err(Error::SizeMismatch { expected: ladder.len(), got: setup.coated_nodes.len() });
    }
    Ok(())
}

fn coated(setup: &ExpansionSetup, rung: usize, eps: f64, background: &BackgroundField) -> Result<ThreePhaseSolution> {
    let base = match setup.coated_nodes.get(rung) {
        Some(&n) if n != setup.base.len() => setup.base.resample(n)?,
        _ => setup.base.clone(),
    };
    let pert = perturb(&base, &setup.profile, eps)?;
    solve_three_phase(&setup.materials, &base, &pert, background)
}

/// Runs `f` for every ε of the ladder on its own thread, keeping order.
fn map_ladder<T: Send>(ladder: &[f64], f: impl Fn(usize, f64) -> Result<T> + Sync) -> Result<Vec<T>> {
    std::thread::scope(|scope| {
        let f = &f;
        let handles: Vec<_> = ladder.iter().enumerate().map(|(k, &eps)| scope.spawn(move || f(k, eps))).collect();
        handles.into_iter().map(|h| h.join().expect("ladder worker panicked")).collect()
    })
}

fn passes(eps: &[f64], errs: &[f64], threshold: f64) -> (Option<f64>, bool, bool) {
    let slope = fit_slope(eps, errs);
    let monotone = is_monotone(errs);
    let exact = errs.iter().all(|e| *e <= ERROR_FLOOR);
    (slope, monotone, exact || (monotone && slope.is_some_and(|s| s >= threshold)))
}

#[derive(Clone, Debug, Serialize)]
pub struct Thm11Row {
    pub epsilon: f64,
    /// `max_Ω |u_ε - u|`
    pub e0: f64,
    /// `max_Ω |u_ε - u - εu₁|`
    pub e1: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Thm11Report {
    pub rows: Vec<Thm11Row>,
    pub slope_e0: Option<f64>,
    pub slope_e1: Option<f64>,
    pub monotone: bool,
    /// Largest difference between `u₁` from the recursive densities and
    /// from the jump transmission problem, at the probes.
    pub corrector_route_gap: f64,
    pub pass: bool,
}

/// Errors of the zeroth- and first-order approximations on the probe set
/// along the ε ladder.
pub fn certify_theorem_1_1(setup: &ExpansionSetup, ladder: &[f64]) -> Result<Thm11Report> {
    check_ladder(ladder)?;
    check_nodes(setup, ladder)?;
    let z = zeroth(setup, &setup.background, &setup.probes)?;
    let u = z.u.eval_field(&setup.probes)?;
    let u1 = z.u1.eval_field(&setup.probes)?;
    let rows = map_ladder(ladder, |k, eps| {
        let ue = coated(setup, k, eps, &setup.background)?.eval_field(&setup.probes)?;
        let (mut e0, mut e1) = (0.0f64, 0.0f64);
        for j in 0..ue.len() {
            e0 = e0.max((ue[j] - u[j]).norm());
            e1 = e1.max((ue[j] - u[j] - u1[j] * eps).norm());
        }
        log::info!("epsilon {eps:e}: e0 {e0:e}, e1 {e1:e}");
        Ok(Thm11Row { epsilon: eps, e0, e1 })
    })?;
    let e0: Vec<f64> = rows.iter().map(|r| r.e0).collect();
    let e1: Vec<f64> = rows.iter().map(|r| r.e1).collect();
    let (slope_e0, mono0, pass0) = passes(ladder, &e0, SLOPE_E0);
    let (slope_e1, mono1, pass1) = passes(ladder, &e1, SLOPE_E1);
    Ok(Thm11Report {
        rows,
        slope_e0,
        slope_e1,
        monotone: mono0 && mono1,
        corrector_route_gap: z.route_gap,
        pass: pass0 && pass1,
    })
}

/// `∫_S (u_ε - u)·∂F/∂ν₀ - (∂u_ε/∂ν₀ - ∂u/∂ν₀)·F dσ`
pub fn measurement_functional(
    u_eps: &ThreePhaseSolution,
    u: &TwoPhaseSolution,
    f: &BackgroundField,
    s: &ClosedCurve,
) -> Result<f64> {
    let nodes = s.nodes();
    let p0 = u.background_material();
    let diff: BoundaryField =
        u_eps.eval_field(&nodes.points)?.iter().zip(u.eval_field(&nodes.points)?).map(|(a, b)| a - b).collect();
    let tdiff: BoundaryField = u_eps
        .eval_conormal_on_curve(nodes)?
        .iter()
        .zip(u.eval_conormal_on_curve(nodes)?)
        .map(|(a, b)| a - b)
        .collect();
    Ok(reciprocity_pairing(&diff, &tdiff, &f.sample(p0, nodes)?, &f.sample_conormal(p0, nodes)?, nodes))
}

fn reciprocity_pairing(
    w: &[crate::kernels::Vec2],
    tw: &[crate::kernels::Vec2],
    f: &[crate::kernels::Vec2],
    tf: &[crate::kernels::Vec2],
    nodes: &crate::geometry::CurveNodes,
) -> f64 {
    inner(nodes, w, tf) - inner(nodes, tw, f)
}

/// `∫_S u₁·∂F/∂ν₀ - ∂u₁/∂ν₀·F dσ`, the first-order coefficient of the
/// measurement computed from the corrector itself.
pub fn corrector_functional(u1: &CorrectorSolution, f: &BackgroundField, s: &ClosedCurve) -> Result<f64> {
    let nodes = s.nodes();
    let p0 = u1.background;
    Ok(reciprocity_pairing(
        &u1.eval_field(&nodes.points)?,
        &u1.eval_conormal_on_curve(nodes)?,
        &f.sample(&p0, nodes)?,
        &f.sample_conormal(&p0, nodes)?,
        nodes,
    ))
}

/// `∫_∂D h (((𝕄₀,₁ - 𝕄₂,₁)∇̂uⁱ)τ·∇̂vⁱτ + ((𝕂₂,₁ - 𝕂₀,₁)∇̂uⁱ)n·(ℂ₁∇̂vⁱ)n) dσ`,
/// the coefficient of `ε` in the measurement.
pub fn rhs_functional(exp: &Expansion, u: &TwoPhaseSolution, v: &TwoPhaseSolution) -> Result<f64> {
    let nodes = exp.nodes();
    let (p0, p1) = (*exp.system.outer.params(), *exp.system.inner.params());
    let (t01, t21) = (InterfaceTensors::new(p0, p1), InterfaceTensors::new(exp.layer, p1));
    let c1 = p1.tensor();
    let (gu, gv): (Vec<Mat2>, Vec<Mat2>) = (u.interior_gradient(), v.interior_gradient());
    let w = nodes.weights();
    let h = exp.h();
    let mut total = 0.0;
    for j in 0..nodes.len() {
        let (t, n) = (nodes.tangent[j], nodes.normal[j]);
        let (eu, ev) = (strain(&gu[j]), strain(&gv[j]));
        let a = (t01.m_tau(&eu, &t) - t21.m_tau(&eu, &t)).dot(&(ev * t));
        let b = (t21.k_n(&eu, &t, &n) - t01.k_n(&eu, &t, &n)).dot(&(c1.apply(&ev) * n));
        total += h[j] * (a + b) * w[j];
    }
    Ok(total)
}

#[derive(Clone, Debug, Serialize)]
pub struct Thm12Row {
    pub epsilon: f64,
    pub lhs: f64,
    /// `ε` times the right-hand side coefficient.
    pub eps_rhs: f64,
    pub error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Thm12Report {
    pub rows: Vec<Thm12Row>,
    pub rhs: f64,
    /// The same coefficient from the corrector on `S`.
    pub rhs_from_corrector: f64,
    pub slope: Option<f64>,
    pub monotone: bool,
    pub pass: bool,
}

/// `|LHS(ε) - ε RHS|` along the ladder for the measurement background `F`
/// on the curve `S`.
pub fn certify_theorem_1_2(
    setup: &ExpansionSetup,
    measurement: &BackgroundField,
    s: &ClosedCurve,
    ladder: &[f64],
) -> Result<Thm12Report> {
    check_ladder(ladder)?;
    check_nodes(setup, ladder)?;
    let z = zeroth(setup, &setup.background, &[])?;
    let v = solve_two_phase_with(z.exp.system.clone(), &setup.base, measurement)?;
    let rhs = rhs_functional(&z.exp, &z.u, &v)?;
    let rhs_from_corrector = corrector_functional(&z.u1, measurement, s)?;
    let rows = map_ladder(ladder, |k, eps| {
        let ue = coated(setup, k, eps, &setup.background)?;
        let lhs = measurement_functional(&ue, &z.u, measurement, s)?;
        let error = (lhs - eps * rhs).abs();
        log::info!("epsilon {eps:e}: lhs {lhs:e}, eps*rhs {:e}, error {error:e}", eps * rhs);
        Ok(Thm12Row { epsilon: eps, lhs, eps_rhs: eps * rhs, error })
    })?;
    let errs: Vec<f64> = rows.iter().map(|r| r.error).collect();
    let (slope, monotone, pass) = passes(ladder, &errs, SLOPE_E1);
    Ok(Thm12Report { rows, rhs, rhs_from_corrector, slope, monotone, pass })
}

/// Conormals of the interior field `u` on `∂D`; used by tests.
#[allow(dead_code)]
pub(crate) fn interior_tractions(u: &TwoPhaseSolution) -> BoundaryField {
    conormals(u.core_material(), u.base.nodes(), &u.interior_gradient())
}
