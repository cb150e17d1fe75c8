use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;
use thinlayer::asymptotics::{
    certify_theorem_1_1, certify_theorem_1_2, integration_by_parts_check, reciprocity_check, solve_corrector,
    tensor_identities_check, Expansion,
};
use thinlayer::boundary_ops::check_jumps;
use thinlayer::config::{ExperimentConfig, Task};
use thinlayer::geometry::{perturb, CurveShape};
use thinlayer::kernels::Vec2;
use thinlayer::oracle::{radial_epsilon_derivative, radial_eval, solve_radial};
use thinlayer::report::write_csv;
use thinlayer::transmission::{solve_three_phase, solve_two_phase_with, BackgroundField};

/// Jump relations and interface identities must hold to this at the
/// configured resolution.
const TRACE_TOLERANCE: f64 = 1e-4;
/// Integration by parts and reciprocity are exact up to quadrature.
const QUADRATURE_TOLERANCE: f64 = 1e-8;
const ORACLE_TOLERANCE: f64 = 1e-8;
const CORRECTOR_TOLERANCE: f64 = 1e-6;
/// Relative agreement of the two routes to the measurement coefficient.
const DUAL_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
#[repr(u8)]
pub enum Outcome {
    Pass = 0,
    Fail = 1,
}

impl Outcome {
    fn from(pass: bool) -> Self {
        if pass {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Solver(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "{m}"),
            CliError::Solver(m) => write!(f, "solver failure: {m}"),
        }
    }
}

fn solver(e: thinlayer::Error) -> CliError {
    CliError::Solver(e.to_string())
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

pub struct Context {
    pub config: ExperimentConfig,
    out_dir: PathBuf,
    quiet: bool,
}

impl Context {
    pub fn load(path: Option<&Path>, out_dir: Option<&Path>, n_nodes: Option<usize>, quiet: bool) -> Result<Self, CliError> {
        let path = path.ok_or_else(|| config_err("--config is required"))?;
        let text = fs::read_to_string(path).map_err(|e| config_err(format!("reading {}: {e}", path.display())))?;
        let mut config = ExperimentConfig::from_json(&text).map_err(|e| config_err(e.to_string()))?;
        if let Some(n) = n_nodes {
            config.n_nodes = n;
            config.validate().map_err(|e| config_err(e.to_string()))?;
        }
        let out_dir = out_dir
            .map(Path::to_path_buf)
            .or_else(|| config.out_dir.as_ref().map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("out"));
        Ok(Self { config, out_dir, quiet })
    }

    fn csv(&self, name: &str, header: &[&str], rows: &[Vec<f64>]) -> Result<(), CliError> {
        fs::create_dir_all(&self.out_dir)
            .map_err(|e| config_err(format!("creating {}: {e}", self.out_dir.display())))?;
        let path = self.out_dir.join(name);
        let file = fs::File::create(&path).map_err(|e| config_err(format!("writing {}: {e}", path.display())))?;
        write_csv(file, header, rows).map_err(solver)
    }

    /// Writes `<task>.json` and prints a one-line verdict.
    fn summary(&self, task: &str, pass: bool, line: String, report: serde_json::Value) -> Result<Outcome, CliError> {
        fs::create_dir_all(&self.out_dir)
            .map_err(|e| config_err(format!("creating {}: {e}", self.out_dir.display())))?;
        let path = self.out_dir.join(format!("{task}.json"));
        let body = json!({ "task": task, "pass": pass, "report": report });
        fs::write(&path, serde_json::to_string_pretty(&body).expect("summary serializes") + "\n")
            .map_err(|e| config_err(format!("writing {}: {e}", path.display())))?;
        if !self.quiet {
            println!("{} {task}: {line}", if pass { "PASS" } else { "FAIL" });
        }
        Ok(Outcome::from(pass))
    }
}

pub fn execute(ctx: &Context, task: Task) -> Result<Outcome, CliError> {
    match task {
        Task::Solve => solve(ctx),
        Task::CertifyThm11 => thm11(ctx),
        Task::CertifyThm12 => thm12(ctx),
        Task::CheckJumps => jumps(ctx),
        Task::CheckIdentities => identities(ctx),
        Task::OracleCompare => oracle(ctx),
    }
}

fn need_epsilon(c: &ExperimentConfig) -> Result<f64, CliError> {
    c.epsilon.ok_or_else(|| config_err("config field `epsilon`: required by this command"))
}

fn need_ladder(c: &ExperimentConfig) -> Result<&[f64], CliError> {
    if c.ladder.len() < 2 {
        return Err(config_err("config field `ladder`: this command needs at least two values"));
    }
    Ok(&c.ladder)
}

fn solve(ctx: &Context) -> Result<Outcome, CliError> {
    let c = &ctx.config;
    let eps = need_epsilon(c)?;
    let m = c.checked_materials().map_err(solver)?;
    let base = c.base_curve().map_err(solver)?;
    let probes = c.probe_points(&base);
    let pert = perturb(&base, &c.thickness, eps).map_err(solver)?;
    let coated = solve_three_phase(&m, &base, &pert, &c.background).map_err(solver)?;
    let exp = Expansion::for_curve(&m, &base, &c.thickness).map_err(solver)?;
    let u = solve_two_phase_with(exp.system.clone(), &base, &c.background).map_err(solver)?;
    let u1 = solve_corrector(&exp, &u).map_err(solver)?;
    let (ue, u0, c1) = (
        coated.eval_field(&probes).map_err(solver)?,
        u.eval_field(&probes).map_err(solver)?,
        u1.eval_field(&probes).map_err(solver)?,
    );
    let rows: Vec<Vec<f64>> = (0..probes.len())
        .map(|j| {
            let first = u0[j] + c1[j] * eps;
            vec![probes[j].x, probes[j].y, ue[j].x, ue[j].y, u0[j].x, u0[j].y, first.x, first.y]
        })
        .collect();
    ctx.csv("solve.csv", &["x", "y", "u_x", "u_y", "zeroth_x", "zeroth_y", "first_x", "first_y"], &rows)?;
    let e1 = (0..probes.len()).map(|j| (ue[j] - u0[j] - c1[j] * eps).norm()).fold(0.0, f64::max);
    ctx.summary(
        "solve",
        true,
        format!("epsilon {eps}, residual {:.2e}, max |u_eps - u - eps u1| {e1:.3e}", coated.residual),
        json!({ "epsilon": eps, "residual": coated.residual, "condition": coated.condition, "first_order_error": e1 }),
    )
}

fn thm11(ctx: &Context) -> Result<Outcome, CliError> {
    let c = &ctx.config;
    let ladder = need_ladder(c)?;
    let setup = c.expansion_setup().map_err(solver)?;
    let r = certify_theorem_1_1(&setup, ladder).map_err(solver)?;
    let (s0, s1) = (r.slope_e0.unwrap_or(f64::NAN), r.slope_e1.unwrap_or(f64::NAN));
    let rows: Vec<Vec<f64>> = r.rows.iter().map(|row| vec![row.epsilon, row.e0, row.e1, s0, s1]).collect();
    ctx.csv("thm11.csv", &["epsilon", "e0", "e1", "slope0", "slope1"], &rows)?;
    ctx.summary(
        "certify-thm11",
        r.pass,
        format!("slopes e0 {s0:.3} e1 {s1:.3}, monotone {}", r.monotone),
        serde_json::to_value(&r).expect("report serializes"),
    )
}

fn thm12(ctx: &Context) -> Result<Outcome, CliError> {
    let c = &ctx.config;
    let ladder = need_ladder(c)?;
    let setup = c.expansion_setup().map_err(solver)?;
    let surface = c.measurement_surface(&setup.base).map_err(solver)?;
    let f = c.measurement_field();
    if let BackgroundField::KelvinPointSource { source, .. } = &f {
        let r = surface.bounding_radius();
        if Vec2::new(source[0], source[1]).norm() <= r * 1.05 {
            return Err(config_err("config field `measurement`: the point source must lie outside the measurement curve"));
        }
    }
    let r = certify_theorem_1_2(&setup, &f, &surface, ladder).map_err(solver)?;
    let slope = r.slope.unwrap_or(f64::NAN);
    let gap = (r.rhs - r.rhs_from_corrector).abs() / r.rhs.abs().max(1e-300);
    let dual = r.rhs.abs() < 1e-12 || gap <= DUAL_TOLERANCE;
    let rows: Vec<Vec<f64>> = r
        .rows
        .iter()
        .map(|row| vec![row.epsilon, row.lhs, row.eps_rhs, row.error, slope, r.rhs, r.rhs_from_corrector])
        .collect();
    ctx.csv("thm12.csv", &["epsilon", "lhs", "eps_rhs", "error", "slope", "rhs", "rhs_from_corrector"], &rows)?;
    ctx.summary(
        "certify-thm12",
        r.pass && dual,
        format!("slope {slope:.3}, monotone {}, coefficient routes differ by {gap:.1e}", r.monotone),
        json!({ "certification": serde_json::to_value(&r).expect("report serializes"), "route_gap": gap }),
    )
}

fn jumps(ctx: &Context) -> Result<Outcome, CliError> {
    let c = &ctx.config;
    let p = c.background_material().map_err(solver)?;
    let base = c.base_curve().map_err(solver)?;
    let phi = ExperimentConfig::jump_density(&base);
    let r = check_jumps(&p, &base, &phi, c.jumps.delta, c.jumps.stride).map_err(solver)?;
    let header = [
        "s_trace_ext",
        "s_trace_int",
        "s_conormal_ext",
        "s_conormal_int",
        "d_trace_ext",
        "d_trace_int",
        "dsharp_trace_ext",
        "dsharp_trace_int",
        "s_normal_derivative_ext",
        "s_normal_derivative_int",
        "dsharp_conormal_jump",
        "dsharp_conormal_ext",
        "dsharp_conormal_int",
    ];
    let row = [r.s_trace, r.s_conormal, r.d_trace, r.dsharp_trace, r.s_normal_derivative]
        .iter()
        .flat_map(|a| a.iter().copied())
        .chain([r.dsharp_conormal_jump])
        .chain(r.dsharp_conormal)
        .collect();
    ctx.csv("jumps.csv", &header, &[row])?;
    let worst = r.max_violation();
    ctx.summary(
        "check-jumps",
        worst <= TRACE_TOLERANCE,
        format!("max violation {worst:.3e} (tolerance {TRACE_TOLERANCE:e})"),
        serde_json::to_value(&r).expect("report serializes"),
    )
}

fn identities(ctx: &Context) -> Result<Outcome, CliError> {
    let c = &ctx.config;
    let m = c.checked_materials().map_err(solver)?;
    let base = c.base_curve().map_err(solver)?;
    let exp = Expansion::for_curve(&m, &base, &c.thickness).map_err(solver)?;
    let u = solve_two_phase_with(exp.system.clone(), &base, &c.background).map_err(solver)?;
    let v = solve_two_phase_with(exp.system.clone(), &base, &c.measurement_field()).map_err(solver)?;
    let r = tensor_identities_check(&u).map_err(solver)?;
    let ibp = integration_by_parts_check(&u, exp.h()).map_err(solver)?;
    let (ri, re) = reciprocity_check(&u, &v).map_err(solver)?;
    let row = vec![r.identity1, r.identity2, r.identity3, r.identity3_reversed, ibp, ri, re];
    ctx.csv(
        "identities.csv",
        &[
            "identity1",
            "identity2",
            "identity3",
            "identity3_reversed",
            "integration_by_parts",
            "reciprocity_interior",
            "reciprocity_exterior",
        ],
        &[row],
    )?;
    let pass = r.max() <= TRACE_TOLERANCE && ibp.abs().max(ri).max(re) <= QUADRATURE_TOLERANCE;
    ctx.summary(
        "check-identities",
        pass,
        format!(
            "identities {:.2e} (tolerance {TRACE_TOLERANCE:e}), integration by parts {:.2e}, reciprocity {:.2e}/{:.2e}",
            r.max(),
            ibp.abs(),
            ri,
            re
        ),
        json!({ "identities": serde_json::to_value(r).expect("report serializes"), "integration_by_parts": ibp,
                "reciprocity_interior": ri, "reciprocity_exterior": re }),
    )
}

fn oracle(ctx: &Context) -> Result<Outcome, CliError> {
    let c = &ctx.config;
    let eps = need_epsilon(c)?;
    let CurveShape::Circle { radius } = c.curve else {
        return Err(config_err("config field `curve`: oracle-compare needs a circle"));
    };
    let amplitude = match &c.background {
        BackgroundField::Linear { gradient: g, offset } if g[0][1] == 0.0 && g[1][0] == 0.0 && g[0][0] == g[1][1] && *offset == [0.0, 0.0] => g[0][0],
        _ => return Err(config_err("config field `background`: oracle-compare needs H(x) = a x")),
    };
    if !(c.thickness.cos.iter().chain(&c.thickness.sin).all(|v| *v == 0.0)) {
        return Err(config_err("config field `thickness`: oracle-compare needs a constant thickness"));
    }
    let h = c.thickness.mean;
    let m = c.checked_materials().map_err(solver)?;
    let base = c.base_curve().map_err(solver)?;
    let probes = c.probe_points(&base);
    let pert = perturb(&base, &c.thickness, eps).map_err(solver)?;
    let coated = solve_three_phase(&m, &base, &pert, &c.background).map_err(solver)?;
    let exact = solve_radial(&m, radius, radius + eps * h, amplitude).map_err(solver)?;
    let exp = Expansion::for_curve(&m, &base, &c.thickness).map_err(solver)?;
    let u = solve_two_phase_with(exp.system.clone(), &base, &c.background).map_err(solver)?;
    let u1 = solve_corrector(&exp, &u).map_err(solver)?;
    let (got, c1) = (coated.eval_field(&probes).map_err(solver)?, u1.eval_field(&probes).map_err(solver)?);
    let mut rows = Vec::with_capacity(probes.len());
    let (mut worst, mut worst1) = (0.0f64, 0.0f64);
    for (j, x) in probes.iter().enumerate() {
        let w = radial_eval(&exact, x);
        let rel = (got[j] - w).norm() / w.norm().max(f64::MIN_POSITIVE);
        let d = radial_epsilon_derivative(&m, radius, h, amplitude, x, 1e-4).map_err(solver)?;
        let e1 = (c1[j] - d).norm();
        worst = worst.max(rel);
        worst1 = worst1.max(e1);
        rows.push(vec![x.x, x.y, got[j].x, got[j].y, w.x, w.y, rel, c1[j].x, c1[j].y, d.x, d.y, e1]);
    }
    ctx.csv(
        "oracle.csv",
        &[
            "x",
            "y",
            "u_x",
            "u_y",
            "oracle_x",
            "oracle_y",
            "relative_error",
            "corrector_x",
            "corrector_y",
            "derivative_x",
            "derivative_y",
            "corrector_error",
        ],
        &rows,
    )?;
    ctx.summary(
        "oracle-compare",
        worst <= ORACLE_TOLERANCE && worst1 <= CORRECTOR_TOLERANCE,
        format!("max relative error {worst:.3e} (tolerance {ORACLE_TOLERANCE:e}), corrector error {worst1:.3e} (tolerance {CORRECTOR_TOLERANCE:e})"),
        json!({ "relative_error": worst, "corrector_error": worst1, "residual": coated.residual }),
    )
}
