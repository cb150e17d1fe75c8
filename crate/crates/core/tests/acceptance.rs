//! End-to-end acceptance run. Each criterion prints one PASS/FAIL line;
//! the test fails if any criterion does.

use std::time::{Duration, Instant};

use thinlayer::asymptotics::{
    certify_theorem_1_1, certify_theorem_1_2, solve_corrector, tensor_identities_check,
    tensor_identities_from_gradients, Expansion, ExpansionSetup, SLOPE_E0, SLOPE_E1,
};
use thinlayer::boundary_ops::check_jumps;
use thinlayer::geometry::{curve_from_shape, make_circle, perturb, ClosedCurve, CurveShape, NodePlacement, ThicknessProfile};
use thinlayer::kernels::{LameParams, Mat2, MaterialTriple, Vec2};
use thinlayer::oracle::{radial_epsilon_derivative, radial_eval, radial_eval_grad, solve_radial, solve_radial_two_phase};
use thinlayer::transmission::{solve_three_phase, solve_two_phase_with, BackgroundField};

const LADDER: [f64; 4] = [0.1, 0.05, 0.025, 0.0125];

fn lame(lambda: f64, mu: f64) -> LameParams {
    LameParams::new(lambda, mu).unwrap()
}

fn contrast() -> MaterialTriple {
    MaterialTriple::new(lame(1.0, 1.0), lame(3.0, 2.0), lame(5.0, 4.0)).unwrap()
}

fn kite(n: usize) -> ClosedCurve {
    curve_from_shape(&CurveShape::Kite, n, NodePlacement::Natural).unwrap()
}

fn ring(center: Vec2, r: f64, count: usize) -> Vec<Vec2> {
    (0..count)
        .map(|k| {
            let t = std::f64::consts::TAU * (k as f64 + 0.3) / count as f64;
            center + Vec2::new(r * t.cos(), r * t.sin())
        })
        .collect()
}

fn shear() -> BackgroundField {
    BackgroundField::linear(Mat2::new(0.3, 1.0, -0.2, -0.7))
}

fn probes_around(curve: &ClosedCurve) -> Vec<Vec2> {
    let (c, r) = (curve.nodes().centroid(), curve.bounding_radius());
    [1.5, 2.5].iter().flat_map(|s| ring(c, s * r, 16)).collect()
}

fn setup(curve: ClosedCurve, materials: MaterialTriple, profile: ThicknessProfile) -> ExpansionSetup {
    let probes = probes_around(&curve);
    ExpansionSetup { materials, base: curve, profile, background: shear(), probes, coated_nodes: Vec::new() }
}

struct Ledger {
    lines: Vec<(String, bool)>,
}

impl Ledger {
    fn record(&mut self, name: &str, ok: bool, detail: String) {
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        self.lines.push((name.to_string(), ok));
    }
}

fn within(start: Instant, limit: Duration) -> (bool, String) {
    let t = start.elapsed();
    (t <= limit, format!("{:.1}s of {}s", t.as_secs_f64(), limit.as_secs()))
}

fn oracle_equivalence(log: &mut Ledger) {
    let start = Instant::now();
    let m = contrast();
    let eps = 0.2;
    let base = make_circle(1.0, 256).unwrap();
    let pert = perturb(&base, &ThicknessProfile::constant(1.0), eps).unwrap();
    let sol = solve_three_phase(&m, &base, &pert, &BackgroundField::radial()).unwrap();
    let probes = ring(Vec2::zeros(), 2.0, 64);
    let got = sol.eval_field(&probes).unwrap();
    let oracle = solve_radial(&m, 1.0, 1.0 + eps, 1.0).unwrap();
    let rel = probes
        .iter()
        .zip(&got)
        .map(|(x, v)| {
            let w = radial_eval(&oracle, x);
            (v - w).norm() / w.norm()
        })
        .fold(0.0, f64::max);
    let (fast, time) = within(start, Duration::from_secs(30));
    log.record("1 oracle equivalence", rel <= 1e-8 && fast, format!("max relative error {rel:.3e} (limit 1e-8), {time}"));
}

fn pointwise_expansion(log: &mut Ledger) {
    let start = Instant::now();
    let cases = [
        ("circle", setup(make_circle(1.0, 128).unwrap(), contrast(), ThicknessProfile::new(1.0, vec![0.3], vec![]).unwrap())),
        ("kite", setup(kite(256), contrast(), ThicknessProfile::constant(1.0))),
    ];
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, s) in &cases {
        let r = certify_theorem_1_1(s, &LADDER).unwrap();
        for row in &r.rows {
            println!("    {name} eps {:.4} e0 {:.3e} e1 {:.3e}", row.epsilon, row.e0, row.e1);
        }
        ok &= r.pass;
        detail.push(format!(
            "{name} slopes e0 {:.3} (>= {SLOPE_E0}) e1 {:.3} (>= {SLOPE_E1}), monotone {}, corrector routes differ by {:.1e}",
            r.slope_e0.unwrap_or(f64::NAN),
            r.slope_e1.unwrap_or(f64::NAN),
            r.monotone,
            r.corrector_route_gap
        ));
    }
    let (fast, time) = within(start, Duration::from_secs(300));
    log.record("2 pointwise expansion", ok && fast, format!("{}; {time}", detail.join("; ")));
}

fn measurement_formula(log: &mut Ledger) {
    let start = Instant::now();
    let s = setup(kite(256), contrast(), ThicknessProfile::constant(1.0));
    // S encloses D with room to spare; the point source sits beyond S
    let s_radius = 2.0 * s.base.bounding_radius() + s.base.nodes().centroid().norm();
    let surface = make_circle(s_radius, 128).unwrap();
    let pairs = [
        ("linear/linear", BackgroundField::linear(Mat2::new(1.0, 0.4, 0.4, -0.5))),
        ("linear/point source", BackgroundField::KelvinPointSource { source: [1.6 * s_radius, 0.5], column: 0 }),
    ];
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, f) in &pairs {
        let r = certify_theorem_1_2(&s, f, &surface, &LADDER).unwrap();
        for row in &r.rows {
            println!("    {name} eps {:.4} lhs {:.6e} eps*rhs {:.6e} error {:.3e}", row.epsilon, row.lhs, row.eps_rhs, row.error);
        }
        // the coefficient from ∂D and from the corrector on S must agree
        let dual = (r.rhs - r.rhs_from_corrector).abs() <= 1e-6 * r.rhs.abs().max(1e-12);
        ok &= r.pass && dual;
        detail.push(format!(
            "{name} slope {:.3} (>= {SLOPE_E1}), monotone {}, rhs {:.6e} vs corrector {:.6e}",
            r.slope.unwrap_or(f64::NAN),
            r.monotone,
            r.rhs,
            r.rhs_from_corrector
        ));
    }
    let (fast, time) = within(start, Duration::from_secs(300));
    log.record("3 measurement formula", ok && fast, format!("kite: {}; {time}", detail.join("; ")));
}

fn jumps(log: &mut Ledger) {
    let p = lame(1.3, 0.8);
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, make) in [
        ("circle", Box::new(|n| make_circle(1.0, n).unwrap()) as Box<dyn Fn(usize) -> ClosedCurve>),
        ("kite", Box::new(kite)),
    ] {
        let mut series = Vec::new();
        for n in [64, 128, 256] {
            let c = make(n);
            let phi: Vec<Vec2> =
                c.nodes().points.iter().map(|x| Vec2::new((x.x + 0.3 * x.y).cos(), x.x * x.y + 0.5)).collect();
            let stride = n / 32;
            series.push(check_jumps(&p, &c, &phi, 1e-3, stride).unwrap().max_violation());
        }
        // each refinement must improve unless both values already sit at the
        // quadrature floor, a hundredth of the tolerance
        let monotone = series.windows(2).all(|w| w[1] < w[0] || w[0].max(w[1]) <= 1e-6);
        ok &= series[2] <= 1e-4 && monotone;
        detail.push(format!("{name} N=64/128/256 {:.2e}/{:.2e}/{:.2e}", series[0], series[1], series[2]));
    }
    log.record("4 jump relations", ok, format!("{} (limit 1e-4, improving above 1e-6)", detail.join("; ")));
}

fn identities(log: &mut Ledger) {
    // disk: exact interface gradients of the radial two-phase solution
    let (bg, core) = (lame(1.0, 1.0), lame(3.0, 2.0));
    let sol = solve_radial_two_phase(&bg, &core, 1.0, 1.0).unwrap();
    let disk = make_circle(1.0, 64).unwrap();
    let nodes = disk.nodes();
    let gi: Vec<Mat2> = nodes.points.iter().map(|x| radial_eval_grad(&sol, &(x * (1.0 - 1e-12)))).collect();
    let ge: Vec<Mat2> = nodes.points.iter().map(|x| radial_eval_grad(&sol, &(x * (1.0 + 1e-12)))).collect();
    let disk_v = tensor_identities_from_gradients(&bg, &core, nodes, &gi, &ge).unwrap().max();
    // kite: the solver's own on-curve gradients
    let m = contrast();
    let curve = kite(256);
    let exp = Expansion::for_curve(&m, &curve, &ThicknessProfile::constant(1.0)).unwrap();
    let u = solve_two_phase_with(exp.system.clone(), &curve, &shear()).unwrap();
    let kite_v = tensor_identities_check(&u).unwrap().max();
    log.record(
        "5 interface identities",
        disk_v <= 1e-6 && kite_v <= 1e-4,
        format!("disk {disk_v:.2e} (limit 1e-6), kite {kite_v:.2e} (limit 1e-4)"),
    );
}

fn invariants(log: &mut Ledger) {
    let m = contrast();
    let curve = kite(256);
    let profile = ThicknessProfile::new(1.0, vec![0.2], vec![0.0, -0.15]).unwrap();
    let pert = perturb(&curve, &profile, 0.05).unwrap();
    let coated = solve_three_phase(&m, &curve, &pert, &shear()).unwrap();
    let (m2, m0) = coated.psi_moments();
    let exp = Expansion::for_curve(&m, &curve, &profile).unwrap();
    let u = solve_two_phase_with(exp.system.clone(), &curve, &shear()).unwrap();
    let u1 = solve_corrector(&exp, &u).unwrap();
    let m1 = u1.decay_moments(&exp, &u);
    let moments = m2.iter().chain(&m0).chain(&m1).map(|v| v.abs()).fold(0.0, f64::max);

    let probes = probes_around(&curve);
    let mut rigid = 0.0f64;
    for k in 0..3 {
        let load = BackgroundField::rigid(k);
        let sol = solve_three_phase(&m, &curve, &pert, &load).unwrap();
        let got = sol.eval_field(&probes).unwrap();
        for (x, v) in probes.iter().zip(&got) {
            rigid = rigid.max((v - load.value(&m.background, x).unwrap()).norm());
        }
    }

    let flat = setup(kite(256), MaterialTriple::trivial(lame(1.0, 1.0)), profile);
    let r = certify_theorem_1_1(&flat, &LADDER).unwrap();
    let zero = r.rows.iter().map(|row| row.e0.max(row.e1)).fold(0.0, f64::max);
    log.record(
        "6 structural invariants",
        moments <= 1e-8 && rigid <= 1e-10 && zero <= 1e-9,
        format!(
            "rigid moments {moments:.2e} (limit 1e-8), rigid pass-through {rigid:.2e} (limit 1e-10), zero contrast {zero:.2e} (limit 1e-9)",
        ),
    );
}

fn corrector_oracle(log: &mut Ledger) {
    let m = contrast();
    let disk = make_circle(1.0, 128).unwrap();
    let exp = Expansion::for_curve(&m, &disk, &ThicknessProfile::constant(1.0)).unwrap();
    let u = solve_two_phase_with(exp.system.clone(), &disk, &BackgroundField::radial()).unwrap();
    let u1 = solve_corrector(&exp, &u).unwrap();
    let probes = ring(Vec2::zeros(), 2.0, 16);
    let got = u1.eval_field(&probes).unwrap();
    let err = probes
        .iter()
        .zip(&got)
        .map(|(x, v)| (v - radial_epsilon_derivative(&m, 1.0, 1.0, 1.0, x, 1e-4).unwrap()).norm())
        .fold(0.0, f64::max);
    log.record("7 corrector oracle", err <= 1e-6, format!("max error {err:.2e} (limit 1e-6)"));
}

// Runs without the libtest harness so the verdict lines are never captured.
fn main() {
    println!();
    let mut log = Ledger { lines: Vec::new() };
    oracle_equivalence(&mut log);
    pointwise_expansion(&mut log);
    measurement_formula(&mut log);
    jumps(&mut log);
    identities(&mut log);
    invariants(&mut log);
    corrector_oracle(&mut log);
    let failed: Vec<&str> = log.lines.iter().filter(|(_, ok)| !ok).map(|(n, _)| n.as_str()).collect();
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
    println!("acceptance: {} criteria passed", log.lines.len());
}
