use super::*;
use crate::boundary_ops::{one_sided_limit, NearField, PotentialKind};
use crate::geometry::{perturb, Boundary, ThicknessProfile};
use crate::oracle::{radial_eval, solve_radial, solve_radial_two_phase};
use crate::test_support::{circle, contrast, kite, lame, ring};

fn coated(base: &ClosedCurve, eps: f64) -> PerturbedCurve {
    perturb(base, &ThicknessProfile::constant(1.0), eps).unwrap()
}

fn max_rel(a: &[Vec2], b: &[Vec2]) -> f64 {
    let scale = b.iter().map(|v| v.norm()).fold(0.0, f64::max);
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) / scale
}

#[test]
fn coated_disk_matches_radial_oracle() {
    let m = contrast();
    let base = circle(128);
    let sol = solve_three_phase(&m, &base, &coated(&base, 0.2), &BackgroundField::radial()).unwrap();
    assert!(sol.residual < 1e-12);
    let radial = solve_radial(&m, 1.0, 1.2, 1.0).unwrap();
    let probes = ring(Point::zeros(), 2.0, 64);
    let u = sol.eval_field(&probes).unwrap();
    let exact: Vec<Vec2> = probes.iter().map(|x| radial_eval(&radial, x)).collect();
    assert!(max_rel(&u, &exact) < 1e-8, "{}", max_rel(&u, &exact));
    let core = sol.eval_field(&[Point::new(0.3, -0.2)]).unwrap()[0];
    assert!((core - radial_eval(&radial, &Point::new(0.3, -0.2))).norm() < 1e-9);
}

#[test]
fn disk_inclusion_matches_radial_oracle() {
    let m = contrast();
    let base = circle(128);
    let sol = solve_two_phase(&m.background, &m.core, &base, &BackgroundField::radial()).unwrap();
    let radial = solve_radial_two_phase(&m.background, &m.core, 1.0, 1.0).unwrap();
    let probes = ring(Point::zeros(), 2.0, 32);
    let u = sol.eval_field(&probes).unwrap();
    let exact: Vec<Vec2> = probes.iter().map(|x| radial_eval(&radial, x)).collect();
    assert!(max_rel(&u, &exact) < 1e-9);
}

#[test]
fn zero_contrast_passes_the_load_through() {
    let p = lame(2.0, 1.0);
    let base = kite(256);
    let h = BackgroundField::linear(Mat2::new(0.3, -1.0, 0.7, 0.2));
    let sol = solve_three_phase(&MaterialTriple::trivial(p), &base, &coated(&base, 0.1), &h).unwrap();
    let probes = ring(base.nodes().centroid(), 3.0, 32);
    let u = sol.eval_field(&probes).unwrap();
    let e = probes.iter().zip(&u).map(|(x, v)| (v - h.value(&p, x).unwrap()).norm()).fold(0.0, f64::max);
    assert!(e < 1e-10, "{e}");
    // the core and layer densities are large here, so compare relative to them
    let d0 = crate::boundary_ops::max_norm(&sol.phi0);
    assert!(d0 < 1e-10 * crate::boundary_ops::max_norm(&sol.phi1), "{d0}");
    let two = solve_two_phase(&p, &p, &base, &h).unwrap();
    let (a, b) = (crate::boundary_ops::max_norm(&two.phi_out), crate::boundary_ops::max_norm(&two.phi_in));
    assert!(a < 1e-10 * b, "{a} {b}");
    let u0 = two.eval_field(&probes).unwrap();
    assert!(crate::boundary_ops::max_diff(&u0, &u) < 1e-10);
    let s = crate::geometry::make_circle(3.0, 64).unwrap();
    let c = two.eval_conormal_on_curve(s.nodes()).unwrap();
    let exact = h.sample_conormal(&p, s.nodes()).unwrap();
    assert!(crate::boundary_ops::max_diff(&c, &exact) < 1e-10);
}

#[test]
fn rigid_loads_pass_through_unchanged() {
    let base = kite(256);
    let pert = perturb(&base, &ThicknessProfile::new(1.0, vec![0.3], vec![]).unwrap(), 0.1).unwrap();
    let probes = ring(base.nodes().centroid(), 2.5, 16);
    for m in 0..3 {
        let h = BackgroundField::rigid(m);
        let sol = solve_three_phase(&contrast(), &base, &pert, &h).unwrap();
        let u = sol.eval_field(&probes).unwrap();
        let e = probes.iter().zip(&u).map(|(x, v)| (v - crate::kernels::rigid_motion(m, x)).norm()).fold(0.0, f64::max);
        assert!(e < 1e-10, "{m} {e}");
    }
}

#[test]
fn layer_densities_have_no_rigid_moments() {
    let base = kite(256);
    let pert = perturb(&base, &ThicknessProfile::new(1.0, vec![0.3], vec![0.1]).unwrap(), 0.1).unwrap();
    let h = BackgroundField::KelvinPointSource { source: [4.0, 1.0], column: 1 };
    let sol = solve_three_phase(&contrast(), &base, &pert, &h).unwrap();
    let (m2, m0) = sol.psi_moments();
    for v in m2.iter().chain(&m0) {
        assert!(v.abs() < 1e-10, "{m2:?} {m0:?}");
    }
}

/// One-sided limits of the value and traction of the layer field on `∂D`
/// and `∂D_ε`, and of the core and exterior fields, from near-field sums.
#[test]
fn transmission_conditions_hold_at_probe_pairs() {
    let m = contrast();
    let base = circle(256);
    let pert = perturb(&base, &ThicknessProfile::new(1.0, vec![0.3], vec![]).unwrap(), 0.1).unwrap();
    let h = BackgroundField::linear(Mat2::new(1.0, 0.4, -0.2, 0.5));
    let sol = solve_three_phase(&m, &base, &pert, &h).unwrap();
    let delta = 1e-3;
    let near = |p: &LameParams, b: &dyn Boundary, f: &[Vec2]| NearField::new(p, b, f, 0.25 * delta).unwrap();
    let core = near(&m.core, &base, &sol.phi1);
    let l_in = near(&m.layer, &base, &sol.phi2);
    let l_out = near(&m.layer, &pert, &sol.psi2);
    let ext = near(&m.background, &pert, &sol.phi0);
    let p0 = m.background;
    let pair = |fields: &[&NearField], p: &LameParams, x: &Point, n: &Vec2, bg: bool| {
        let mut v = Vec2::zeros();
        let mut g = Mat2::zeros();
        for f in fields {
            v += f.value(PotentialKind::Single, x);
            g += f.gradient(PotentialKind::Single, x).unwrap();
        }
        if bg {
            v += h.value(&p0, x).unwrap();
            g += h.gradient(&p0, x).unwrap();
        }
        let t = conormal(p, &g, n);
        Vec2::new(v.x, v.y).push(t.x).push(t.y)
    };
    let mut worst: f64 = 0.0;
    for j in (0..256).step_by(16) {
        let (x, n) = (base.nodes().points[j], base.nodes().normal[j]);
        let inside = one_sided_limit(|y| pair(&[&core], &m.core, y, &n, false), &x, &n, -1.0, delta);
        let outside = one_sided_limit(|y| pair(&[&l_in, &l_out], &m.layer, y, &n, false), &x, &n, 1.0, delta);
        worst = worst.max((inside - outside).amax());
        let (x, n) = (pert.nodes().points[j], pert.nodes().normal[j]);
        let inside = one_sided_limit(|y| pair(&[&l_in, &l_out], &m.layer, y, &n, false), &x, &n, -1.0, delta);
        let outside = one_sided_limit(|y| pair(&[&ext], &p0, y, &n, true), &x, &n, 1.0, delta);
        worst = worst.max((inside - outside).amax());
    }
    assert!(worst < 1e-6, "{worst}");
}

#[test]
fn coated_field_tends_to_inclusion_field_as_layer_thins() {
    let m = contrast();
    let base = circle(128);
    let h = BackgroundField::radial();
    let two = solve_two_phase(&m.background, &m.core, &base, &h).unwrap();
    let probes = ring(Point::zeros(), 2.0, 16);
    let u = two.eval_field(&probes).unwrap();
    let mut errs = vec![];
    for eps in [4e-3, 2e-3, 1e-3] {
        let sol = solve_three_phase(&m, &base, &coated(&base, eps), &h).unwrap();
        let ue = sol.eval_field(&probes).unwrap();
        errs.push(crate::boundary_ops::max_diff(&ue, &u));
    }
    for w in errs.windows(2) {
        assert!((w[1] / w[0] - 0.5).abs() < 0.02, "{errs:?}");
    }
}

#[test]
fn solution_is_linear_in_the_load() {
    let m = contrast();
    let base = kite(128);
    let pert = coated(&base, 0.1);
    let g1 = Mat2::new(1.0, 0.2, 0.0, -0.5);
    let g2 = Mat2::new(-0.3, 0.0, 0.8, 0.1);
    let s1 = solve_three_phase(&m, &base, &pert, &BackgroundField::linear(g1)).unwrap();
    let s2 = solve_three_phase(&m, &base, &pert, &BackgroundField::linear(g2)).unwrap();
    let s12 = solve_three_phase(&m, &base, &pert, &BackgroundField::linear(g1 * 2.0 + g2)).unwrap();
    let again = solve_three_phase(&m, &base, &pert, &BackgroundField::linear(g1)).unwrap();
    for j in 0..base.len() {
        assert!((s12.phi0[j] - s1.phi0[j] * 2.0 - s2.phi0[j]).norm() < 1e-12 * (1.0 + s12.phi0[j].norm()));
        assert_eq!(s1.phi1[j], again.phi1[j]);
    }
}

#[test]
fn field_decays_to_the_load_at_infinity() {
    let m = contrast();
    let base = circle(64);
    let h = BackgroundField::linear(Mat2::new(1.0, 0.5, 0.5, -0.3));
    let sol = solve_three_phase(&m, &base, &coated(&base, 0.1), &h).unwrap();
    let mut errs = vec![];
    let radii = [25.0, 50.0, 100.0];
    for r in radii {
        let x = Point::new(r * 0.6, r * 0.8);
        errs.push((sol.eval_field(&[x]).unwrap()[0] - h.value(&m.background, &x).unwrap()).norm());
    }
    let slope = (errs[2] / errs[0]).ln() / (radii[2] / radii[0]).ln();
    assert!((slope + 1.0).abs() < 0.05, "{slope}");
}

#[test]
fn refinement_changes_values_below_tolerance() {
    let m = contrast();
    let h = BackgroundField::KelvinPointSource { source: [3.5, -1.0], column: 0 };
    let probes = ring(Point::zeros(), 2.0, 16);
    let run = |n: usize| {
        let base = circle(n);
        let pert = perturb(&base, &ThicknessProfile::new(1.0, vec![0.3], vec![]).unwrap(), 0.1).unwrap();
        solve_three_phase(&m, &base, &pert, &h).unwrap().eval_field(&probes).unwrap()
    };
    let d = crate::boundary_ops::max_diff(&run(128), &run(256));
    assert!(d < 1e-10, "{d}");
}

#[test]
fn probes_near_the_interface_are_rejected() {
    let base = circle(64);
    let sol = solve_three_phase(&contrast(), &base, &coated(&base, 0.2), &BackgroundField::radial()).unwrap();
    assert!(matches!(sol.eval_field(&[Point::new(1.21, 0.0)]), Err(Error::TooClose { index: 0, .. })));
    assert!(sol.eval_conormal_on_curve(base.nodes()).is_err());
}

#[test]
fn point_source_is_rejected_inside_the_inclusion() {
    let base = circle(64);
    let h = BackgroundField::KelvinPointSource { source: [0.2, 0.0], column: 0 };
    assert!(solve_two_phase(&lame(1.0, 1.0), &lame(2.0, 2.0), &base, &h).is_err());
}

mod properties {
    use super::*;
    use proptest::prelude::*;

    /// `μΔH + (λ+μ)∇(∇·H)` by central differences.
    fn lame_residual(h: &BackgroundField, p: &LameParams, x: &Point) -> f64 {
        let s = 1e-3;
        let u = |dx: f64, dy: f64| h.value(p, &(x + Vec2::new(dx, dy))).unwrap();
        let c = u(0.0, 0.0);
        let uxx = (u(s, 0.0) + u(-s, 0.0) - c * 2.0) / (s * s);
        let uyy = (u(0.0, s) + u(0.0, -s) - c * 2.0) / (s * s);
        let uxy = (u(s, s) - u(s, -s) - u(-s, s) + u(-s, -s)) / (4.0 * s * s);
        let lap = uxx + uyy;
        let grad_div = Vec2::new(uxx.x + uxy.y, uxy.x + uyy.y);
        (lap * p.mu + grad_div * (p.lambda + p.mu)).norm()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn backgrounds_solve_the_lame_system(
            lambda in 0.1f64..5.0, mu in 0.1f64..5.0,
            zx in 2.0f64..5.0, zy in -2.0f64..2.0, col in 0usize..2,
            x in -1.0f64..1.0, y in -1.0f64..1.0,
            g in prop::array::uniform4(-2.0f64..2.0),
        ) {
            let p = lame(lambda, mu);
            let pt = Point::new(x, y);
            let ps = BackgroundField::KelvinPointSource { source: [zx, zy], column: col };
            let scale = ps.gradient(&p, &pt).unwrap().norm() + 1.0;
            prop_assert!(lame_residual(&ps, &p, &pt) < 1e-5 * scale);
            let lin = BackgroundField::linear(Mat2::new(g[0], g[1], g[2], g[3]));
            prop_assert!(lame_residual(&lin, &p, &pt) < 1e-5);
        }

        #[test]
        fn point_source_gradient_matches_differences(
            zx in 2.0f64..5.0, zy in -2.0f64..2.0, col in 0usize..2, x in -1.0f64..1.0, y in -1.0f64..1.0,
        ) {
            let p = lame(1.3, 0.8);
            let h = BackgroundField::KelvinPointSource { source: [zx, zy], column: col };
            let pt = Point::new(x, y);
            let g = h.gradient(&p, &pt).unwrap();
            let s = 1e-5;
            for m in 0..2 {
                let mut e = Vec2::zeros();
                e[m] = s;
                let fd = (h.value(&p, &(pt + e)).unwrap() - h.value(&p, &(pt - e)).unwrap()) / (2.0 * s);
                prop_assert!((fd - g.column(m)).norm() < 1e-7);
            }
        }
    }
}
