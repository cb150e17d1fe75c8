//! Independent reference solutions.
//!
//! * Closed-form fields for concentric disks under the radial load `H = A x`.
//!   In every annulus the field is `a x + b x/|x|²`, with
//!   `∇·u = 2a` and radial traction `2(λ+μ)a - 2μb/r²`.
//! * Brute-force summation of boundary limits of layer potentials, sharing
//!   nothing with the corrected quadratures but the kernels.

use nalgebra::{Matrix4, Vector4};

use crate::error::{Error, Result};
use crate::geometry::{Boundary, Point};
use crate::kernels::{column_conormal_kernel, kelvin_matrix, LameParams, MaterialTriple, Mat2, Vec2};
use crate::spectral;

/// `u = a_m x + b_m x/|x|²` in region `m`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialSolution {
    pub materials: MaterialTriple,
    pub r1: f64,
    pub r2: f64,
    pub amplitude: f64,
    pub a_core: f64,
    pub a_layer: f64,
    pub b_layer: f64,
    pub b_ext: f64,
    /// Relative residual of the continuity system.
    pub residual: f64,
}

fn radial_traction(p: &LameParams, a: f64, b: f64, r: f64) -> f64 {
    2.0 * (p.lambda + p.mu) * a - 2.0 * p.mu * b / (r * r)
}

/// Coated disk `r < r1` (core), `r1 < r < r2` (layer) under `H(x) = amplitude·x`.
pub fn solve_radial(materials: &MaterialTriple, r1: f64, r2: f64, amplitude: f64) -> Result<RadialSolution> {
    if !(r1 > 0.0 && r2 > r1 && r2.is_finite()) {
        return Err(Error::Geometry(format!("need 0 < r1 < r2, got r1 = {r1}, r2 = {r2}")));
    }
    solve_radial_unchecked(materials, r1, r2, amplitude)
}

/// The same continuity system without the ordering check. It is analytic
/// in `r2`, so it also makes sense for `r2` slightly below `r1`.
fn solve_radial_unchecked(m: &MaterialTriple, r1: f64, r2: f64, amplitude: f64) -> Result<RadialSolution> {
    let (p0, p1, p2) = (m.background, m.core, m.layer);
    let k = |p: &LameParams| 2.0 * (p.lambda + p.mu);
    // unknowns (a_core, a_layer, b_layer, b_ext)
    #[rustfmt::skip]
    let a = Matrix4::new(
        r1, -r1, -1.0 / r1, 0.0,
        k(&p1), -k(&p2), 2.0 * p2.mu / (r1 * r1), 0.0,
        0.0, r2, 1.0 / r2, -1.0 / r2,
        0.0, k(&p2), -2.0 * p2.mu / (r2 * r2), 2.0 * p0.mu / (r2 * r2),
    );
    let rhs = Vector4::new(0.0, 0.0, amplitude * r2, k(&p0) * amplitude);
    let x = a.lu().solve(&rhs).ok_or_else(|| Error::IllConditioned { condition: f64::INFINITY })?;
    let residual = (a * x - rhs).amax() / (a.amax() * x.amax() + rhs.amax()).max(f64::MIN_POSITIVE);
    Ok(RadialSolution {
        materials: *m,
        r1,
        r2,
        amplitude,
        a_core: x[0],
        a_layer: x[1],
        b_layer: x[2],
        b_ext: x[3],
        residual,
    })
}

/// Single disk of radius `r1` with the core material, no layer.
pub fn solve_radial_two_phase(background: &LameParams, core: &LameParams, r1: f64, amplitude: f64) -> Result<RadialSolution> {
    if !(r1 > 0.0) {
        return Err(Error::Geometry(format!("radius must be positive, got {r1}")));
    }
    let m = MaterialTriple::permissive(*background, *core, *core)?;
    let (k0, k1) = (2.0 * (background.lambda + background.mu), 2.0 * (core.lambda + core.mu));
    // a r1 = A r1 + b/r1 ; k1 a = k0 A - 2μ0 b/r1²
    let b = (k0 - k1) * amplitude * r1 * r1 / (k1 + 2.0 * background.mu);
    let a = amplitude + b / (r1 * r1);
    Ok(RadialSolution { materials: m, r1, r2: r1, amplitude, a_core: a, a_layer: a, b_layer: 0.0, b_ext: b, residual: 0.0 })
}

impl RadialSolution {
    fn coefficients(&self, r: f64) -> (f64, f64) {
        if r < self.r1 {
            (self.a_core, 0.0)
        } else if r < self.r2 {
            (self.a_layer, self.b_layer)
        } else {
            (self.amplitude, self.b_ext)
        }
    }

    fn material(&self, r: f64) -> LameParams {
        if r < self.r1 {
            self.materials.core
        } else if r < self.r2 {
            self.materials.layer
        } else {
            self.materials.background
        }
    }

    /// Radial traction from both sides of radius `r`, `(inside, outside)`.
    pub fn traction_at(&self, r: f64) -> (f64, f64) {
        let side = |rr: f64| {
            let (a, b) = self.coefficients(rr);
            radial_traction(&self.material(rr), a, b, r)
        };
        (side(r * (1.0 - 1e-14)), side(r * (1.0 + 1e-14)))
    }
}

pub fn radial_eval(sol: &RadialSolution, x: &Point) -> Vec2 {
    let r2 = x.norm_squared();
    if r2 == 0.0 {
        return Vec2::zeros();
    }
    let (a, b) = sol.coefficients(r2.sqrt());
    x * (a + b / r2)
}

/// `∇u`, `(∇u)_{im} = ∂_m u_i`.
pub fn radial_eval_grad(sol: &RadialSolution, x: &Point) -> Mat2 {
    let r2 = x.norm_squared();
    let (a, b) = sol.coefficients(r2.sqrt());
    if r2 == 0.0 {
        return Mat2::identity() * a;
    }
    Mat2::identity() * (a + b / r2) - x * x.transpose() * (2.0 * b / (r2 * r2))
}

/// `d/dε` at `ε = 0` of the coated-disk field at `x`, with layer
/// `r1 < r < r1 + ε h`. Central differences with step `step`, refined
/// once by Richardson extrapolation.
pub fn radial_epsilon_derivative(
    materials: &MaterialTriple,
    r1: f64,
    h: f64,
    amplitude: f64,
    x: &Point,
    step: f64,
) -> Result<Vec2> {
    if x.norm() <= r1 + step * h.abs() * 2.0 {
        return Err(Error::Invalid("the derivative is taken at exterior points only".into()));
    }
    let central = |s: f64| -> Result<Vec2> {
        let plus = solve_radial_unchecked(materials, r1, r1 + s * h, amplitude)?;
        let minus = solve_radial_unchecked(materials, r1, r1 - s * h, amplitude)?;
        Ok((radial_eval(&plus, x) - radial_eval(&minus, x)) / (2.0 * s))
    };
    let coarse = central(step)?;
    let fine = central(0.5 * step)?;
    Ok((fine * 4.0 - coarse) / 3.0)
}

/// Upsampling factor after which the trapezoid error `exp(-M d / v_max)`
/// at distance `d` falls below `1e-16`.
fn brute_factor(vmax: f64, n: usize, distance: f64) -> usize {
    let m = 37.0 * vmax / distance;
    ((m / n as f64).ceil() as usize).max(1)
}

/// Boundary limit from `side` (`+1` outside, `-1` inside) of `𝒮[φ]` and of
/// its conormal at node `i`, by plain trapezoid sums at offsets
/// `δ, δ/2, δ/4` along the normal and quadratic extrapolation to `0`.
pub fn brute_force_single_layer_limit(
    p: &LameParams,
    boundary: &dyn Boundary,
    phi: &[Vec2],
    i: usize,
    side: f64,
    delta: f64,
) -> Result<(Vec2, Vec2)> {
    let coarse = boundary.nodes();
    if phi.len() != coarse.len() {
        return Err(Error::SizeMismatch { expected: coarse.len(), got: phi.len() });
    }
    let factor = brute_factor(coarse.speed.iter().copied().fold(0.0, f64::max), coarse.len(), 0.25 * delta);
    let fine = boundary.discretize(factor * coarse.len())?;
    let density = spectral::upsample_vec(phi, factor);
    let w = fine.weights();
    let (x0, n) = (coarse.points[i], coarse.normal[i]);
    let at = |t: f64| -> Result<(Vec2, Vec2)> {
        let x = x0 + n * (side * t * delta);
        let mut v = Vec2::zeros();
        let mut c = Vec2::zeros();
        for j in 0..fine.len() {
            let r = x - fine.points[j];
            v += kelvin_matrix(p, &r)? * density[j] * w[j];
            c += column_conormal_kernel(p, &r, &n) * density[j] * w[j];
        }
        Ok((v, c))
    };
    let (a, b, c) = (at(0.25)?, at(0.5)?, at(1.0)?);
    let extrap = |a: Vec2, b: Vec2, c: Vec2| (a * 8.0 - b * 6.0 + c) / 3.0;
    Ok((extrap(a.0, b.0, c.0), extrap(a.1, b.1, c.1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::conormal;

    fn mats() -> MaterialTriple {
        MaterialTriple::new(
            LameParams::new(1.0, 1.0).unwrap(),
            LameParams::new(3.0, 2.0).unwrap(),
            LameParams::new(5.0, 4.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn zero_contrast_leaves_the_load_unchanged() {
        let p = LameParams::new(2.0, 1.5).unwrap();
        let s = solve_radial(&MaterialTriple::trivial(p), 1.0, 1.3, 0.7).unwrap();
        for a in [s.a_core, s.a_layer] {
            assert!((a - 0.7).abs() < 1e-15);
        }
        assert!(s.b_layer.abs() < 1e-15 && s.b_ext.abs() < 1e-15);
    }

    #[test]
    fn displacement_and_traction_are_continuous() {
        let s = solve_radial(&mats(), 1.0, 1.2, 1.0).unwrap();
        assert!(s.residual < 1e-13);
        for r in [s.r1, s.r2] {
            let x = Vec2::new(r * 0.6, r * 0.8);
            let jump = radial_eval(&s, &(x * (1.0 - 1e-15))) - radial_eval(&s, &(x * (1.0 + 1e-15)));
            assert!(jump.norm() < 1e-13);
            let (ti, to) = s.traction_at(r);
            assert!((ti - to).abs() < 1e-12);
        }
        assert_eq!(radial_eval(&s, &Vec2::zeros()), Vec2::zeros());
    }

    #[test]
    fn conormal_from_gradient_is_continuous_at_outer_radius() {
        let s = solve_radial(&mats(), 1.0, 1.2, 1.0).unwrap();
        let n = Vec2::new(0.28, -0.96);
        let x = n * s.r2;
        let inside = conormal(&s.materials.layer, &radial_eval_grad(&s, &(x * (1.0 - 1e-14))), &n);
        let outside = conormal(&s.materials.background, &radial_eval_grad(&s, &(x * (1.0 + 1e-14))), &n);
        assert!((inside - outside).norm() < 1e-12);
    }

    #[test]
    fn fields_solve_the_lame_system() {
        let s = solve_radial(&mats(), 1.0, 1.2, 1.0).unwrap();
        let h = 2e-4;
        for x in [Vec2::new(0.3, 0.4), Vec2::new(0.7, 0.75), Vec2::new(1.5, -0.9)] {
            let p = s.material(x.norm());
            let u = |dx: f64, dy: f64| radial_eval(&s, &(x + Vec2::new(dx, dy)));
            // ℒu = μΔu + (λ+μ)∇(∇·u)
            let lap = (u(h, 0.0) + u(-h, 0.0) + u(0.0, h) + u(0.0, -h) - u(0.0, 0.0) * 4.0) / (h * h);
            let uxx = (u(h, 0.0) + u(-h, 0.0) - u(0.0, 0.0) * 2.0) / (h * h);
            let uyy = (u(0.0, h) + u(0.0, -h) - u(0.0, 0.0) * 2.0) / (h * h);
            let uxy = (u(h, h) - u(h, -h) - u(-h, h) + u(-h, -h)) / (4.0 * h * h);
            let grad_div = Vec2::new(uxx.x + uxy.y, uxy.x + uyy.y);
            let residual = lap * p.mu + grad_div * (p.lambda + p.mu);
            assert!(residual.norm() < 1e-6, "{residual}");
        }
    }

    #[test]
    fn thin_layer_limit_is_the_two_phase_solution() {
        let m = mats();
        let two = solve_radial_two_phase(&m.background, &m.core, 1.0, 1.0).unwrap();
        let mut last = f64::INFINITY;
        for eps in [1e-2, 1e-3, 1e-4] {
            let s = solve_radial(&m, 1.0, 1.0 + eps, 1.0).unwrap();
            let d = (s.b_ext - two.b_ext).abs() + (s.a_core - two.a_core).abs();
            assert!(d < 0.5 * last);
            last = d;
        }
        assert!(last < 1e-3);
    }

    #[test]
    fn stiffer_core_carries_less_strain() {
        let bg = LameParams::new(1.0, 1.0).unwrap();
        let mut last = f64::INFINITY;
        for mu in [1.0, 10.0, 100.0, 1000.0] {
            let core = LameParams::new(1.0, mu).unwrap();
            let layer = LameParams::new(1.0, 1.0).unwrap();
            let s = solve_radial(&MaterialTriple::permissive(bg, core, layer).unwrap(), 1.0, 1.1, 1.0).unwrap();
            assert!(s.a_core.abs() < last);
            last = s.a_core.abs();
        }
        assert!(last < 1e-2);
    }

    #[test]
    fn epsilon_derivative_matches_the_exterior_coefficient_slope() {
        let m = mats();
        let x = Vec2::new(1.2, -1.6);
        let d = radial_epsilon_derivative(&m, 1.0, 1.0, 1.0, &x, 1e-4).unwrap();
        let fd = |e: f64| radial_eval(&solve_radial(&m, 1.0, 1.0 + e, 1.0).unwrap(), &x);
        let forward = (fd(1e-6) * 4.0 - fd(2e-6) - radial_eval(&solve_radial_two_phase(&m.background, &m.core, 1.0, 1.0).unwrap(), &x) * 3.0) / 2e-6;
        assert!((d - forward).norm() < 1e-5, "{d} vs {forward}");
    }
}
