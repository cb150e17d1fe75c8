//! Layer potentials evaluated away from the curve.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{Boundary, CurveNodes, Point};
use crate::kernels::{column_conormal_kernel, kelvin_unchecked, normal_derivative_kernel, LameParams, Mat2, Vec2};
use crate::spectral;

use super::cross::upsampling_factor;

/// Plain evaluation requires this many mesh widths between target and curve.
pub const GUARD_MESH_WIDTHS: f64 = 5.0;

/// Largest upsampling factor of a [`NearField`].
pub const MAX_NEAR_FACTOR: usize = 2048;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PotentialKind {
    /// `𝒮[φ]`
    Single,
    /// `𝒟[φ]`
    Double,
    /// `𝒟♯[φ]`
    Sharp,
}

fn value_term(p: &LameParams, kind: PotentialKind, r: &Vec2, ny: &Vec2, phi: &Vec2) -> Vec2 {
    match kind {
        PotentialKind::Single => kelvin_unchecked(p, r) * phi,
        PotentialKind::Double => -column_conormal_kernel(p, r, ny).transpose() * phi,
        PotentialKind::Sharp => -normal_derivative_kernel(p, r, ny) * phi,
    }
}

/// `∇_x` of the single layer integrand `Γ(r) φ`.
#[inline]
pub(crate) fn single_gradient_term(p: &LameParams, r: &Vec2, phi: &Vec2) -> Mat2 {
    let a = p.kelvin_a() / (2.0 * PI);
    let b = p.kelvin_b() / (2.0 * PI);
    let rho2 = r.norm_squared();
    let q = r.dot(phi);
    phi * r.transpose() * (a / rho2)
        - (Mat2::identity() * (q / rho2) + r * phi.transpose() / rho2 - r * r.transpose() * (2.0 * q / (rho2 * rho2))) * b
}

/// `∇_x` of the `𝒟♯` integrand `-Σ_m ν_m ∂_mΓ(r) φ`.
#[inline]
pub(crate) fn sharp_gradient_term(p: &LameParams, r: &Vec2, nu: &Vec2, phi: &Vec2) -> Mat2 {
    let a = p.kelvin_a() / (2.0 * PI);
    let b = p.kelvin_b() / (2.0 * PI);
    let rho2 = r.norm_squared();
    let rho4 = rho2 * rho2;
    let (s, q, t) = (r.dot(nu), r.dot(phi), nu.dot(phi));
    let t1 = (phi * nu.transpose() / rho2 - phi * r.transpose() * (2.0 * s / rho4)) * a;
    let t2 = (nu * phi.transpose() / rho2 + Mat2::identity() * (t / rho2)
        - (nu * q + r * t) * r.transpose() * (2.0 / rho4))
        * -b;
    let t3 = (r * (nu * q + phi * s).transpose() / rho4 + Mat2::identity() * (s * q / rho4)
        - r * r.transpose() * (4.0 * s * q / (rho4 * rho2)))
        * (2.0 * b);
    -(t1 + t2 + t3)
}

fn gradient_term(p: &LameParams, kind: PotentialKind, r: &Vec2, ny: &Vec2, phi: &Vec2) -> Mat2 {
    match kind {
        PotentialKind::Single => single_gradient_term(p, r, phi),
        PotentialKind::Sharp => sharp_gradient_term(p, r, ny, phi),
        PotentialKind::Double => unreachable!("double layer gradient is not provided"),
    }
}

fn sum_value(p: &LameParams, kind: PotentialKind, src: &CurveNodes, w: &[f64], density: &[Vec2], x: &Point) -> Vec2 {
    (0..src.len()).map(|j| value_term(p, kind, &(x - src.points[j]), &src.normal[j], &density[j]) * w[j]).sum()
}

fn sum_gradient(p: &LameParams, kind: PotentialKind, src: &CurveNodes, w: &[f64], density: &[Vec2], x: &Point) -> Mat2 {
    (0..src.len()).map(|j| gradient_term(p, kind, &(x - src.points[j]), &src.normal[j], &density[j]) * w[j]).sum()
}

fn guard(nodes: &CurveNodes, density: &[Vec2], points: &[Point]) -> Result<()> {
    if density.len() != nodes.len() {
        return Err(Error::SizeMismatch { expected: nodes.len(), got: density.len() });
    }
    let limit = GUARD_MESH_WIDTHS * nodes.mesh_width();
    for (index, x) in points.iter().enumerate() {
        let distance = nodes.distance_to(*x);
        if distance < limit {
            return Err(Error::TooClose { index, distance, guard: limit });
        }
    }
    Ok(())
}

fn eval_with(
    p: &LameParams,
    kind: PotentialKind,
    nodes: &CurveNodes,
    density: &[Vec2],
    points: &[Point],
) -> Result<Vec<Vec2>> {
    guard(nodes, density, points)?;
    let w = nodes.weights();
    Ok(points.iter().map(|x| sum_value(p, kind, nodes, &w, density, x)).collect())
}

fn eval_gradient_with(
    p: &LameParams,
    kind: PotentialKind,
    nodes: &CurveNodes,
    density: &[Vec2],
    points: &[Point],
) -> Result<Vec<Mat2>> {
    guard(nodes, density, points)?;
    let w = nodes.weights();
    Ok(points.iter().map(|x| sum_gradient(p, kind, nodes, &w, density, x)).collect())
}

/// `𝒮[φ]` at points at least [`GUARD_MESH_WIDTHS`] mesh widths from the curve.
pub fn eval_single_layer(p: &LameParams, nodes: &CurveNodes, density: &[Vec2], points: &[Point]) -> Result<Vec<Vec2>> {
    eval_with(p, PotentialKind::Single, nodes, density, points)
}

/// `𝒟♯[φ]` at well-separated points.
pub fn eval_dsharp(p: &LameParams, nodes: &CurveNodes, density: &[Vec2], points: &[Point]) -> Result<Vec<Vec2>> {
    eval_with(p, PotentialKind::Sharp, nodes, density, points)
}

/// `𝒟[φ]` at well-separated points.
pub fn eval_double_layer(p: &LameParams, nodes: &CurveNodes, density: &[Vec2], points: &[Point]) -> Result<Vec<Vec2>> {
    eval_with(p, PotentialKind::Double, nodes, density, points)
}

/// `∇𝒮[φ]` at well-separated points.
pub fn eval_single_layer_gradient(
    p: &LameParams,
    nodes: &CurveNodes,
    density: &[Vec2],
    points: &[Point],
) -> Result<Vec<Mat2>> {
    eval_gradient_with(p, PotentialKind::Single, nodes, density, points)
}

/// `∇𝒟♯[φ]` at well-separated points.
pub fn eval_dsharp_gradient(p: &LameParams, nodes: &CurveNodes, density: &[Vec2], points: &[Point]) -> Result<Vec<Mat2>> {
    eval_gradient_with(p, PotentialKind::Sharp, nodes, density, points)
}

/// Potentials close to the curve, from an upsampled copy of the geometry
/// and a spectrally interpolated density.
pub struct NearField {
    p: LameParams,
    nodes: CurveNodes,
    density: Vec<Vec2>,
    weights: Vec<f64>,
}

impl NearField {
    /// Resolves targets down to `min_distance` from the curve.
    pub fn new(p: &LameParams, boundary: &dyn Boundary, density: &[Vec2], min_distance: f64) -> Result<Self> {
        let base = boundary.nodes();
        if density.len() != base.len() {
            return Err(Error::SizeMismatch { expected: base.len(), got: density.len() });
        }
        let factor = upsampling_factor(base, min_distance, MAX_NEAR_FACTOR);
        if factor < upsampling_factor(base, min_distance, usize::MAX) {
            log::warn!("near field capped at factor {factor}; targets at {min_distance:e} are under-resolved");
        }
        let nodes = boundary.discretize(factor * base.len())?;
        let density = spectral::upsample_vec(density, factor);
        let weights = nodes.weights();
        Ok(Self { p: *p, nodes, density, weights })
    }

    pub fn fine_nodes(&self) -> &CurveNodes {
        &self.nodes
    }

    pub fn value(&self, kind: PotentialKind, x: &Point) -> Vec2 {
        sum_value(&self.p, kind, &self.nodes, &self.weights, &self.density, x)
    }

    /// Gradient of `𝒮[φ]` or `𝒟♯[φ]`.
    pub fn gradient(&self, kind: PotentialKind, x: &Point) -> Result<Mat2> {
        if kind == PotentialKind::Double {
            return Err(Error::Invalid("gradient of the double layer is not provided".into()));
        }
        Ok(sum_gradient(&self.p, kind, &self.nodes, &self.weights, &self.density, x))
    }
}

/// One-sided boundary limit of `f` at `x` from the side `x + s·δ n`
/// (`s = ±1`), by second-order Richardson extrapolation from the offsets
/// `δ/4`, `δ/2` and `δ`.
pub fn one_sided_limit<T>(f: impl Fn(&Point) -> T, x: &Point, n: &Vec2, side: f64, delta: f64) -> T
where
    T: std::ops::Mul<f64, Output = T> + std::ops::Sub<Output = T> + std::ops::Add<Output = T>,
{
    let at = |t: f64| f(&(x + n * (side * t * delta)));
    (at(0.25) * 8.0 - at(0.5) * 6.0 + at(1.0)) * (1.0 / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{kelvin_gradient, kelvin_hessian};

    #[test]
    fn closed_form_gradients_match_kelvin_derivatives() {
        let p = LameParams::new(1.7, 0.6).unwrap();
        let r = Vec2::new(0.3, -0.45);
        let nu = Vec2::new(0.8, 0.6);
        let phi = Vec2::new(-1.2, 0.4);
        let d = kelvin_gradient(&p, &r).unwrap();
        let h = kelvin_hessian(&p, &r).unwrap();
        let mut gs = Mat2::zeros();
        let mut gd = Mat2::zeros();
        for m in 0..2 {
            gs.set_column(m, &(d[m] * phi));
            gd.set_column(m, &(-(h[m][0] * nu.x + h[m][1] * nu.y) * phi));
        }
        assert!((single_gradient_term(&p, &r, &phi) - gs).abs().max() < 1e-13);
        assert!((sharp_gradient_term(&p, &r, &nu, &phi) - gd).abs().max() < 1e-12);
    }
}
