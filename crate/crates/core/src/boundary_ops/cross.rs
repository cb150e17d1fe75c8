//! Single-layer traces from one curve onto another, disjoint curve.
//!
//! The integrand is smooth but nearly singular when the curves are close,
//! so the source geometry and density are upsampled until the trapezoid
//! rule resolves the distance between them.

use faer::Mat;

use crate::error::{Error, Result};
use crate::geometry::{Boundary, CurveNodes};
use crate::kernels::{column_conormal_kernel, kelvin_unchecked, LameParams, Mat2};
use crate::spectral;

use super::{OperatorKind, OperatorMatrix};

/// Trapezoid error for a source at distance `d` behaves like `exp(-F N d / v_max)`;
/// this exponent targets round-off.
const RESOLUTION_EXPONENT: f64 = 36.0;

/// Upsampling factor that resolves targets `distance` away from `source`.
pub fn upsampling_factor(source: &CurveNodes, distance: f64, cap: usize) -> usize {
    let vmax = source.speed.iter().copied().fold(0.0, f64::max);
    let f = (RESOLUTION_EXPONENT * vmax / (source.len() as f64 * distance)).ceil();
    (f.max(1.0) as usize).min(cap.max(1))
}

/// Maximal upsampling factor used for cross-curve operators.
pub const MAX_CROSS_FACTOR: usize = 512;

pub struct CrossOperators {
    /// `𝒮[φ]` on the target nodes.
    pub value: OperatorMatrix,
    /// Conormal of `𝒮[φ]` with the target normals.
    pub conormal: OperatorMatrix,
    pub factor: usize,
    /// `exp(-F N d / v_max)`, the expected size of the quadrature error.
    pub estimated_error: f64,
}

/// Cross operators of material `p` from `source` onto the `target` nodes.
pub fn cross_ops(p: &LameParams, source: &dyn Boundary, target: &CurveNodes) -> Result<CrossOperators> {
    let base = source.nodes();
    let n = base.len();
    let distance = target.points.iter().map(|x| base.distance_to(*x)).fold(f64::INFINITY, f64::min);
    if !(distance > 1e-12) {
        return Err(Error::Geometry("source and target curves coincide".into()));
    }
    let factor = upsampling_factor(base, distance, MAX_CROSS_FACTOR);
    let vmax = base.speed.iter().copied().fold(0.0, f64::max);
    let estimated_error = (-((factor * n) as f64) * distance / vmax).exp();
    if estimated_error > 1e-12 {
        log::warn!(
            "cross-curve quadrature under-resolved: distance {distance:e}, factor {factor}, estimated error {estimated_error:e}"
        );
    }
    let fine = source.discretize(factor * n)?;
    let interp = interpolation_matrix(n, factor);
    let fw = fine.weights();
    let m = target.len();
    let nf = fine.len();
    let mut value = Mat::<f64>::zeros(2 * m, 2 * n);
    let mut conormal = Mat::<f64>::zeros(2 * m, 2 * n);
    const CHUNK: usize = 64;
    for start in (0..m).step_by(CHUNK) {
        let rows = CHUNK.min(m - start);
        let mut kv: [Mat<f64>; 4] = std::array::from_fn(|_| Mat::zeros(rows, nf));
        let mut kc: [Mat<f64>; 4] = std::array::from_fn(|_| Mat::zeros(rows, nf));
        for r in 0..rows {
            let i = start + r;
            let (x, nu) = (target.points[i], target.normal[i]);
            for l in 0..nf {
                let d = x - fine.points[l];
                let g: Mat2 = kelvin_unchecked(p, &d) * fw[l];
                let t: Mat2 = column_conormal_kernel(p, &d, &nu) * fw[l];
                for c in 0..4 {
                    kv[c][(r, l)] = g[(c / 2, c % 2)];
                    kc[c][(r, l)] = t[(c / 2, c % 2)];
                }
            }
        }
        for c in 0..4 {
            let pv = &kv[c] * &interp;
            let pc = &kc[c] * &interp;
            let (a, b) = (c / 2, c % 2);
            for r in 0..rows {
                for j in 0..n {
                    value[(2 * (start + r) + a, 2 * j + b)] = pv[(r, j)];
                    conormal[(2 * (start + r) + a, 2 * j + b)] = pc[(r, j)];
                }
            }
        }
    }
    Ok(CrossOperators {
        value: OperatorMatrix { entries: value, kind: OperatorKind::CrossSingleLayer },
        conormal: OperatorMatrix { entries: conormal, kind: OperatorKind::CrossConormal },
        factor,
        estimated_error,
    })
}

/// `FN × N` trigonometric interpolation from the coarse to the fine grid.
fn interpolation_matrix(n: usize, factor: usize) -> Mat<f64> {
    let nf = n * factor;
    let kernel: Vec<f64> = (0..nf)
        .map(|m| spectral::dirichlet_kernel(n, 2.0 * std::f64::consts::PI * m as f64 / nf as f64))
        .collect();
    Mat::from_fn(nf, n, |l, j| kernel[(l + nf - factor * j) % nf])
}
