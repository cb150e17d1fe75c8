//! Dense LU with a 1-norm condition estimate.

use faer::linalg::solvers::{PartialPivLu, Solve};
use faer::Mat;

use crate::error::{Error, Result};

/// Systems whose estimated condition number exceeds this are rejected.
pub const CONDITION_LIMIT: f64 = 1e13;

pub fn mat_vec(a: &Mat<f64>, x: &[f64]) -> Vec<f64> {
    let xc = Mat::from_fn(x.len(), 1, |i, _| x[i]);
    let y = a * &xc;
    (0..y.nrows()).map(|i| y[(i, 0)]).collect()
}

pub fn norm1(a: &Mat<f64>) -> f64 {
    (0..a.ncols()).map(|j| (0..a.nrows()).map(|i| a[(i, j)].abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// `‖Ax - b‖∞ / (‖A‖∞ ‖x‖∞ + ‖b‖∞)`
pub fn relative_residual(a: &Mat<f64>, x: &[f64], b: &[f64]) -> f64 {
    let ax = mat_vec(a, x);
    let r = ax.iter().zip(b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
    let norm_inf = (0..a.nrows()).map(|i| (0..a.ncols()).map(|j| a[(i, j)].abs()).sum::<f64>()).fold(0.0, f64::max);
    let xn = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let bn = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = norm_inf * xn + bn;
    if scale == 0.0 {
        0.0
    } else {
        r / scale
    }
}

/// Solution of a dense system with its diagnostics.
pub struct CheckedSolve {
    pub x: Vec<f64>,
    pub residual: f64,
    pub condition: f64,
    pub lu: DenseLu,
}

/// Relative residuals above this mark a failed solve.
pub const RESIDUAL_LIMIT: f64 = 1e-10;

/// LU solve that rejects ill-conditioned systems and large residuals.
pub fn solve_checked(a: &Mat<f64>, b: &[f64]) -> Result<CheckedSolve> {
    let lu = DenseLu::new(a)?;
    let condition = lu.check_condition()?;
    log::debug!("dense solve of size {}, condition estimate {condition:.3e}", a.nrows());
    let x = lu.solve(b);
    let residual = relative_residual(a, &x, b);
    if !(residual <= RESIDUAL_LIMIT) {
        return Err(Error::Residual { residual });
    }
    Ok(CheckedSolve { x, residual, condition, lu })
}

pub struct DenseLu {
    lu: PartialPivLu<f64>,
    n: usize,
    norm1: f64,
}

impl DenseLu {
    pub fn new(a: &Mat<f64>) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::SizeMismatch { expected: a.nrows(), got: a.ncols() });
        }
        for j in 0..a.ncols() {
            for i in 0..a.nrows() {
                if !a[(i, j)].is_finite() {
                    return Err(Error::Invalid(format!("non-finite matrix entry at ({i}, {j})")));
                }
            }
        }
        Ok(Self { lu: a.partial_piv_lu(), n: a.nrows(), norm1: norm1(a) })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut rhs = Mat::from_fn(self.n, 1, |i, _| b[i]);
        self.lu.solve_in_place(rhs.as_mut());
        (0..self.n).map(|i| rhs[(i, 0)]).collect()
    }

    fn solve_transpose(&self, b: &[f64]) -> Vec<f64> {
        let mut rhs = Mat::from_fn(self.n, 1, |i, _| b[i]);
        self.lu.solve_transpose_in_place(rhs.as_mut());
        (0..self.n).map(|i| rhs[(i, 0)]).collect()
    }

    pub fn solve_mat(&self, b: &Mat<f64>) -> Mat<f64> {
        self.lu.solve(b)
    }

    /// Hager-Higham estimate of `‖A‖₁ ‖A⁻¹‖₁`.
    pub fn condition_estimate(&self) -> f64 {
        let n = self.n;
        if n == 0 {
            return 0.0;
        }
        let mut x = vec![1.0 / n as f64; n];
        let mut est = 0.0;
        let mut last_j = usize::MAX;
        for _ in 0..5 {
            let y = self.solve(&x);
            est = y.iter().map(|v| v.abs()).sum::<f64>();
            let xi: Vec<f64> = y.iter().map(|v| if *v >= 0.0 { 1.0 } else { -1.0 }).collect();
            let z = self.solve_transpose(&xi);
            let (j, zmax) = z.iter().enumerate().fold((0, 0.0f64), |(bj, bv), (i, v)| {
                if v.abs() > bv {
                    (i, v.abs())
                } else {
                    (bj, bv)
                }
            });
            let ztx: f64 = z.iter().zip(&x).map(|(a, b)| a * b).sum();
            if zmax <= ztx || j == last_j {
                break;
            }
            x = vec![0.0; n];
            x[j] = 1.0;
            last_j = j;
        }
        // Higham's alternating-sign safeguard
        let alt: Vec<f64> = (0..n)
            .map(|i| {
                let s = if i % 2 == 0 { 1.0 } else { -1.0 };
                s * (1.0 + i as f64 / (n as f64 - 1.0).max(1.0))
            })
            .collect();
        let y = self.solve(&alt);
        let alt_est = 2.0 * y.iter().map(|v| v.abs()).sum::<f64>() / (3.0 * n as f64);
        est.max(alt_est) * self.norm1
    }

    /// Fails with the estimate when the system is too close to singular.
    pub fn check_condition(&self) -> Result<f64> {
        let c = self.condition_estimate();
        if !c.is_finite() || c > CONDITION_LIMIT {
            return Err(Error::IllConditioned { condition: c });
        }
        Ok(c)
    }
}
