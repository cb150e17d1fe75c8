//! Kelvin fundamental solution of the 2D Lamé system and the kernels built
//! from it.
//!
//! Gradients follow the convention `(∇u)_{im} = ∂_m u_i`. The "conormal of
//! the columns" of a matrix field `M` with unit vector `ν` is the matrix whose
//! k-th column is `λ (∇·M e_k) ν + μ (∇(M e_k) + ∇(M e_k)ᵀ) ν`.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Mat2 = Matrix2<f64>;
pub type Vec2 = Vector2<f64>;

/// Lamé moduli of one isotropic material.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LameParams {
    pub lambda: f64,
    pub mu: f64,
}

impl LameParams {
    pub fn new(lambda: f64, mu: f64) -> Result<Self> {
        let p = Self { lambda, mu };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0) || !(self.lambda + self.mu > 0.0) || !self.lambda.is_finite() || !self.mu.is_finite() {
            return Err(Error::Material(format!(
                "need mu > 0 and lambda + mu > 0, got lambda = {}, mu = {}",
                self.lambda, self.mu
            )));
        }
        Ok(())
    }

    /// `A = (1/μ + 1/(2μ+λ)) / 2`
    pub fn kelvin_a(&self) -> f64 {
        0.5 * (1.0 / self.mu + 1.0 / (2.0 * self.mu + self.lambda))
    }

    /// `B = (1/μ - 1/(2μ+λ)) / 2`
    pub fn kelvin_b(&self) -> f64 {
        0.5 * (1.0 / self.mu - 1.0 / (2.0 * self.mu + self.lambda))
    }

    /// `μ / (λ + 2μ)`
    pub fn alpha(&self) -> f64 {
        self.mu / (self.lambda + 2.0 * self.mu)
    }

    pub fn tensor(&self) -> IsotropicTensor {
        IsotropicTensor { lambda: self.lambda, mu: self.mu }
    }
}

/// Background (0), core (1) and layer (2) materials.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaterialTriple {
    pub background: LameParams,
    pub core: LameParams,
    pub layer: LameParams,
}

impl MaterialTriple {
    /// Requires `(λ₀-λ_j)(μ₀-μ_j) >= 0` and a genuine contrast for `j = 1, 2`.
    pub fn new(background: LameParams, core: LameParams, layer: LameParams) -> Result<Self> {
        let m = Self { background, core, layer };
        m.validate_basic()?;
        for (name, p) in [("core", core), ("layer", layer)] {
            let dl = background.lambda - p.lambda;
            let dm = background.mu - p.mu;
            if dl * dm < 0.0 {
                return Err(Error::Material(format!(
                    "{name}: (lambda0 - lambda)(mu0 - mu) must be non-negative, got {}",
                    dl * dm
                )));
            }
            if dl * dl + dm * dm == 0.0 {
                return Err(Error::Material(format!("{name} has no contrast with the background")));
            }
        }
        Ok(m)
    }

    /// All three phases equal; for identity and pass-through tests.
    pub fn trivial(p: LameParams) -> Self {
        Self { background: p, core: p, layer: p }
    }

    /// Only checks each material on its own, allowing zero contrast.
    pub fn permissive(background: LameParams, core: LameParams, layer: LameParams) -> Result<Self> {
        let m = Self { background, core, layer };
        m.validate_basic()?;
        Ok(m)
    }

    fn validate_basic(&self) -> Result<()> {
        self.background.validate()?;
        self.core.validate()?;
        self.layer.validate()
    }
}

/// `ℂ = λ I⊗I + 2μ 𝕀`
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IsotropicTensor {
    pub lambda: f64,
    pub mu: f64,
}

impl IsotropicTensor {
    /// `λ tr(E) I + 2μ E`, without the symmetry check.
    #[inline]
    pub fn apply(&self, e: &Mat2) -> Mat2 {
        Mat2::identity() * (self.lambda * e.trace()) + e * (2.0 * self.mu)
    }
}

/// `ℂE` for symmetric `E`.
pub fn tensor_apply(t: &IsotropicTensor, e: &Mat2) -> Result<Mat2> {
    if (e[(0, 1)] - e[(1, 0)]).abs() > 1e-12 * (1.0 + e.abs().max()) {
        return Err(Error::Invalid(format!("strain must be symmetric, got {e}")));
    }
    Ok(t.apply(e))
}

/// Symmetric part of a gradient.
#[inline]
pub fn strain(grad: &Mat2) -> Mat2 {
    (grad + grad.transpose()) * 0.5
}

/// Traction `λ tr(∇u) n + μ (∇u + ∇uᵀ) n`.
#[inline]
pub fn conormal(p: &LameParams, grad_u: &Mat2, n: &Vec2) -> Vec2 {
    n * (p.lambda * grad_u.trace()) + (grad_u + grad_u.transpose()) * n * p.mu
}

fn check_nonzero(r: &Vec2) -> Result<f64> {
    let rho2 = r.norm_squared();
    if !(rho2 > 0.0) {
        return Err(Error::Singular { distance: rho2.sqrt() });
    }
    Ok(rho2)
}

/// `Γ(x) = (A/2π) log|x| I - (B/2π) x⊗x/|x|²`
pub fn kelvin_matrix(p: &LameParams, x: &Vec2) -> Result<Mat2> {
    check_nonzero(x)?;
    Ok(kelvin_unchecked(p, x))
}

#[inline]
pub(crate) fn kelvin_unchecked(p: &LameParams, x: &Vec2) -> Mat2 {
    let rho2 = x.norm_squared();
    let a = p.kelvin_a() / (2.0 * PI);
    let b = p.kelvin_b() / (2.0 * PI);
    Mat2::identity() * (0.5 * a * rho2.ln()) - x * x.transpose() * (b / rho2)
}

/// `[∂_1 Γ, ∂_2 Γ]`
pub fn kelvin_gradient(p: &LameParams, x: &Vec2) -> Result<[Mat2; 2]> {
    let rho2 = check_nonzero(x)?;
    let a = p.kelvin_a() / (2.0 * PI);
    let b = p.kelvin_b() / (2.0 * PI);
    let rho4 = rho2 * rho2;
    let mut out = [Mat2::zeros(); 2];
    for (m, g) in out.iter_mut().enumerate() {
        for i in 0..2 {
            for k in 0..2 {
                let d = |u: usize, w: usize| if u == w { 1.0 } else { 0.0 };
                g[(i, k)] = a * d(i, k) * x[m] / rho2 - b * (d(i, m) * x[k] + d(k, m) * x[i]) / rho2
                    + 2.0 * b * x[i] * x[k] * x[m] / rho4;
            }
        }
    }
    Ok(out)
}

/// `h[p][m] = ∂_p ∂_m Γ`
pub fn kelvin_hessian(p: &LameParams, x: &Vec2) -> Result<[[Mat2; 2]; 2]> {
    let rho2 = check_nonzero(x)?;
    let a = p.kelvin_a() / (2.0 * PI);
    let b = p.kelvin_b() / (2.0 * PI);
    let (rho4, rho6) = (rho2 * rho2, rho2 * rho2 * rho2);
    let d = |u: usize, w: usize| if u == w { 1.0 } else { 0.0 };
    let mut out = [[Mat2::zeros(); 2]; 2];
    for (pp, row) in out.iter_mut().enumerate() {
        for (m, h) in row.iter_mut().enumerate() {
            for i in 0..2 {
                for k in 0..2 {
                    let (xi, xk, xm, xp) = (x[i], x[k], x[m], x[pp]);
                    h[(i, k)] = a * d(i, k) * (d(m, pp) / rho2 - 2.0 * xm * xp / rho4)
                        - b * (d(i, m) * d(k, pp) + d(k, m) * d(i, pp)) / rho2
                        + 2.0 * b * (d(i, m) * xk + d(k, m) * xi) * xp / rho4
                        + 2.0 * b * (d(i, pp) * xk * xm + d(k, pp) * xi * xm + d(m, pp) * xi * xk) / rho4
                        - 8.0 * b * xi * xk * xm * xp / rho6;
                }
            }
        }
    }
    Ok(out)
}

/// Conormal (in `x`, unit vector `ν`) of the columns of `Γ(r)`:
/// `(1/2π)[α((r·ν)I + r⊗ν - ν⊗r)/|r|² + 2(1-α)(r·ν) r⊗r/|r|⁴]`.
#[inline]
pub fn column_conormal_kernel(p: &LameParams, r: &Vec2, nu: &Vec2) -> Mat2 {
    let rho2 = r.norm_squared();
    let alpha = p.alpha();
    let rn = r.dot(nu);
    let s = 1.0 / (2.0 * PI * rho2);
    (Mat2::identity() * rn + r * nu.transpose() - nu * r.transpose()) * (alpha * s)
        + r * r.transpose() * (2.0 * (1.0 - alpha) * rn * s / rho2)
}

/// Directional derivative `Σ_m ν_m ∂_m Γ(r)`; symmetric.
#[inline]
pub fn normal_derivative_kernel(p: &LameParams, r: &Vec2, nu: &Vec2) -> Mat2 {
    let rho2 = r.norm_squared();
    let a = p.kelvin_a() / (2.0 * PI);
    let b = p.kelvin_b() / (2.0 * PI);
    let rn = r.dot(nu);
    Mat2::identity() * (a * rn / rho2) - (nu * r.transpose() + r * nu.transpose()) * (b / rho2)
        + r * r.transpose() * (2.0 * b * rn / (rho2 * rho2))
}

/// Kernel of the double layer potential, `𝒟[φ](x) = ∫ 𝕂(x-y) φ(y) dσ(y)`.
///
/// Its transpose is the conormal in `y` of the columns of `Γ(x-y)`; this is the
/// orientation for which `𝒟[θ] = θ` inside and `0` outside for rigid `θ`.
pub fn traction_kernel(p: &LameParams, x: &Vec2, y: &Vec2, n_y: &Vec2) -> Result<Mat2> {
    let r = x - y;
    check_nonzero(&r)?;
    Ok(-column_conormal_kernel(p, &r, n_y).transpose())
}

/// `∂Γ(x-y)/∂n(y)`, the kernel of `𝒟♯`.
pub fn sharp_kernel(p: &LameParams, x: &Vec2, y: &Vec2, n_y: &Vec2) -> Result<Mat2> {
    let r = x - y;
    check_nonzero(&r)?;
    Ok(-normal_derivative_kernel(p, &r, n_y))
}

/// Rigid displacements `θ₁ = (1,0)`, `θ₂ = (0,1)`, `θ₃ = (x₂, -x₁)`.
pub fn rigid_motion(m: usize, x: &Vec2) -> Vec2 {
    match m {
        0 => Vec2::new(1.0, 0.0),
        1 => Vec2::new(0.0, 1.0),
        2 => Vec2::new(x.y, -x.x),
        _ => panic!("rigid motion index {m} out of range"),
    }
}
