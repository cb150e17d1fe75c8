//! Fourier tools for 2π-periodic samples on an equispaced grid.
//!
//! Every routine assumes samples `f(θ_j)`, `θ_j = 2πj/N`. For even `N` the
//! Nyquist mode is treated as a cosine, which keeps interpolants real.

use std::f64::consts::PI;

use nalgebra::Vector2;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

fn forward(values: &[f64]) -> Vec<Complex<f64>> {
    let n = values.len();
    let mut buf: Vec<Complex<f64>> = values.iter().map(|&v| Complex::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
    buf
}

fn inverse(mut coeffs: Vec<Complex<f64>>) -> Vec<f64> {
    let n = coeffs.len();
    FftPlanner::new().plan_fft_inverse(n).process(&mut coeffs);
    coeffs.into_iter().map(|c| c.re).collect()
}

/// Signed wavenumber of FFT slot `k`; the Nyquist slot maps to `None`.
fn wavenumber(k: usize, n: usize) -> Option<f64> {
    if n % 2 == 0 && k == n / 2 {
        None
    } else if k <= n / 2 {
        Some(k as f64)
    } else {
        Some(k as f64 - n as f64)
    }
}

/// d/dθ of the trigonometric interpolant.
pub fn derivative(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    if n == 0 {
        return Vec::new();
    }
    let mut c = forward(values);
    for (k, ck) in c.iter_mut().enumerate() {
        *ck = match wavenumber(k, n) {
            Some(w) => *ck * Complex::new(0.0, w),
            None => Complex::new(0.0, 0.0),
        };
    }
    inverse(c)
}

/// Second derivative d²/dθ² of the trigonometric interpolant.
pub fn second_derivative(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    if n == 0 {
        return Vec::new();
    }
    let mut c = forward(values);
    for (k, ck) in c.iter_mut().enumerate() {
        // Nyquist cosine: second derivative is -(N/2)^2 cos, kept.
        let w = wavenumber(k, n).unwrap_or(n as f64 / 2.0);
        *ck *= -w * w;
    }
    inverse(c)
}

pub fn derivative_vec(values: &[Vector2<f64>]) -> Vec<Vector2<f64>> {
    let (x, y) = split(values);
    join(&derivative(&x), &derivative(&y))
}

/// Resample onto `factor * N` equispaced points by zero padding.
pub fn upsample(values: &[f64], factor: usize) -> Vec<f64> {
    let n = values.len();
    if factor <= 1 || n == 0 {
        return values.to_vec();
    }
    let m = n * factor;
    let c = forward(values);
    let mut fine = vec![Complex::new(0.0, 0.0); m];
    for (k, ck) in c.into_iter().enumerate() {
        match wavenumber(k, n) {
            Some(w) if w >= 0.0 => fine[k] += ck,
            Some(_) => fine[m - (n - k)] += ck,
            None => {
                fine[k] += ck * 0.5;
                fine[m - k] += ck * 0.5;
            }
        }
    }
    inverse(fine)
}

pub fn upsample_vec(values: &[Vector2<f64>], factor: usize) -> Vec<Vector2<f64>> {
    let (x, y) = split(values);
    join(&upsample(&x, factor), &upsample(&y, factor))
}

/// Cardinal function of even-N trigonometric interpolation, `sin(Nθ/2) cot(θ/2) / N`.
pub fn dirichlet_kernel(n: usize, theta: f64) -> f64 {
    let half = 0.5 * theta;
    let s = half.sin();
    if s.abs() < 1e-14 {
        // θ ≡ 0 mod 2π, possibly with a sign from odd multiples of 2π
        let turns = (theta / (2.0 * PI)).round() as i64;
        return if n % 2 == 0 && turns % 2 != 0 { (((n / 2) as f64) * theta).cos().signum() } else { 1.0 };
    }
    if n % 2 == 0 {
        (n as f64 * half).sin() * half.cos() / s / n as f64
    } else {
        (n as f64 * half).sin() / s / n as f64
    }
}

/// Circulant weights `R_m` with `∫ log(4 sin²((θ_i-θ')/2)) f(θ') dθ' ≈ Σ_j R_{i-j} f_j`,
/// exact for trigonometric polynomials of degree < N/2.
pub fn log_weights(n: usize) -> Vec<f64> {
    let half = n / 2;
    let nf = n as f64;
    (0..n)
        .map(|m| {
            let theta = 2.0 * PI * m as f64 / nf;
            let sum: f64 = (1..half).map(|k| (k as f64 * theta).cos() / k as f64).sum();
            -4.0 * PI / nf * sum - 4.0 * PI / (nf * nf) * (half as f64 * theta).cos()
        })
        .collect()
}

/// Circulant weights of the periodic Hilbert transform with symbol `i sign(k)`:
/// `(1/2π) p.v.∫ cot((θ'-θ_i)/2) f(θ') dθ' ≈ Σ_j h_{i-j} f_j`.
pub fn hilbert_weights(n: usize) -> Vec<f64> {
    let half = n / 2;
    let nf = n as f64;
    (0..n)
        .map(|m| {
            let theta = 2.0 * PI * m as f64 / nf;
            let sum: f64 = (1..half).map(|k| (k as f64 * theta).sin()).sum();
            -2.0 / nf * sum
        })
        .collect()
}

pub(crate) fn split(values: &[Vector2<f64>]) -> (Vec<f64>, Vec<f64>) {
    values.iter().map(|v| (v.x, v.y)).unzip()
}

pub(crate) fn join(x: &[f64], y: &[f64]) -> Vec<Vector2<f64>> {
    x.iter().zip(y).map(|(&a, &b)| Vector2::new(a, b)).collect()
}
