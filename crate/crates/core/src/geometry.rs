//! Closed curves sampled at equispaced parameter values, and their normal
//! offsets `x + ε h(x) n(x)`.
//!
//! Sign conventions: the parameter runs counterclockwise, `n = R_{-π/2} τ`,
//! i.e. `(τ_y, -τ_x)`, which is the outward normal, and the curvature is
//! defined by `X_ss = κ n`. A counterclockwise unit circle therefore has
//! `κ = -1`, the opposite of the usual textbook sign.
//!
//! Every discretization uses the periodic parameter `θ ∈ [0, 2π)` with
//! nodes `θ_j = 2πj/N`. For an arclength-parametrized curve `s = vθ` with
//! `v = L/2π` constant.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral;

pub type Point = Vector2<f64>;

/// Rotation by -π/2: `(x, y) -> (y, -x)`.
#[inline]
pub fn rot_minus(v: Point) -> Point {
    Vector2::new(v.y, -v.x)
}

/// Sampled geometry of a closed curve at `θ_j = 2πj/N`.
#[derive(Clone, Debug)]
pub struct CurveNodes {
    pub points: Vec<Point>,
    pub tangent: Vec<Point>,
    pub normal: Vec<Point>,
    pub curvature: Vec<f64>,
    /// `|dX/dθ|`
    pub speed: Vec<f64>,
    /// `d|dX/dθ|/dθ`
    pub speed_derivative: Vec<f64>,
}

impl CurveNodes {
    /// Build from position and the first two θ-derivatives.
    pub fn from_derivatives(points: Vec<Point>, d1: &[Point], d2: &[Point]) -> Result<Self> {
        let n = points.len();
        let mut tangent = Vec::with_capacity(n);
        let mut normal = Vec::with_capacity(n);
        let mut curvature = Vec::with_capacity(n);
        let mut speed = Vec::with_capacity(n);
        let mut speed_derivative = Vec::with_capacity(n);
        for j in 0..n {
            let v = d1[j].norm();
            if !(v > 1e-12) {
                return Err(Error::Geometry(format!("zero speed at node {j}")));
            }
            let t = d1[j] / v;
            let nn = rot_minus(t);
            tangent.push(t);
            normal.push(nn);
            curvature.push(d2[j].dot(&nn) / (v * v));
            speed.push(v);
            speed_derivative.push(d1[j].dot(&d2[j]) / v);
        }
        Ok(Self { points, tangent, normal, curvature, speed, speed_derivative })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Trapezoid weight `2π/N |X'(θ_j)|`, i.e. `dσ` at node `j`.
    pub fn weights(&self) -> Vec<f64> {
        let h = 2.0 * PI / self.len() as f64;
        self.speed.iter().map(|v| v * h).collect()
    }

    pub fn length(&self) -> f64 {
        self.weights().iter().sum()
    }

    /// Signed enclosed area, positive for counterclockwise curves.
    pub fn signed_area(&self) -> f64 {
        let w = self.weights();
        0.5 * (0..self.len())
            .map(|j| {
                let p = self.points[j];
                let t = self.tangent[j];
                (p.x * t.y - p.y * t.x) * w[j]
            })
            .sum::<f64>()
    }

    pub fn centroid(&self) -> Point {
        let w = self.weights();
        let total: f64 = w.iter().sum();
        self.points.iter().zip(&w).map(|(p, wj)| p * *wj).sum::<Point>() / total
    }

    /// Smallest distance from `x` to the node set.
    pub fn distance_to(&self, x: Point) -> f64 {
        self.points.iter().map(|p| (p - x).norm()).fold(f64::INFINITY, f64::min)
    }

    /// Whether `x` lies inside the node polygon (crossing number).
    pub fn contains(&self, x: Point) -> bool {
        let n = self.len();
        let p = &self.points;
        let mut inside = false;
        for i in 0..n {
            let (a, b) = (p[i], p[(i + 1) % n]);
            if (a.y > x.y) != (b.y > x.y) {
                let xc = a.x + (x.y - a.y) * (b.x - a.x) / (b.y - a.y);
                if x.x < xc {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Largest spacing between consecutive nodes.
    pub fn mesh_width(&self) -> f64 {
        let n = self.len();
        (0..n).map(|j| (self.points[(j + 1) % n] - self.points[j]).norm()).fold(0.0, f64::max)
    }

    /// Derivative along arclength of a sampled scalar, `(1/|X'|) d/dθ`.
    pub fn tangential_derivative(&self, values: &[f64]) -> Vec<f64> {
        spectral::derivative(values).into_iter().zip(&self.speed).map(|(d, v)| d / v).collect()
    }

    pub fn tangential_derivative_vec(&self, values: &[Point]) -> Vec<Point> {
        spectral::derivative_vec(values).into_iter().zip(&self.speed).map(|(d, v)| d / *v).collect()
    }

    /// Best-effort check that the node polygon does not cross itself.
    pub fn check_simple(&self) -> Result<()> {
        let n = self.len();
        let p = &self.points;
        for i in 0..n {
            let (a, b) = (p[i], p[(i + 1) % n]);
            for j in (i + 2)..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                let (c, d) = (p[j], p[(j + 1) % n]);
                if segments_cross(a, b, c, d) {
                    return Err(Error::Geometry(format!("curve self-intersects near nodes {i} and {j}")));
                }
            }
        }
        Ok(())
    }
}

fn segments_cross(a: Point, b: Point, c: Point, d: Point) -> bool {
    let orient = |p: Point, q: Point, r: Point| (q - p).perp(&(r - p));
    let (d1, d2) = (orient(a, b, c), orient(a, b, d));
    let (d3, d4) = (orient(c, d, a), orient(c, d, b));
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

/// A smooth 2π-periodic map `t -> X(t)` with two derivatives.
pub trait Parametrization: fmt::Debug + Send + Sync {
    /// `(X, X', X'')` at `t`.
    fn eval(&self, t: f64) -> (Point, Point, Point);
}

/// The built-in curve families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurveShape {
    Circle { radius: f64 },
    Ellipse { a: f64, b: f64 },
    /// `(cos t + 0.65 cos 2t - 0.65, 1.5 sin t)`
    Kite,
    /// Star-shaped `r(t) (cos t, sin t)` with
    /// `r(t) = r0 + Σ_k cos[k-1] cos kt + sin[k-1] sin kt`.
    Fourier { r0: f64, cos: Vec<f64>, sin: Vec<f64> },
}

impl Parametrization for CurveShape {
    fn eval(&self, t: f64) -> (Point, Point, Point) {
        let (s, c) = t.sin_cos();
        match self {
            CurveShape::Circle { radius } => {
                let r = *radius;
                (Vector2::new(r * c, r * s), Vector2::new(-r * s, r * c), Vector2::new(-r * c, -r * s))
            }
            CurveShape::Ellipse { a, b } => {
                (Vector2::new(a * c, b * s), Vector2::new(-a * s, b * c), Vector2::new(-a * c, -b * s))
            }
            CurveShape::Kite => {
                let (s2, c2) = (2.0 * t).sin_cos();
                (
                    Vector2::new(c + 0.65 * c2 - 0.65, 1.5 * s),
                    Vector2::new(-s - 1.3 * s2, 1.5 * c),
                    Vector2::new(-c - 2.6 * c2, -1.5 * s),
                )
            }
            CurveShape::Fourier { r0, cos, sin } => {
                let (mut r, mut dr, mut ddr) = (*r0, 0.0, 0.0);
                for (i, a) in cos.iter().enumerate() {
                    let k = (i + 1) as f64;
                    let (sk, ck) = (k * t).sin_cos();
                    r += a * ck;
                    dr -= a * k * sk;
                    ddr -= a * k * k * ck;
                }
                for (i, b) in sin.iter().enumerate() {
                    let k = (i + 1) as f64;
                    let (sk, ck) = (k * t).sin_cos();
                    r += b * sk;
                    dr += b * k * ck;
                    ddr -= b * k * k * sk;
                }
                let e = Vector2::new(c, s);
                let e_perp = Vector2::new(-s, c);
                (e * r, e * dr + e_perp * r, e * (ddr - r) + e_perp * (2.0 * dr))
            }
        }
    }
}

impl CurveShape {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            CurveShape::Circle { radius } => *radius > 0.0 && radius.is_finite(),
            CurveShape::Ellipse { a, b } => *a > 0.0 && *b > 0.0 && a.is_finite() && b.is_finite(),
            CurveShape::Kite => true,
            CurveShape::Fourier { r0, cos, sin } => {
                let amp: f64 = cos.iter().chain(sin).map(|c| c.abs()).sum();
                *r0 > amp && r0.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Geometry(format!("invalid curve parameters {self:?}")))
        }
    }
}

/// How nodes are placed along a smooth curve.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodePlacement {
    /// Equispaced in arclength, `|dX/ds| = 1`.
    #[default]
    Arclength,
    /// Equispaced in the map's own parameter. Better resolved for curves
    /// with sharp bends, where arclength sampling starves the high-curvature part.
    Natural,
}

/// Closed curve sampled at `N` equispaced parameter values.
#[derive(Clone, Debug)]
pub struct ClosedCurve {
    param: Arc<dyn Parametrization>,
    table: Option<Arc<ArclengthTable>>,
    nodes: CurveNodes,
    length: f64,
}

/// Counterclockwise circle of the given radius centred at the origin.
pub fn make_circle(radius: f64, n_nodes: usize) -> Result<ClosedCurve> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::Geometry(format!("radius must be positive, got {radius}")));
    }
    check_node_count(n_nodes)?;
    let shape = CurveShape::Circle { radius };
    let param: Arc<dyn Parametrization> = Arc::new(shape.clone());
    let nodes = natural_nodes(&shape, n_nodes)?;
    Ok(ClosedCurve { param, table: None, nodes, length: 2.0 * PI * radius })
}

fn natural_nodes(param: &dyn Parametrization, n: usize) -> Result<CurveNodes> {
    let mut points = Vec::with_capacity(n);
    let mut d1 = Vec::with_capacity(n);
    let mut d2 = Vec::with_capacity(n);
    for j in 0..n {
        let (p, dp, ddp) = param.eval(2.0 * PI * j as f64 / n as f64);
        points.push(p);
        d1.push(dp);
        d2.push(ddp);
    }
    CurveNodes::from_derivatives(points, &d1, &d2)
}

fn check_node_count(n: usize) -> Result<()> {
    if n < 8 || n % 2 != 0 {
        return Err(Error::Geometry(format!("node count must be even and at least 8, got {n}")));
    }
    Ok(())
}

/// Arclength reparametrization of a generic smooth closed curve.
pub fn make_smooth_curve(param: Arc<dyn Parametrization>, n_nodes: usize) -> Result<ClosedCurve> {
    make_curve(param, n_nodes, NodePlacement::Arclength)
}

pub fn make_curve(param: Arc<dyn Parametrization>, n_nodes: usize, placement: NodePlacement) -> Result<ClosedCurve> {
    check_node_count(n_nodes)?;
    let arclength = Arc::new(ArclengthTable::new(param.as_ref())?);
    let (nodes, table) = match placement {
        NodePlacement::Arclength => (arclength.nodes(param.as_ref(), n_nodes)?, Some(arclength.clone())),
        NodePlacement::Natural => (natural_nodes(param.as_ref(), n_nodes)?, None),
    };
    if nodes.signed_area() <= 0.0 {
        return Err(Error::Geometry("curve must be oriented counterclockwise".into()));
    }
    nodes.check_simple()?;
    let length = arclength.length;
    Ok(ClosedCurve { param, table, nodes, length })
}

pub fn curve_from_shape(shape: &CurveShape, n_nodes: usize, placement: NodePlacement) -> Result<ClosedCurve> {
    shape.validate()?;
    match shape {
        CurveShape::Circle { radius } => make_circle(*radius, n_nodes),
        other => make_curve(Arc::new(other.clone()), n_nodes, placement),
    }
}

impl ClosedCurve {
    pub fn nodes(&self) -> &CurveNodes {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Total arclength; the period of the arclength parameter.
    pub fn period(&self) -> f64 {
        self.length
    }

    pub fn is_arclength(&self) -> bool {
        self.table.is_some() || self.nodes.speed_derivative.iter().all(|d| d.abs() < 1e-12)
    }

    /// The same curve sampled at `n` nodes.
    pub fn resample(&self, n: usize) -> Result<ClosedCurve> {
        if n == self.len() {
            return Ok(self.clone());
        }
        let nodes = self.discretize(n)?;
        Ok(ClosedCurve { param: self.param.clone(), table: self.table.clone(), nodes, length: self.length })
    }

    /// Fresh geometry at `n` nodes, computed from the underlying map.
    pub fn discretize(&self, n: usize) -> Result<CurveNodes> {
        match &self.table {
            Some(t) => t.nodes(self.param.as_ref(), n),
            None => natural_nodes(self.param.as_ref(), n),
        }
    }

    /// Largest distance from the centroid to a node.
    pub fn bounding_radius(&self) -> f64 {
        let c = self.nodes.centroid();
        self.nodes.points.iter().map(|p| (p - c).norm()).fold(0.0, f64::max)
    }
}

/// Fourier representation of the speed `|X'(t)|`, integrated in closed form.
#[derive(Debug)]
struct ArclengthTable {
    mean: f64,
    cos: Vec<f64>,
    sin: Vec<f64>,
    length: f64,
}

impl ArclengthTable {
    fn new(param: &dyn Parametrization) -> Result<Self> {
        let mut m = 64usize;
        loop {
            let speed: Vec<f64> = (0..m)
                .map(|j| param.eval(2.0 * PI * j as f64 / m as f64).1.norm())
                .collect();
            if speed.iter().any(|v| !(*v > 1e-12)) {
                return Err(Error::Geometry("parametrization has zero speed".into()));
            }
            let (mean, cos, sin) = real_fourier(&speed);
            let tail = cos[cos.len() * 3 / 4..]
                .iter()
                .chain(&sin[sin.len() * 3 / 4..])
                .fold(0.0f64, |a, c| a.max(c.abs()));
            if tail < 1e-15 * mean || m >= 1 << 16 {
                return Ok(Self { mean, cos, sin, length: 2.0 * PI * mean });
            }
            m *= 2;
        }
    }

    /// `(s(t), s'(t))`
    fn arclength(&self, t: f64) -> (f64, f64) {
        let mut s = self.mean * t;
        let mut ds = self.mean;
        let (s1, c1) = t.sin_cos();
        let (mut sk, mut ck) = (s1, c1);
        for k in 0..self.cos.len() {
            let kf = (k + 1) as f64;
            s += (self.cos[k] * sk + self.sin[k] * (1.0 - ck)) / kf;
            ds += self.cos[k] * ck + self.sin[k] * sk;
            let next_s = sk * c1 + ck * s1;
            ck = ck * c1 - sk * s1;
            sk = next_s;
        }
        (s, ds)
    }

    fn nodes(&self, param: &dyn Parametrization, n: usize) -> Result<CurveNodes> {
        let v = self.length / (2.0 * PI);
        let mut points = Vec::with_capacity(n);
        let mut d1 = Vec::with_capacity(n);
        let mut d2 = Vec::with_capacity(n);
        let mut t = 0.0;
        for j in 0..n {
            let target = self.length * j as f64 / n as f64;
            if j > 0 {
                t += (self.length / n as f64) / self.arclength(t).1;
            }
            for iter in 0.. {
                let (s, ds) = self.arclength(t);
                // the residual can stall a few ulps above zero
                if (s - target).abs() <= 8.0 * f64::EPSILON * self.length {
                    break;
                }
                let step = (s - target) / ds;
                t -= step;
                if step.abs() < 1e-15 * (1.0 + t.abs()) {
                    break;
                }
                if iter > 50 {
                    return Err(Error::Geometry("arclength inversion did not converge".into()));
                }
            }
            let (p, dp, ddp) = param.eval(t);
            let g = dp.norm();
            let tau = dp / g;
            // dX/dθ = v τ and d²X/dθ² = v² κ n, with κ from the original map
            let kappa = ddp.dot(&rot_minus(tau)) / (g * g);
            points.push(p);
            d1.push(tau * v);
            d2.push(rot_minus(tau) * (v * v * kappa));
        }
        CurveNodes::from_derivatives(points, &d1, &d2)
    }
}

/// `(mean, a_k, b_k)` with `f = mean + Σ a_k cos kt + b_k sin kt`, `k = 1..N/2-1`.
fn real_fourier(values: &[f64]) -> (f64, Vec<f64>, Vec<f64>) {
    use rustfft::num_complex::Complex;
    let n = values.len();
    let mut buf: Vec<Complex<f64>> = values.iter().map(|&v| Complex::new(v, 0.0)).collect();
    rustfft::FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let nf = n as f64;
    let mean = buf[0].re / nf;
    let (cos, sin) = (1..n / 2).map(|k| (2.0 * buf[k].re / nf, -2.0 * buf[k].im / nf)).unzip();
    (mean, cos, sin)
}

/// Layer thickness `h(θ) = c0 + Σ_k a_k cos kθ + b_k sin kθ` in the
/// normalized arclength parameter of the base curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThicknessProfile {
    pub mean: f64,
    #[serde(default)]
    pub cos: Vec<f64>,
    #[serde(default)]
    pub sin: Vec<f64>,
}

impl ThicknessProfile {
    pub fn constant(value: f64) -> Self {
        Self { mean: value, cos: Vec::new(), sin: Vec::new() }
    }

    pub fn new(mean: f64, cos: Vec<f64>, sin: Vec<f64>) -> Result<Self> {
        let h = Self { mean, cos, sin };
        h.validate()?;
        Ok(h)
    }

    /// Interpolate nodal samples; the samples are differentiated spectrally afterwards.
    pub fn from_samples(values: &[f64]) -> Result<Self> {
        let (mean, mut cos, sin) = real_fourier(values);
        if values.len() % 2 == 0 && !values.is_empty() {
            // fold the Nyquist cosine into the series so nodal values are reproduced
            let nyq: f64 = values.iter().enumerate().map(|(j, v)| if j % 2 == 0 { *v } else { -*v }).sum::<f64>()
                / values.len() as f64;
            cos.push(nyq);
        }
        Self::new(mean, cos, sin)
    }

    /// Rejects profiles that are not bounded below by a positive constant.
    pub fn validate(&self) -> Result<()> {
        let lb = self.lower_bound();
        if !(lb > 0.0) {
            return Err(Error::Geometry(format!("thickness must satisfy h >= C > 0, min is {lb:e}")));
        }
        Ok(())
    }

    /// Minimum of `h` on a fine grid; the constant `C` in `h >= C > 0`.
    pub fn lower_bound(&self) -> f64 {
        let m = 64 * (self.cos.len().max(self.sin.len()) + 1);
        (0..m).map(|j| self.eval(2.0 * PI * j as f64 / m as f64)).fold(f64::INFINITY, f64::min)
    }

    /// `(h, h_θ, h_θθ)` at parameter `θ`.
    pub fn eval_all(&self, theta: f64) -> (f64, f64, f64) {
        let (mut h, mut dh, mut ddh) = (self.mean, 0.0, 0.0);
        for (i, a) in self.cos.iter().enumerate() {
            let k = (i + 1) as f64;
            let (s, c) = (k * theta).sin_cos();
            h += a * c;
            dh -= a * k * s;
            ddh -= a * k * k * c;
        }
        for (i, b) in self.sin.iter().enumerate() {
            let k = (i + 1) as f64;
            let (s, c) = (k * theta).sin_cos();
            h += b * s;
            dh += b * k * c;
            ddh -= b * k * k * s;
        }
        (h, dh, ddh)
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.eval_all(theta).0
    }

    /// Nodal values of `h` on an `n`-point grid.
    pub fn sample(&self, n: usize) -> Vec<f64> {
        (0..n).map(|j| self.eval(2.0 * PI * j as f64 / n as f64)).collect()
    }

    /// Nodal values of `dh/dθ`.
    pub fn sample_theta_derivative(&self, n: usize) -> Vec<f64> {
        (0..n).map(|j| self.eval_all(2.0 * PI * j as f64 / n as f64).1).collect()
    }

    /// `dh/ds` on the nodes of `curve`.
    pub fn sample_arclength_derivative(&self, curve: &ClosedCurve) -> Vec<f64> {
        let v = &curve.nodes().speed;
        self.sample_theta_derivative(curve.len()).into_iter().zip(v).map(|(d, v)| d / v).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.mean == 0.0 && self.cos.iter().chain(&self.sin).all(|c| *c == 0.0)
    }
}

/// The offset curve `X̃(θ) = X(θ) + ε h(θ) n(θ)` with geometry computed
/// from the exact derivatives of that map.
#[derive(Clone, Debug)]
pub struct PerturbedCurve {
    base: ClosedCurve,
    profile: ThicknessProfile,
    epsilon: f64,
    nodes: CurveNodes,
}

pub fn perturb(base: &ClosedCurve, profile: &ThicknessProfile, epsilon: f64) -> Result<PerturbedCurve> {
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return Err(Error::Geometry(format!("epsilon must be non-negative, got {epsilon}")));
    }
    profile.validate()?;
    let nodes = offset_nodes(base.nodes(), profile, epsilon);
    nodes.check_simple()?;
    if nodes.signed_area() <= 0.0 {
        return Err(Error::Geometry("perturbed curve lost its orientation".into()));
    }
    Ok(PerturbedCurve { base: base.clone(), profile: profile.clone(), epsilon, nodes })
}

fn offset_nodes(base: &CurveNodes, profile: &ThicknessProfile, eps: f64) -> CurveNodes {
    let n = base.len();
    if eps == 0.0 {
        return base.clone();
    }
    let kappa_theta = spectral::derivative(&base.curvature);
    let mut points = Vec::with_capacity(n);
    let mut d1 = Vec::with_capacity(n);
    let mut d2 = Vec::with_capacity(n);
    for j in 0..n {
        let (h, ht, htt) = profile.eval_all(2.0 * PI * j as f64 / n as f64);
        let (x, t, nn, k) = (base.points[j], base.tangent[j], base.normal[j], base.curvature[j]);
        let (v, vt) = (base.speed[j], base.speed_derivative[j]);
        // X' = vτ, X'' = v'τ + v²κn, n' = -vκτ
        points.push(x + nn * (eps * h));
        d1.push(t * (v - eps * h * v * k) + nn * (eps * ht));
        let ct = vt - eps * (ht * v * k + h * vt * k + h * v * kappa_theta[j]) - eps * ht * v * k;
        let cn = (v - eps * h * v * k) * v * k + eps * htt;
        d2.push(t * ct + nn * cn);
    }
    CurveNodes::from_derivatives(points, &d1, &d2).expect("offset curve is regular for admissible epsilon")
}

impl PerturbedCurve {
    pub fn base(&self) -> &ClosedCurve {
        &self.base
    }

    pub fn profile(&self) -> &ThicknessProfile {
        &self.profile
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn nodes(&self) -> &CurveNodes {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn discretize(&self, n: usize) -> Result<CurveNodes> {
        let base = self.base.discretize(n)?;
        Ok(offset_nodes(&base, &self.profile, self.epsilon))
    }
}

/// Anything that can be sampled at an arbitrary even number of nodes.
pub trait Boundary: Send + Sync {
    fn nodes(&self) -> &CurveNodes;
    fn discretize(&self, n: usize) -> Result<CurveNodes>;
}

impl Boundary for ClosedCurve {
    fn nodes(&self) -> &CurveNodes {
        &self.nodes
    }
    fn discretize(&self, n: usize) -> Result<CurveNodes> {
        if n == self.len() {
            return Ok(self.nodes.clone());
        }
        ClosedCurve::discretize(self, n)
    }
}

impl Boundary for PerturbedCurve {
    fn nodes(&self) -> &CurveNodes {
        &self.nodes
    }
    fn discretize(&self, n: usize) -> Result<CurveNodes> {
        if n == self.len() {
            return Ok(self.nodes.clone());
        }
        PerturbedCurve::discretize(self, n)
    }
}
