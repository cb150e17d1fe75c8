//! Shared fixtures for unit tests.

use crate::geometry::{curve_from_shape, make_circle, ClosedCurve, CurveShape, NodePlacement, Point};
use crate::kernels::{LameParams, MaterialTriple};

pub fn lame(lambda: f64, mu: f64) -> LameParams {
    LameParams::new(lambda, mu).unwrap()
}

/// Background (1,1), core (3,2), layer (5,4).
pub fn contrast() -> MaterialTriple {
    MaterialTriple::new(lame(1.0, 1.0), lame(3.0, 2.0), lame(5.0, 4.0)).unwrap()
}

pub fn circle(n: usize) -> ClosedCurve {
    make_circle(1.0, n).unwrap()
}

pub fn kite(n: usize) -> ClosedCurve {
    curve_from_shape(&CurveShape::Kite, n, NodePlacement::Natural).unwrap()
}

/// `count` points on the circle of radius `r` about `center`.
pub fn ring(center: Point, r: f64, count: usize) -> Vec<Point> {
    (0..count)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * (k as f64 + 0.3) / count as f64;
            center + Point::new(r * t.cos(), r * t.sin())
        })
        .collect()
}
