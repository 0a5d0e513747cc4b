//! Directional range queries against a polygon.

use serde::{Deserialize, Serialize};

use super::angle::Angle;
use super::polygon::PolygonTarget;
use super::{Point, Segment};

/// Grazing and vertex hits within this distance count as detections.
pub const EPS_HIT: f64 = 1e-9;

/// Outcome of one range measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RangeResult {
    Distance(f64),
    NoDetection,
}

impl RangeResult {
    pub fn distance(self) -> Option<f64> {
        match self {
            RangeResult::Distance(s) => Some(s),
            RangeResult::NoDetection => None,
        }
    }
}

/// Nearest boundary hit along a ray. `edge` is `None` when the origin lies
/// inside the polygon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayHit {
    pub distance: f64,
    pub edge: Option<usize>,
}

/// Crossing-number test on a closed vertex loop. Zero-area loops contain
/// nothing.
pub fn point_in_polygon(p: Point, vertices: &[Point]) -> bool {
    let n = vertices.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (vertices[i], vertices[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Cast a ray from `origin` with unit direction `dir` against the closed loop
/// `vertices`, returning the nearest hit within `r_max`.
pub fn ray_cast(origin: Point, dir: Point, vertices: &[Point], r_max: f64) -> Option<RayHit> {
    let n = vertices.len();
    if n == 0 {
        return None;
    }
    let on_boundary = (0..n).any(|i| {
        Segment::new(vertices[i], vertices[(i + 1) % n]).distance_to_point(origin) <= EPS_HIT
    });
    if on_boundary || point_in_polygon(origin, vertices) {
        return Some(RayHit {
            distance: 0.0,
            edge: None,
        });
    }

    let mut best: Option<RayHit> = None;
    for i in 0..n {
        let p = vertices[i];
        let q = vertices[(i + 1) % n];
        let Some(s) = ray_segment(origin, dir, p, q) else {
            continue;
        };
        if s <= r_max && best.is_none_or(|b| s < b.distance) {
            best = Some(RayHit {
                distance: s,
                edge: Some(i),
            });
        }
    }
    best
}

fn ray_segment(o: Point, d: Point, p: Point, q: Point) -> Option<f64> {
    let e = q - p;
    let len = e.norm();
    if len == 0.0 {
        return None;
    }
    let w = p - o;
    let denom = d.cross(e);
    if denom.abs() > 1e-14 * len {
        let s = w.cross(e) / denom;
        let u = w.cross(d) / denom;
        let tol_u = EPS_HIT / len;
        if s >= -EPS_HIT && u >= -tol_u && u <= 1.0 + tol_u {
            return Some(s.max(0.0));
        }
        return None;
    }
    // parallel: only a collinear segment can be hit
    if w.cross(d).abs() > EPS_HIT {
        return None;
    }
    let s0 = w.dot(d);
    let s1 = (q - o).dot(d);
    match (s0 >= 0.0, s1 >= 0.0) {
        (true, true) => Some(s0.min(s1)),
        (false, false) => None,
        _ => Some(0.0),
    }
}

/// Range reported by a sensor at `origin` looking along `theta` at `poly`
/// (already placed at its position for the sampling epoch).
pub fn ray_polygon_distance(
    origin: Point,
    theta: Angle,
    poly: &PolygonTarget,
    r_max: f64,
) -> RangeResult {
    let dir = Point::new(theta.cos(), theta.sin());
    match ray_cast(origin, dir, &poly.vertices(), r_max) {
        Some(hit) => RangeResult::Distance(hit.distance),
        None => RangeResult::NoDetection,
    }
}
