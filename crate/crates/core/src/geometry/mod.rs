//! Exact planar primitives: angles, polygon targets and ray casting.

pub mod angle;
pub mod polygon;
pub mod ray;

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

pub use angle::{angle_in_interval, edge_detectable, Angle, AngleInterval};
pub use polygon::{closure_gap, DirectedEdge, PolygonTarget};
pub use ray::{point_in_polygon, ray_cast, ray_polygon_distance, RangeResult, RayHit, EPS_HIT};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn from_polar(length: f64, angle: Angle) -> Self {
        Point::new(length * angle.cos(), length * angle.sin())
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

/// Closed line segment from `a` to `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub fn new(a: Point, b: Point) -> Self {
        Segment { a, b }
    }

    pub fn distance_to_point(&self, p: Point) -> f64 {
        let d = self.b - self.a;
        let len2 = d.dot(d);
        if len2 == 0.0 {
            return (p - self.a).norm();
        }
        let t = ((p - self.a).dot(d) / len2).clamp(0.0, 1.0);
        (p - (self.a + d * t)).norm()
    }

    /// True if the segments come within `tol` of each other.
    pub fn intersects(&self, other: &Segment, tol: f64) -> bool {
        let o1 = orient(self.a, self.b, other.a);
        let o2 = orient(self.a, self.b, other.b);
        let o3 = orient(other.a, other.b, self.a);
        let o4 = orient(other.a, other.b, self.b);
        if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
            return true;
        }
        self.distance_to_point(other.a) <= tol
            || self.distance_to_point(other.b) <= tol
            || other.distance_to_point(self.a) <= tol
            || other.distance_to_point(self.b) <= tol
    }

    /// For segments sharing a vertex: true if either folds back onto the other.
    pub fn overlaps_collinear(&self, other: &Segment, tol: f64) -> bool {
        let near_end = |p: Point, s: &Segment| (p - s.a).norm() <= tol || (p - s.b).norm() <= tol;
        [self.a, self.b]
            .iter()
            .any(|&p| !near_end(p, other) && other.distance_to_point(p) <= tol)
            || [other.a, other.b]
                .iter()
                .any(|&p| !near_end(p, self) && self.distance_to_point(p) <= tol)
    }
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b - a).cross(c - a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crossing_segments() {
        let s = Segment::new(Point::new(0.0, 0.0), Point::new(2.0, 2.0));
        let t = Segment::new(Point::new(0.0, 2.0), Point::new(2.0, 0.0));
        assert!(s.intersects(&t, 1e-9));
        let u = Segment::new(Point::new(3.0, 0.0), Point::new(4.0, 0.0));
        assert!(!s.intersects(&u, 1e-9));
    }

    #[test]
    fn fold_back_detected() {
        let s = Segment::new(Point::new(0.0, 0.0), Point::new(2.0, 0.0));
        let t = Segment::new(Point::new(2.0, 0.0), Point::new(1.0, 0.0));
        assert!(s.overlaps_collinear(&t, 1e-9));
        let u = Segment::new(Point::new(2.0, 0.0), Point::new(2.0, 1.0));
        assert!(!s.overlaps_collinear(&u, 1e-9));
    }
}
