//! Polygon targets described by their counterclockwise directed edges.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::angle::Angle;
use super::{Point, Segment};
use crate::error::{Error, Result};

/// Relative closure tolerance: `ε_close = CLOSE_REL_TOL · perimeter`.
pub const CLOSE_REL_TOL: f64 = 1e-9;

/// One boundary edge: its length and the direction it points in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectedEdge {
    #[serde(rename = "lambda")]
    pub length: f64,
    #[serde(rename = "xi")]
    pub direction: Angle,
}

impl DirectedEdge {
    pub fn new(length: f64, direction: f64) -> Self {
        DirectedEdge {
            length,
            direction: Angle::new(direction),
        }
    }

    /// Head position relative to the tail.
    pub fn vector(&self) -> Point {
        Point::new(
            self.length * self.direction.cos(),
            self.length * self.direction.sin(),
        )
    }
}

/// Sum of all edge vectors. Zero for a closed boundary.
pub fn closure_gap(edges: &[DirectedEdge]) -> (f64, f64) {
    edges.iter().fold((0.0, 0.0), |(dx, dy), e| {
        let v = e.vector();
        (dx + v.x, dy + v.y)
    })
}

/// A simple, closed, counterclockwise polygon.
///
/// Only the edges and the tail of the first edge are stored; vertices are
/// derived on demand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonTarget {
    edges: Vec<DirectedEdge>,
    anchor: [f64; 2],
}

impl PolygonTarget {
    /// Build and validate a polygon.
    pub fn new(edges: Vec<DirectedEdge>, anchor: [f64; 2]) -> Result<Self> {
        let poly = PolygonTarget { edges, anchor };
        poly.validate()?;
        Ok(poly)
    }

    /// Build a polygon from its vertices in counterclockwise order.
    pub fn from_vertices(vertices: &[Point]) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::EmptyPolygon);
        }
        let n = vertices.len();
        let edges = (0..n)
            .map(|i| {
                let a = vertices[i];
                let b = vertices[(i + 1) % n];
                let d = b - a;
                DirectedEdge::new(d.norm(), d.y.atan2(d.x))
            })
            .collect();
        PolygonTarget::new(edges, [vertices[0].x, vertices[0].y])
    }

    /// Build without the simplicity and orientation checks. Used for
    /// zero-area fixtures such as a single segment traversed both ways.
    pub fn new_unchecked(edges: Vec<DirectedEdge>, anchor: [f64; 2]) -> Result<Self> {
        let poly = PolygonTarget { edges, anchor };
        poly.check_lengths()?;
        poly.check_closure()?;
        Ok(poly)
    }

    pub fn edges(&self) -> &[DirectedEdge] {
        &self.edges
    }

    pub fn anchor(&self) -> Point {
        Point::new(self.anchor[0], self.anchor[1])
    }

    pub fn perimeter(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    /// Vertex `j` is the tail of edge `j`.
    pub fn vertices(&self) -> Vec<Point> {
        let mut out = Vec::with_capacity(self.edges.len());
        let mut p = self.anchor();
        for e in &self.edges {
            out.push(p);
            p = p + e.vector();
        }
        out
    }

    pub fn segments(&self) -> Vec<Segment> {
        let v = self.vertices();
        let n = v.len();
        (0..n).map(|i| Segment::new(v[i], v[(i + 1) % n])).collect()
    }

    pub fn signed_area(&self) -> f64 {
        let v = self.vertices();
        let n = v.len();
        0.5 * (0..n)
            .map(|i| v[i].cross(v[(i + 1) % n]))
            .sum::<f64>()
    }

    /// Axis-aligned bounding box `(min, max)`.
    pub fn bounding_box(&self) -> (Point, Point) {
        let v = self.vertices();
        let mut lo = v[0];
        let mut hi = v[0];
        for p in &v[1..] {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        (lo, hi)
    }

    /// Same shape with every length multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let edges = self
            .edges
            .iter()
            .map(|e| DirectedEdge {
                length: e.length * factor,
                direction: e.direction,
            })
            .collect();
        PolygonTarget::new(edges, [self.anchor[0] * factor, self.anchor[1] * factor])
    }

    pub fn validate(&self) -> Result<()> {
        self.check_lengths()?;
        self.check_closure()?;
        self.check_simple()?;
        let area = self.signed_area();
        if area <= 0.0 {
            return Err(Error::NotCounterClockwise { area });
        }
        Ok(())
    }

    fn check_lengths(&self) -> Result<()> {
        if self.edges.is_empty() {
            return Err(Error::EmptyPolygon);
        }
        for (index, e) in self.edges.iter().enumerate() {
            if !(e.length.is_finite() && e.length > 0.0) {
                return Err(Error::InvalidEdgeLength {
                    index,
                    length: e.length,
                });
            }
        }
        Ok(())
    }

    fn check_closure(&self) -> Result<()> {
        let (dx, dy) = closure_gap(&self.edges);
        let tol = CLOSE_REL_TOL * self.perimeter();
        if dx.abs() > tol || dy.abs() > tol {
            return Err(Error::OpenBoundary { dx, dy, tol });
        }
        Ok(())
    }

    fn check_simple(&self) -> Result<()> {
        let segs = self.segments();
        let n = segs.len();
        if n < 3 {
            return Err(Error::SelfIntersecting {
                first: 0,
                second: n.saturating_sub(1),
            });
        }
        let tol = 1e-9 * self.perimeter();
        for i in 0..n {
            for j in (i + 1)..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    // adjacent edges may only share their common vertex
                    if segs[i].overlaps_collinear(&segs[j], tol) {
                        return Err(Error::SelfIntersecting {
                            first: i,
                            second: j,
                        });
                    }
                } else if segs[i].intersects(&segs[j], tol) {
                    return Err(Error::SelfIntersecting {
                        first: i,
                        second: j,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: PolygonTarget = serde_json::from_str(s)?;
        PolygonTarget::new(raw.edges, raw.anchor)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let s = std::fs::read_to_string(path)?;
        PolygonTarget::from_json_str(&s)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("polygon serializes")
    }
}
