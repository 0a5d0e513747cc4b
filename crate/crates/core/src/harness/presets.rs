//! Named targets. The vehicle outlines are approximations drawn to match
//! published edge tables, not measured outlines.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{DirectedEdge, Point, PolygonTarget};

pub const PRESET_NAMES: [&str; 5] = ["triangle", "small_triangle", "truck", "sports_car", "tank"];

fn from_xy(pts: &[(f64, f64)]) -> Result<PolygonTarget> {
    let v: Vec<Point> = pts.iter().map(|&(x, y)| Point::new(x, y)).collect();
    PolygonTarget::from_vertices(&v)
}

/// Right triangle with a horizontal base `50√3`, a slanted edge `100` at
/// `5π/6` and a vertical edge `50`.
pub fn triangle() -> PolygonTarget {
    PolygonTarget::new(
        vec![
            DirectedEdge::new(50.0 * 3f64.sqrt(), 0.0),
            DirectedEdge::new(100.0, 5.0 * PI / 6.0),
            DirectedEdge::new(50.0, 1.5 * PI),
        ],
        [0.0, 0.0],
    )
    .expect("triangle preset is valid")
}

pub fn small_triangle() -> PolygonTarget {
    triangle().scaled(0.5).expect("scaled triangle is valid")
}

/// Box truck, 143.5 × 40 with chamfered front corners.
pub fn truck() -> Result<PolygonTarget> {
    from_xy(&[
        (0.0, 0.0),
        (139.0, 0.0),
        (143.5, 4.5),
        (143.5, 35.5),
        (139.0, 40.0),
        (0.0, 40.0),
    ])
}

/// Low convex octagon, 76.5 long and 23 high.
pub fn sports_car() -> Result<PolygonTarget> {
    from_xy(&[
        (7.43, 0.0),
        (68.43, 0.0),
        (76.48, 6.74),
        (76.48, 16.24),
        (68.43, 22.98),
        (7.43, 22.98),
        (0.0, 16.745),
        (0.0, 6.235),
    ])
}

/// Hull with a raised turret. The two hull-top pieces (46 each, direction π)
/// meet the turret walls at concave vertices.
pub fn tank() -> Result<PolygonTarget> {
    from_xy(&[
        (10.0, 0.0),
        (147.5, 0.0),
        (162.0, 15.0),
        (162.0, 30.0),
        (116.0, 30.0),
        (116.0, 50.0),
        (56.0, 50.0),
        (56.0, 30.0),
        (10.0, 30.0),
        (0.0, 15.0),
    ])
}

pub fn preset(name: &str) -> Result<PolygonTarget> {
    match name {
        "triangle" => Ok(triangle()),
        "small_triangle" => Ok(small_triangle()),
        "truck" => truck(),
        "sports_car" => sports_car(),
        "tank" => tank(),
        other => Err(Error::UnknownPreset(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_presets_are_valid() {
        for name in PRESET_NAMES {
            let p = preset(name).unwrap();
            p.validate().unwrap();
            assert!(p.signed_area() > 0.0, "{name}");
        }
        assert!(matches!(preset("bus"), Err(Error::UnknownPreset(_))));
    }

    #[test]
    fn triangle_edges() {
        let t = triangle();
        assert_eq!(t.edges().len(), 3);
        assert!((t.perimeter() - (50.0 * 3f64.sqrt() + 150.0)).abs() < 1e-9);
        assert!((small_triangle().perimeter() * 2.0 - t.perimeter()).abs() < 1e-9);
    }

    #[test]
    fn tank_has_two_hull_top_pieces() {
        let t = tank().unwrap();
        let tops: Vec<&DirectedEdge> = t
            .edges()
            .iter()
            .filter(|e| (e.length - 46.0).abs() < 1e-9 && (e.direction.radians() - PI).abs() < 1e-9)
            .collect();
        assert_eq!(tops.len(), 2);
    }
}
