//! Circular angle arithmetic on `[0, 2π)`.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Absolute tolerance used for angle comparisons.
pub const ANGLE_EPS: f64 = 1e-12;

/// Reduce any finite radian value into `[0, 2π)`.
pub fn normalize(value: f64) -> f64 {
    let r = value.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// An angle in radians, always normalized into `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(from = "f64", into = "f64")]
pub struct Angle(f64);

impl Angle {
    pub const ZERO: Angle = Angle(0.0);
    pub const HALF_TURN: Angle = Angle(PI);

    pub fn new(radians: f64) -> Self {
        Angle(normalize(radians))
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn sin(self) -> f64 {
        self.0.sin()
    }

    pub fn cos(self) -> f64 {
        self.0.cos()
    }

    /// Counterclockwise distance from `self` to `other`, in `[0, 2π)`.
    pub fn ccw_to(self, other: Angle) -> f64 {
        normalize(other.0 - self.0)
    }

    /// Shortest unsigned angular separation, in `[0, π]`.
    pub fn separation(self, other: Angle) -> f64 {
        let d = self.ccw_to(other);
        d.min(TAU - d)
    }

    pub fn approx_eq(self, other: Angle, tol: f64) -> bool {
        self.separation(other) <= tol
    }
}

impl From<f64> for Angle {
    fn from(v: f64) -> Self {
        Angle::new(v)
    }
}

impl From<Angle> for f64 {
    fn from(a: Angle) -> Self {
        a.0
    }
}

impl Add for Angle {
    type Output = Angle;
    fn add(self, rhs: Angle) -> Angle {
        Angle::new(self.0 + rhs.0)
    }
}

impl Add<f64> for Angle {
    type Output = Angle;
    fn add(self, rhs: f64) -> Angle {
        Angle::new(self.0 + rhs)
    }
}

impl Sub for Angle {
    type Output = Angle;
    fn sub(self, rhs: Angle) -> Angle {
        Angle::new(self.0 - rhs.0)
    }
}

impl Sub<f64> for Angle {
    type Output = Angle;
    fn sub(self, rhs: f64) -> Angle {
        Angle::new(self.0 - rhs)
    }
}

impl Neg for Angle {
    type Output = Angle;
    fn neg(self) -> Angle {
        Angle::new(-self.0)
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6}", self.0)
    }
}

/// Half-open interval `[start, start + length)` taken mod 2π.
///
/// A length of `2π` denotes the full circle. Zero-length intervals are
/// allowed so that empty intersections can be represented, although the
/// constructors from endpoints never produce one unless both endpoints agree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleInterval {
    start: Angle,
    length: f64,
}

impl AngleInterval {
    /// Interval from `start` counterclockwise to `end`. Equal endpoints give
    /// the full circle.
    pub fn new(start: Angle, end: Angle) -> Self {
        let mut length = start.ccw_to(end);
        if length <= ANGLE_EPS {
            length = TAU;
        }
        AngleInterval { start, length }
    }

    /// Interval `[start, start + length)` with `length` clamped into `[0, 2π]`.
    pub fn with_length(start: Angle, length: f64) -> Self {
        AngleInterval {
            start,
            length: length.clamp(0.0, TAU),
        }
    }

    /// `⟦ξ, ξ+π⟧`: the sensing directions from which an edge of direction ξ
    /// can be seen.
    pub fn half_turn_from(start: Angle) -> Self {
        AngleInterval {
            start,
            length: PI,
        }
    }

    pub fn start(&self) -> Angle {
        self.start
    }

    pub fn end(&self) -> Angle {
        self.start + self.length
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn is_full(&self) -> bool {
        self.length >= TAU
    }

    pub fn contains(&self, phi: Angle) -> bool {
        if self.is_full() {
            return true;
        }
        let d = self.start.ccw_to(phi);
        d < self.length && (self.length - d) > ANGLE_EPS
    }

    /// Split into at most two non-wrapping `[lo, hi)` pieces in `[0, 2π]`.
    pub fn pieces(&self) -> Vec<(f64, f64)> {
        let lo = self.start.radians();
        let hi = lo + self.length;
        if self.length <= 0.0 {
            Vec::new()
        } else if hi <= TAU {
            vec![(lo, hi)]
        } else {
            vec![(lo, TAU), (0.0, hi - TAU)]
        }
    }
}

/// True iff `φ` lies in the half-open wrapped interval.
pub fn angle_in_interval(phi: Angle, iv: &AngleInterval) -> bool {
    iv.contains(phi)
}

/// An edge of direction `xi` can be seen by a sensor looking along `theta`
/// iff `(θ − ξ) mod 2π ∈ [0, π)`.
pub fn edge_detectable(xi: Angle, theta: Angle) -> bool {
    let d = xi.ccw_to(theta);
    d < PI - ANGLE_EPS
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn normalizes_into_range() {
        assert_eq!(Angle::new(TAU).radians(), 0.0);
        assert!((Angle::new(-FRAC_PI_2).radians() - 3.0 * FRAC_PI_2).abs() < 1e-15);
        assert!(Angle::new(-1e-18).radians() < TAU);
        assert!((Angle::new(5.0 * PI).radians() - PI).abs() < 1e-12);
    }

    #[test]
    fn interval_membership() {
        let iv = AngleInterval::new(Angle::new(0.0), Angle::new(1.0));
        assert!(angle_in_interval(Angle::new(0.5), &iv));
        assert!(!angle_in_interval(Angle::new(1.0), &iv));
        assert!(angle_in_interval(Angle::new(0.0), &iv));
    }

    #[test]
    fn wrapping_interval() {
        let iv = AngleInterval::new(Angle::new(1.5 * PI), Angle::new(FRAC_PI_2));
        assert!(angle_in_interval(Angle::new(0.1), &iv));
        assert!(angle_in_interval(Angle::new(1.9 * PI), &iv));
        assert!(!angle_in_interval(Angle::new(PI), &iv));
        assert!(!angle_in_interval(Angle::new(FRAC_PI_2), &iv));
        assert_eq!(iv.pieces().len(), 2);
    }

    #[test]
    fn full_circle_contains_everything() {
        let iv = AngleInterval::new(Angle::new(2.0), Angle::new(2.0));
        assert!(iv.is_full());
        assert!(iv.contains(Angle::new(2.0)));
        assert!(iv.contains(Angle::new(5.0)));
    }

    #[test]
    fn detectability() {
        assert!(edge_detectable(Angle::new(0.0), Angle::new(FRAC_PI_2)));
        assert!(!edge_detectable(Angle::new(0.0), Angle::new(1.5 * PI)));
        assert!(edge_detectable(Angle::new(1.5 * PI), Angle::new(PI / 4.0)));
        assert!(edge_detectable(Angle::new(1.0), Angle::new(1.0)));
        assert!(!edge_detectable(Angle::new(1.0), Angle::new(1.0 + PI)));
    }

    #[test]
    fn separation_is_symmetric() {
        let a = Angle::new(0.1);
        let b = Angle::new(TAU - 0.1);
        assert!((a.separation(b) - 0.2).abs() < 1e-12);
        assert!((b.separation(a) - 0.2).abs() < 1e-12);
    }
}
