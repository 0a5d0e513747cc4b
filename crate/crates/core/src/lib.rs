//! Estimating the shape and speed of a polygon moving on a straight line from
//! range traces of randomly placed directional distance sensors whose
//! positions and directions are unknown.
//!
//! The crate is organized as a pipeline:
//!
//! * [`geometry`]: angles, polygon targets and ray casting.
//! * [`sim`]: sensor deployment and sampled range traces.
//! * [`extract`]: whole-edge detection segments `(l_d, s_d)` from traces.
//! * [`estimator`]: speed, edge lengths/directions, edge multiplicities,
//!   edge order and concave-vertex compensation.
//! * [`harness`]: presets, experiments and error metrics.

pub mod error;
pub mod estimator;
pub mod extract;
pub mod geometry;
pub mod harness;
pub mod seeds;
pub mod sim;

pub use error::{Error, Result};
pub use geometry::{Angle, AngleInterval, DirectedEdge, Point, PolygonTarget, RangeResult};
pub use sim::{RangeSample, RangeTrace, SensorPose, SimConfig};
