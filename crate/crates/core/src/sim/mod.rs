//! Synthetic sensor field: deployment, sampled range traces and sample loss.

pub mod config;
pub mod field;
pub mod trace;

pub use config::SimConfig;
pub use field::{deploy_sensors, inject_loss, simulate_traces, Placement, SensorPose, SimOutput};
pub use trace::{measure_duration, read_traces, write_traces, RangeSample, RangeTrace, TraceHeader};
