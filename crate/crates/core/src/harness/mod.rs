//! Presets, experiment runs, error metrics and plot tables.

mod experiment;
mod metrics;
mod plot;
mod presets;

pub use experiment::{
    check_boundary_ratios, run_experiment, run_once, run_point, ExperimentSpec, MetricsReport,
    PointReport, RunRecord, SweepPoint, SweepSpec, TargetSpec, FIXED_SEEDS,
};
pub use metrics::{
    epsilon_sq, expand_estimates, expand_reports, match_edges, mse, rsr_mse, EdgeErrors,
    EdgeGuess,
};
pub use plot::{emit_plot_data, MSE_VS_NOISE, MSE_VS_SPEED, RSR_MSE_VS_NS};
pub use presets::{preset, small_triangle, sports_car, tank, triangle, truck, PRESET_NAMES};
