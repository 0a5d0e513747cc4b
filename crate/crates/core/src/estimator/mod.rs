//! Speed, edges, edge counts, edge order and outline from range traces.

mod adopt;
mod cluster;
mod concave;
mod formulas;
mod order;
mod psi;

pub use adopt::{
    adopt_estimates, consistency_test, estimate_parallel_edges, AdoptionParams, EdgeEstimate,
    EstimateSource,
};
pub use cluster::{cluster_1d, split_by_gaps, Clustering};
pub use concave::{expected_nd_concave, f_theta_x, is_concave_pair, zone_case, zone_of, Zone, ZoneCase};
pub use formulas::{
    analytic_observation, estimate_edge_count, estimate_speed, expected_nd,
    expected_nonzero_detectors, length_error_sensitivity, mu_of, theta_min1, two_pair_lambda,
    two_pair_solve, xi0_of, xi_candidates, Observation, TwoPairSolution, MU_EPS,
};
pub use order::{
    assemble_shape, concave_compensation, connectivity, rescue_counts, AssemblyParams,
    ConnectivityRecord, ShapeEdge, ShapeEstimate,
};
pub use psi::{classify_segments, psi_kind, PsiKind, PsiSet, Thresholds};

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extract::{
    apply_sd_noise, count_nonzero_detectors, extract_segments, finalize_sd, pair_consecutive,
    ConsecutivePair, DetectionSegment, ExtractionParams, SlopeMode,
};
use crate::geometry::Angle;
use crate::sim::{measure_duration, RangeTrace, SimConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimatorParams {
    pub thresholds: Thresholds,
    pub adoption: AdoptionParams,
    pub assembly: AssemblyParams,
    /// Records with at least this many consecutive detections are trusted.
    pub n_c_min: usize,
    pub tol_slope_change: f64,
    pub jump_factor: f64,
    pub min_samples: usize,
    pub zero_slope_step: f64,
    pub slope_mode: SlopeMode,
    pub endpoint_correction: bool,
}

impl Default for EstimatorParams {
    fn default() -> Self {
        let x = ExtractionParams::default();
        EstimatorParams {
            thresholds: Thresholds::default(),
            adoption: AdoptionParams::default(),
            assembly: AssemblyParams::default(),
            n_c_min: 30,
            tol_slope_change: x.tol_slope_change,
            jump_factor: x.jump_factor,
            min_samples: x.min_samples,
            zero_slope_step: x.zero_slope_step,
            slope_mode: x.slope_mode,
            endpoint_correction: x.endpoint_correction,
        }
    }
}

impl EstimatorParams {
    pub fn extraction(&self, r_max: f64, speed: f64) -> ExtractionParams {
        ExtractionParams {
            r_max,
            speed,
            tol_slope_change: self.tol_slope_change,
            jump_factor: self.jump_factor,
            min_samples: self.min_samples,
            zero_slope_step: self.zero_slope_step,
            slope_mode: self.slope_mode,
            endpoint_correction: self.endpoint_correction,
        }
    }
}

/// Finalized segments and the quantities needed to estimate from them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observations {
    pub v_hat: f64,
    pub m_t: f64,
    pub n_r: usize,
    pub discarded: usize,
    pub segments: Vec<DetectionSegment>,
    pub pairs: Vec<ConsecutivePair>,
}

/// Measure `m_t` and `n_r`, estimate the speed, extract segments, normalize
/// slopes by `v̂`, add slope noise (`cfg.sigma_s`) and pair consecutive
/// segments.
pub fn observe(traces: &[RangeTrace], cfg: &SimConfig, params: &EstimatorParams) -> Result<Observations> {
    cfg.validate()?;
    let m_t = measure_duration(traces).ok_or(Error::NoDetection)?;
    if m_t <= 0.0 {
        return Err(Error::NoDetection);
    }
    let n_r = count_nonzero_detectors(traces);
    let v_hat = estimate_speed(n_r, m_t, cfg)?;
    if v_hat <= 0.0 {
        return Err(Error::NoDetection);
    }
    let ex = extract_segments(traces, &params.extraction(cfg.r_max, v_hat));
    let mut segments = ex.segments;
    finalize_sd(&mut segments, v_hat)?;
    apply_sd_noise(&mut segments, cfg.sigma_s, cfg.seed)?;
    let pairs = pair_consecutive(&segments, v_hat, cfg.dt);
    Ok(Observations {
        v_hat,
        m_t,
        n_r,
        discarded: ex.discarded,
        segments,
        pairs,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Estimation {
    pub v_hat: f64,
    pub m_t: f64,
    pub sets: Vec<PsiSet>,
    pub edges: Vec<EdgeEstimate>,
    pub connectivity: Vec<ConnectivityRecord>,
    pub shape: ShapeEstimate,
}

/// Edges, counts, order and outline from finalized observations.
pub fn estimate(obs: &Observations, cfg: &SimConfig, params: &EstimatorParams) -> Result<Estimation> {
    if !(obs.v_hat > 0.0) {
        return Err(Error::InvalidSpeed(obs.v_hat));
    }
    let segs = &obs.segments;
    let sets = classify_segments(segs, &params.thresholds, cfg.dt);
    let mut edges = Vec::new();
    if let Some(zero) = sets.iter().find(|s| s.kind == PsiKind::Zero) {
        edges.extend(estimate_parallel_edges(segs, zero, obs.v_hat, obs.m_t, cfg));
    }
    let mut adoption = params.adoption;
    adoption.seed = cfg.seed;
    edges.extend(adopt_estimates(segs, &sets, obs.v_hat, obs.m_t, cfg, &adoption));

    let mut assignment = vec![None; segs.len()];
    for (k, e) in edges.iter().enumerate() {
        for &i in &e.support {
            assignment[i] = Some(k);
        }
    }
    let records = connectivity(&obs.pairs, &assignment, params.n_c_min);
    rescue_counts(&mut edges, &records);
    concave_compensation(&mut edges, &records, obs.v_hat, obs.m_t, cfg);
    let shape = assemble_shape(&edges, &records, &params.assembly);
    Ok(Estimation {
        v_hat: obs.v_hat,
        m_t: obs.m_t,
        sets,
        edges,
        connectivity: records,
        shape,
    })
}

/// Full pipeline from traces.
pub fn estimate_from_traces(
    traces: &[RangeTrace],
    cfg: &SimConfig,
    params: &EstimatorParams,
) -> Result<(Observations, Estimation)> {
    let obs = observe(traces, cfg, params)?;
    let est = estimate(&obs, cfg, params)?;
    Ok((obs, est))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeReport {
    pub lambda: f64,
    pub xi_candidates: [Angle; 2],
    pub n_e: f64,
    pub n_e_rounded: u32,
    pub support_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectivityReport {
    pub head: usize,
    pub tail: usize,
    pub n_c: usize,
    pub vertex: crate::extract::VertexKind,
}

/// Serialized form of an [`Estimation`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub v_hat: f64,
    pub edges: Vec<EdgeReport>,
    pub connectivity: Vec<ConnectivityReport>,
    pub shape: ShapeEstimate,
}

impl From<&Estimation> for EstimateReport {
    fn from(e: &Estimation) -> Self {
        EstimateReport {
            v_hat: e.v_hat,
            edges: e
                .edges
                .iter()
                .map(|x| EdgeReport {
                    lambda: x.lambda_hat,
                    xi_candidates: x.xi_candidates,
                    n_e: x.n_e_hat,
                    n_e_rounded: x.n_e_rounded,
                    support_count: x.support_count(),
                })
                .collect(),
            connectivity: e
                .connectivity
                .iter()
                .map(|r| ConnectivityReport {
                    head: r.head,
                    tail: r.tail,
                    n_c: r.n_c,
                    vertex: r.vertex,
                })
                .collect(),
            shape: e.shape.clone(),
        }
    }
}

impl EstimateReport {
    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut w, self)?;
        w.write_all(b"\n")?;
        Ok(())
    }
}
