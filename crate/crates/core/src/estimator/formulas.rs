//! Closed-form relations between an edge `(λ, ξ)`, the speed and what a
//! sensor records while watching that edge.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extract::DetectionSegment;
use crate::geometry::{edge_detectable, Angle};
use crate::sim::SimConfig;

/// `|μ|` may exceed one by this much before a solution is rejected.
pub const MU_EPS: f64 = 1e-9;

/// Duration and normalized slope of one whole-edge detection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub l_d: f64,
    pub s_d: f64,
}

impl Observation {
    pub fn new(l_d: f64, s_d: f64) -> Self {
        Observation { l_d, s_d }
    }
}

impl From<&DetectionSegment> for Observation {
    fn from(s: &DetectionSegment) -> Self {
        Observation::new(s.l_d, s.s_d)
    }
}

/// What a sensor looking along `theta` records for edge `(λ, ξ)` moving at
/// speed `v`, or `None` if it cannot see the edge's front side or looks
/// parallel to the motion.
pub fn analytic_observation(lambda: f64, xi: Angle, theta: Angle, v: f64) -> Option<Observation> {
    let st = theta.sin();
    if !edge_detectable(xi, theta) || st.abs() < 1e-12 {
        return None;
    }
    let d = (theta - xi).sin();
    if d <= 0.0 {
        return None;
    }
    Some(Observation::new(lambda * d / (v * st.abs()), -xi.sin() / d))
}

/// `v̂ = π n_r |Ω| / (2 m_t n_s r_max)`.
pub fn estimate_speed(n_r: usize, m_t: f64, cfg: &SimConfig) -> Result<f64> {
    if !(m_t > 0.0) {
        return Err(Error::NoDetection);
    }
    Ok(PI * n_r as f64 * cfg.area() / (2.0 * m_t * cfg.n_s as f64 * cfg.r_max))
}

/// Expected number of sensors that report anything during `m_t`.
pub fn expected_nonzero_detectors(v: f64, m_t: f64, cfg: &SimConfig) -> f64 {
    2.0 * v * m_t * cfg.n_s as f64 * cfg.r_max / (PI * cfg.area())
}

/// `μ = ((λ/v)² + l_d²(1 − s_d²)) / (2 λ l_d / v)`, so that `cos ξ = ±μ`.
pub fn mu_of(lambda: f64, obs: Observation, v: f64) -> f64 {
    let a = lambda / v;
    let b = obs.l_d;
    (a * a + b * b * (1.0 - obs.s_d * obs.s_d)) / (2.0 * a * b)
}

/// `ξ0 ∈ [0, π]` with `cos ξ0 = μ(λ)`, or `None` if `|μ| > 1 + MU_EPS`.
///
/// The sine is computed from a factored form of `1 − μ²`, which keeps
/// directions near `0` and `π` accurate.
pub fn xi0_of(lambda: f64, obs: Observation, v: f64) -> Option<f64> {
    let mu = mu_of(lambda, obs, v);
    if !mu.is_finite() || mu.abs() > 1.0 + MU_EPS {
        return None;
    }
    let a = lambda / v;
    let b = obs.l_d;
    let bs = b * obs.s_d;
    let prod = (bs - (a - b)) * (bs + (a - b)) * ((a + b) - bs) * ((a + b) + bs);
    let sin = prod.max(0.0).sqrt() / (2.0 * a * b);
    Some(sin.atan2(mu.clamp(-1.0, 1.0)))
}

/// Both directions compatible with `ξ0` and the sign of `s_d`:
/// `{ξ0, π − ξ0}` for `s_d < 0`, `{−ξ0, −π + ξ0}` otherwise.
pub fn xi_candidates(xi0: f64, s_d: f64) -> [Angle; 2] {
    if s_d < 0.0 {
        [Angle::new(xi0), Angle::new(PI - xi0)]
    } else {
        [Angle::new(-xi0), Angle::new(-PI + xi0)]
    }
}

/// Outcome of solving for an edge from two observations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TwoPairSolution {
    Edge { lambda: f64, xi: [Angle; 2] },
    Degenerate,
}

impl TwoPairSolution {
    pub fn edge(self) -> Option<(f64, [Angle; 2])> {
        match self {
            TwoPairSolution::Edge { lambda, xi } => Some((lambda, xi)),
            TwoPairSolution::Degenerate => None,
        }
    }
}

/// `λ/v` from two observations of one edge, if the radicand is non-negative.
fn lambda_over_v(a: Observation, b: Observation) -> Option<f64> {
    let (l, s, l2, s2) = (a.l_d, a.s_d, b.l_d, b.s_d);
    let sq = l * l2 / (l2 - l) * (l2 * (1.0 - s2 * s2) - l * (1.0 - s * s));
    (sq.is_finite() && sq > 0.0).then(|| sq.sqrt())
}

/// Edge length from two observations of the same edge,
/// `λ = v √( l l' / (l' − l) · (l'(1 − s'²) − l(1 − s²)) )`, and the two
/// direction candidates from `μ` of the first observation.
///
/// Pairs whose durations differ by no more than `eps_l · max(l, l')` are
/// degenerate, as are negative radicands and `|μ| > 1 + MU_EPS`.
pub fn two_pair_solve(a: Observation, b: Observation, v: f64, eps_l: f64) -> TwoPairSolution {
    if !(a.l_d > 0.0 && b.l_d > 0.0 && v > 0.0)
        || (a.l_d - b.l_d).abs() <= eps_l * a.l_d.max(b.l_d)
    {
        return TwoPairSolution::Degenerate;
    }
    let Some(lv) = lambda_over_v(a, b) else {
        return TwoPairSolution::Degenerate;
    };
    let lambda = v * lv;
    match xi0_of(lambda, a, v) {
        Some(xi0) => TwoPairSolution::Edge {
            lambda,
            xi: xi_candidates(xi0, a.s_d),
        },
        None => TwoPairSolution::Degenerate,
    }
}

/// `arcsin(λ|sin ξ| / r_max)`, or `None` when the edge is too deep to be
/// seen whole.
pub fn theta_min1(lambda: f64, xi: Angle, r_max: f64) -> Option<f64> {
    let x = lambda * xi.sin().abs();
    (x <= r_max).then(|| (x / r_max).min(1.0).asin())
}

/// Expected number of whole-edge detections of edge `(λ, ξ)`:
/// `v m_t n_s (2 r cos θ1 − (π − 2θ1) λ|sin ξ|) / (2π|Ω|)`, and zero once
/// `λ|sin ξ| > r_max`.
pub fn expected_nd(lambda: f64, xi: Angle, v: f64, m_t: f64, cfg: &SimConfig) -> f64 {
    let Some(t1) = theta_min1(lambda, xi, cfg.r_max) else {
        return 0.0;
    };
    let x = lambda * xi.sin().abs();
    let q = (x / cfg.r_max).min(1.0);
    let cos_t1 = ((1.0 - q) * (1.0 + q)).sqrt();
    let num = 2.0 * cfg.r_max * cos_t1 - (PI - 2.0 * t1) * x;
    v * m_t * cfg.n_s as f64 * num.max(0.0) / (2.0 * PI * cfg.area())
}

/// `n̂_e = ñ_d / E[n_d]` and `⌊n̂_e + 0.5⌋`.
pub fn estimate_edge_count(n_d: usize, e_nd: f64) -> Result<(f64, u32)> {
    if !(e_nd > 0.0) {
        return Err(Error::InvalidExpectation(e_nd));
    }
    let n = n_d as f64 / e_nd;
    Ok((n, (n + 0.5).floor() as u32))
}

/// `∂λ/∂l_d` of the two-observation length with both slopes held fixed,
///
/// ```text
/// ∂λ/∂l = 1/(2λ(1−x)) · { 2[Δr²/l − l] − [Δr'²/l' − l'] + λ²/l' },  x = l/l',
/// ```
///
/// evaluated in units of target displacement (`Δr/v = l s`) and scaled back
/// by `v`.
pub fn length_error_sensitivity(a: Observation, b: Observation, lambda: f64, v: f64) -> Result<f64> {
    let (l, l2) = (a.l_d, b.l_d);
    let x = l / l2;
    if !(l > 0.0 && l2 > 0.0 && lambda > 0.0 && v > 0.0) || (1.0 - x).abs() < 1e-12 {
        return Err(Error::Config("degenerate pair for sensitivity".into()));
    }
    let big = lambda / v;
    let dr = l * a.s_d;
    let dr2 = l2 * b.s_d;
    let bracket = 2.0 * (dr * dr / l - l) - (dr2 * dr2 / l2 - l2) + big * big / l2;
    Ok(v * bracket / (2.0 * big * (1.0 - x)))
}

/// `λ` of [`two_pair_solve`] without the separation guard; used as the
/// reference for sensitivity checks.
pub fn two_pair_lambda(a: Observation, b: Observation, v: f64) -> Option<f64> {
    lambda_over_v(a, b).map(|lv| v * lv)
}
