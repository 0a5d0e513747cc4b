//! Splitting range traces into whole-edge detection segments.
//!
//! While a sensor keeps seeing one edge, `r(t)` is linear in `t`. A run of
//! positive distances is therefore cut at jumps and at changes of slope, and
//! each piece is bounded by events that decide whether it covers a whole edge:
//!
//! | start event        | end event             |
//! |--------------------|-----------------------|
//! | slope change       | slope change          |
//! | jump down          | jump up               |
//! | appear below `r_max` | disappear below `r_max` |
//!
//! Any other boundary (lost sample, trace limit, range limit, sensor inside
//! the target) leaves the piece as a partial observation.

use serde::{Deserialize, Serialize};

use crate::sim::{RangeSample, RangeTrace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryEvent {
    SlopeChange,
    JumpDown,
    JumpUp,
    AppearBelowMax,
    DisappearBelowMax,
    TraceEdge,
    LostGap,
}

impl BoundaryEvent {
    pub fn admissible_start(self) -> bool {
        matches!(
            self,
            BoundaryEvent::SlopeChange | BoundaryEvent::JumpDown | BoundaryEvent::AppearBelowMax
        )
    }

    pub fn admissible_end(self) -> bool {
        matches!(
            self,
            BoundaryEvent::SlopeChange | BoundaryEvent::JumpUp | BoundaryEvent::DisappearBelowMax
        )
    }
}

/// How the line through a piece's samples is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlopeMode {
    /// Line through the first and last sample.
    #[default]
    Endpoint,
    /// Least-squares line over all samples.
    LeastSquares,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExtractionParams {
    pub r_max: f64,
    /// Speed used to scale the jump threshold (the estimated speed once known).
    pub speed: f64,
    /// `|r(t+dt) − 2r(t) + r(t−dt)| / dt²` above this marks a change of slope.
    pub tol_slope_change: f64,
    /// Jump threshold is `jump_factor · dt · (speed + |local dr/dt|)`.
    pub jump_factor: f64,
    pub min_samples: usize,
    /// Per-step change below which a whole segment counts as zero slope.
    pub zero_slope_step: f64,
    pub slope_mode: SlopeMode,
    /// Move jump/appear/disappear endpoints half a step outwards, to the
    /// expected position of the event between two samples.
    pub endpoint_correction: bool,
}

impl Default for ExtractionParams {
    fn default() -> Self {
        ExtractionParams {
            r_max: 100.0,
            speed: 1.0,
            tol_slope_change: 0.05,
            jump_factor: 5.0,
            min_samples: 3,
            zero_slope_step: 0.1,
            slope_mode: SlopeMode::Endpoint,
            endpoint_correction: true,
        }
    }
}

/// One detection period of a sensor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionSegment {
    pub sensor_id: usize,
    pub t_s: f64,
    pub t_e: f64,
    pub r_s: f64,
    pub r_e: f64,
    pub l_d: f64,
    /// `(r_e − r_s) / l_d` until [`finalize_sd`](super::finalize_sd) divides
    /// by the speed.
    pub s_d: f64,
    pub start_event: BoundaryEvent,
    pub end_event: BoundaryEvent,
    #[serde(rename = "valid")]
    pub valid_whole_edge: bool,
    /// Every per-step change stayed below the zero-slope threshold.
    #[serde(default)]
    pub flat: bool,
    #[serde(default)]
    pub samples: usize,
}

impl DetectionSegment {
    pub fn raw_slope(&self) -> f64 {
        (self.r_e - self.r_s) / self.l_d
    }
}

/// Segments of one trace plus the number of pieces dropped for having fewer
/// than `min_samples` samples.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TraceSegments {
    pub segments: Vec<DetectionSegment>,
    pub discarded: usize,
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    first: usize,
    last: usize,
    start: BoundaryEvent,
    end: BoundaryEvent,
    /// Knee with the previous piece can be located by intersecting lines.
    knee_before: bool,
    knee_after: bool,
}

#[derive(Debug, Clone, Copy)]
struct Line {
    t_ref: f64,
    r_ref: f64,
    slope: f64,
}

impl Line {
    fn at(&self, t: f64) -> f64 {
        self.r_ref + self.slope * (t - self.t_ref)
    }
}

pub fn segment_trace(trace: &RangeTrace, params: &ExtractionParams) -> TraceSegments {
    let n = trace.samples.len();
    let r: Vec<f64> = trace
        .samples
        .iter()
        .map(|s| match s {
            RangeSample::Distance(d) => *d,
            _ => f64::NAN,
        })
        .collect();
    let positive = |k: usize| r[k] > 0.0;

    let mut out = TraceSegments::default();
    let mut k = 0;
    while k < n {
        if !positive(k) {
            k += 1;
            continue;
        }
        let a = k;
        while k + 1 < n && positive(k + 1) {
            k += 1;
        }
        let b = k;
        k += 1;

        let start = outer_event(trace, &r, a, a.checked_sub(1), a + 1 <= b, params, true);
        let end = outer_event(trace, &r, b, (b + 1 < n).then_some(b + 1), b >= a + 1, params, false);
        let pieces = split_run(&r, a, b, start, end, trace.dt, params);
        emit(trace, &r, &pieces, params, &mut out);
    }
    out
}

fn outer_event(
    trace: &RangeTrace,
    r: &[f64],
    edge: usize,
    neighbor: Option<usize>,
    has_inner: bool,
    params: &ExtractionParams,
    at_start: bool,
) -> BoundaryEvent {
    let Some(nb) = neighbor else {
        return BoundaryEvent::TraceEdge;
    };
    match trace.samples[nb] {
        RangeSample::Lost => BoundaryEvent::LostGap,
        RangeSample::Distance(_) => BoundaryEvent::TraceEdge,
        RangeSample::NoDetection => {
            let step = if has_inner {
                let inner = if at_start { edge + 1 } else { edge - 1 };
                (r[inner] - r[edge]).abs()
            } else {
                0.0
            };
            if r[edge] < params.r_max - step - 1e-9 {
                if at_start {
                    BoundaryEvent::AppearBelowMax
                } else {
                    BoundaryEvent::DisappearBelowMax
                }
            } else {
                BoundaryEvent::TraceEdge
            }
        }
    }
}

fn split_run(
    r: &[f64],
    a: usize,
    b: usize,
    start: BoundaryEvent,
    end: BoundaryEvent,
    dt: f64,
    params: &ExtractionParams,
) -> Vec<Piece> {
    // jumps first: a jump also produces large second differences
    let mut blocks: Vec<(usize, usize, BoundaryEvent, BoundaryEvent)> = Vec::new();
    let mut block_start = a;
    let mut block_event = start;
    for k in a..b {
        let step = r[k + 1] - r[k];
        let before = (k > a).then(|| (r[k] - r[k - 1]).abs());
        let after = (k + 2 <= b).then(|| (r[k + 2] - r[k + 1]).abs());
        let local = match (before, after) {
            (Some(x), Some(y)) => x.min(y),
            (Some(x), None) | (None, Some(x)) => x,
            (None, None) => 0.0,
        } / dt;
        let threshold = params.jump_factor * dt * (params.speed + local);
        if step.abs() > threshold && !steep_knee(r, a, b, k) {
            let ev = if step < 0.0 {
                BoundaryEvent::JumpDown
            } else {
                BoundaryEvent::JumpUp
            };
            blocks.push((block_start, k, block_event, ev));
            block_start = k + 1;
            block_event = ev;
        }
    }
    blocks.push((block_start, b, block_event, end));

    let tol = params.tol_slope_change * dt * dt;
    let mut pieces = Vec::new();
    for (p, q, s_ev, e_ev) in blocks {
        let mut kinks: Vec<(usize, usize)> = Vec::new();
        for k in (p + 1)..q {
            let d2 = r[k + 1] - 2.0 * r[k] + r[k - 1];
            if d2.abs() > tol {
                match kinks.last_mut() {
                    Some(last) if last.1 + 1 == k => last.1 = k,
                    _ => kinks.push((k, k)),
                }
            }
        }
        let mut first = p;
        let mut ev = s_ev;
        let mut knee_before = false;
        for (c0, c1) in kinks {
            let knee = c1 - c0 <= 1;
            pieces.push(Piece {
                first,
                last: c0,
                start: ev,
                end: BoundaryEvent::SlopeChange,
                knee_before,
                knee_after: knee,
            });
            first = c1;
            ev = BoundaryEvent::SlopeChange;
            knee_before = knee;
        }
        pieces.push(Piece {
            first,
            last: q,
            start: ev,
            end: e_ev,
            knee_before,
            knee_after: false,
        });
    }
    pieces
}

/// Whether the large step between `k` and `k + 1` is a continuous change onto
/// a steep line: the lines through the neighbouring steps meet inside the
/// step, at a positive range.
fn steep_knee(r: &[f64], a: usize, b: usize, k: usize) -> bool {
    if k == a || k + 2 > b {
        return false;
    }
    let s1 = r[k] - r[k - 1];
    let s2 = r[k + 2] - r[k + 1];
    let ds = s1 - s2;
    if ds.abs() < 1e-12 {
        return false;
    }
    // r[k] + s1 τ = r[k + 1] + s2 (τ − 1), τ in steps after k
    let tau = (r[k + 1] - s2 - r[k]) / ds;
    (0.0..=1.0).contains(&tau) && r[k] + s1 * tau > 0.0
}

fn fit_line(trace: &RangeTrace, r: &[f64], piece: &Piece, mode: SlopeMode) -> Line {
    let (i0, i1) = (piece.first, piece.last);
    let t0 = trace.time(i0);
    if i1 == i0 {
        return Line {
            t_ref: t0,
            r_ref: r[i0],
            slope: 0.0,
        };
    }
    match mode {
        SlopeMode::Endpoint => {
            let t1 = trace.time(i1);
            Line {
                t_ref: t0,
                r_ref: r[i0],
                slope: (r[i1] - r[i0]) / (t1 - t0),
            }
        }
        SlopeMode::LeastSquares => {
            let m = (i1 - i0 + 1) as f64;
            let tm = (i0..=i1).map(|k| trace.time(k)).sum::<f64>() / m;
            let rm = (i0..=i1).map(|k| r[k]).sum::<f64>() / m;
            let (mut sxy, mut sxx) = (0.0, 0.0);
            for k in i0..=i1 {
                let dt = trace.time(k) - tm;
                sxy += dt * (r[k] - rm);
                sxx += dt * dt;
            }
            Line {
                t_ref: tm,
                r_ref: rm,
                slope: sxy / sxx,
            }
        }
    }
}

fn emit(
    trace: &RangeTrace,
    r: &[f64],
    pieces: &[Piece],
    params: &ExtractionParams,
    out: &mut TraceSegments,
) {
    let lines: Vec<Line> = pieces
        .iter()
        .map(|p| fit_line(trace, r, p, params.slope_mode))
        .collect();
    let half = 0.5 * trace.dt;
    let outward = |ev: BoundaryEvent| {
        params.endpoint_correction
            && matches!(
                ev,
                BoundaryEvent::JumpDown
                    | BoundaryEvent::JumpUp
                    | BoundaryEvent::AppearBelowMax
                    | BoundaryEvent::DisappearBelowMax
            )
    };

    // knee times shared by neighbouring pieces
    let knees: Vec<Option<f64>> = (0..pieces.len().saturating_sub(1))
        .map(|i| {
            if !pieces[i].knee_after {
                return None;
            }
            let (l1, l2) = (lines[i], lines[i + 1]);
            let lo = trace.time(pieces[i].last) - trace.dt;
            let hi = trace.time(pieces[i + 1].first) + trace.dt;
            let ds = l1.slope - l2.slope;
            let t = if ds.abs() > 1e-12 {
                // l1(t) = l2(t)
                (l2.r_ref - l1.r_ref + l1.slope * l1.t_ref - l2.slope * l2.t_ref) / ds
            } else {
                f64::NAN
            };
            if t.is_finite() && t >= lo && t <= hi {
                Some(t)
            } else {
                Some(0.5 * (trace.time(pieces[i].last) + trace.time(pieces[i + 1].first)))
            }
        })
        .collect();

    for (i, p) in pieces.iter().enumerate() {
        let count = p.last - p.first + 1;
        if count < params.min_samples.max(2) {
            out.discarded += 1;
            continue;
        }
        let line = lines[i];
        let t_s = if p.knee_before {
            knees[i - 1].expect("knee recorded")
        } else if outward(p.start) {
            trace.time(p.first) - half
        } else {
            trace.time(p.first)
        };
        let t_e = if p.knee_after {
            knees[i].expect("knee recorded")
        } else if outward(p.end) {
            trace.time(p.last) + half
        } else {
            trace.time(p.last)
        };
        let r_s = line.at(t_s);
        let r_e = line.at(t_e);
        let l_d = t_e - t_s;
        let flat = (p.first..p.last).all(|k| (r[k + 1] - r[k]).abs() < params.zero_slope_step);
        let in_range = |x: f64| x > 0.0 && x <= params.r_max + 1e-9;
        let valid = p.start.admissible_start()
            && p.end.admissible_end()
            && l_d > 0.0
            && in_range(r_s)
            && in_range(r_e);
        out.segments.push(DetectionSegment {
            sensor_id: trace.sensor_id,
            t_s,
            t_e,
            r_s,
            r_e,
            l_d,
            s_d: (r_e - r_s) / l_d,
            start_event: p.start,
            end_event: p.end,
            valid_whole_edge: valid,
            flat,
            samples: count,
        });
    }
}
