//! Edge order from back-to-back detections, concave-vertex recounting and
//! assembly of an outline.
//!
//! A sensor looking along `θ` sees the contact point slide backwards along the
//! counterclockwise boundary when `sin θ > 0` and forwards when `sin θ < 0`.
//! So for a pair (head, tail) of consecutive detections the head is the
//! earlier edge in counterclockwise order exactly when the sensors that can
//! see both edges look downwards.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::adopt::EdgeEstimate;
use super::concave::{expected_nd_concave, is_concave_pair};
use crate::extract::{ConsecutivePair, VertexKind};
use crate::geometry::{Angle, DirectedEdge};
use crate::sim::SimConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectivityRecord {
    pub head: usize,
    pub tail: usize,
    pub n_c: usize,
    pub vertex: VertexKind,
    pub concave_votes: usize,
    pub significant: bool,
}

/// Count consecutive detections per ordered (head, tail) estimate pair.
/// `assignment[i]` is the estimate supported by segment `i`, if any.
pub fn connectivity(
    pairs: &[ConsecutivePair],
    assignment: &[Option<usize>],
    n_c_min: usize,
) -> Vec<ConnectivityRecord> {
    let mut counts: std::collections::BTreeMap<(usize, usize), (usize, usize)> = Default::default();
    for p in pairs {
        let (Some(h), Some(t)) = (assignment[p.head], assignment[p.tail]) else {
            continue;
        };
        if h == t {
            continue;
        }
        let e = counts.entry((h, t)).or_default();
        e.0 += 1;
        if p.vertex == VertexKind::Concave {
            e.1 += 1;
        }
    }
    counts
        .into_iter()
        .map(|((head, tail), (n_c, concave_votes))| ConnectivityRecord {
            head,
            tail,
            n_c,
            vertex: if 2 * concave_votes > n_c {
                VertexKind::Concave
            } else {
                VertexKind::Convex
            },
            concave_votes,
            significant: n_c >= n_c_min,
        })
        .collect()
}

/// Estimates rounded to zero edges become one edge when they take part in a
/// significant record.
pub fn rescue_counts(estimates: &mut [EdgeEstimate], records: &[ConnectivityRecord]) {
    for r in records.iter().filter(|r| r.significant) {
        for e in [r.head, r.tail] {
            if estimates[e].n_e_rounded == 0 {
                estimates[e].n_e_rounded = 1;
            }
        }
    }
}

/// Signed turn from direction `a` to `b`, in `(−π, π]`.
fn turn(a: Angle, b: Angle) -> f64 {
    let d = a.ccw_to(b);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

/// Mid-direction of the sensors that see both `prev` and `cur` whole.
fn shared_view_mid(prev: Angle, cur: Angle) -> Angle {
    let tau = turn(prev, cur);
    let lo = if tau > 0.0 { cur } else { prev };
    lo + 0.5 * (PI - tau.abs())
}

/// Whether the pair (prev, cur) in counterclockwise order is compatible with
/// the detection order recorded as (head, tail).
fn order_compatible(prev: Angle, cur: Angle, head_is_prev: bool) -> bool {
    let s = shared_view_mid(prev, cur).sin();
    if head_is_prev {
        s <= 1e-3
    } else {
        s >= -1e-3
    }
}

fn vertex_compatible(prev: Angle, cur: Angle, kind: VertexKind) -> bool {
    let tau = turn(prev, cur);
    match kind {
        VertexKind::Convex => tau > 1e-9,
        VertexKind::Concave => tau <= 1e-9,
    }
}

fn mirror(a: Angle) -> Angle {
    Angle::new(PI - a.radians())
}

/// Recount estimates that meet at a concave vertex.
///
/// For a concave record the head is the earlier edge (sensors seeing both look
/// downwards), so `prev = head`, `cur = tail`. The tail is hidden by the head
/// for part of its directions, and by symmetry the head is hidden by the tail
/// for the mirrored range. Among candidate readings of one record the largest
/// expectation is kept; across records the smallest. Counts never decrease.
pub fn concave_compensation(
    estimates: &mut [EdgeEstimate],
    records: &[ConnectivityRecord],
    v_hat: f64,
    m_t: f64,
    cfg: &SimConfig,
) {
    let mut chosen: Vec<Option<f64>> = vec![None; estimates.len()];
    for r in records
        .iter()
        .filter(|r| r.significant && r.vertex == VertexKind::Concave)
    {
        let (h, t) = (&estimates[r.head], &estimates[r.tail]);
        let mut best_t: Option<f64> = None;
        let mut best_h: Option<f64> = None;
        for &xh in &h.xi_candidates {
            for &xt in &t.xi_candidates {
                if !is_concave_pair(xh, xt) || !order_compatible(xh, xt, true) {
                    continue;
                }
                if let Ok(e) = expected_nd_concave(t.lambda_hat, xt, xh, v_hat, m_t, cfg) {
                    best_t = Some(best_t.map_or(e, |b: f64| b.max(e)));
                }
                if let Ok(e) =
                    expected_nd_concave(h.lambda_hat, mirror(xh), mirror(xt), v_hat, m_t, cfg)
                {
                    best_h = Some(best_h.map_or(e, |b: f64| b.max(e)));
                }
            }
        }
        for (idx, e) in [(r.tail, best_t), (r.head, best_h)] {
            if let Some(e) = e {
                chosen[idx] = Some(chosen[idx].map_or(e, |c| c.min(e)));
            }
        }
    }
    for (est, c) in estimates.iter_mut().zip(chosen) {
        let Some(e) = c else {
            continue;
        };
        if e <= 0.0 {
            continue;
        }
        let n = est.support.len() as f64 / e;
        if n > est.n_e_hat {
            est.n_e_hat = n;
            est.n_e_rounded = est.n_e_rounded.max((n + 0.5).floor() as u32);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeEdge {
    pub estimate: usize,
    #[serde(rename = "lambda")]
    pub length: f64,
    #[serde(rename = "xi")]
    pub direction: Angle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeEstimate {
    pub ordered_edges: Vec<ShapeEdge>,
    pub closure_gap: [f64; 2],
    pub complete: bool,
}

impl ShapeEstimate {
    pub fn gap_norm(&self) -> f64 {
        self.closure_gap[0].hypot(self.closure_gap[1])
    }

    pub fn perimeter(&self) -> f64 {
        self.ordered_edges.iter().map(|e| e.length).sum()
    }

    pub fn directed_edges(&self) -> Vec<DirectedEdge> {
        self.ordered_edges
            .iter()
            .map(|e| DirectedEdge::new(e.length, e.direction.radians()))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AssemblyParams {
    /// A closed cycle is complete when its gap is at most this fraction of the
    /// perimeter.
    pub closure_tol: f64,
    /// Maximum number of search nodes.
    pub budget: usize,
}

impl Default for AssemblyParams {
    fn default() -> Self {
        AssemblyParams {
            closure_tol: 0.05,
            budget: 200_000,
        }
    }
}

struct Search<'a> {
    estimates: &'a [EdgeEstimate],
    /// estimate index of every edge instance
    inst: Vec<usize>,
    /// records between two estimates, either order
    links: Vec<Vec<Vec<&'a ConnectivityRecord>>>,
    budget: usize,
    nodes: usize,
    best_cycle: Option<(f64, Vec<(usize, Angle)>)>,
    /// cycles through every edge whose closing vertex has no record
    best_open_cycle: Option<(f64, Vec<(usize, Angle)>)>,
    best_path: Option<(usize, f64, Vec<(usize, Angle)>)>,
}

fn gap_of(path: &[(usize, Angle)], estimates: &[EdgeEstimate], inst: &[usize]) -> (f64, f64) {
    path.iter().fold((0.0, 0.0), |(x, y), &(i, a)| {
        let l = estimates[inst[i]].lambda_hat;
        (x + l * a.cos(), y + l * a.sin())
    })
}

impl Search<'_> {
    fn linked(&self, a: usize, xa: Angle, b: usize, xb: Angle) -> bool {
        let (ea, eb) = (self.inst[a], self.inst[b]);
        self.links[ea][eb].iter().any(|r| {
            vertex_compatible(xa, xb, r.vertex) && order_compatible(xa, xb, r.head == ea)
        })
    }

    fn dfs(&mut self, path: &mut Vec<(usize, Angle)>, used: &mut [bool], turning: f64) {
        self.nodes += 1;
        if self.nodes > self.budget {
            return;
        }
        let gap = gap_of(path, self.estimates, &self.inst);
        let g = gap.0.hypot(gap.1);
        if self.best_path.as_ref().is_none_or(|(n, bg, _)| path.len() > *n || (path.len() == *n && g < *bg)) {
            self.best_path = Some((path.len(), g, path.clone()));
        }
        let &(last, xl) = path.last().expect("non-empty path");
        if path.len() == self.inst.len() {
            let (first, xf) = path[0];
            if ((turning + turn(xl, xf)) / TAU).round() == 1.0 {
                let slot = if self.linked(last, xl, first, xf) {
                    &mut self.best_cycle
                } else {
                    &mut self.best_open_cycle
                };
                if slot.as_ref().is_none_or(|(bg, _)| g < *bg) {
                    *slot = Some((g, path.clone()));
                }
            }
            return;
        }
        for next in 0..self.inst.len() {
            if used[next] {
                continue;
            }
            // identical instances are interchangeable
            if next > 0 && self.inst[next] == self.inst[next - 1] && !used[next - 1] {
                continue;
            }
            let cands = self.estimates[self.inst[next]].xi_candidates;
            for (k, &xn) in cands.iter().enumerate() {
                if k == 1 && cands[1].approx_eq(cands[0], 1e-12) {
                    continue;
                }
                if !self.linked(last, xl, next, xn) {
                    continue;
                }
                used[next] = true;
                path.push((next, xn));
                self.dfs(path, used, turning + turn(xl, xn));
                path.pop();
                used[next] = false;
            }
        }
    }
}

fn run_search<'a>(
    estimates: &'a [EdgeEstimate],
    records: impl Iterator<Item = &'a ConnectivityRecord>,
    params: &AssemblyParams,
) -> Search<'a> {
    let inst: Vec<usize> = estimates
        .iter()
        .enumerate()
        .flat_map(|(i, e)| std::iter::repeat_n(i, e.n_e_rounded as usize))
        .collect();
    let n = estimates.len();
    let mut links = vec![vec![Vec::new(); n]; n];
    for r in records {
        links[r.head][r.tail].push(r);
        links[r.tail][r.head].push(r);
    }
    let mut search = Search {
        estimates,
        inst,
        links,
        budget: params.budget,
        nodes: 0,
        best_cycle: None,
        best_open_cycle: None,
        best_path: None,
    };
    let m = search.inst.len();
    let mut used = vec![false; m];
    'starts: for start in 0..m {
        if start > 0 && search.inst[start] == search.inst[start - 1] {
            continue;
        }
        let cands = estimates[search.inst[start]].xi_candidates;
        for (k, &x) in cands.iter().enumerate() {
            if k == 1 && cands[1].approx_eq(cands[0], 1e-12) {
                continue;
            }
            used[start] = true;
            let mut path = vec![(start, x)];
            search.dfs(&mut path, &mut used, 0.0);
            used[start] = false;
            if search.nodes > search.budget {
                break 'starts;
            }
        }
        // every cycle passes through the first instance
        if search.best_cycle.is_some() {
            break;
        }
    }
    if search.best_cycle.is_none() {
        search.best_cycle = search.best_open_cycle.take();
    }
    search
}

/// Order the estimated edges into an outline.
///
/// Each estimate contributes `n_e_rounded` edges. Consecutive edges must share
/// a significant record whose vertex kind and detection order agree with the
/// chosen directions. Among closed counterclockwise cycles through every edge
/// the one with the smallest closure gap wins. A cycle may close through one
/// vertex without a record when no fully linked cycle exists. Without any
/// cycle the search is repeated with all records (not only significant ones);
/// failing that, the longest open chain is returned with `complete = false`.
pub fn assemble_shape(
    estimates: &[EdgeEstimate],
    records: &[ConnectivityRecord],
    params: &AssemblyParams,
) -> ShapeEstimate {
    let strict = run_search(estimates, records.iter().filter(|r| r.significant), params);
    let search = if strict.best_cycle.is_some() {
        strict
    } else {
        let loose = run_search(estimates, records.iter().filter(|r| r.n_c > 0), params);
        let longer = |s: &Search| s.best_path.as_ref().map_or(0, |p| p.0);
        if loose.best_cycle.is_some() || longer(&loose) > longer(&strict) {
            loose
        } else {
            strict
        }
    };
    let build = |path: &[(usize, Angle)]| -> Vec<ShapeEdge> {
        path.iter()
            .map(|&(i, a)| {
                let e = search.inst[i];
                ShapeEdge {
                    estimate: e,
                    length: estimates[e].lambda_hat,
                    direction: a,
                }
            })
            .collect()
    };
    if let Some((g, path)) = &search.best_cycle {
        let edges = build(path);
        let gap = gap_of(path, estimates, &search.inst);
        let perimeter: f64 = edges.iter().map(|e| e.length).sum();
        return ShapeEstimate {
            ordered_edges: edges,
            closure_gap: [gap.0, gap.1],
            complete: *g <= params.closure_tol * perimeter,
        };
    }
    match &search.best_path {
        Some((_, _, path)) => {
            let gap = gap_of(path, estimates, &search.inst);
            ShapeEstimate {
                ordered_edges: build(path),
                closure_gap: [gap.0, gap.1],
                complete: false,
            }
        }
        None => ShapeEstimate {
            ordered_edges: Vec::new(),
            closure_gap: [0.0, 0.0],
            complete: false,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimator::adopt::EstimateSource;
    use crate::extract::VertexKind::*;
    use std::f64::consts::FRAC_PI_2;

    fn est(lambda: f64, xi: [f64; 2], n: u32) -> EdgeEstimate {
        EdgeEstimate {
            lambda_hat: lambda,
            xi_candidates: [Angle::new(xi[0]), Angle::new(xi[1])],
            n_e_hat: n as f64,
            n_e_rounded: n,
            support: vec![0; 100],
            source: EstimateSource::GeneralPart,
        }
    }

    fn rec(head: usize, tail: usize, vertex: VertexKind) -> ConnectivityRecord {
        ConnectivityRecord {
            head,
            tail,
            n_c: 50,
            vertex,
            concave_votes: if vertex == Concave { 50 } else { 0 },
            significant: true,
        }
    }

    fn triangle() -> Vec<EdgeEstimate> {
        let s = 3f64.sqrt();
        vec![
            est(50.0 * s, [0.0, PI], 1),
            est(100.0, [PI / 6.0, 5.0 * PI / 6.0], 1),
            est(50.0, [1.5 * PI, 1.5 * PI], 1),
        ]
    }

    #[test]
    fn triangle_closes() {
        // bottom/slanted and vertical/bottom are seen looking up (head is the
        // later edge), slanted/vertical looking down (head is the earlier edge)
        let records = vec![rec(1, 0, Convex), rec(1, 2, Convex), rec(0, 2, Convex)];
        let shape = assemble_shape(&triangle(), &records, &AssemblyParams::default());
        assert!(shape.complete, "{shape:?}");
        assert_eq!(shape.ordered_edges.len(), 3);
        assert!(shape.gap_norm() < 1e-9);
    }

    #[test]
    fn closes_through_one_unrecorded_vertex() {
        let mut weak = rec(1, 2, Convex);
        weak.n_c = 5;
        weak.significant = false;
        let records = vec![rec(0, 2, Convex), weak];
        let shape = assemble_shape(&triangle(), &records, &AssemblyParams::default());
        assert!(shape.complete, "{shape:?}");
        assert!(shape.gap_norm() < 1e-9);
    }

    #[test]
    fn single_estimate_is_open() {
        let shape = assemble_shape(&triangle()[..1], &[], &AssemblyParams::default());
        assert_eq!(shape.ordered_edges.len(), 1);
        assert!(!shape.complete);
    }

    #[test]
    fn connectivity_counts_and_votes() {
        let pairs = vec![
            ConsecutivePair { sensor_id: 0, head: 0, tail: 1, vertex: Convex },
            ConsecutivePair { sensor_id: 1, head: 2, tail: 3, vertex: Concave },
            ConsecutivePair { sensor_id: 2, head: 4, tail: 5, vertex: Convex },
        ];
        let assignment = vec![Some(0), Some(1), Some(0), Some(1), None, Some(1)];
        let r = connectivity(&pairs, &assignment, 2);
        assert_eq!(r.len(), 1);
        assert_eq!((r[0].head, r[0].tail, r[0].n_c), (0, 1, 2));
        assert_eq!(r[0].vertex, Convex);
        assert!(r[0].significant);
        assert!(connectivity(&[], &assignment, 2).is_empty());
    }

    #[test]
    fn compensation_raises_occluded_count() {
        let cfg = SimConfig::default();
        // turret wall (ξ = 3π/2) followed by hull top (ξ = π), concave
        let mut e = vec![est(20.0, [1.5 * PI, 1.5 * PI], 1), est(46.0, [0.0, PI], 1)];
        let full = crate::estimator::formulas::expected_nd(46.0, Angle::new(PI), 1.0, 5000.0, &cfg);
        e[1].support = vec![0; (1.1 * full) as usize];
        e[1].n_e_hat = 1.1;
        let before = e.clone();
        concave_compensation(&mut e, &[rec(0, 1, Concave)], 1.0, 5000.0, &cfg);
        assert!(e[1].n_e_rounded >= 2, "{:?}", e[1]);
        for (a, b) in e.iter().zip(&before) {
            assert!(a.n_e_rounded >= b.n_e_rounded);
        }
        // convex records leave counts alone
        let mut c = before.clone();
        concave_compensation(&mut c, &[rec(0, 1, Convex)], 1.0, 5000.0, &cfg);
        assert_eq!(c, before);
    }

    #[test]
    fn view_order_rule() {
        // bottom edge then a rising edge: seen by sensors looking up
        assert!(order_compatible(Angle::new(0.0), Angle::new(FRAC_PI_2), false));
        assert!(!order_compatible(Angle::new(0.0), Angle::new(FRAC_PI_2), true));
        // top edge then a turret wall going up: seen looking down
        assert!(order_compatible(Angle::new(PI), Angle::new(FRAC_PI_2), true));
    }
}
