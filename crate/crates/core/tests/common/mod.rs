//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use rangeshape::geometry::edge_detectable;
use rangeshape::extract::{extract_segments, finalize_sd, DetectionSegment, ExtractionParams};
use rangeshape::sim::{deploy_sensors, simulate_traces, Placement};
use rangeshape::{Angle, PolygonTarget, SensorPose, SimConfig};

/// Adaptive Simpson quadrature.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    if b <= a {
        return 0.0;
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 40)
}

fn norm(a: f64) -> f64 {
    a.rem_euclid(TAU)
}

/// Pieces of `([θ, π − θ) ∪ [π + θ, 2π − θ)) ∩ ⟦ξ_prev, ξ_cur + π⟧` on the real
/// line, each inside one period.
pub fn admissible_pieces(theta: f64, xi_prev: f64, xi_cur: f64) -> Vec<(f64, f64)> {
    let start = norm(xi_prev);
    let len = norm(xi_cur + PI - xi_prev);
    let arc = (start, start + len);
    let mut out = Vec::new();
    for k in -1..=2 {
        let shift = k as f64 * TAU;
        for (a, b) in [(theta, PI - theta), (PI + theta, TAU - theta)] {
            let lo = (a + shift).max(arc.0);
            let hi = (b + shift).min(arc.1);
            if hi > lo {
                out.push((lo, hi));
            }
        }
    }
    out
}

/// `∫ (r|sin z| − x) dz` over the admissible directions, by quadrature.
pub fn f_quadrature(theta: f64, x: f64, xi_prev: f64, xi_cur: f64, r: f64) -> f64 {
    let g = |z: f64| r * z.sin().abs() - x;
    admissible_pieces(theta, xi_prev, xi_cur)
        .into_iter()
        .map(|(a, b)| {
            // split at multiples of π where |sin| has a kink
            let mut cuts = vec![a];
            let mut m = (a / PI).floor() * PI + PI;
            while m < b {
                cuts.push(m);
                m += PI;
            }
            cuts.push(b);
            cuts.windows(2).map(|w| simpson(&g, w[0], w[1], 1e-11)).sum::<f64>()
        })
        .sum()
}

/// A direction inside zone `z` (1..=4) of `θ`, at fraction `u ∈ [0, 1)`.
pub fn in_zone(z: u8, theta: f64, u: f64) -> f64 {
    let (a, b) = match z {
        1 => (-theta, theta),
        2 => (theta, PI - theta),
        3 => (PI - theta, PI + theta),
        _ => (PI + theta, TAU - theta),
    };
    norm(a + u * (b - a))
}

/// Whether `ξ_prev ∈ ⟦ξ_cur, ξ_cur + π⟧`.
pub fn concave(xi_prev: f64, xi_cur: f64) -> bool {
    norm(xi_prev - xi_cur) <= PI
}

/// A noiseless valid segment with its ground-truth edge and sensor direction.
pub struct Attributed {
    pub seg: DetectionSegment,
    pub lambda: f64,
    pub xi: Angle,
    pub theta: Angle,
    pub edge: usize,
}

/// Valid segments of one noiseless pass, finalized with the true speed and
/// attributed to the edge hit at the start, middle and end of the segment.
/// Coincident edges (degenerate fixtures) resolve to the one facing the sensor.
pub fn attributed(target: &PolygonTarget, cfg: &SimConfig) -> Vec<Attributed> {
    let sensors: Vec<SensorPose> = deploy_sensors(cfg).unwrap();
    let traces = simulate_traces(target, cfg, &sensors).unwrap().traces;
    let params = ExtractionParams {
        r_max: cfg.r_max,
        speed: cfg.v,
        ..ExtractionParams::default()
    };
    let mut segs: Vec<DetectionSegment> = extract_segments(&traces, &params).valid().cloned().collect();
    finalize_sd(&mut segs, cfg.v).unwrap();
    let placement = Placement::new(target, cfg);
    let edges = target.edges();
    let parts = target.segments();
    let same = |i: usize, j: usize| {
        let (a, b) = (parts[i], parts[j]);
        let close = |p: rangeshape::Point, q: rangeshape::Point| (p - q).norm() <= 1e-9;
        (close(a.a, b.a) && close(a.b, b.b)) || (close(a.a, b.b) && close(a.b, b.a))
    };
    segs.into_iter()
        .filter_map(|seg| {
            let pose = sensors[seg.sensor_id];
            let facing = |h: usize| {
                (0..edges.len())
                    .find(|&j| same(h, j) && edge_detectable(edges[j].direction, pose.direction))
                    .unwrap_or(h)
            };
            let at = |t: f64| placement.hit(&pose, t, cfg.r_max).and_then(|h| h.edge).map(facing);
            let span = seg.t_e - seg.t_s;
            let mid = at(seg.t_s + 0.5 * span)?;
            let inner = (at(seg.t_s + 0.25 * span)? == mid) && (at(seg.t_e - 0.25 * span)? == mid);
            inner.then(|| Attributed {
                lambda: edges[mid].length,
                xi: edges[mid].direction,
                theta: pose.direction,
                edge: mid,
                seg,
            })
        })
        .collect()
}
