use serde::{Deserialize, Serialize};

use super::segment::{BoundaryEvent, DetectionSegment};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexKind {
    Convex,
    Concave,
}

/// Two whole-edge segments seen back to back by one sensor. Indices refer to
/// the slice passed to [`pair_consecutive`]. The target moves towards `+x`,
/// so the edge seen first is the head of the shared vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsecutivePair {
    pub sensor_id: usize,
    pub head: usize,
    pub tail: usize,
    pub vertex: VertexKind,
}

/// Pairs of valid segments from one sensor that meet at a change of slope.
///
/// The range at the shared vertex must agree within
/// `2 · v̂ · dt · max(1, |s_d|)`. A drop in `s_d` from head to tail means the
/// vertex between them is concave.
pub fn pair_consecutive(segments: &[DetectionSegment], v_hat: f64, dt: f64) -> Vec<ConsecutivePair> {
    let mut order: Vec<usize> = (0..segments.len()).collect();
    order.sort_by(|&a, &b| {
        let (x, y) = (&segments[a], &segments[b]);
        x.sensor_id
            .cmp(&y.sensor_id)
            .then(x.t_s.total_cmp(&y.t_s))
    });
    let mut out = Vec::new();
    for w in order.windows(2) {
        let (a, b) = (&segments[w[0]], &segments[w[1]]);
        if a.sensor_id != b.sensor_id
            || !a.valid_whole_edge
            || !b.valid_whole_edge
            || a.end_event != BoundaryEvent::SlopeChange
            || b.start_event != BoundaryEvent::SlopeChange
            || (a.t_e - b.t_s).abs() > 1e-9 * dt.max(1.0)
        {
            continue;
        }
        let eps = 2.0 * v_hat * dt * a.s_d.abs().max(b.s_d.abs()).max(1.0);
        if (a.r_e - b.r_s).abs() > eps {
            continue;
        }
        out.push(ConsecutivePair {
            sensor_id: a.sensor_id,
            head: w[0],
            tail: w[1],
            vertex: if a.s_d > b.s_d {
                VertexKind::Concave
            } else {
                VertexKind::Convex
            },
        });
    }
    out
}
