//! Whole-edge detection segments and consecutive-edge pairs from range traces.

mod io;
mod pairs;
mod segment;

pub use io::{read_pairs, read_segments, write_pairs, write_segments};
pub use pairs::{pair_consecutive, ConsecutivePair, VertexKind};
pub use segment::{
    segment_trace, BoundaryEvent, DetectionSegment, ExtractionParams, SlopeMode, TraceSegments,
};

use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::seeds;
use crate::sim::RangeTrace;

/// Segments of all traces, in trace order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Extraction {
    pub segments: Vec<DetectionSegment>,
    /// Pieces dropped for having too few samples.
    pub discarded: usize,
}

impl Extraction {
    pub fn valid(&self) -> impl Iterator<Item = &DetectionSegment> {
        self.segments.iter().filter(|s| s.valid_whole_edge)
    }
}

pub fn extract_segments(traces: &[RangeTrace], params: &ExtractionParams) -> Extraction {
    let parts: Vec<TraceSegments> = traces
        .par_iter()
        .map(|tr| segment_trace(tr, params))
        .collect();
    let mut out = Extraction::default();
    for p in parts {
        out.discarded += p.discarded;
        out.segments.extend(p.segments);
    }
    out
}

/// Turn the raw slope `dr/dt` of every segment into `s_d = (dr/dt) / v̂`.
/// Flat segments get exactly zero.
pub fn finalize_sd(segments: &mut [DetectionSegment], v_hat: f64) -> Result<()> {
    if !(v_hat.is_finite() && v_hat > 0.0) {
        return Err(Error::InvalidSpeed(v_hat));
    }
    for s in segments.iter_mut() {
        s.s_d = if s.flat { 0.0 } else { s.raw_slope() / v_hat };
    }
    Ok(())
}

/// Add `N(0, sigma²)` to `s_d` of every non-flat segment. Flat segments stay at
/// zero.
pub fn apply_sd_noise(segments: &mut [DetectionSegment], sigma: f64, seed: u64) -> Result<()> {
    if sigma == 0.0 {
        return Ok(());
    }
    let normal = Normal::new(0.0, sigma)
        .map_err(|e| Error::Config(format!("sigma_s = {sigma}: {e}")))?;
    let mut rng = seeds::stream(seed, seeds::DOMAIN_NOISE, 0);
    for s in segments.iter_mut().filter(|s| !s.flat) {
        s.s_d += normal.sample(&mut rng);
    }
    Ok(())
}

/// Number of sensors reporting some positive distance and never zero (a
/// sensor that ends up inside the target is not counted).
pub fn count_nonzero_detectors(traces: &[RangeTrace]) -> usize {
    traces
        .iter()
        .filter(|tr| {
            let d = || tr.samples.iter().filter_map(|s| s.distance());
            d().any(|x| x > 0.0) && d().all(|x| x > 0.0)
        })
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::RangeSample;

    fn seg(r_s: f64, r_e: f64, l_d: f64, flat: bool) -> DetectionSegment {
        DetectionSegment {
            sensor_id: 0,
            t_s: 0.0,
            t_e: l_d,
            r_s,
            r_e,
            l_d,
            s_d: (r_e - r_s) / l_d,
            start_event: BoundaryEvent::AppearBelowMax,
            end_event: BoundaryEvent::DisappearBelowMax,
            valid_whole_edge: true,
            flat,
            samples: 10,
        }
    }

    #[test]
    fn finalize_examples() {
        let mut s = vec![
            seg(50.0, 50.0, 30.0, true),
            seg(80.0, 20.0, 60.0, false),
            seg(20.0, 80.0, 30.0, false),
        ];
        finalize_sd(&mut s[..2], 1.0).unwrap();
        finalize_sd(&mut s[2..], 2.0).unwrap();
        assert_eq!(s[0].s_d, 0.0);
        assert!((s[1].s_d + 1.0).abs() < 1e-12);
        assert!((s[2].s_d - 1.0).abs() < 1e-12);
        assert!(matches!(
            finalize_sd(&mut s, 0.0),
            Err(Error::InvalidSpeed(_))
        ));
    }

    #[test]
    fn noise_skips_flat_and_is_seeded() {
        let mut a = vec![seg(50.0, 50.0, 30.0, true), seg(80.0, 20.0, 60.0, false)];
        let mut b = a.clone();
        apply_sd_noise(&mut a, 0.1, 4).unwrap();
        apply_sd_noise(&mut b, 0.1, 4).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[0].s_d, 0.0);
        assert_ne!(a[1].s_d, -1.0);
    }

    #[test]
    fn counts_detectors() {
        let tr = |samples| RangeTrace {
            sensor_id: 0,
            t0: 0.0,
            dt: 1.0,
            samples,
        };
        let traces = vec![
            tr(vec![RangeSample::NoDetection, RangeSample::Distance(3.0)]),
            tr(vec![RangeSample::Distance(0.0), RangeSample::Lost]),
            tr(vec![RangeSample::Distance(2.0), RangeSample::Distance(0.0)]),
            tr(vec![RangeSample::NoDetection]),
        ];
        assert_eq!(count_nonzero_detectors(&traces), 1);
    }
}
