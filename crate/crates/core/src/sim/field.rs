//! Sensor deployment and sampled range traces of a translating target.

use std::f64::consts::TAU;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::SimConfig;
use super::trace::{measure_duration, RangeSample, RangeTrace};
use crate::error::Result;
use crate::geometry::{ray_cast, Angle, Point, PolygonTarget, RayHit};
use crate::seeds;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorPose {
    pub position: Point,
    pub direction: Angle,
}

impl SensorPose {
    pub fn unit(&self) -> Point {
        Point::new(self.direction.cos(), self.direction.sin())
    }
}

/// Uniform positions over Ω and uniform directions, one substream per sensor.
pub fn deploy_sensors(cfg: &SimConfig) -> Result<Vec<SensorPose>> {
    cfg.validate()?;
    Ok((0..cfg.n_s)
        .map(|i| {
            let mut rng = seeds::stream(cfg.seed, seeds::DOMAIN_DEPLOY, i as u64);
            let x = rng.random::<f64>() * cfg.omega_width;
            let y = rng.random::<f64>() * cfg.omega_height;
            let theta = rng.random::<f64>() * TAU;
            SensorPose {
                position: Point::new(x, y),
                direction: Angle::new(theta),
            }
        })
        .collect())
}

/// Where the target sits at each sampling epoch.
///
/// At `t = 0` the tail of the first edge is at `x = −(perimeter + r_max)`;
/// the pass ends once it has moved the same distance beyond the right side of
/// Ω. The bounding box is centered on the horizontal centerline of Ω plus
/// `y_offset`.
#[derive(Debug, Clone)]
pub struct Placement {
    vertices: Vec<Point>,
    lo: Point,
    hi: Point,
    v: f64,
    dt: f64,
    steps: usize,
}

impl Placement {
    pub fn new(poly: &PolygonTarget, cfg: &SimConfig) -> Self {
        let reach = poly.perimeter() + cfg.r_max;
        let (lo, hi) = poly.bounding_box();
        let anchor = poly.anchor();
        let shift = Point::new(
            -reach - anchor.x,
            0.5 * cfg.omega_height + cfg.y_offset - 0.5 * (lo.y + hi.y),
        );
        let vertices: Vec<Point> = poly.vertices().into_iter().map(|p| p + shift).collect();
        let travel = cfg.omega_width + 2.0 * reach;
        let steps = (travel / (cfg.v * cfg.dt)).ceil() as usize;
        Placement {
            vertices,
            lo: lo + shift,
            hi: hi + shift,
            v: cfg.v,
            dt: cfg.dt,
            steps,
        }
    }

    /// Number of sampling epochs `0..=steps`.
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    /// Vertices at `t = 0`.
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// Target displacement at time `t`.
    pub fn offset(&self, t: f64) -> Point {
        Point::new(self.v * t, 0.0)
    }

    /// Nearest hit for `pose` at time `t`, working in the target frame.
    pub fn hit(&self, pose: &SensorPose, t: f64, r_max: f64) -> Option<RayHit> {
        ray_cast(pose.position - self.offset(t), pose.unit(), &self.vertices, r_max)
    }

    /// Inclusive epoch range during which `pose` could possibly see the
    /// target, padded by one epoch on each side.
    fn window(&self, pose: &SensorPose, r_max: f64) -> Option<(usize, usize)> {
        let p = pose.position;
        let q = p + pose.unit() * r_max;
        let eps = 1e-6;
        let (ry0, ry1) = (p.y.min(q.y) - eps, p.y.max(q.y) + eps);
        if ry1 < self.lo.y || ry0 > self.hi.y {
            return None;
        }
        let (rx0, rx1) = (p.x.min(q.x) - eps, p.x.max(q.x) + eps);
        let t_lo = (rx0 - self.hi.x) / self.v;
        let t_hi = (rx1 - self.lo.x) / self.v;
        let k_lo = ((t_lo / self.dt).floor() - 1.0).max(0.0) as usize;
        let k_hi = ((t_hi / self.dt).ceil() + 1.0).min(self.steps as f64);
        if k_hi < 0.0 || (k_hi as usize) < k_lo {
            return None;
        }
        Some((k_lo, k_hi as usize))
    }
}

/// Output of one simulated pass.
#[derive(Debug, Clone)]
pub struct SimOutput {
    pub traces: Vec<RangeTrace>,
    /// Time from the first to the last detection by any sensor.
    pub m_t: f64,
    /// False when no sensor ever detected the target; `m_t` is then zero.
    pub detected: bool,
}

/// Sample every sensor's range on the epoch grid. Each trace only covers the
/// epochs where the sensor could see the target (plus one padding epoch each
/// side); sensors that never can get a single `NoDetection` sample.
pub fn simulate_traces(
    poly: &PolygonTarget,
    cfg: &SimConfig,
    sensors: &[SensorPose],
) -> Result<SimOutput> {
    cfg.validate()?;
    let placement = Placement::new(poly, cfg);
    let traces: Vec<RangeTrace> = sensors
        .par_iter()
        .enumerate()
        .map(|(id, pose)| match placement.window(pose, cfg.r_max) {
            None => RangeTrace {
                sensor_id: id,
                t0: 0.0,
                dt: cfg.dt,
                samples: vec![RangeSample::NoDetection],
            },
            Some((k0, k1)) => {
                let samples = (k0..=k1)
                    .map(|k| match placement.hit(pose, placement.time(k), cfg.r_max) {
                        Some(h) => RangeSample::Distance(h.distance),
                        None => RangeSample::NoDetection,
                    })
                    .collect();
                RangeTrace {
                    sensor_id: id,
                    t0: placement.time(k0),
                    dt: cfg.dt,
                    samples,
                }
            }
        })
        .collect();
    let m_t = measure_duration(&traces);
    Ok(SimOutput {
        traces,
        m_t: m_t.unwrap_or(0.0),
        detected: m_t.is_some(),
    })
}

/// Replace each detection sample by `Lost` with probability `p_b`.
pub fn inject_loss(mut traces: Vec<RangeTrace>, p_b: f64, seed: u64) -> Vec<RangeTrace> {
    if p_b <= 0.0 {
        return traces;
    }
    traces.par_iter_mut().for_each(|tr| {
        let mut rng = seeds::stream(seed, seeds::DOMAIN_LOSS, tr.sensor_id as u64);
        for s in tr.samples.iter_mut() {
            if s.is_detection() && (p_b >= 1.0 || rng.random::<f64>() < p_b) {
                *s = RangeSample::Lost;
            }
        }
    });
    traces
}
