//! Range traces and their JSON Lines representation.
//!
//! A trace file starts with one header object
//! `{"config": {...}, "m_t": <num>, "detected": <bool>}` followed by one
//! object per sensor:
//! `{"sensor_id": <int>, "t0": <num>, "dt": <num>, "samples": [<num>|null|"lost", ...]}`.

use std::fmt;
use std::io::{BufRead, Write};

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::config::SimConfig;
use crate::error::{Error, Result};

/// One sampled report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RangeSample {
    Distance(f64),
    NoDetection,
    Lost,
}

impl RangeSample {
    pub fn distance(self) -> Option<f64> {
        match self {
            RangeSample::Distance(d) => Some(d),
            _ => None,
        }
    }

    pub fn is_detection(self) -> bool {
        matches!(self, RangeSample::Distance(_))
    }
}

impl Serialize for RangeSample {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            RangeSample::Distance(d) => s.serialize_f64(*d),
            RangeSample::NoDetection => s.serialize_unit(),
            RangeSample::Lost => s.serialize_str("lost"),
        }
    }
}

impl<'de> Deserialize<'de> for RangeSample {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct SampleVisitor;

        impl Visitor<'_> for SampleVisitor {
            type Value = RangeSample;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number, null, or \"lost\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<RangeSample, E> {
                Ok(RangeSample::Distance(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<RangeSample, E> {
                Ok(RangeSample::Distance(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<RangeSample, E> {
                Ok(RangeSample::Distance(v as f64))
            }

            fn visit_unit<E: de::Error>(self) -> std::result::Result<RangeSample, E> {
                Ok(RangeSample::NoDetection)
            }

            fn visit_none<E: de::Error>(self) -> std::result::Result<RangeSample, E> {
                Ok(RangeSample::NoDetection)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<RangeSample, E> {
                if v == "lost" {
                    Ok(RangeSample::Lost)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }
        }

        d.deserialize_any(SampleVisitor)
    }
}

/// Samples of one sensor on the grid `t0 + k·dt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangeTrace {
    pub sensor_id: usize,
    pub t0: f64,
    pub dt: f64,
    pub samples: Vec<RangeSample>,
}

impl RangeTrace {
    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub config: SimConfig,
    pub m_t: f64,
    pub detected: bool,
}

/// Time between the first and the last epoch at which any sensor reports a
/// distance. `None` if nothing was detected.
pub fn measure_duration(traces: &[RangeTrace]) -> Option<f64> {
    let mut first = f64::INFINITY;
    let mut last = f64::NEG_INFINITY;
    for tr in traces {
        for (k, s) in tr.samples.iter().enumerate() {
            if s.is_detection() {
                let t = tr.time(k);
                first = first.min(t);
                last = last.max(t);
            }
        }
    }
    (first <= last).then_some(last - first)
}

pub fn write_traces<W: Write>(mut w: W, header: &TraceHeader, traces: &[RangeTrace]) -> Result<()> {
    serde_json::to_writer(&mut w, header)?;
    w.write_all(b"\n")?;
    for tr in traces {
        serde_json::to_writer(&mut w, tr)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_traces<R: BufRead>(r: R) -> Result<(TraceHeader, Vec<RangeTrace>)> {
    let mut header = None;
    let mut traces = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |e: serde_json::Error| Error::Format {
            line: i + 1,
            message: e.to_string(),
        };
        if header.is_none() {
            let h: TraceHeader = serde_json::from_str(&line).map_err(bad)?;
            h.config.validate()?;
            header = Some(h);
        } else {
            let tr: RangeTrace = serde_json::from_str(&line).map_err(bad)?;
            if tr.samples.is_empty() {
                return Err(Error::Format {
                    line: i + 1,
                    message: "trace has no samples".into(),
                });
            }
            traces.push(tr);
        }
    }
    let header = header.ok_or(Error::Format {
        line: 0,
        message: "missing header line".into(),
    })?;
    Ok((header, traces))
}
