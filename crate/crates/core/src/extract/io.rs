//! JSON Lines files: one segment or one pair per line.

use std::io::{BufRead, Write};

use serde::de::DeserializeOwned;
use serde::Serialize;

use super::pairs::ConsecutivePair;
use super::segment::DetectionSegment;
use crate::error::{Error, Result};

fn write_lines<W: Write, T: Serialize>(mut w: W, items: &[T]) -> Result<()> {
    for it in items {
        serde_json::to_writer(&mut w, it)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

fn read_lines<R: BufRead, T: DeserializeOwned>(r: R) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| Error::Format {
            line: i + 1,
            message: e.to_string(),
        })?);
    }
    Ok(out)
}

pub fn write_segments<W: Write>(w: W, segments: &[DetectionSegment]) -> Result<()> {
    write_lines(w, segments)
}

pub fn read_segments<R: BufRead>(r: R) -> Result<Vec<DetectionSegment>> {
    read_lines(r)
}

pub fn write_pairs<W: Write>(w: W, pairs: &[ConsecutivePair]) -> Result<()> {
    write_lines(w, pairs)
}

pub fn read_pairs<R: BufRead>(r: R) -> Result<Vec<ConsecutivePair>> {
    read_lines(r)
}
