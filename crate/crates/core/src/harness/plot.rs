use std::fs::File;
use std::path::{Path, PathBuf};

use super::experiment::MetricsReport;
use crate::error::{Error, Result};

pub const RSR_MSE_VS_NS: &str = "rsr_mse_vs_ns.csv";
pub const MSE_VS_NOISE: &str = "mse_vs_noise.csv";
pub const MSE_VS_SPEED: &str = "mse_vs_speed.csv";

fn writer(dir: &Path, name: &str) -> Result<csv::Writer<File>> {
    Ok(csv::Writer::from_writer(File::create(dir.join(name))?))
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

/// Write the three plot tables into `dir`, one row per sweep point (per edge
/// for the RSR-MSE table). Returns the written paths.
pub fn emit_plot_data(report: &MetricsReport, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;

    let mut w = writer(dir, RSR_MSE_VS_NS)?;
    w.write_record(["n_s", "v", "p_b", "sigma_s", "edge", "lambda", "xi", "rsr_mse"])
        .map_err(csv_err)?;
    for p in &report.points {
        for (i, (e, r)) in report.truth.iter().zip(&p.rsr_mse).enumerate() {
            w.write_record([
                p.point.n_s.to_string(),
                p.point.v.to_string(),
                p.point.p_b.to_string(),
                p.point.sigma_s.to_string(),
                i.to_string(),
                e.length.to_string(),
                e.direction.radians().to_string(),
                r.to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush()?;

    for (name, lead) in [(MSE_VS_NOISE, "sigma_s"), (MSE_VS_SPEED, "v")] {
        let mut w = writer(dir, name)?;
        let cols = if lead == "v" {
            ["v", "n_s", "p_b", "sigma_s", "runs", "mse"]
        } else {
            ["sigma_s", "p_b", "n_s", "v", "runs", "mse"]
        };
        w.write_record(cols).map_err(csv_err)?;
        for p in &report.points {
            let q = p.point;
            let row = if lead == "v" {
                [q.v.to_string(), q.n_s.to_string(), q.p_b.to_string(), q.sigma_s.to_string()]
            } else {
                [q.sigma_s.to_string(), q.p_b.to_string(), q.n_s.to_string(), q.v.to_string()]
            };
            w.write_record(row.into_iter().chain([p.runs.len().to_string(), p.mse.to_string()]))
                .map_err(csv_err)?;
        }
        w.flush()?;
    }
    Ok([RSR_MSE_VS_NS, MSE_VS_NOISE, MSE_VS_SPEED]
        .iter()
        .map(|n| dir.join(n))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DirectedEdge;
    use crate::harness::experiment::{PointReport, RunRecord, SweepPoint};
    use crate::sim::SimConfig;

    #[test]
    fn header_only_when_empty_and_rows_per_point() {
        let dir = tempfile::tempdir().unwrap();
        let truth = vec![DirectedEdge::new(3.0, 0.0), DirectedEdge::new(4.0, 1.0)];
        let empty = MetricsReport {
            truth: truth.clone(),
            points: vec![],
        };
        for p in emit_plot_data(&empty, dir.path()).unwrap() {
            assert_eq!(std::fs::read_to_string(p).unwrap().lines().count(), 1);
        }
        let run = RunRecord::from_result(1, &truth, Err(Error::NoDetection)).unwrap();
        let points = [100, 200, 500]
            .iter()
            .map(|&n| {
                let pt = SweepPoint {
                    n_s: n,
                    ..SweepPoint::of(&SimConfig::default())
                };
                PointReport::from_runs(pt, &truth, vec![run.clone()])
            })
            .collect();
        let report = MetricsReport { truth, points };
        let paths = emit_plot_data(&report, dir.path()).unwrap();
        let first = std::fs::read(&paths[0]).unwrap();
        assert_eq!(String::from_utf8_lossy(&first).lines().count(), 1 + 3 * 2);
        assert_eq!(std::fs::read_to_string(&paths[2]).unwrap().lines().count(), 4);
        emit_plot_data(&report, dir.path()).unwrap();
        assert_eq!(std::fs::read(&paths[0]).unwrap(), first);
    }
}
