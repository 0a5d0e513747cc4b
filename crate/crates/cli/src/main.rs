//! Command line front end: simulate traces, extract segments, estimate the
//! target, evaluate estimates and run whole experiments.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

/// `println!` that reports a closed stdout as an error instead of panicking.
macro_rules! out {
    ($($arg:tt)*) => {
        writeln!(std::io::stdout().lock(), $($arg)*)?
    };
}

use rangeshape::estimator::{estimate, observe, EstimateReport, Observations};
use rangeshape::extract::{read_pairs, read_segments, write_pairs, write_segments};
use rangeshape::harness::{
    emit_plot_data, expand_reports, match_edges, run_experiment, ExperimentSpec,
    TargetSpec, PRESET_NAMES,
};
use rangeshape::sim::{
    deploy_sensors, inject_loss, read_traces, simulate_traces, write_traces, TraceHeader,
};
use rangeshape::{Error, SimConfig};

const TRACES: &str = "traces.jsonl";
const TARGET: &str = "target.json";
const SEGMENTS: &str = "segments.jsonl";
const PAIRS: &str = "pairs.jsonl";
const SPEED: &str = "speed.json";
const ESTIMATE: &str = "estimate.json";
const EVALUATION: &str = "evaluation.json";
const METRICS: &str = "metrics.json";

#[derive(Parser)]
#[command(name = "rangeshape", version, about = "Polygon shape and speed from range traces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Experiment spec (JSON)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the simulation seed
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override the target with a named preset
    #[arg(long)]
    preset: Option<String>,
    /// Override the number of runs
    #[arg(long)]
    runs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Deploy sensors and write range traces
    Simulate(Common),
    /// Estimate the speed and extract detection segments from traces
    Extract {
        #[command(flatten)]
        common: Common,
        /// Trace file (defaults to <out>/traces.jsonl)
        #[arg(long)]
        traces: Option<PathBuf>,
    },
    /// Estimate edges, counts and outline from extracted segments
    Estimate {
        #[command(flatten)]
        common: Common,
        /// Directory holding segments, pairs and speed (defaults to <out>)
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Compare an estimate with the true target
    Evaluate {
        #[command(flatten)]
        common: Common,
        /// Estimate file (defaults to <out>/estimate.json)
        #[arg(long)]
        estimate: Option<PathBuf>,
    },
    /// Simulate, extract, estimate and evaluate over all runs and sweep points
    Pipeline(Common),
    /// Named targets
    Presets {
        #[command(subcommand)]
        action: PresetAction,
    },
}

#[derive(Subcommand)]
enum PresetAction {
    /// Print the preset names
    List,
    /// Print one preset as JSON
    Show { name: String },
}

/// Speed-stage output stored next to the segment files.
#[derive(Serialize, Deserialize)]
struct SpeedRecord {
    config: SimConfig,
    v_hat: f64,
    m_t: f64,
    n_r: usize,
    discarded: usize,
}

fn load_spec(c: &Common) -> Result<ExperimentSpec> {
    let mut spec = match &c.config {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str::<ExperimentSpec>(&text).map_err(Error::from)?
        }
        None => ExperimentSpec::default(),
    };
    if let Some(s) = c.seed {
        spec.sim.seed = s;
    }
    if let Some(p) = &c.preset {
        spec.target = TargetSpec::Preset(p.clone());
    }
    if let Some(r) = c.runs {
        spec.runs = r;
        spec.seeds = None;
    }
    spec.validate()?;
    Ok(spec)
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    fs::create_dir_all(dir)?;
    let p = dir.join(name);
    Ok(BufWriter::new(
        File::create(&p).map_err(Error::from).with_context(|| format!("creating {}", p.display()))?,
    ))
}

fn open(p: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(
        File::open(p).map_err(Error::from).with_context(|| format!("opening {}", p.display()))?,
    ))
}

fn simulate(c: &Common) -> Result<()> {
    let spec = load_spec(c)?;
    let target = spec.target.resolve()?;
    let sensors = deploy_sensors(&spec.sim)?;
    let sim = simulate_traces(&target, &spec.sim, &sensors)?;
    let traces = inject_loss(sim.traces, spec.sim.p_b, spec.sim.seed);
    let header = TraceHeader {
        config: spec.sim.clone(),
        m_t: sim.m_t,
        detected: sim.detected,
    };
    write_traces(create(&c.out, TRACES)?, &header, &traces)?;
    let mut w = create(&c.out, TARGET)?;
    writeln!(w, "{}", target.to_json_string())?;
    out!(
        "{} sensors, m_t = {}, traces in {}",
        traces.len(),
        sim.m_t,
        c.out.join(TRACES).display()
    );
    if !sim.detected {
        return Err(Error::NoDetection.into());
    }
    Ok(())
}

fn extract(c: &Common, traces: Option<PathBuf>) -> Result<()> {
    let spec = load_spec(c)?;
    let path = traces.unwrap_or_else(|| c.out.join(TRACES));
    let (header, traces) = read_traces(open(&path)?)?;
    let obs = observe(&traces, &header.config, &spec.estimator)?;
    write_segments(create(&c.out, SEGMENTS)?, &obs.segments)?;
    write_pairs(create(&c.out, PAIRS)?, &obs.pairs)?;
    let speed = SpeedRecord {
        config: header.config,
        v_hat: obs.v_hat,
        m_t: obs.m_t,
        n_r: obs.n_r,
        discarded: obs.discarded,
    };
    serde_json::to_writer_pretty(create(&c.out, SPEED)?, &speed)?;
    out!(
        "v_hat = {:.4}, {} segments ({} valid), {} pairs",
        obs.v_hat,
        obs.segments.len(),
        obs.segments.iter().filter(|s| s.valid_whole_edge).count(),
        obs.pairs.len()
    );
    Ok(())
}

fn estimate_cmd(c: &Common, input: Option<PathBuf>) -> Result<()> {
    let spec = load_spec(c)?;
    let dir = input.unwrap_or_else(|| c.out.clone());
    let speed: SpeedRecord = serde_json::from_reader(open(&dir.join(SPEED))?).map_err(Error::from)?;
    let obs = Observations {
        v_hat: speed.v_hat,
        m_t: speed.m_t,
        n_r: speed.n_r,
        discarded: speed.discarded,
        segments: read_segments(open(&dir.join(SEGMENTS))?)?,
        pairs: read_pairs(open(&dir.join(PAIRS))?)?,
    };
    let est = estimate(&obs, &speed.config, &spec.estimator)?;
    let report = EstimateReport::from(&est);
    report.write(create(&c.out, ESTIMATE)?)?;
    for e in &report.edges {
        out!(
            "lambda {:8.3}  xi {:.4} / {:.4}  n_e {:.2} -> {}",
            e.lambda,
            e.xi_candidates[0].radians(),
            e.xi_candidates[1].radians(),
            e.n_e,
            e.n_e_rounded
        );
    }
    out!(
        "outline: {} edges, complete = {}",
        report.shape.ordered_edges.len(),
        report.shape.complete
    );
    if report.edges.is_empty() {
        return Err(Error::Degenerate("no edge estimates".into()).into());
    }
    Ok(())
}

#[derive(Serialize)]
struct EdgeEvaluation {
    lambda: f64,
    xi: f64,
    eps_sq: f64,
    matched: bool,
}

fn evaluate(c: &Common, estimate: Option<PathBuf>) -> Result<()> {
    let spec = load_spec(c)?;
    let target = spec.target.resolve()?;
    let path = estimate.unwrap_or_else(|| c.out.join(ESTIMATE));
    let report: EstimateReport = serde_json::from_reader(open(&path)?).map_err(Error::from)?;
    let m = match_edges(target.edges(), &expand_reports(&report.edges));
    let rows: Vec<EdgeEvaluation> = target
        .edges()
        .iter()
        .zip(m.eps_sq.iter().zip(&m.unmatched))
        .map(|(e, (&eps, &u))| EdgeEvaluation {
            lambda: e.length,
            xi: e.direction.radians(),
            eps_sq: eps,
            matched: !u,
        })
        .collect();
    for r in &rows {
        out!(
            "edge ({:8.3}, {:.4})  eps^2 {:10.4}{}",
            r.lambda,
            r.xi,
            r.eps_sq,
            if r.matched { "" } else { "  (unmatched)" }
        );
    }
    let total: f64 = m.eps_sq.iter().sum();
    out!("sum eps^2 = {total:.4}");
    let out = serde_json::json!({ "edges": rows, "sum_eps_sq": total });
    serde_json::to_writer_pretty(create(&c.out, EVALUATION)?, &out)?;
    Ok(())
}

fn pipeline(c: &Common) -> Result<()> {
    let spec = load_spec(c)?;
    let report = run_experiment(&spec)?;
    serde_json::to_writer_pretty(create(&c.out, METRICS)?, &report)?;
    emit_plot_data(&report, &c.out)?;
    for p in &report.points {
        let rsr: Vec<String> = p.rsr_mse.iter().map(|x| format!("{x:.4}")).collect();
        out!(
            "n_s {:5} v {:4} p_b {:6} sigma_s {:5}  mse {:12.4}  rsr_mse [{}]  count_ok {:.2}",
            p.point.n_s,
            p.point.v,
            p.point.p_b,
            p.point.sigma_s,
            p.mse,
            rsr.join(", "),
            p.count_accuracy
        );
    }
    Ok(())
}

fn presets(action: &PresetAction) -> Result<()> {
    match action {
        PresetAction::List => {
            for n in PRESET_NAMES {
                out!("{n}");
            }
        }
        PresetAction::Show { name } => {
            out!("{}", rangeshape::harness::preset(name)?.to_json_string());
        }
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::NoDetection) => 3,
        Some(
            Error::Degenerate(_)
            | Error::InvalidSpeed(_)
            | Error::InvalidExpectation(_)
            | Error::NotConcave,
        ) => 4,
        Some(Error::Io(_)) => 1,
        Some(_) => 2,
        None => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(c) => simulate(c),
        Command::Extract { common, traces } => extract(common, traces.clone()),
        Command::Estimate { common, input } => estimate_cmd(common, input.clone()),
        Command::Evaluate { common, estimate } => evaluate(common, estimate.clone()),
        Command::Pipeline(c) => pipeline(c),
        Command::Presets { action } => presets(action),
    };
    let closed_stdout = |e: &anyhow::Error| {
        e.downcast_ref::<std::io::Error>()
            .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if closed_stdout(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
