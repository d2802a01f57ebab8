//! `ctrlchain` command-line interface.
//!
//! Exit codes: 0 on success, 1 on a domain error (reported on stderr as
//! `{"error": kind, "detail": message}`), 2 on a usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gramian::{controllability_check, gramian_with, Condition, ControlSystem, DEFAULT_TOLERANCE};
use crate::lcc::{lcc_report, min_inputs_for_lcc};
use crate::matching::{bipartite_representation, driver_nodes, maximum_matching};
use crate::motif::triad_census;
use crate::network::{
    aal90_labels, load_matrix_path, network_stats, read_labels_path, remove_isolated,
    threshold_binarize, StructuralNetwork,
};
use crate::report::{build_report, report_json, PlacementSummary};
use crate::sweep::{read_sweep_csv_path, region_sweep, write_sweep_csv_path, AtlasMapping};

#[derive(Debug, Parser)]
#[command(name = "ctrlchain", version, about = "Network controllability: driver nodes, Gramian energy, control chains, motifs")]
pub struct Cli {
    /// Worker threads for parallel stages (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Threshold a weighted CSV matrix into a structural network.
    Ingest(IngestArgs),
    /// Minimum driver nodes from a maximum matching.
    Drivers(DriversArgs),
    /// Controllability Gramian metrics for an input set.
    Gramian(GramianArgs),
    /// Distances from an input set and its longest control chain.
    Lcc(LccArgs),
    /// Smallest input sets reaching a target LCC.
    Place(PlaceArgs),
    /// Three-node motif census.
    Motifs(MotifsArgs),
    /// Single-input energy sweep over every region.
    Sweep(SweepArgs),
    /// Aggregate a sweep into a JSON report.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    /// Links are kept when their weight is strictly above this value.
    #[arg(long, value_parser = nonneg_f64)]
    pub threshold: f64,
    /// Region names, one per line. Defaults to the bundled AAL90 labels for
    /// 90-node matrices.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Remove isolated regions before writing the network.
    #[arg(long)]
    pub drop_isolated: bool,
    /// Heterogeneity normalising constant (default: average degree).
    #[arg(long, value_parser = positive_f64)]
    pub r: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DriversArgs {
    #[arg(long)]
    pub net: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct GramianArgs {
    #[arg(long)]
    pub net: PathBuf,
    /// Comma-separated 1-based node ids.
    #[arg(long, value_delimiter = ',', required = true, value_parser = node_id)]
    pub inputs: Vec<usize>,
    #[arg(long, default_value_t = 1.0, value_parser = positive_f64)]
    pub tf: f64,
    #[arg(long)]
    pub trace_inverse: bool,
}

#[derive(Debug, Args)]
pub struct LccArgs {
    #[arg(long)]
    pub net: PathBuf,
    #[arg(long, value_delimiter = ',', required = true, value_parser = node_id)]
    pub inputs: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct PlaceArgs {
    #[arg(long)]
    pub net: PathBuf,
    #[arg(long)]
    pub target_lcc: u32,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MotifsArgs {
    #[arg(long)]
    pub net: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub net: PathBuf,
    #[arg(long, default_value_t = 1.0, value_parser = positive_f64)]
    pub tf: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub net: PathBuf,
    #[arg(long)]
    pub sweep: PathBuf,
    /// JSON `{system: [label, ...]}`; defaults to the bundled Default Mode
    /// and Auditory mapping.
    #[arg(long)]
    pub atlas: Option<PathBuf>,
    /// Output of `place`; may be repeated.
    #[arg(long)]
    pub placement: Vec<PathBuf>,
    #[arg(long, value_parser = positive_f64)]
    pub r: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{s} is not finite"))
    }
}

fn nonneg_f64(s: &str) -> std::result::Result<f64, String> {
    let v = parse_f64(s)?;
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("{s} must be nonnegative"))
    }
}

fn positive_f64(s: &str) -> std::result::Result<f64, String> {
    let v = parse_f64(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("{s} must be positive"))
    }
}

fn node_id(s: &str) -> std::result::Result<usize, String> {
    match s.trim().parse::<usize>() {
        Ok(0) | Err(_) => Err(format!("{s:?} is not a 1-based node id")),
        Ok(v) => Ok(v - 1),
    }
}

#[derive(Serialize)]
struct DriversOutput {
    n_u: usize,
    n_i: usize,
    drivers: Vec<usize>,
    labels: Vec<String>,
}

#[derive(Serialize)]
struct GramianOutput {
    trace: f64,
    log10_trace: f64,
    lambda_min: f64,
    controllable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace_inverse: Option<f64>,
    condition: Condition,
}

#[derive(Serialize)]
struct LccOutput {
    inputs: Vec<usize>,
    distances: Vec<Option<u32>>,
    lcc: Option<u32>,
}

#[derive(Serialize)]
struct ErrorOutput<'a> {
    error: &'a str,
    detail: String,
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(pool) => pool,
        Err(e) => return report_error(&Error::invalid("threads", e.to_string())),
    };
    match pool.install(|| execute(&cli.command)) {
        Ok(stdout) => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(stdout.as_bytes());
            let _ = out.flush();
            0
        }
        Err(e) => report_error(&e),
    }
}

fn report_error(e: &Error) -> i32 {
    let body = ErrorOutput {
        error: e.kind(),
        detail: e.to_string(),
    };
    eprintln!("{}", serde_json::to_string(&body).unwrap_or_else(|_| e.to_string()));
    1
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

fn write_file(path: &PathBuf, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Runs one subcommand and returns what it prints on stdout.
pub fn execute(command: &Command) -> Result<String> {
    match command {
        Command::Ingest(args) => ingest(args),
        Command::Drivers(args) => {
            let g = StructuralNetwork::read_json(&args.net)?;
            let m = maximum_matching(&bipartite_representation(&g), args.seed);
            let drivers = driver_nodes(&m);
            to_json(&DriversOutput {
                n_u: m.n_u,
                n_i: m.n_i,
                labels: drivers.iter().map(|&v| g.label(v)).collect(),
                drivers: drivers.iter().map(|v| v + 1).collect(),
            })
        }
        Command::Gramian(args) => {
            let g = StructuralNetwork::read_json(&args.net)?;
            let sys = ControlSystem::from_network(&g, args.inputs.clone(), args.tf)?;
            let res = gramian_with(&sys, args.trace_inverse)?;
            to_json(&GramianOutput {
                trace: res.trace,
                log10_trace: res.trace.log10(),
                lambda_min: res.lambda_min,
                controllable: controllability_check(&res, DEFAULT_TOLERANCE),
                trace_inverse: res.trace_inverse,
                condition: res.condition,
            })
        }
        Command::Lcc(args) => {
            let g = StructuralNetwork::read_json(&args.net)?;
            let r = lcc_report(&g, &args.inputs)?;
            to_json(&LccOutput {
                inputs: r.inputs.iter().map(|v| v + 1).collect(),
                distances: r.dist,
                lcc: r.lcc,
            })
        }
        Command::Place(args) => {
            let g = StructuralNetwork::read_json(&args.net)?;
            let samples = usize::try_from(args.samples)
                .map_err(|_| Error::invalid("samples", "too large"))?;
            let p = min_inputs_for_lcc(&g, args.target_lcc, samples, args.seed)?;
            let text = to_json(&PlacementSummary::new(&g, &p))?;
            if let Some(out) = &args.out {
                write_file(out, &text)?;
            }
            Ok(text)
        }
        Command::Motifs(args) => {
            let g = StructuralNetwork::read_json(&args.net)?;
            let text = to_json(&triad_census(&g))?;
            if let Some(out) = &args.out {
                write_file(out, &text)?;
            }
            Ok(text)
        }
        Command::Sweep(args) => {
            let g = StructuralNetwork::read_json(&args.net)?;
            let records = region_sweep(&g, args.tf)?;
            write_sweep_csv_path(&records, &args.out)?;
            Ok(String::new())
        }
        Command::Report(args) => {
            let g = StructuralNetwork::read_json(&args.net)?;
            let records = read_sweep_csv_path(&args.sweep)?;
            let atlas = match &args.atlas {
                Some(path) => AtlasMapping::read(path)?,
                None => AtlasMapping::bundled(),
            };
            let mut placements = Vec::new();
            for path in &args.placement {
                let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                placements.push(serde_json::from_str::<PlacementSummary>(&text)?);
            }
            let stats = network_stats(&g, args.r)?;
            let census = triad_census(&g);
            let report = build_report(&g, &records, &stats, &census, &placements, &atlas)?;
            write_file(&args.out, &report_json(&report)?)?;
            Ok(String::new())
        }
    }
}

fn ingest(args: &IngestArgs) -> Result<String> {
    let w = load_matrix_path(&args.matrix)?;
    let labels = match &args.labels {
        Some(path) => Some(read_labels_path(path)?),
        None if w.n() == 90 => Some(aal90_labels()),
        None => None,
    };
    let mut g = threshold_binarize(&w, args.threshold)?
        .with_provenance(Some(args.threshold), args.matrix.display().to_string());
    if let Some(labels) = labels {
        g = g.with_labels(labels)?;
    }
    // statistics describe the network before isolated regions are dropped
    let stats = network_stats(&g, args.r)?;
    if args.drop_isolated {
        g = remove_isolated(&g)?.0;
    }
    g.write_json(&args.out)?;
    to_json(&stats)
}
