use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pdist_core::distortion::Mode;
use pdist_core::rips_skeleton;
use pdist_harness::experiments::{self, CompareOptions, SweepOptions};
use pdist_harness::io::{load_any_graph, load_embedded_graph, load_points, write_edge_list};
use pdist_harness::report::{sweep_csv, CompareReport};
use pdist_harness::HarnessError;

#[derive(Parser)]
#[command(name = "pdist", version, about = "Persistence-distortion distances between metric graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Distance between two graphs (edge lists or OFF/OBJ meshes).
    Compare {
        g1: PathBuf,
        g2: PathBuf,
        #[command(flatten)]
        mode: ModeArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Record wall-clock seconds in the report.
        #[arg(long)]
        timing: bool,
    },
    /// Pairwise distances between all graphs in a directory.
    Matrix {
        dir: PathBuf,
        #[arg(long, default_value = "*.edges")]
        glob: String,
        #[command(flatten)]
        mode: ModeArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Rips 1-skeleton of a point cloud, written as an edge list.
    Rips {
        points: PathBuf,
        #[arg(long)]
        radius: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Distance between a graph and noisy Rips reconstructions of it.
    NoiseSweep {
        /// Edge list with `node: id x y` coordinate lines.
        graph: PathBuf,
        #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
        eps_list: Vec<f64>,
        #[arg(long, default_value_t = 5)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sample spacing along edges (default per level: min(shortest edge / 4, noise / 8)).
        #[arg(long)]
        spacing: Option<f64>,
        /// Subsample radius (default: tuned to 150-300 basepoints).
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Discrete,
    Refined,
    Subsampled,
}

#[derive(Args)]
struct ModeArgs {
    #[arg(long, value_enum, default_value = "discrete")]
    mode: ModeArg,
    /// Target interval width (refined mode).
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    /// Refinement round budget (refined mode).
    #[arg(long, default_value_t = 8)]
    max_rounds: usize,
    /// Subsample radius (subsampled mode; default: tuned to 150-300 basepoints).
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl ModeArgs {
    fn options(&self) -> CompareOptions {
        let mode = match self.mode {
            ModeArg::Discrete => Mode::Discrete,
            ModeArg::Refined => Mode::Refined,
            ModeArg::Subsampled => Mode::Subsampled,
        };
        CompareOptions { mode, eps: self.eps, max_rounds: self.max_rounds, delta: self.delta, seed: self.seed }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

enum Outcome {
    Done,
    BudgetExhausted,
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), HarnessError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| HarnessError::io(path, e)),
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn graph_id(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn load(path: &Path) -> Result<pdist_core::MetricGraph, HarnessError> {
    load_any_graph(path).map_err(|e| match e {
        HarnessError::Io { .. } => e,
        other => HarnessError::Input(format!("{}: {other}", path.display())),
    })
}

fn run(cli: Cli) -> Result<Outcome, HarnessError> {
    match cli.command {
        Command::Compare { g1, g2, mode, output, timing } => {
            let opts = mode.options();
            let (a, b) = (load(&g1)?, load(&g2)?);
            let (d, seconds) = experiments::compare_timed(&a, &b, &opts)?;
            let report = CompareReport::new(
                [graph_id(&g1), graph_id(&g2)],
                opts.params(d.delta),
                &d,
                timing.then_some(seconds),
            );
            let text = match output.format {
                Format::Json => report.to_json(),
                Format::Csv => report.to_csv(),
            };
            emit(output.out.as_deref(), &text)?;
            Ok(if report.converged { Outcome::Done } else { Outcome::BudgetExhausted })
        }
        Command::Matrix { dir, glob: pattern, mode, output } => {
            if !dir.is_dir() {
                return Err(HarnessError::Input(format!("{} is not a directory", dir.display())));
            }
            let full = dir.join(&pattern);
            let mut paths: Vec<PathBuf> = glob::glob(&full.to_string_lossy())
                .map_err(|e| HarnessError::Input(format!("bad pattern `{pattern}`: {e}")))?
                .filter_map(Result::ok)
                .filter(|p| p.is_file())
                .collect();
            paths.sort();
            if paths.len() < 2 {
                return Err(HarnessError::Input(format!(
                    "need at least 2 graphs matching `{pattern}` in {}, found {}",
                    dir.display(),
                    paths.len()
                )));
            }
            let graphs = paths.iter().map(|p| load(p)).collect::<Result<Vec<_>, _>>()?;
            let ids = paths.iter().map(|p| graph_id(p)).collect();
            let report = experiments::matrix(ids, &graphs, &mode.options())?;
            let text = match output.format {
                Format::Json => report.to_json(),
                Format::Csv => report.to_csv(),
            };
            emit(output.out.as_deref(), &text)?;
            Ok(if report.converged { Outcome::Done } else { Outcome::BudgetExhausted })
        }
        Command::Rips { points, radius, out } => {
            let cloud = load_points(&points)?;
            let g = rips_skeleton(&cloud, radius).map_err(|e| HarnessError::Input(format!("{}: {e}", points.display())))?;
            let coords: Option<Vec<[f64; 2]>> =
                (cloud.dim() == 2).then(|| cloud.points().iter().map(|p| [p[0], p[1]]).collect());
            emit(out.as_deref(), &write_edge_list(&g, coords.as_deref()))?;
            Ok(Outcome::Done)
        }
        Command::NoiseSweep { graph, eps_list, samples, seed, spacing, delta, out } => {
            let hidden = load_embedded_graph(&graph)?;
            let rows = experiments::noise_sweep(&hidden, &SweepOptions { eps: eps_list, samples, seed, spacing, delta })?;
            emit(out.as_deref(), &sweep_csv(&rows))?;
            Ok(Outcome::Done)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::BudgetExhausted) => {
            eprintln!("pdist: refinement budget exhausted before reaching the target width");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("pdist: {e}");
            ExitCode::from(2)
        }
    }
}
