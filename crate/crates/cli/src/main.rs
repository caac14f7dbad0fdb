use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use dtqw::experiment::{
    cmd_compare, cmd_sweep, cmd_walk, compare_csv, render_heatmap, render_record, render_sweep, Engine,
    ExperimentConfig, OutputFormat, RunRecord, SweepConfig,
};
use dtqw::qutrit;
use dtqw::walk;
use serde_json::json;

#[derive(Parser)]
#[command(name = "dtqw", version, about = "Discrete-time quantum walks on a qutrit chain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Output {
    /// Output file; defaults to the config's output.path, then stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv, json or svg-heatmap; overrides the config.
    #[arg(long)]
    format: Option<OutputFormat>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one walk experiment.
    Walk {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        output: Output,
        /// Seed for shot sampling; overrides the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Keep unidirectional coordinates for ideal-uni and qutrit runs.
        #[arg(long)]
        raw_coordinates: bool,
        /// Record wall-clock time in the run record (output is then no
        /// longer reproducible byte for byte).
        #[arg(long)]
        timing: bool,
        /// Also write the compiled gate sequence as JSON (qutrit engine).
        #[arg(long)]
        dump_circuit: Option<PathBuf>,
    },
    /// Sweep P_edge over a grid of domain angles.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Per-step similarity between two run records.
    Compare {
        run_a: PathBuf,
        run_b: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Draw a step-vs-position heatmap from a run record, or from a walk
    /// config run on the spot.
    Heatmap {
        record: Option<PathBuf>,
        #[arg(long, conflicts_with = "record")]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => Ok(std::io::stdout().lock().write_all(text.as_bytes())?),
    }
}

fn out_path(flag: Option<PathBuf>, config: Option<&String>) -> Option<PathBuf> {
    flag.or_else(|| config.map(PathBuf::from))
}

fn load_record(path: &Path) -> Result<RunRecord> {
    RunRecord::from_json(&read(path)?).with_context(|| format!("parsing run record {}", path.display()))
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Walk { config, output, seed, raw_coordinates, timing, dump_circuit } => {
            let mut cfg = ExperimentConfig::from_json(&read(&config)?)?;
            if let Some(f) = output.format {
                cfg.output.format = f;
            }
            if seed.is_some() {
                cfg.seed = seed;
            }
            cfg.raw_coordinates |= raw_coordinates;
            let start = Instant::now();
            let mut record = cmd_walk(&cfg)?;
            if timing {
                record.wall_clock_s = Some(start.elapsed().as_secs_f64());
            }
            if let Some(path) = dump_circuit {
                if cfg.engine != Engine::Qutrit {
                    bail!("--dump-circuit needs the qutrit engine");
                }
                let profile = cfg.profile.to_profile("profile")?;
                let init = walk::initial_state(&cfg.initial)?;
                let circuit = qutrit::compile_walk(cfg.steps, &profile, &init.amps[0], &cfg.layout())?;
                emit(&(circuit.to_json()? + "\n"), Some(&path))?;
            }
            let text = render_record(&record, cfg.output.format)?;
            emit(&text, out_path(output.out, cfg.output.path.as_ref()).as_deref())
        }
        Command::Sweep { config, output } => {
            let mut cfg = SweepConfig::from_json(&read(&config)?)?;
            if let Some(f) = output.format {
                cfg.output.format = f;
            }
            let rows = cmd_sweep(&cfg)?;
            let text = render_sweep(&rows, cfg.output.format)?;
            emit(&text, out_path(output.out, cfg.output.path.as_ref()).as_deref())
        }
        Command::Compare { run_a, run_b, output } => {
            let series = cmd_compare(&load_record(&run_a)?, &load_record(&run_b)?)?;
            let text = match output.format.unwrap_or_default() {
                OutputFormat::Csv => compare_csv(&series)?,
                OutputFormat::Json => {
                    let rows: Vec<_> = series.iter().map(|(s, v)| json!({"step": s, "similarity": v})).collect();
                    serde_json::to_string_pretty(&rows)? + "\n"
                }
                OutputFormat::SvgHeatmap => bail!("compare renders as csv or json"),
            };
            emit(&text, output.out.as_deref())
        }
        Command::Heatmap { record, config, out } => {
            let record = match (record, config) {
                (Some(r), None) => load_record(&r)?,
                (None, Some(c)) => cmd_walk(&ExperimentConfig::from_json(&read(&c)?)?)?,
                _ => bail!("give a run record or --config"),
            };
            emit(&render_heatmap(&record)?, out.as_deref())
        }
    }
}
