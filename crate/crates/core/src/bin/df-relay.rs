use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use df_relay::experiments::{self, ExperimentConfig};
use df_relay::{Error, PowerBudgets};

#[derive(Parser)]
#[command(name = "df-relay", version, about = "Power allocation experiments for the fading DF relay channel")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// experiment config (JSON)
    #[arg(long)]
    config: PathBuf,
    /// output file; defaults to the config's `output`, else stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    ensemble_size: Option<usize>,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one budget pair and dump the result as JSON
    Solve {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        p1_bar: Option<f64>,
        #[arg(long)]
        p2_bar: Option<f64>,
    },
    /// Case label of every grid cell, plus per-column boundaries
    SweepRegions {
        #[command(flatten)]
        common: Common,
    },
    /// Rate against the source budget
    CurveP1 {
        #[command(flatten)]
        common: Common,
    },
    /// Rate against the relay budget
    CurveP2 {
        #[command(flatten)]
        common: Common,
    },
    /// Optimised against fixed correlation over the noise grid
    Compare {
        #[command(flatten)]
        common: Common,
    },
}

enum Failure {
    Config(String),
    Solver(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Io(_) => Failure::Config(e.to_string()),
            other => Failure::Solver(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

fn load(c: &Common) -> Result<ExperimentConfig, Failure> {
    let mut cfg = ExperimentConfig::load(&c.config)?;
    if let Some(s) = c.seed {
        cfg.ensemble.seed = s;
    }
    if let Some(m) = c.ensemble_size {
        cfg.ensemble.size = m;
    }
    if let Some(w) = c.workers {
        cfg.workers = w;
    }
    if c.out.is_some() {
        cfg.output = c.out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn boundaries_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}_boundaries.csv"))
}

/// Number of failed solves.
fn run(cmd: Command) -> Result<usize, Failure> {
    match cmd {
        Command::Solve { common, p1_bar, p2_bar } => {
            let cfg = load(&common)?;
            let first = |g: &experiments::Grid| g.values().map(|v| v[0]);
            let p1 = p1_bar.map(Ok).unwrap_or_else(|| first(&cfg.p1_bar))?;
            let p2 = p2_bar.map(Ok).unwrap_or_else(|| first(&cfg.p2_bar))?;
            PowerBudgets::new(p1, p2).map_err(|e| Failure::Config(e.to_string()))?;
            let ensemble = cfg.build_ensemble()?;
            let dump = experiments::solve_once(&cfg, &ensemble, p1, p2)?;
            let mut w = sink(cfg.output.as_deref())?;
            writeln!(w, "{}", dump.to_json()?)?;
            w.flush()?;
            Ok(0)
        }
        Command::SweepRegions { common } => {
            let cfg = load(&common)?;
            let sweep = experiments::sweep_case_regions(&cfg, &cfg.build_ensemble()?)?;
            match cfg.output.as_deref() {
                Some(p) => {
                    let mut w = sink(Some(p))?;
                    sweep.write_cells_csv(&mut w)?;
                    w.flush()?;
                    let mut b = sink(Some(&boundaries_path(p)))?;
                    sweep.write_boundaries_csv(&mut b)?;
                    b.flush()?;
                }
                None => {
                    let mut w = sink(None)?;
                    sweep.write_cells_csv(&mut w)?;
                    writeln!(w)?;
                    sweep.write_boundaries_csv(&mut w)?;
                    w.flush()?;
                }
            }
            Ok(sweep.failures())
        }
        Command::CurveP1 { common } => {
            let cfg = load(&common)?;
            let curve = experiments::rate_curve_vs_p1(&cfg, &cfg.build_ensemble()?)?;
            let mut w = sink(cfg.output.as_deref())?;
            curve.write_csv(&mut w)?;
            w.flush()?;
            Ok(curve.failures())
        }
        Command::CurveP2 { common } => {
            let cfg = load(&common)?;
            let curve = experiments::rate_curve_vs_p2(&cfg, &cfg.build_ensemble()?)?;
            let mut w = sink(cfg.output.as_deref())?;
            curve.write_csv(&mut w)?;
            w.flush()?;
            Ok(curve.failures())
        }
        Command::Compare { common } => {
            let cfg = load(&common)?;
            let cmp = experiments::compare_thm1_thm2(&cfg, &cfg.build_ensemble()?)?;
            let mut w = sink(cfg.output.as_deref())?;
            cmp.write_csv(&mut w)?;
            w.flush()?;
            Ok(cmp.failures())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(n) => {
            eprintln!("{n} solves failed");
            ExitCode::from(2)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Solver(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
