use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cuspfill::experiments::{self, PipelineConfig};
use cuspfill::peripheral::height;
use cuspfill::Error;

#[derive(Parser)]
#[command(name = "cuspfill", version, about = "Cusped spaces, Dehn fillings and subgroup height over free groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Run every stage and emit a JSON report.
    Pipeline {
        #[arg(long)]
        config: PathBuf,
    },
    /// Tabulate verdicts over sweep_exponents × sweep_radii.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Four-point δ of a cusped space.
    Delta {
        #[arg(long)]
        config: PathBuf,
        /// Seed for sampled quadruples.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Height of the configured subgroup with its certificate.
    Height {
        #[arg(long)]
        config: PathBuf,
    },
    /// Re-check a height certificate or pipeline report.
    VerifyCertificate { path: PathBuf },
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(p) => std::fs::write(p, format!("{text}\n")).map_err(Error::from),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

/// 0: all verdicts positive, 1: some check failed.
fn run(cli: &Cli) -> Result<u8, Error> {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Pipeline { config } => {
            let c = PipelineConfig::load(config)?;
            let report = experiments::run_pipeline(&c)?;
            emit(out, &report.to_json())?;
            if let Some(e) = &report.error {
                return Err(Error::Structural(e.clone()));
            }
            Ok(u8::from(!report.verdicts.all_ok()))
        }
        Command::Sweep { config } => {
            let c = PipelineConfig::load(config)?;
            let rows = experiments::sweep(&c, &c.sweep_exponents, &c.sweep_radii)?;
            let text = match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => experiments::to_csv(&rows).trim_end().to_string(),
                Format::Json => json(&rows),
            };
            emit(out, &text)?;
            Ok(0)
        }
        Command::Delta { config, seed } => {
            let c = PipelineConfig::load(config)?;
            emit(out, &json(&experiments::delta_run(&c, *seed)?))?;
            Ok(0)
        }
        Command::Height { config } => {
            let c = PipelineConfig::load(config)?;
            let r = height(&c.subgroup_graph(), c.conjugator_bound);
            emit(out, &json(&r.certificate))?;
            Ok(0)
        }
        Command::VerifyCertificate { path } => {
            let v = experiments::verify_certificate_file(path)?;
            emit(out, &json(&v))?;
            Ok(u8::from(!v.ok))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
