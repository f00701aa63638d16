use std::path::{Path, PathBuf};
use std::process;

use clap::{Parser, Subcommand};
use qsc_cli::commands::{self, CmdError, ExitCode, Outcomes, RunOptions, DEFAULT_VERIFY_SEEDS};
use qsc_cli::demo::{self, Params};
use qsc_cli::report::to_json;

/// Quantum sequential circuit simulator.
#[derive(Parser)]
#[command(name = "qsc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a circuit file and print its run report.
    Run {
        file: PathBuf,
        /// Seed for sampled outcomes [default: $QSC_SEED or 0].
        #[arg(long, conflicts_with = "force_outcomes")]
        seed: Option<u64>,
        /// Measurement outcomes in order, e.g. 0,1,1.
        #[arg(long, value_name = "LIST")]
        force_outcomes: Option<String>,
        /// Write the report here instead of stdout.
        #[arg(long, value_name = "PATH")]
        json: Option<PathBuf>,
        /// Also compare against the gate-level oracle.
        #[arg(long)]
        oracle: bool,
        #[arg(long, hide = true)]
        ignore_byproducts: bool,
    },
    /// Compare a circuit with its gate-level equivalent; exit 4 on mismatch.
    Verify {
        file: PathBuf,
        /// First seed [default: $QSC_SEED or 0].
        #[arg(long)]
        seed: Option<u64>,
        /// Number of seeded runs.
        #[arg(long, default_value_t = DEFAULT_VERIFY_SEEDS)]
        seeds: u64,
        #[arg(long, value_name = "PATH")]
        json: Option<PathBuf>,
        #[arg(long, hide = true)]
        ignore_byproducts: bool,
    },
    /// Run an algorithm demo: qpe, qaa, lcu, qmux, history, qconv, trotter, superchannel.
    Demo {
        name: String,
        /// Parameters as key=value.
        params: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_name = "PATH")]
        json: Option<PathBuf>,
    },
    /// Print the canonical text of a circuit file.
    Fmt { file: PathBuf },
}

fn default_seed(explicit: Option<u64>) -> Result<u64, CmdError> {
    if let Some(s) = explicit {
        return Ok(s);
    }
    match std::env::var("QSC_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CmdError::validation(format!("QSC_SEED='{v}' is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

fn emit(doc: &str, path: Option<&Path>) -> Result<(), CmdError> {
    match path {
        Some(p) => std::fs::write(p, doc).map_err(|e| CmdError {
            exit: ExitCode::Runtime,
            message: format!("cannot write {}: {e}", p.display()),
        }),
        None => {
            print!("{doc}");
            Ok(())
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, CmdError> {
    match cli.command {
        Command::Run {
            file,
            seed,
            force_outcomes,
            json,
            oracle,
            ignore_byproducts,
        } => {
            let outcomes = match force_outcomes {
                Some(list) => Outcomes::Forced(commands::parse_forced(&list)?),
                None => Outcomes::Seed(default_seed(seed)?),
            };
            let opts = RunOptions {
                ignore_byproducts,
                oracle,
            };
            let report = commands::run(&file, &outcomes, &opts)?;
            emit(&to_json(&report), json.as_deref())?;
            Ok(ExitCode::Ok)
        }
        Command::Verify {
            file,
            seed,
            seeds,
            json,
            ignore_byproducts,
        } => {
            if seeds == 0 {
                return Err(CmdError::validation("--seeds must be at least 1"));
            }
            let seeds = commands::seed_range(default_seed(seed)?, seeds);
            let out = commands::verify(&file, &seeds, ignore_byproducts)?;
            emit(&to_json(&out), json.as_deref())?;
            if out.pass {
                Ok(ExitCode::Ok)
            } else {
                eprintln!(
                    "qsc: deficit {:.3e}, total variation {:.3e} exceed tolerance",
                    out.max_deficit, out.max_tv_distance
                );
                Ok(ExitCode::Deficit)
            }
        }
        Command::Demo {
            name,
            params,
            seed,
            json,
        } => {
            let params = Params::parse(&params)?;
            let doc = demo::run(&name, &params, default_seed(seed)?)?;
            emit(&to_json(&doc), json.as_deref())?;
            Ok(ExitCode::Ok)
        }
        Command::Fmt { file } => {
            print!("{}", commands::fmt(&file)?);
            Ok(ExitCode::Ok)
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("qsc: {e}");
            e.exit
        }
    };
    process::exit(code as i32);
}
