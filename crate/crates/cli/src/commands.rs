//! The `run`, `verify` and `fmt` subcommands, independent of argument
//! parsing so tests can call them directly.

use std::fmt;
use std::path::Path;

use qsc_core::qcore::{fidelity, RngPolicy};
use qsc_core::seqexec::{execute_schedule, oracle, total_variation, ExecOptions};
use qsc_core::QscError;
use serde::Serialize;

use crate::report::{OracleResidual, RunConfig, RunReport, VERIFY_SCHEMA};
use crate::text::{self, Diagnostic, Program};

/// Largest fidelity deficit `verify` accepts.
pub const DEFICIT_TOL: f64 = 1e-10;
/// Largest readout total-variation distance `verify` accepts.
pub const TV_TOL: f64 = 1e-9;
pub const DEFAULT_VERIFY_SEEDS: u64 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Ok = 0,
    Validation = 2,
    Runtime = 3,
    Deficit = 4,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CmdError {
    pub exit: ExitCode,
    pub message: String,
}

impl CmdError {
    pub fn validation(message: impl Into<String>) -> Self {
        CmdError {
            exit: ExitCode::Validation,
            message: message.into(),
        }
    }

    pub fn runtime(e: QscError) -> Self {
        CmdError {
            exit: ExitCode::Runtime,
            message: e.to_string(),
        }
    }
}

impl fmt::Display for CmdError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

fn diag(file: &Path, d: Diagnostic) -> CmdError {
    CmdError::validation(format!("{}:{d}", file.display()))
}

/// Reads and parses a circuit file; relative `file:` paths resolve
/// against its directory.
pub fn load(file: &Path) -> Result<Program, CmdError> {
    let bytes = std::fs::read(file)
        .map_err(|e| CmdError::validation(format!("{}: E008: cannot read file: {e}", file.display())))?;
    let base = file.parent().unwrap_or_else(|| Path::new("."));
    text::parse_bytes(&bytes, base).map_err(|d| diag(file, d))
}

/// How `run` picks measurement outcomes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcomes {
    Seed(u64),
    Forced(Vec<u8>),
}

/// Parses `0,1,1` or `011`.
pub fn parse_forced(list: &str) -> Result<Vec<u8>, CmdError> {
    list.chars()
        .filter(|c| *c != ',' && !c.is_whitespace())
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(CmdError::validation(format!("forced outcomes must be 0 or 1, got '{c}'"))),
        })
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub ignore_byproducts: bool,
    /// Attach the residual against the logical-wire oracle.
    pub oracle: bool,
}

pub fn run(file: &Path, outcomes: &Outcomes, opts: &RunOptions) -> Result<RunReport, CmdError> {
    let program = load(file)?;
    run_program(&program, &file.display().to_string(), outcomes, opts)
}

pub fn run_program(program: &Program, label: &str, outcomes: &Outcomes, opts: &RunOptions) -> Result<RunReport, CmdError> {
    let sched = program
        .ir
        .schedule()
        .map_err(|e| CmdError::validation(format!("{label}: {}: {}", e.code, e.message)))?;
    let (policy, seed, forced) = match outcomes {
        Outcomes::Seed(s) => (RngPolicy::Seeded(*s), Some(*s), None),
        Outcomes::Forced(bits) => (
            RngPolicy::Forced(bits.clone()),
            None,
            Some(bits.iter().map(|b| if *b == 1 { '1' } else { '0' }).collect()),
        ),
    };
    let exec = ExecOptions {
        ignore_byproducts: opts.ignore_byproducts,
    };
    let result = execute_schedule(&sched, &policy, exec).map_err(CmdError::runtime)?;
    let residual = if opts.oracle {
        let want = oracle(&sched).map_err(CmdError::runtime)?;
        let f = fidelity(&result.final_state, &want.final_state).map_err(CmdError::runtime)?;
        Some(OracleResidual {
            deficit: (1.0 - f).max(0.0),
            tv_distance: total_variation(&result.distribution, &want.distribution),
        })
    } else {
        None
    };
    let config = RunConfig {
        file: label.to_string(),
        seed,
        forced_outcomes: forced,
        ignore_byproducts: opts.ignore_byproducts,
    };
    Ok(RunReport::new(config, &sched, &result, residual))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyOutput {
    pub schema: &'static str,
    pub file: String,
    pub seeds: Vec<u64>,
    pub max_deficit: f64,
    pub max_tv_distance: f64,
    pub readout_bits: usize,
    pub deficit_tolerance: f64,
    pub tv_tolerance: f64,
    pub ignore_byproducts: bool,
    pub pass: bool,
}

/// Runs the circuit once per seed and compares every run with the circuit
/// compiled down to plain gates on its logical wires.
pub fn verify(file: &Path, seeds: &[u64], ignore_byproducts: bool) -> Result<VerifyOutput, CmdError> {
    let program = load(file)?;
    verify_program(&program, &file.display().to_string(), seeds, ignore_byproducts)
}

pub fn verify_program(program: &Program, label: &str, seeds: &[u64], ignore_byproducts: bool) -> Result<VerifyOutput, CmdError> {
    let rep = qsc_core::verify(&program.ir, seeds, ExecOptions { ignore_byproducts }).map_err(|e| match e {
        QscError::InvalidCircuit(m) => CmdError::validation(format!("{label}: {m}")),
        other => CmdError::runtime(other),
    })?;
    Ok(VerifyOutput {
        schema: VERIFY_SCHEMA,
        file: label.to_string(),
        seeds: rep.seeds,
        max_deficit: rep.max_deficit,
        max_tv_distance: rep.max_tv_distance,
        readout_bits: rep.readout_bits,
        deficit_tolerance: DEFICIT_TOL,
        tv_tolerance: TV_TOL,
        ignore_byproducts,
        pass: rep.max_deficit <= DEFICIT_TOL && rep.max_tv_distance <= TV_TOL,
    })
}

/// Seeds `base, base+1, …`.
pub fn seed_range(base: u64, count: u64) -> Vec<u64> {
    (0..count).map(|i| base.wrapping_add(i)).collect()
}

/// Canonical text of a circuit file.
pub fn fmt(file: &Path) -> Result<String, CmdError> {
    Ok(text::serialize(&load(file)?.ir))
}
