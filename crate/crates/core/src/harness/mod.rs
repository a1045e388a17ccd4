//! Command-line experiments: configuration, orchestration and output files.
//!
//! Every command reads one JSON config, writes CSV and JSON files into an
//! output directory and stamps each file with the tool version, a hash of the
//! config and the seed. Identical inputs produce byte-identical outputs.

pub mod commands;
pub mod config;
pub mod output;

use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Learn,
    Qre,
    Portrait,
    Bifurcate,
    Fig2,
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "simulate" => Command::Simulate,
            "learn" => Command::Learn,
            "qre" => Command::Qre,
            "portrait" => Command::Portrait,
            "bifurcate" => Command::Bifurcate,
            "fig2" => Command::Fig2,
            _ => return Err(format!("unknown command `{s}`")),
        })
    }
}

/// Options shared by every command.
#[derive(Clone, Debug)]
pub struct RunContext {
    pub out_dir: PathBuf,
    /// Overrides the config's seed.
    pub seed: Option<u64>,
    /// Re-verify results against an independent computation.
    pub check: bool,
    /// Allow strategy-based learning at `T = 0`.
    pub unsafe_zero_temperature: bool,
}

impl RunContext {
    pub fn new(out_dir: impl Into<PathBuf>) -> Self {
        RunContext {
            out_dir: out_dir.into(),
            seed: None,
            check: false,
            unsafe_zero_temperature: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub files: Vec<PathBuf>,
    /// `Some(true)` when `--check` ran and passed.
    pub check_passed: Option<bool>,
}

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("{context}: {source}")]
    Lib {
        context: String,
        #[source]
        source: Error,
    },
    #[error("check failed: {0}")]
    Check(String),
}

impl HarnessError {
    /// 1 for configuration problems, 2 for numerical failures, 3 for failed checks.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Check(_) => 3,
            HarnessError::Lib { source, .. } => match source {
                Error::Numerical { .. }
                | Error::Integration { .. }
                | Error::SimplexViolation { .. } => 2,
                _ => 1,
            },
        }
    }
}

/// Runs `command` on the config file at `config`.
pub fn run(command: Command, config: &Path, ctx: &RunContext) -> Result<Report, HarnessError> {
    match command {
        Command::Simulate => commands::simulate(config, ctx),
        Command::Learn => commands::learn(config, ctx),
        Command::Qre => commands::qre(config, ctx),
        Command::Portrait => commands::portrait(config, ctx),
        Command::Bifurcate => commands::bifurcate(config, ctx),
        Command::Fig2 => commands::fig2(config, ctx),
    }
}
