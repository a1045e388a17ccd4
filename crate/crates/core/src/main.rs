use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use entrodyn::harness::{run, Command, RunContext};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Sub {
    Simulate,
    Learn,
    Qre,
    Portrait,
    Bifurcate,
    Fig2,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Self {
        match s {
            Sub::Simulate => Command::Simulate,
            Sub::Learn => Command::Learn,
            Sub::Qre => Command::Qre,
            Sub::Portrait => Command::Portrait,
            Sub::Bifurcate => Command::Bifurcate,
            Sub::Fig2 => Command::Fig2,
        }
    }
}

/// Entropy-driven game dynamics, QRE and payoff-based learning experiments.
#[derive(Debug, Parser)]
#[command(name = "entrodyn", version)]
struct Cli {
    #[arg(value_enum)]
    command: Sub,
    /// JSON config file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Master seed, overriding the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Cross-check results against an independent computation.
    #[arg(long)]
    check: bool,
    /// Allow strategy-based learning at T = 0, where it need not converge.
    #[arg(long)]
    unsafe_zero_temperature: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let ctx = RunContext {
        out_dir: cli.out,
        seed: cli.seed,
        check: cli.check,
        unsafe_zero_temperature: cli.unsafe_zero_temperature,
    };
    match run(cli.command.into(), &cli.config, &ctx) {
        Ok(report) => {
            for f in &report.files {
                println!("{}", f.display());
            }
            if report.check_passed == Some(true) {
                println!("check passed");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("entrodyn: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
