use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pa_clt::asymptotics::Clock;
use pa_clt::stats::Centering;
use pa_clt::verify::Fault;

mod commands;
mod config;
mod error;

use config::{CommonArgs, ExperimentConfig};
use error::CliResult;

/// Preferential attachment experiments: degree counts, covariance of their
/// fluctuations, figure data and the property suite.
#[derive(Debug, Parser)]
#[command(name = "pa-clt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Grow one graph and write its degree counts.
    Simulate(CommonArgs),
    /// Empirical covariance of the fluctuations against the limit.
    Covariance(CommonArgs),
    /// Plot data and a gnuplot script for figure 1, 2, 3 or 4.
    Figures {
        which: u32,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run the property suite; exits with status 1 if any check fails.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<FaultArg>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FaultArg {
    RzSignFlip,
}

fn defaults(steps: usize, reps: usize, kmax: usize) -> ExperimentConfig {
    ExperimentConfig {
        m: 1,
        delta: 0.0,
        steps,
        reps,
        kmax,
        seed: 1,
        centering: Centering::ExactMean,
        clock: Clock::Draw,
        workers: 0,
        out: None,
    }
}

fn run(cli: Cli) -> CliResult<bool> {
    match cli.command {
        Command::Simulate(args) => {
            commands::cmd_simulate(&args.resolve(defaults(10_000, 1, 20))?)?;
        }
        Command::Covariance(args) => {
            commands::cmd_covariance(&args.resolve(defaults(5000, 10_000, 10))?)?;
        }
        Command::Figures { which, common } => {
            let mut d = defaults(5000, 10_000, if which == 4 { 10 } else { 20 });
            d.out = Some(PathBuf::from(format!("fig{which}")));
            for path in commands::cmd_figures(which, &common.resolve(d)?)? {
                eprintln!("wrote {}", path.display());
            }
        }
        Command::Verify { common, inject_fault } => {
            let single = common.names_parameters()?;
            let fault = inject_fault.map(|FaultArg::RzSignFlip| Fault::RzSignFlip);
            return commands::cmd_verify(&common.resolve(defaults(2000, 4, 10))?, single, fault);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
