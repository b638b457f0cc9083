//! `aqolab`: generate instances, reduce them, scan spectral gaps, simulate
//! sweeps and compare Hamiltonians. Every command writes its resolved
//! configuration next to its outputs.

mod compare;
mod generate;
mod output;
mod reduce;
mod scan;
mod system;

use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use output::Outputs;

#[derive(Debug, Parser)]
#[command(name = "aqolab", version, about = "Adiabatic optimization experiments on Exact Cover, 3SAT and MIS")]
struct Cli {
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Overwrite existing outputs.
    #[arg(long, global = true)]
    force: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write random instances and a manifest of their seeds.
    Generate(generate::GenerateArgs),
    /// Reduce an instance; writes the reduced instance and a mapping file.
    Reduce(reduce::ReduceArgs),
    /// Map a reduced solution back through a mapping file.
    Decode(reduce::DecodeArgs),
    /// Scan the two lowest levels of H(s) over s in [0, 1].
    Scan(scan::ScanCmd),
    /// Simulate the sweep for one or more total times.
    Evolve(scan::EvolveCmd),
    /// Scan ham A and ham C for every instance in a directory.
    Compare(compare::CompareCmd),
}

fn run(cli: Cli) -> Result<usize> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global().context("configuring the worker pool")?;
    }
    let out = Outputs { force: cli.force };
    match &cli.command {
        Command::Generate(args) => generate::run(args, out),
        Command::Reduce(args) => reduce::reduce(args, out).map(|_| 0),
        Command::Decode(args) => reduce::decode(args, out).map(|_| 0),
        Command::Scan(args) => scan::scan(args, out).map(|_| 0),
        Command::Evolve(args) => scan::evolve(args, out).map(|_| 0),
        Command::Compare(args) => {
            let failed = compare::compare(args, out)?;
            if failed > 0 && !args.strict {
                eprintln!("{failed} instance(s) failed; see the errors file");
                return Ok(0);
            }
            Ok(failed)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(failed) => {
            eprintln!("error: {failed} item(s) failed");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
