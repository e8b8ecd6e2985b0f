//! `ricker`: simulate, factor, map, scan and verify the periodically forced
//! second-order Ricker equation `x_{n+1} = x_{n-1} e^{a_n - x_{n-1} - x_n}`.

mod commands;
mod config;
mod error;
mod output;

use clap::{Parser, Subcommand};

use config::Options;

#[derive(Parser)]
#[command(name = "ricker", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Iterate orbits and write one CSV per initial pair.
    Simulate(Options),
    /// Classify the factor sequence t_n and tabulate it.
    Factor(Options),
    /// Sample the return map and locate its periodic points.
    Map(Options),
    /// Detect the attractor reached from each cell of an initial-value grid.
    Scan(Options),
    /// Run the reproduction criteria.
    Verify(Options),
}

fn main() {
    let cli = Cli::parse();
    let run =
        |o: Options, f: fn(&Options) -> Result<(), error::CliError>| o.merged().and_then(|o| f(&o));
    let result = match cli.command {
        Command::Simulate(o) => run(o, commands::simulate),
        Command::Factor(o) => run(o, commands::factor),
        Command::Map(o) => run(o, commands::map),
        Command::Scan(o) => run(o, commands::scan),
        Command::Verify(o) => run(o, commands::verify),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
