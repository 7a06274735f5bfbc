use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use netdiv::commands;
use netdiv::config::ModeName;
use netdiv::{CliResult, Overrides, RunConfig};

#[derive(Parser)]
#[command(name = "netdiv", version, about = "Structural-diversity search over regular clustered networks")]
struct Cli {
    /// Run configuration (JSON); defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed, overriding the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory, overriding the configuration.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeName>,
    /// Cell side and minimum mutation size for `--mode fixed`.
    #[arg(long, global = true)]
    fixed_size: Option<u32>,
    #[arg(long, global = true)]
    iterations: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the exact-mutation catalog and print its statistics.
    Catalog,
    /// Run the MapElite search and export the archive.
    Search,
    /// Compare the archives of several search runs.
    Compare {
        /// Search output directories; replaces `compare.inputs`.
        inputs: Vec<PathBuf>,
    },
    /// Locate contagion transitions on the most distant archived networks.
    Contagion {
        /// Search output directory; replaces `contagion.archive`.
        #[arg(long)]
        archive: Option<PathBuf>,
    },
    /// Re-check an exported edge list against the configured context.
    Validate { network: PathBuf },
}

fn run(cli: Cli) -> CliResult<()> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    cfg.apply(&Overrides {
        seed: cli.seed,
        out: cli.out,
        mode: cli.mode,
        fixed_size: cli.fixed_size,
        iterations: cli.iterations,
    });
    match cli.command {
        Command::Catalog => println!("{}", commands::cmd_catalog(&cfg)?),
        Command::Search => println!("{}", commands::cmd_search(&cfg)?),
        Command::Compare { inputs } => {
            if !inputs.is_empty() {
                cfg.compare.inputs = inputs;
            }
            print!("{}", commands::cmd_compare(&cfg)?);
        }
        Command::Contagion { archive } => {
            if archive.is_some() {
                cfg.contagion.archive = archive;
            }
            println!("{}", commands::cmd_contagion(&cfg)?);
        }
        Command::Validate { network } => {
            let report = commands::cmd_validate(&cfg, &network)?;
            println!("{report}");
            if !report.ok() {
                return Err(netdiv::CliError::runtime("network failed validation"));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
