use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bsd_kuramoto::check::{check, CheckKind};
use bsd_kuramoto::info::{info, sample, SampleRegion};
use bsd_kuramoto::run::{run, RunOptions};
use bsd_kuramoto::CliError;

/// Kuramoto models on the BS boundaries of classical bounded symmetric domains.
#[derive(Parser)]
#[command(name = "bsd-kuramoto", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a scenario and write its CSV series (and optional snapshots).
    Run {
        file: PathBuf,
        /// Overwrite existing output files.
        #[arg(long)]
        force: bool,
        /// Also write a gnuplot script next to the CSV.
        #[arg(long)]
        gnuplot_stub: bool,
    },
    /// Compare a scenario against an independent oracle.
    Check {
        #[arg(value_enum)]
        kind: CheckKind,
        file: PathBuf,
    },
    /// Group, BS boundary, dimensions and family chain of a domain.
    Info { kind: String, m: usize, n: usize },
    /// Print seeded random points of a domain as JSON matrices, one per line.
    Sample {
        kind: String,
        m: usize,
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        region: Region,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Region {
    #[arg(long)]
    boundary: bool,
    #[arg(long)]
    interior: bool,
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        Command::Run {
            file,
            force,
            gnuplot_stub,
        } => run(&file, RunOptions { force, gnuplot_stub }, out),
        Command::Check { kind, file } => check(kind, &file, out),
        Command::Info { kind, m, n } => info(&kind, m, n, out),
        Command::Sample {
            kind,
            m,
            n,
            seed,
            region,
            count,
        } => {
            let region = if region.boundary {
                SampleRegion::Boundary
            } else {
                SampleRegion::Interior
            };
            sample(&kind, m, n, seed, region, count, out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let result = dispatch(cli.command, &mut out).and_then(|()| Ok(out.flush()?));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
