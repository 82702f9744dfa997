//! `edgesheet`: verify catalog geometry, evolve strings with massive ends,
//! scan equilibrium parameters.

mod evolve;
mod output;
mod scan;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Validation or usage failure; exits with status 2.
#[derive(Debug)]
pub struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

#[derive(Parser)]
#[command(name = "edgesheet", version, about = "Relativistic strings and membranes with massive edges")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
pub struct Common {
    /// Directory for CSV outputs and the run manifest.
    #[arg(long, default_value = "edgesheet-out")]
    pub out_dir: PathBuf,
    /// Overwrite a previous run in the output directory.
    #[arg(long)]
    pub force: bool,
    /// Worker threads for scans (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Reserved; no command draws random numbers.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate geometric, integrability and boundary residuals on catalog entries.
    Verify {
        /// Catalog selectors such as `plane` or `helicoid:omega=0.5,R=1`; all entries if omitted.
        #[arg(long, num_args = 1.., conflicts_with = "config")]
        entries: Vec<String>,
        /// Integrability residual tolerance.
        #[arg(long, conflicts_with = "config")]
        tol: Option<f64>,
        /// JSON verify spec.
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Evolve a string with massive endpoints.
    Evolve {
        /// JSON simulation config.
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Sweep a parameter and tabulate the result.
    Scan {
        #[arg(long, value_enum, required_unless_present = "config")]
        kind: Option<scan::ScanKind>,
        #[arg(long, allow_negative_numbers = true, required_unless_present = "config")]
        from: Option<f64>,
        #[arg(long, allow_negative_numbers = true, required_unless_present = "config")]
        to: Option<f64>,
        #[arg(long, required_unless_present = "config")]
        steps: Option<usize>,
        #[arg(long)]
        mu0: Option<f64>,
        #[arg(long)]
        mub: Option<f64>,
        /// Orbit radius.
        #[arg(long)]
        radius: Option<f64>,
        /// JSON scan spec.
        #[arg(long, conflicts_with_all = ["kind", "from", "to", "steps", "mu0", "mub", "radius"])]
        config: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

fn dispatch(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Verify { entries, tol, config, common } => {
            let spec = match config {
                Some(path) => output::read_config(&path)?,
                None => verify::VerifySpec::from_flags(entries, tol),
            };
            verify::run(spec, &common)
        }
        Command::Evolve { config, common } => evolve::run(output::read_config(&config)?, &common),
        Command::Scan { kind, from, to, steps, mu0, mub, radius, config, common } => {
            let spec = match config {
                Some(path) => output::read_config(&path)?,
                None => scan::ScanSpec::from_flags(scan::ScanFlags {
                    kind: kind.expect("required by clap"),
                    from: from.expect("required by clap"),
                    to: to.expect("required by clap"),
                    steps: steps.expect("required by clap"),
                    mu0,
                    mub,
                    radius,
                }),
            };
            scan::run(spec, &common)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) if e.downcast_ref::<Usage>().is_some() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
