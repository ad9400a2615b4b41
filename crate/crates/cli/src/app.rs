//! Command-line parsing and process exit codes.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::{RunConfig, Scenario};
use crate::scenarios::{run, RunOptions};
use crate::{list_checks, CliError};

#[derive(Debug, Parser)]
#[command(
    name = "sigma-forge",
    version,
    about = "Numerical checks for the first-order and dual formulations of the principal sigma model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Structure constants, representation and trace form.
    Validate(RunArgs),
    /// Dual structure constants and the doubled algebra.
    Dualize(RunArgs),
    /// Field-equation identities on random smooth fields.
    Identities(RunArgs),
    /// Evolve the 1+1 dimensional model and check the solution.
    Simulate(RunArgs),
    /// Fitted convergence orders over refinement levels.
    Convergence(RunArgs),
    /// Print the check catalog.
    ListChecks {
        /// Emit JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Run configuration (TOML, or JSON with a `.json` extension).
    #[arg(long)]
    config: PathBuf,
    /// Where to write the JSON report; stdout when absent.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Directory for field dumps and time series.
    #[arg(long)]
    dump_fields: Option<PathBuf>,
    /// Overrides the seed in the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Suppress the per-check summary on stderr.
    #[arg(long, short)]
    quiet: bool,
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn execute(scenario: Scenario, args: RunArgs) -> Result<bool, CliError> {
    let mut cfg = RunConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    // paths inside the config are relative to the config file
    let base = args
        .config
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_default();
    let report_path = args
        .report
        .or_else(|| cfg.output.report.as_ref().map(|p| resolve(&base, p)));
    let dump_dir = args
        .dump_fields
        .or_else(|| cfg.output.dump_fields.as_ref().map(|p| resolve(&base, p)));
    let report = run(
        cfg,
        &RunOptions {
            scenario,
            base_dir: base,
            dump_dir,
        },
    )?;
    let json = report.to_json();
    match report_path {
        Some(path) => std::fs::write(path, json)?,
        None => print!("{json}"),
    }
    if !args.quiet {
        eprint!("{}", report.summary());
    }
    Ok(report.pass)
}

fn print_catalog(json: bool) {
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(list_checks()).expect("catalog serialises")
        );
        return;
    }
    for c in list_checks() {
        println!(
            "{:<32} {:<11} {:<44} {}",
            c.name,
            c.scenario.as_str(),
            format!("{:?}", c.default),
            c.tag
        );
    }
}

/// Runs the command line and returns the process exit status: 0 pass,
/// 1 check failure, 2 configuration error, 3 numerical abort.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let (scenario, args) = match cli.command {
        Command::ListChecks { json } => {
            print_catalog(json);
            return 0;
        }
        Command::Validate(a) => (Scenario::Validate, a),
        Command::Dualize(a) => (Scenario::Dualize, a),
        Command::Identities(a) => (Scenario::Identities, a),
        Command::Simulate(a) => (Scenario::Simulate, a),
        Command::Convergence(a) => (Scenario::Convergence, a),
    };
    match execute(scenario, args) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
