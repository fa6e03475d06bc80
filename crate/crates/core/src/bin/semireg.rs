use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use semireg::catalog::lookup;
use semireg::cli::{
    cmd_catalog, cmd_check, cmd_curvature, cmd_verify, exit_code_for_error, Outcome, RunOptions,
    EXIT_INPUT,
};
use semireg::config::resolve_spec;
use semireg::error::Error;

#[derive(Parser)]
#[command(name = "semireg", version, about = "Koszul-form geometry of degenerate metrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the metric (radical stationarity, semi-regular probe).
    Check(RunArgs),
    /// Riemann tables, oracle comparison and curvature symmetries.
    Curvature(RunArgs),
    /// Run every identity check with seeded random fields.
    Verify(RunArgs),
    /// List the built-in metrics and re-check their classifications.
    Catalog {
        /// Print one entry as a config file instead.
        #[arg(long)]
        show: Option<String>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long = "rank-tol", default_value_t = 1e-9)]
        rank_tol: f64,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Catalog name or config file path.
    spec: String,
    /// Relative residual tolerance.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Relative eigenvalue cutoff for the metric rank.
    #[arg(long = "rank-tol", default_value_t = 1e-9)]
    rank_tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Use N random points from the spec's box instead of its listed points.
    #[arg(long)]
    points: Option<usize>,
    /// Also write the report to this file.
    #[arg(long)]
    report: Option<PathBuf>,
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("semireg: {e}");
    ExitCode::from(exit_code_for_error(e) as u8)
}

fn run(args: RunArgs, cmd: fn(&semireg::MetricSpec, &RunOptions) -> semireg::Result<Outcome>) -> ExitCode {
    if !(args.tol > 0.0 && args.rank_tol > 0.0) {
        eprintln!("semireg: tolerances must be positive");
        return ExitCode::from(EXIT_INPUT as u8);
    }
    let spec = match resolve_spec(&args.spec) {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    let opts = RunOptions {
        tol: args.tol,
        rank_tol: args.rank_tol,
        seed: args.seed,
        points: args.points,
    };
    let outcome = match cmd(&spec, &opts) {
        Ok(o) => o,
        Err(e) => return fail(&e),
    };
    let text = outcome.report.render();
    print!("{text}");
    if let Some(path) = args.report {
        if let Err(source) = std::fs::write(&path, &text) {
            return fail(&Error::Io {
                path: path.display().to_string(),
                source,
            });
        }
    }
    ExitCode::from(outcome.exit_code as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Check(a) => run(a, cmd_check),
        Command::Curvature(a) => run(a, cmd_curvature),
        Command::Verify(a) => run(a, cmd_verify),
        Command::Catalog { show: Some(name), .. } => match lookup(&name) {
            Some(s) => {
                print!("{}", s.to_config_text());
                ExitCode::SUCCESS
            }
            None => fail(&Error::UnknownSpec(name)),
        },
        Command::Catalog { show: None, tol, rank_tol } => {
            let opts = RunOptions {
                tol,
                rank_tol,
                ..RunOptions::default()
            };
            match cmd_catalog(&opts) {
                Ok((text, code)) => {
                    print!("{text}");
                    ExitCode::from(code as u8)
                }
                Err(e) => fail(&e),
            }
        }
    }
}
