use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use workbench_cli::config::{PartialConfig, RunConfig, ThetaField};
use workbench_cli::report::{write_atomic, Report};
use workbench_cli::suites::{Runner, Suite};
use workbench_cli::CliError;

#[derive(Parser)]
#[command(name = "workbench", version, about = "Numerical checks for open spin-s XXX chains with non-diagonal boundaries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run algebraic and spectral checks.
    Check {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        #[command(flatten)]
        common: Common,
    },
    /// Eigenvalues of the transfer matrix at a reference point.
    Spectrum {
        #[command(flatten)]
        common: Common,
    },
    /// Bethe roots and Bethe states for every eigenvalue.
    Bethe {
        #[command(flatten)]
        common: Common,
    },
    /// Separated-variables basis diagnostics.
    Sov {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Common {
    /// Site spin: 1/2, 1 or 3/2.
    #[arg(long)]
    spin: Option<String>,
    #[arg(long)]
    sites: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    eta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    p: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    q: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    xi: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    varsigma: Option<String>,
    /// Comma-separated inhomogeneities, or `zero`.
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<String>,
    /// Number of T-Q sample points (0 picks a default).
    #[arg(long)]
    samples: Option<usize>,
    /// Overrides every check tolerance.
    #[arg(long, allow_hyphen_values = true)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// JSON file with the same keys; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

impl Common {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        let flags = PartialConfig {
            spin: self.spin.clone(),
            sites: self.sites,
            eta: self.eta.clone(),
            p: self.p.clone(),
            q: self.q.clone(),
            xi: self.xi.clone(),
            varsigma: self.varsigma.clone(),
            theta: self.theta.clone().map(ThetaField::Text),
            samples: self.samples,
            tol: self.tol,
            seed: self.seed,
        };
        let merged = match &self.config {
            Some(path) => flags.over(PartialConfig::from_file(path)?),
            None => flags,
        };
        RunConfig::resolve(merged)
    }

    fn emit(&self, report: &Report, bethe_table: bool) -> Result<(), CliError> {
        let text = match self.format {
            Format::Json => report.to_json()?,
            Format::Csv => report.to_csv(bethe_table)?,
        };
        match &self.out {
            Some(path) => write_atomic(path, &text),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn sov_report(runner: &mut Runner, report: &mut Report) -> Result<(), CliError> {
    runner.run(Suite::Sov, report)?;
    runner.run(Suite::Scalar, report)
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let (common, bethe_table) = match &cli.command {
        Command::Check { common, .. } | Command::Spectrum { common } | Command::Sov { common } => (common, false),
        Command::Bethe { common } => (common, true),
    };
    let cfg = common.resolve()?;
    let mut report = Report::new(cfg.echo());
    let mut runner = Runner::new(&cfg)?;
    match &cli.command {
        Command::Check { suite, .. } => runner.run(*suite, &mut report)?,
        Command::Spectrum { .. } => runner.run_spectrum(&mut report)?,
        Command::Bethe { .. } => runner.run_bethe(&mut report)?,
        Command::Sov { .. } => sov_report(&mut runner, &mut report)?,
    }
    for note in runner.notes() {
        eprintln!("note: {note}");
    }
    common.emit(&report, bethe_table)?;
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
