//! Config-driven verification runs for quadratic CR manifolds and Siegel
//! domains.
//!
//! Exit codes: 0 on success, 1 when violations are detected (inverted by
//! `--expect-violation`), 2 on config parse errors, 3 on precondition
//! failures such as unknown domain keys or invalid sampler inputs.

mod runs;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use quadric::config::{DomainSelector, ExperimentConfig};
use quadric::hardy::Exponent;

use runs::{Failure, OutputFormat};

#[derive(Parser)]
#[command(
    name = "quadric",
    version,
    about = "Verification runs for quadratic CR manifolds and Siegel domains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct RunArgs {
    /// Path to a TOML or JSON experiment config (defaults to the built-in
    /// Heisenberg configuration).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Domain key override, e.g. "heisenberg(2)" or "ex1(C,2,1,2)".
    #[arg(long)]
    domain: Option<String>,
    /// Sampler seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Sample count override.
    #[arg(long)]
    samples: Option<u64>,
    /// Directory for report files; omitted reports go to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Invert the exit status: succeed only when violations are found.
    #[arg(long)]
    expect_violation: bool,
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Worker threads for sampling (0 keeps the library default).
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate slice norms on a height grid and flag monotonicity violations.
    VerifyMonotonicity(RunArgs),
    /// Check boundary flatness and sub-mean-value bounds for random analytic
    /// discs.
    DiscCheck(RunArgs),
    /// Audit cone membership certificates on randomized inputs.
    ConeReport(RunArgs),
    /// Compare the global supremum of slice norms with the small-height
    /// estimate.
    CorollaryCheck(RunArgs),
    /// Print the built-in domain catalog as JSON.
    ExampleCatalog {
        /// Directory for the catalog file; omitted output goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn default_config() -> ExperimentConfig {
    ExperimentConfig {
        domain: DomainSelector::Key("heisenberg(1)".to_string()),
        function: Default::default(),
        p: vec![Exponent::Finite(2.0)],
        grid: Default::default(),
        sampler: Default::default(),
        corollary: Default::default(),
        disc: Default::default(),
        cone: Default::default(),
        expect_violation: false,
    }
}

fn load_config(args: &RunArgs) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => default_config(),
    };
    if let Some(domain) = &args.domain {
        cfg.domain = DomainSelector::Key(domain.clone());
    }
    if let Some(seed) = args.seed {
        cfg.sampler.seed = seed;
    }
    if let Some(samples) = args.samples {
        cfg.sampler.samples = samples;
    }
    if args.expect_violation {
        cfg.expect_violation = true;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() {
    let cli = Cli::parse();
    std::process::exit(run(&cli));
}

fn run(cli: &Cli) -> i32 {
    let args = match &cli.command {
        Command::VerifyMonotonicity(a)
        | Command::DiscCheck(a)
        | Command::ConeReport(a)
        | Command::CorollaryCheck(a) => a,
        Command::ExampleCatalog { out } => {
            return finish(runs::example_catalog(out.as_deref()), false);
        }
    };
    if args.workers > 0 {
        // Ignore the error from a pool that is already initialized; the run
        // then proceeds on the existing pool.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(args.workers)
            .build_global();
    }
    let cfg = match load_config(args) {
        Ok(cfg) => cfg,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            return failure.code;
        }
    };
    let format = match args.format {
        Format::Csv => OutputFormat::Csv,
        Format::Json => OutputFormat::Json,
    };
    let out = args.out.as_deref();
    let result = match &cli.command {
        Command::VerifyMonotonicity(_) => runs::verify_monotonicity(&cfg, out, format),
        Command::DiscCheck(_) => runs::disc_check(&cfg, out, format),
        Command::ConeReport(_) => runs::cone_report(&cfg, out, format),
        Command::CorollaryCheck(_) => runs::corollary_check(&cfg, out, format),
        Command::ExampleCatalog { .. } => unreachable!("handled above"),
    };
    finish(result, cfg.expect_violation)
}

fn finish(result: Result<runs::Outcome, Failure>, expect_violation: bool) -> i32 {
    match result {
        Ok(outcome) => {
            eprintln!("{}", outcome.summary);
            let pass = if expect_violation {
                outcome.violations > 0
            } else {
                outcome.violations == 0
            };
            if pass {
                0
            } else {
                if expect_violation {
                    eprintln!("expected violations, found none");
                }
                1
            }
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            failure.code
        }
    }
}
