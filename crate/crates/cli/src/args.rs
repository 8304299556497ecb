//! Flag definitions and dispatch.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::commands::{run_dist, run_metrics, run_simulate, run_validate, DistRequest};
use crate::error::{CliError, Result};
use crate::figures::run_figures;
use crate::spec::{parse_list, Command, Range, RunSpec, Settings};
use crate::table::Table;

#[derive(Debug, Parser)]
#[command(
    name = "rrsum",
    version,
    about = "Sum of double-Nakagami-m vectors and RRS link metrics"
)]
pub struct Cli {
    /// TOML file of settings; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// PDF/CDF, moments or characteristic function of |H|.
    #[command(allow_negative_numbers = true)]
    Dist {
        #[command(flatten)]
        settings: Settings,
        /// Radii, e.g. `0,1`.
        #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["r_range", "orders", "t_range"])]
        r: Option<String>,
        /// Radii as start:stop:count.
        #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["orders", "t_range"])]
        r_range: Option<String>,
        /// Moment orders, e.g. `0,1,2,3,4`.
        #[arg(long, conflicts_with = "t_range")]
        orders: Option<String>,
        /// Characteristic-function arguments as start:stop:count.
        #[arg(long, allow_hyphen_values = true)]
        t_range: Option<String>,
    },
    /// Analytic link metrics over N and gamma_t.
    #[command(allow_negative_numbers = true)]
    Metrics {
        #[command(flatten)]
        settings: Settings,
    },
    /// Monte Carlo estimates of the link metrics.
    #[command(allow_negative_numbers = true)]
    Simulate {
        #[command(flatten)]
        settings: Settings,
    },
    /// Analytic-vs-Monte-Carlo report; exits 1 if any row fails.
    #[command(allow_negative_numbers = true)]
    Validate {
        #[command(flatten)]
        settings: Settings,
        /// (m1, m2) grid, e.g. `3:1,1:1`.
        #[arg(long, default_value = "3:1,1:1")]
        pairs: String,
    },
    /// Datasets of the six figures under a directory.
    Figures {
        #[arg(long, default_value = "figures")]
        out: PathBuf,
    },
}

fn parse_pairs(s: &str) -> Result<Vec<(u32, u32)>> {
    parse_list::<String>(s)?
        .iter()
        .map(|p| {
            let bad = || CliError::Usage(format!("expected m1:m2, got '{p}'"));
            let (a, b) = p.split_once(':').ok_or_else(bad)?;
            Ok((
                a.trim().parse().map_err(|_| bad())?,
                b.trim().parse().map_err(|_| bad())?,
            ))
        })
        .collect()
}

fn resolve(command: Command, flags: &Settings, config: Option<&PathBuf>) -> Result<RunSpec> {
    let merged = match config {
        Some(path) => flags.clone().over(Settings::from_file(path)?),
        None => flags.clone(),
    };
    RunSpec::resolve(command, &merged)
}

fn emit(spec: &RunSpec, table: &Table) -> Result<()> {
    match &spec.out {
        Some(path) => table.write(path, spec.format),
        None => {
            print!("{}", table.render(spec.format)?);
            Ok(())
        }
    }
}

fn dispatch(cli: &Cli) -> Result<bool> {
    let config = cli.config.as_ref();
    match &cli.command {
        Sub::Dist {
            settings,
            r,
            r_range,
            orders,
            t_range,
        } => {
            let spec = resolve(Command::Dist, settings, config)?;
            let request = match (r, r_range, orders, t_range) {
                (Some(list), ..) => DistRequest::Density(Some(parse_list(list)?)),
                (_, Some(range), ..) => DistRequest::Density(Some(range.parse::<Range>()?.points())),
                (.., Some(list), _) => DistRequest::Moments(parse_list(list)?),
                (.., Some(range)) => DistRequest::CharFn(range.parse::<Range>()?.points()),
                _ => DistRequest::Density(None),
            };
            emit(&spec, &run_dist(&spec, &request)?)?;
            Ok(true)
        }
        Sub::Metrics { settings } => {
            let spec = resolve(Command::Metrics, settings, config)?;
            emit(&spec, &run_metrics(&spec)?)?;
            Ok(true)
        }
        Sub::Simulate { settings } => {
            let spec = resolve(Command::Simulate, settings, config)?;
            emit(&spec, &run_simulate(&spec)?)?;
            Ok(true)
        }
        Sub::Validate { settings, pairs } => {
            let spec = resolve(Command::Validate, settings, config)?;
            let report = run_validate(&spec, &parse_pairs(pairs)?)?;
            emit(&spec, &report.table)?;
            Ok(report.passed)
        }
        Sub::Figures { out } => {
            for path in run_figures(out)? {
                eprintln!("wrote {}", path.display());
            }
            Ok(true)
        }
    }
}

/// Runs a parsed command line; `Ok(false)` means a validation failure.
pub fn run(cli: &Cli) -> Result<bool> {
    match cli.threads {
        Some(0) => Err(CliError::Usage("--threads must be positive".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))?
            .install(|| dispatch(cli)),
        None => dispatch(cli),
    }
}
