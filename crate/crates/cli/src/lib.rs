//! Front-end of the `rrsum` binary: distribution tables, metric sweeps,
//! Monte Carlo runs, validation reports and figure datasets.
//!
//! Every command resolves its flags into a [`RunSpec`], computes a
//! [`Table`] and writes it in the requested [`Format`]. Sweep points are
//! evaluated in parallel and emitted in sweep order, so the output only
//! depends on the resolved spec.

pub mod args;
mod commands;
mod error;
pub mod figures;
mod spec;
mod table;

pub use args::{run, Cli};
pub use commands::{
    run_dist, run_metrics, run_simulate, run_validate, DistRequest, ValidationReport, DKW_SAMPLES, VALIDATED_METRICS,
};
pub use error::{CliError, Result};
pub use spec::{parse_list, preset, Command, Range, RunSpec, Settings};
pub use table::{Cell, Format, Table};
