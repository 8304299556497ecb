//! Resolved run parameters: flags override the config file, which
//! overrides the presets of the numerical setup.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use clap::Args;
use rrsum::linkmetrics::{LinkScenario, ModulationScheme, PathLossModel};
use rrsum::mcsim::{McConfig, MIN_SAMPLES};
use rrsum::sumdist::{NakagamiParams, SumDistribution};
use serde::Deserialize;

use crate::error::{CliError, Result};
use crate::table::Format;

/// Inclusive, evenly spaced sweep written `start:stop:count`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Range {
    pub fn new(start: f64, stop: f64, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(CliError::Usage("empty range".into()));
        }
        if !(start.is_finite() && stop.is_finite()) || stop < start || (count == 1 && stop != start) {
            return Err(CliError::Usage(format!("range {start}:{stop}:{count} is not ordered")));
        }
        Ok(Range { start, stop, count })
    }

    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count).map(|i| self.start + step * i as f64).collect()
    }
}

impl FromStr for Range {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || CliError::Usage(format!("expected start:stop:count, got '{s}'"));
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, n] = parts[..] else { return Err(bad()) };
        Range::new(
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
            n.trim().parse().map_err(|_| bad())?,
        )
    }
}

/// Comma-separated list, e.g. `32,64,128`.
pub fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>> {
    let items: Vec<T> = s
        .split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("bad list item '{x}' in '{s}'")))
        })
        .collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(CliError::Usage("empty list".into()));
    }
    Ok(items)
}

/// Every setting a command may read. `None` means "not given here".
#[derive(Clone, Debug, Default, Deserialize, PartialEq, Args)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Settings {
    #[arg(long)]
    pub m1: Option<u32>,
    #[arg(long)]
    pub m2: Option<u32>,
    #[arg(long)]
    pub omega1: Option<f64>,
    #[arg(long)]
    pub omega2: Option<f64>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub n_list: Option<String>,
    #[arg(long)]
    pub c0_db: Option<f64>,
    #[arg(long)]
    pub d0: Option<f64>,
    #[arg(long)]
    pub d1: Option<f64>,
    #[arg(long)]
    pub d2: Option<f64>,
    #[arg(long)]
    pub alpha1: Option<f64>,
    #[arg(long)]
    pub alpha2: Option<f64>,
    #[arg(long)]
    pub w: Option<f64>,
    #[arg(long)]
    pub d: Option<f64>,
    #[arg(long)]
    pub gamma_t_db: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma_t_db_range: Option<String>,
    #[arg(long)]
    pub gamma_thr_db: Option<f64>,
    #[arg(long)]
    pub bandwidth: Option<f64>,
    #[serde(rename = "mod")]
    #[arg(long = "mod")]
    pub modulation: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub chunk_size: Option<usize>,
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

macro_rules! overlay {
    ($hi:expr, $lo:expr, $($field:ident),*) => {
        Settings { $($field: $hi.$field.or($lo.$field),)* }
    };
}

impl Settings {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::Config {
            path: path.to_owned(),
            message: e.to_string(),
        })
    }

    /// Fields of `self` win; gaps are filled from `lower`.
    pub fn over(self, lower: Settings) -> Settings {
        overlay!(
            self,
            lower,
            m1,
            m2,
            omega1,
            omega2,
            n,
            n_list,
            c0_db,
            d0,
            d1,
            d2,
            alpha1,
            alpha2,
            w,
            d,
            gamma_t_db,
            gamma_t_db_range,
            gamma_thr_db,
            bandwidth,
            modulation,
            seed,
            samples,
            chunk_size,
            format,
            out
        )
    }
}

/// Presets of the numerical setup.
pub mod preset {
    pub const M1: u32 = 3;
    pub const M2: u32 = 1;
    pub const N: u32 = 32;
    pub const C0_DB: f64 = -30.0;
    pub const D0: f64 = 1.0;
    pub const D1: f64 = 25.0;
    pub const D2: f64 = 5.0;
    pub const D: f64 = 30.0;
    pub const ALPHA1: f64 = 2.8;
    pub const ALPHA2: f64 = 2.2;
    pub const GAMMA_T_DB: f64 = 110.0;
    pub const GAMMA_THR_DB: f64 = 0.0;
    pub const SAMPLES: usize = 1_000_000;
    pub const SEED: u64 = 1;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Dist,
    Metrics,
    Simulate,
    Validate,
    Figures,
}

/// One fully resolved invocation.
#[derive(Clone, Debug)]
pub struct RunSpec {
    pub command: Command,
    pub link1: NakagamiParams,
    pub link2: NakagamiParams,
    pub n_list: Vec<u32>,
    pub loss: PathLossModel,
    pub gamma_t_db: Vec<f64>,
    pub gamma_thr_db: f64,
    pub bandwidth: f64,
    pub modulation: ModulationScheme,
    pub mc: McConfig,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl RunSpec {
    pub fn resolve(command: Command, s: &Settings) -> Result<Self> {
        let link1 = NakagamiParams::new(s.m1.unwrap_or(preset::M1), s.omega1.unwrap_or(1.0))?;
        let link2 = NakagamiParams::new(s.m2.unwrap_or(preset::M2), s.omega2.unwrap_or(1.0))?;
        let n_list = match (&s.n_list, s.n) {
            (Some(_), Some(_)) => return Err(CliError::Usage("give --n or --n-list, not both".into())),
            (Some(list), None) => parse_list(list)?,
            (None, n) => vec![n.unwrap_or(preset::N)],
        };
        if n_list.contains(&0) {
            return Err(CliError::Usage("N must be at least 1".into()));
        }
        let c0 = s.c0_db.unwrap_or(preset::C0_DB);
        let d0 = s.d0.unwrap_or(preset::D0);
        let (a1, a2) = (s.alpha1.unwrap_or(preset::ALPHA1), s.alpha2.unwrap_or(preset::ALPHA2));
        let loss = match s.w {
            Some(w) => {
                if s.d1.is_some() || s.d2.is_some() {
                    return Err(CliError::Usage("give --w/--d or --d1/--d2, not both".into()));
                }
                PathLossModel::on_path(c0, d0, s.d.unwrap_or(preset::D), w, a1, a2)?
            }
            None => PathLossModel::new(c0, d0, s.d1.unwrap_or(preset::D1), s.d2.unwrap_or(preset::D2), a1, a2)?,
        };
        let gamma_t_db = match (&s.gamma_t_db_range, s.gamma_t_db) {
            (Some(_), Some(_)) => {
                return Err(CliError::Usage(
                    "give --gamma-t-db or --gamma-t-db-range, not both".into(),
                ))
            }
            (Some(r), None) => r.parse::<Range>()?.points(),
            (None, g) => vec![g.unwrap_or(preset::GAMMA_T_DB)],
        };
        let samples = s.samples.unwrap_or(preset::SAMPLES);
        if samples < MIN_SAMPLES {
            return Err(CliError::Usage(format!(
                "--samples {samples} is below {MIN_SAMPLES}, the floor for valid confidence intervals"
            )));
        }
        let mut mc = McConfig::new(s.seed.unwrap_or(preset::SEED), samples)?;
        if let Some(c) = s.chunk_size {
            mc = mc.with_chunk_size(c)?;
        }
        let default_format = if command == Command::Validate { "json" } else { "dat" };
        Ok(RunSpec {
            command,
            link1,
            link2,
            n_list,
            loss,
            gamma_t_db,
            gamma_thr_db: s.gamma_thr_db.unwrap_or(preset::GAMMA_THR_DB),
            bandwidth: s.bandwidth.unwrap_or(1.0),
            modulation: ModulationScheme::parse(s.modulation.as_deref().unwrap_or("bpsk"))?,
            mc,
            format: s.format.as_deref().unwrap_or(default_format).parse()?,
            out: s.out.clone(),
        })
    }

    pub fn distribution(&self, n: u32) -> Result<SumDistribution> {
        Ok(SumDistribution::build(self.link1, self.link2, n)?)
    }

    pub fn scenario(&self, dist: Arc<SumDistribution>, gamma_t_db: f64) -> Result<LinkScenario> {
        Ok(LinkScenario::new(
            dist,
            self.loss,
            gamma_t_db,
            self.gamma_thr_db,
            self.bandwidth,
        )?)
    }
}
