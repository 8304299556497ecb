//! Datasets of the six published figures, one two-column `.dat` per curve.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use rrsum::linkmetrics::{
    aof, average_received_snr, bep, cqei, ergodic_capacity, linear_to_db, outage_probability, LinkScenario,
    ModulationScheme, PathLossModel,
};
use rrsum::sumdist::{NakagamiParams, SumDistribution};

use crate::error::Result;
use crate::spec::{preset, Range};
use crate::table::{Format, Table};

/// Element counts of the per-N curves.
pub const FIGURE_N: [u32; 4] = [32, 64, 128, 256];

/// `(m1, m2)` pairs of the AoF curves and their file stems.
pub const AOF_CURVES: [(u32, u32, &str); 5] = [
    (3, 1, "aof13"),
    (1, 1, "aof11"),
    (3, 2, "aof23"),
    (3, 3, "aof33"),
    (6, 3, "aof63"),
];

/// One curve: where it goes under the output directory, and its points.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub path: PathBuf,
    pub table: Table,
}

fn fixed_loss() -> Result<PathLossModel> {
    Ok(PathLossModel::new(
        preset::C0_DB,
        preset::D0,
        preset::D1,
        preset::D2,
        preset::ALPHA1,
        preset::ALPHA2,
    )?)
}

fn loss_at(w: f64) -> Result<PathLossModel> {
    Ok(PathLossModel::on_path(
        preset::C0_DB,
        preset::D0,
        preset::D,
        w,
        preset::ALPHA1,
        preset::ALPHA2,
    )?)
}

fn sum(m1: u32, m2: u32, n: u32) -> Result<Arc<SumDistribution>> {
    Ok(Arc::new(SumDistribution::build(
        NakagamiParams::new(m1, 1.0)?,
        NakagamiParams::new(m2, 1.0)?,
        n,
    )?))
}

fn scenario(d: &Arc<SumDistribution>, loss: PathLossModel, gamma_t_db: f64) -> Result<LinkScenario> {
    Ok(LinkScenario::new(
        d.clone(),
        loss,
        gamma_t_db,
        preset::GAMMA_THR_DB,
        1.0,
    )?)
}

fn curve<F>(path: String, xs: Vec<f64>, f: F) -> Result<Dataset>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let ys: Vec<f64> = xs.par_iter().map(|&x| f(x)).collect::<Result<_>>()?;
    let mut table = Table::new(["x", "y"]);
    for (x, y) in xs.into_iter().zip(ys) {
        table.push(vec![x.into(), y.into()]);
    }
    Ok(Dataset {
        path: path.into(),
        table,
    })
}

fn snr_grid() -> Result<Vec<f64>> {
    Ok(Range::new(80.0, 120.0, 41)?.points())
}

fn w_grid(count: usize) -> Result<Vec<f64>> {
    Ok(Range::new(0.1, 0.9, count)?.points())
}

/// Builds every dataset in a fixed order.
pub fn figure_datasets() -> Result<Vec<Dataset>> {
    let bpsk = ModulationScheme::parse("bpsk")?;
    let loss = fixed_loss()?;
    let mut out = Vec::new();
    for (i, &n) in FIGURE_N.iter().enumerate() {
        let d = sum(preset::M1, preset::M2, n)?;
        // gamma_thr is 0 dB, so the abscissa gamma_t / gamma_thr is gamma_t in dB
        out.push(curve(
            format!("outage/out{n}.dat"),
            Range::new(80.0, 120.0, 161)?.points(),
            |x| Ok(outage_probability(&scenario(&d, loss, x)?)?),
        )?);
        out.push(curve(format!("average_snr/y{}.dat", i + 1), w_grid(81)?, |w| {
            Ok(linear_to_db(average_received_snr(&scenario(
                &d,
                loss_at(w)?,
                preset::GAMMA_T_DB,
            )?)))
        })?);
        out.push(curve(format!("ec/ec{n}.dat"), snr_grid()?, |x| {
            Ok(ergodic_capacity(&scenario(&d, loss, x)?)?)
        })?);
        out.push(curve(format!("bep/bep{n}.dat"), w_grid(41)?, |w| {
            Ok(bep(&scenario(&d, loss_at(w)?, preset::GAMMA_T_DB)?, &bpsk)?)
        })?);
        out.push(curve(format!("cqei/cqei13{n}.dat"), snr_grid()?, |x| {
            Ok(cqei(&scenario(&d, loss, x)?))
        })?);
    }
    let ns: Vec<f64> = (FIGURE_N[0]..=FIGURE_N[3]).map(f64::from).collect();
    for (a, b, stem) in AOF_CURVES {
        out.push(curve(format!("aof/{stem}.dat"), ns.clone(), |n| {
            Ok(aof(&*sum(a, b, n as u32)?))
        })?);
    }
    Ok(out)
}

/// Writes every dataset under `dir` and returns the paths written.
pub fn run_figures(dir: &Path) -> Result<Vec<PathBuf>> {
    figure_datasets()?
        .into_iter()
        .map(|ds| {
            let path = dir.join(&ds.path);
            ds.table.write(&path, Format::Dat)?;
            Ok(path)
        })
        .collect()
}
