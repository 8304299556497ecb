use std::sync::Arc;

use rayon::prelude::*;
use rrsum::linkmetrics::{
    aof, average_received_snr, bep, cqei, ergodic_capacity, linear_to_db, outage_probability, ModulationScheme,
};
use rrsum::mcsim::{mc_aof, mc_bep, mc_capacity, mc_dkw, mc_moments, mc_outage, McConfig, McEstimate};
use rrsum::sumdist::{NakagamiParams, SumDistribution};

use crate::error::{CliError, Result};
use crate::spec::{Range, RunSpec};
use crate::table::{Cell, Table};

/// What `dist` tabulates.
#[derive(Clone, Debug, PartialEq)]
pub enum DistRequest {
    /// `(r, pdf, cdf)`; `None` picks `0..4 rms` in 81 steps per N.
    Density(Option<Vec<f64>>),
    /// `(n, E|H|^n)`.
    Moments(Vec<u32>),
    /// `(t, Re phi, Im phi)`.
    CharFn(Vec<f64>),
}

fn distributions(spec: &RunSpec) -> Result<Vec<(u32, Arc<SumDistribution>)>> {
    spec.n_list
        .iter()
        .map(|&n| Ok((n, Arc::new(spec.distribution(n)?))))
        .collect()
}

/// Tables one block per N; the `n` column appears only for several N.
pub fn run_dist(spec: &RunSpec, request: &DistRequest) -> Result<Table> {
    let dists = distributions(spec)?;
    let tagged = dists.len() > 1;
    let columns: &[&str] = match request {
        DistRequest::Density(_) => &["r", "pdf", "cdf"],
        DistRequest::Moments(_) => &["order", "moment"],
        DistRequest::CharFn(_) => &["t", "re", "im"],
    };
    let mut table = Table::new(tagged.then_some("n").into_iter().chain(columns.iter().copied()));
    for (n, d) in &dists {
        let rows: Vec<Vec<Cell>> = match request {
            DistRequest::Density(grid) => {
                let grid = match grid {
                    Some(g) => g.clone(),
                    None => Range::new(0.0, 4.0 * d.rms(), 81)?.points(),
                };
                grid.par_iter()
                    .map(|&r| Ok(vec![r.into(), d.pdf(r)?.into(), d.cdf(r)?.into()]))
                    .collect::<rrsum::Result<_>>()?
            }
            DistRequest::Moments(orders) => orders.iter().map(|&k| vec![k.into(), d.moment(k).into()]).collect(),
            DistRequest::CharFn(ts) => ts
                .iter()
                .zip(d.char_fn_many(ts)?)
                .map(|(&t, phi)| vec![t.into(), phi.re.into(), phi.im.into()])
                .collect(),
        };
        for mut row in rows {
            if tagged {
                row.insert(0, (*n).into());
            }
            table.push(row);
        }
    }
    Ok(table)
}

fn grid_points(spec: &RunSpec) -> Result<Vec<(u32, Arc<SumDistribution>, f64)>> {
    let dists = distributions(spec)?;
    Ok(dists
        .into_iter()
        .flat_map(|(n, d)| spec.gamma_t_db.iter().map(move |&g| (n, d.clone(), g)))
        .collect())
}

pub fn run_metrics(spec: &RunSpec) -> Result<Table> {
    let mut table = Table::new([
        "n",
        "gamma_t_db",
        "outage",
        "avg_snr_db",
        "capacity",
        "bep",
        "aof",
        "cqei",
    ]);
    table.rows = grid_points(spec)?
        .into_par_iter()
        .map(|(n, d, g)| {
            let s = spec.scenario(d, g)?;
            Ok(vec![
                n.into(),
                g.into(),
                outage_probability(&s)?.into(),
                linear_to_db(average_received_snr(&s)).into(),
                ergodic_capacity(&s)?.into(),
                bep(&s, &spec.modulation)?.into(),
                aof(s.dist()).into(),
                cqei(&s).into(),
            ])
        })
        .collect::<Result<_>>()?;
    Ok(table)
}

fn estimate_cells(e: &McEstimate) -> [Cell; 5] {
    [
        e.mean.into(),
        e.std_error.into(),
        e.ci_low.into(),
        e.ci_high.into(),
        e.samples_used.into(),
    ]
}

pub fn run_simulate(spec: &RunSpec) -> Result<Table> {
    let mut table = Table::new([
        "n",
        "gamma_t_db",
        "metric",
        "mean",
        "std_error",
        "ci_low",
        "ci_high",
        "samples",
    ]);
    for (n, d, g) in grid_points(spec)? {
        let s = spec.scenario(d, g)?;
        let moments = mc_moments(s.dist(), &spec.mc, &[2, 4])?;
        let estimates = [
            ("outage".to_owned(), mc_outage(&s, &spec.mc)),
            ("capacity".to_owned(), mc_capacity(&s, &spec.mc)),
            (
                format!("bep:{}", spec.modulation),
                mc_bep(&s, &spec.modulation, &spec.mc),
            ),
            ("moment2".to_owned(), moments[0]),
            ("moment4".to_owned(), moments[1]),
            ("aof".to_owned(), mc_aof(s.dist(), &spec.mc)),
        ];
        for (name, e) in estimates {
            let mut row = vec![n.into(), g.into(), name.into()];
            row.extend(estimate_cells(&e));
            table.push(row);
        }
    }
    Ok(table)
}

/// Metrics compared by `validate`, one report row each per grid point.
pub const VALIDATED_METRICS: [&str; 7] = [
    "outage",
    "capacity",
    "bep:bpsk",
    "bep:qam:16",
    "moment2",
    "moment4",
    "cdf-dkw",
];

/// Samples used for the DKW row.
pub const DKW_SAMPLES: usize = 100_000;

#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub table: Table,
    pub passed: bool,
}

struct Row {
    analytic: f64,
    estimate: McEstimate,
    pass: bool,
    note: &'static str,
}

fn sigma_row(analytic: f64, estimate: McEstimate) -> Row {
    let degenerate = !estimate.mean.is_finite() || !estimate.std_error.is_finite() || estimate.std_error == 0.0;
    let pass = estimate.within_sigma(analytic, 3.0) && analytic.is_finite();
    Row {
        analytic,
        estimate,
        pass,
        // a zero standard error only passes on an exact hit
        note: if degenerate { "degenerate standard error" } else { "" },
    }
}

fn validate_point(spec: &RunSpec, pair: (u32, u32), n: u32, gamma_t_db: f64) -> Result<Vec<(&'static str, Row)>> {
    let link1 = NakagamiParams::new(pair.0, spec.link1.omega())?;
    let link2 = NakagamiParams::new(pair.1, spec.link2.omega())?;
    let d = Arc::new(SumDistribution::build(link1, link2, n)?);
    let s = spec.scenario(d.clone(), gamma_t_db)?;
    let cfg = &spec.mc;
    let bpsk = ModulationScheme::parse("bpsk")?;
    let qam = ModulationScheme::parse("qam:16")?;
    let moments = mc_moments(&d, cfg, &[2, 4])?;
    let dkw_cfg = McConfig {
        samples: DKW_SAMPLES.min(cfg.samples),
        ..*cfg
    };
    let dkw = mc_dkw(&d, &dkw_cfg)?;
    let dkw_row = Row {
        analytic: dkw.band,
        estimate: McEstimate {
            mean: dkw.distance,
            std_error: 0.0,
            ci_low: 0.0,
            ci_high: dkw.band,
            samples_used: dkw_cfg.samples,
        },
        pass: dkw.passed(),
        note: "analytic column holds the band, mean the distance",
    };
    Ok(vec![
        ("outage", sigma_row(outage_probability(&s)?, mc_outage(&s, cfg))),
        ("capacity", sigma_row(ergodic_capacity(&s)?, mc_capacity(&s, cfg))),
        ("bep:bpsk", sigma_row(bep(&s, &bpsk)?, mc_bep(&s, &bpsk, cfg))),
        ("bep:qam:16", sigma_row(bep(&s, &qam)?, mc_bep(&s, &qam, cfg))),
        ("moment2", sigma_row(d.moment(2), moments[0])),
        ("moment4", sigma_row(d.moment(4), moments[1])),
        ("cdf-dkw", dkw_row),
    ])
}

/// Analytic-vs-Monte-Carlo report over `pairs x n_list x gamma_t`.
pub fn run_validate(spec: &RunSpec, pairs: &[(u32, u32)]) -> Result<ValidationReport> {
    if pairs.is_empty() {
        return Err(CliError::Usage("empty (m1, m2) grid".into()));
    }
    let mut table = Table::new([
        "m1",
        "m2",
        "n",
        "gamma_t_db",
        "metric",
        "analytic",
        "mc_mean",
        "std_error",
        "ci_low",
        "ci_high",
        "samples",
        "pass",
        "note",
    ]);
    let mut passed = true;
    for &pair in pairs {
        for &n in &spec.n_list {
            for &g in &spec.gamma_t_db {
                for (name, row) in validate_point(spec, pair, n, g)? {
                    passed &= row.pass;
                    let mut cells = vec![
                        pair.0.into(),
                        pair.1.into(),
                        n.into(),
                        g.into(),
                        name.into(),
                        row.analytic.into(),
                    ];
                    cells.extend(estimate_cells(&row.estimate));
                    cells.push(row.pass.into());
                    cells.push(row.note.into());
                    table.push(cells);
                }
            }
        }
    }
    Ok(ValidationReport { table, passed })
}
