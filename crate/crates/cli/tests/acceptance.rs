//! End-to-end acceptance suite: one PASS/FAIL line per criterion.

use std::io::Write;
use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};

use dashu_int::IBig;
use rayon::prelude::*;
use rrsum::linkmetrics::{aof, average_received_snr, bep, cqei, LinkScenario, ModulationScheme, PathLossModel};
use rrsum::quad::{integrate, integrate_panels, QuadOptions};
use rrsum::sumdist::{
    base_weights, double_nakagami_pdf, special_cdf, special_charfn, special_moment, special_pdf, NakagamiParams,
    SumDistribution,
};
use rrsum_cli::figures::{figure_datasets, run_figures, Dataset};
use rrsum_cli::{run_simulate, run_validate, Cell, Command, Format, RunSpec, Settings, Table, VALIDATED_METRICS};

const IDENTITY_SUM_TOL: f64 = 1e-10;
const MOMENT_TOL: f64 = 1e-12;
const AOF_TOL: f64 = 1e-10;
const MASS_TOL: f64 = 1e-8;
const ORACLE_REL_TOL: f64 = 1e-6;
const SPECIAL_TOL: f64 = 1e-12;
const EXACT_TOL: f64 = 1e-12;
const MC_SIGMAS: f64 = 3.0;
const MC_SAMPLES: usize = 1_000_000;
const SHIFT_BAND_DB: (f64, f64) = (2.5, 3.5);
const SHIFT_LEVEL: f64 = 1e-2;
const ARGMIN_FLOOR: f64 = 0.4;

const BUDGET_IDENTITIES: Duration = Duration::from_secs(1);
const BUDGET_NORMALIZATION: Duration = Duration::from_secs(30);
const BUDGET_ORACLE: Duration = Duration::from_secs(60);
const BUDGET_SPECIAL: Duration = Duration::from_secs(5);
const BUDGET_MONTE_CARLO: Duration = Duration::from_secs(300);
const BUDGET_FIGURES: Duration = Duration::from_secs(600);

type Outcome = Result<String, String>;
type Criterion = (&'static str, Option<Duration>, Box<dyn FnOnce() -> Outcome>);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)*));
        }
    };
}

fn dist(m1: u32, o1: f64, m2: u32, o2: f64, n: u32) -> SumDistribution {
    SumDistribution::build(
        NakagamiParams::new(m1, o1).unwrap(),
        NakagamiParams::new(m2, o2).unwrap(),
        n,
    )
    .unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn to_f64(x: &IBig) -> f64 {
    x.to_string().parse().unwrap()
}

fn identities() -> Outcome {
    for m1 in 1..=8i64 {
        for m2 in m1..=8i64 {
            let w = base_weights(m1 as u32, m2 as u32);
            let moment = |p: usize| -> IBig { w.iter().enumerate().map(|(k, c)| c * IBig::from(k).pow(p)).sum() };
            let want2 = (1 - m2) * (m1 - 1);
            let want3 = (1 - m2) * ((2 - m2) * m1 * (m1 + 1) - 2 * (3 - 2 * m2) * m1 + 2 * (1 - m2));
            ensure!(
                rel(to_f64(&moment(0)), 1.0) <= IDENTITY_SUM_TOL,
                "sum of weights ({m1},{m2})"
            );
            ensure!(
                (to_f64(&moment(1)) - want2 as f64).abs() <= MOMENT_TOL * (want2 as f64).abs().max(1.0),
                "sum2 ({m1},{m2})"
            );
            ensure!(
                (2.0 * to_f64(&moment(2)) - want3 as f64).abs() <= MOMENT_TOL * (want3 as f64).abs().max(1.0),
                "sum3 ({m1},{m2})"
            );
        }
    }
    for m1 in 1..=3 {
        for m2 in 1..=3 {
            for n in [1, 2, 8, 64] {
                let (o1, o2) = (0.7, 1.9);
                let d = dist(m1, o1, m2, o2, n);
                let total: IBig = d.expansion().collapsed_exact().iter().sum();
                ensure!(
                    rel(to_f64(&total), 1.0) <= IDENTITY_SUM_TOL,
                    "sum of c_s ({m1},{m2},{n})"
                );
                let mu2 = d.moment(2);
                ensure!(
                    rel(mu2, f64::from(n) * o1 * o2) <= MOMENT_TOL,
                    "moment 2 ({m1},{m2},{n}): {mu2}"
                );
                let from_moments = d.moment(4) / (mu2 * mu2) - 1.0;
                let (a, b, nf) = (f64::from(m1), f64::from(m2), f64::from(n));
                let closed = 1.0 + (1.0 + a + b - a * b) / (nf * a * b);
                ensure!(
                    rel(from_moments, closed) <= AOF_TOL,
                    "AoF ({m1},{m2},{n}): {from_moments} vs {closed}"
                );
                ensure!(rel(aof(&d), closed) <= AOF_TOL, "library AoF ({m1},{m2},{n})");
            }
        }
    }
    Ok("weights, coefficients, moment 2 and AoF over 36 configurations".into())
}

fn normalization_grid() -> Vec<(u32, u32, u32, f64, f64)> {
    const OMEGAS: [f64; 3] = [0.5, 1.0, 2.0];
    let mut out = Vec::new();
    let mut j = 0;
    for m1 in 1..=3 {
        for m2 in 1..=3 {
            for n in [1, 2, 8, 64] {
                // three of the nine (omega1, omega2) pairs per shape, rotating
                for k in 0..3 {
                    let o = (3 * j + k) % 9;
                    out.push((m1, m2, n, OMEGAS[o / 3], OMEGAS[o % 3]));
                }
                j += 1;
            }
        }
    }
    out
}

fn quantile(d: &SumDistribution, q: f64, hi: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, hi);
    while hi - lo > 1e-2 * hi {
        let mid = 0.5 * (lo + hi);
        if d.cdf(mid).unwrap() < q {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn mass_and_gap(d: &SumDistribution) -> (f64, f64) {
    let pdf = |r: f64| d.pdf(r).unwrap();
    let opts = QuadOptions::new(1e-11, 1e-13);
    let rstar = d.support_bound().unwrap();
    let (mut left, mut acc, mut gap) = (0.0, 0.0, 0.0f64);
    for i in 1..=20 {
        let r = quantile(d, (f64::from(i) - 0.5) / 20.0, rstar);
        acc += integrate(pdf, left, r, &opts).unwrap().value;
        left = r;
        gap = gap.max((d.cdf(r).unwrap() - acc).abs());
    }
    let tail: Vec<f64> = std::iter::once(left)
        .chain(d.panels().unwrap().into_iter().filter(|&p| p > left))
        .collect();
    let mass = acc + integrate_panels(pdf, &tail, &opts).unwrap().value;
    ((mass - 1.0).abs(), gap)
}

fn normalization() -> Outcome {
    let grid = normalization_grid();
    ensure!(grid.len() == 108, "grid has {} configurations", grid.len());
    let worst = grid
        .par_iter()
        .map(|&(m1, m2, n, o1, o2)| mass_and_gap(&dist(m1, o1, m2, o2, n)))
        .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
    ensure!(
        worst.0 <= MASS_TOL && worst.1 <= MASS_TOL,
        "worst mass error {:e}, cdf gap {:e}",
        worst.0,
        worst.1
    );
    Ok(format!(
        "108 configurations, worst |mass-1| {:.1e}, worst cdf gap {:.1e}",
        worst.0, worst.1
    ))
}

fn oracle() -> Outcome {
    let cases = [
        dist(3, 1.0, 1, 1.0, 4),
        dist(2, 1.0, 1, 1.0, 2),
        dist(1, 1.0, 1, 1.0, 1),
        dist(2, 0.5, 3, 2.0, 3),
        dist(2, 1.0, 2, 1.0, 8),
        dist(3, 2.0, 3, 0.5, 5),
    ];
    let mut worst = 0.0f64;
    for d in &cases {
        for i in 0..10 {
            let r = d.rms() * (0.15 + 0.25 * f64::from(i));
            let e = rel(d.pdf(r).unwrap(), d.oracle_pdf_hankel(r).unwrap());
            ensure!(e <= ORACLE_REL_TOL, "N={} r={r}: relative error {e:e}", d.n_vectors());
            worst = worst.max(e);
        }
    }
    Ok(format!(
        "6 configurations x 10 points, worst relative error {worst:.1e}"
    ))
}

fn special_case() -> Outcome {
    for (m, o1, o2, n) in [(1, 1.0, 1.0, 1), (2, 0.5, 2.0, 3), (3, 1.0, 1.0, 32), (4, 2.0, 0.7, 8)] {
        let d = dist(1, o1, m, o2, n);
        for i in 1..=25 {
            let r = d.rms() * 0.1 * f64::from(i);
            ensure!(
                rel(d.pdf(r).unwrap(), special_pdf(m, o1, o2, n, r).unwrap()) <= SPECIAL_TOL,
                "pdf m={m} r={r}"
            );
            ensure!(
                rel(d.cdf(r).unwrap(), special_cdf(m, o1, o2, n, r).unwrap()) <= SPECIAL_TOL,
                "cdf m={m} r={r}"
            );
        }
        for k in 0..8 {
            ensure!(
                rel(d.moment(k), special_moment(m, o1, o2, n, k).unwrap()) <= SPECIAL_TOL,
                "moment {k} m={m}"
            );
        }
        for t in [-2.0, 0.0, 0.3, 1.7] {
            let gap = (d.char_fn(t).unwrap() - special_charfn(m, o1, o2, n, t).unwrap()).norm();
            ensure!(gap <= SPECIAL_TOL, "charfn m={m} t={t}: {gap:e}");
        }
        // the single-term law is a double-Nakagami law with shapes (1, Nm)
        let a = NakagamiParams::new(1, o1).unwrap();
        let b = NakagamiParams::new(n * m, f64::from(n) * o2).unwrap();
        for i in 1..=50 {
            let r = d.rms() * 0.06 * f64::from(i);
            let e = rel(
                special_pdf(m, o1, o2, n, r).unwrap(),
                double_nakagami_pdf(a, b, r).unwrap(),
            );
            ensure!(e <= SPECIAL_TOL, "double-Nakagami form m={m} N={n} r={r}: {e:e}");
        }
    }
    Ok("pdf, cdf, moments, char fn and the double-Nakagami form agree".into())
}

fn settings(samples: usize) -> Settings {
    Settings {
        samples: Some(samples),
        ..Default::default()
    }
}

fn monte_carlo() -> Outcome {
    let spec = RunSpec::resolve(Command::Validate, &settings(MC_SAMPLES)).map_err(|e| e.to_string())?;
    ensure!(
        (
            spec.n_list.as_slice(),
            spec.gamma_t_db.as_slice(),
            spec.loss.distances()
        ) == (&[32][..], &[110.0][..], (25.0, 5.0)),
        "validate presets drifted"
    );
    let pairs = [(3, 1), (1, 1)];
    let report = run_validate(&spec, &pairs).map_err(|e| e.to_string())?;
    let t = &report.table;
    ensure!(
        t.rows.len() == pairs.len() * VALIDATED_METRICS.len(),
        "{} report rows",
        t.rows.len()
    );
    let pass = t.columns.iter().position(|c| c == "pass").ok_or("no pass column")?;
    let failed: Vec<String> = t
        .rows
        .iter()
        .filter(|row| row[pass] != Cell::Bool(true))
        .map(|row| format!("{row:?}"))
        .collect();
    ensure!(failed.is_empty() && report.passed, "failing rows: {failed:?}");
    Ok(format!(
        "{} rows within {MC_SIGMAS} sigma at {MC_SAMPLES} draws, DKW band held",
        t.rows.len()
    ))
}

fn scenario(m1: u32, m2: u32, n: u32) -> LinkScenario {
    let loss = PathLossModel::new(-30.0, 1.0, 25.0, 5.0, 2.8, 2.2).unwrap();
    LinkScenario::new(Arc::new(dist(m1, 1.0, m2, 1.0, n)), loss, 110.0, 0.0, 1.0).unwrap()
}

fn exact_values() -> Outcome {
    let bpsk = ModulationScheme::parse("bpsk").unwrap();
    let qam4 = ModulationScheme::parse("qam:4").unwrap();
    for n in 32..=256 {
        let a = aof(&dist(3, 1.0, 2, 1.0, n));
        ensure!(a == 1.0, "AoF(3,2,{n}) = {a}");
    }
    for n in [32, 64, 128] {
        let (a, b) = (
            average_received_snr(&scenario(3, 1, n)),
            average_received_snr(&scenario(3, 1, 2 * n)),
        );
        ensure!(b == 2.0 * a, "average SNR N={n}: {a} -> {b}");
    }
    for (m1, m2, n) in [(3, 1, 32), (1, 1, 64), (2, 3, 16)] {
        let s = scenario(m1, m2, n);
        let (x, y) = (bep(&s, &bpsk).unwrap(), bep(&s, &qam4).unwrap());
        ensure!(rel(x, y) <= EXACT_TOL, "BPSK {x} vs 4-QAM {y}");
        let ratio = aof(s.dist()) / average_received_snr(&s);
        ensure!(rel(cqei(&s), ratio) <= EXACT_TOL, "CQEI ({m1},{m2},{n})");
    }
    Ok("AoF(3,2) = 1, SNR doubling, BPSK = 4-QAM, CQEI = AoF / E[snr]".into())
}

fn xy(ds: &[Dataset], path: &str) -> Result<Vec<(f64, f64)>, String> {
    let table = &ds
        .iter()
        .find(|d| d.path == Path::new(path))
        .ok_or(format!("missing {path}"))?
        .table;
    let (x, y) = (table.column("x").unwrap(), table.column("y").unwrap());
    Ok(x.into_iter().zip(y).collect())
}

/// Abscissa where a decreasing curve crosses `level`, interpolating in log y.
fn crossing(curve: &[(f64, f64)], level: f64) -> Option<f64> {
    curve.windows(2).find_map(|w| {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        (y0 >= level && y1 < level).then(|| x0 + (x1 - x0) * (y0 / level).ln() / (y0 / y1).ln())
    })
}

fn figures(dir: &Path) -> Outcome {
    let written = run_figures(dir).map_err(|e| e.to_string())?;
    ensure!(written.len() == 25, "{} files written", written.len());
    for sub in ["outage", "average_snr", "ec", "bep", "aof", "cqei"] {
        ensure!(dir.join(sub).is_dir(), "no {sub} datasets");
    }
    let ds = figure_datasets().map_err(|e| e.to_string())?;
    let x32 = crossing(&xy(&ds, "outage/out32.dat")?, SHIFT_LEVEL).ok_or("N=32 never crosses")?;
    let x64 = crossing(&xy(&ds, "outage/out64.dat")?, SHIFT_LEVEL).ok_or("N=64 never crosses")?;
    let shift = x32 - x64;
    ensure!(
        (SHIFT_BAND_DB.0..=SHIFT_BAND_DB.1).contains(&shift),
        "outage shift {shift} dB"
    );
    let mut argmins = Vec::new();
    for i in 1..=4 {
        let curve = xy(&ds, &format!("average_snr/y{i}.dat"))?;
        let (j, &(w, _)) = curve
            .iter()
            .enumerate()
            .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
            .unwrap();
        ensure!(
            j > 0 && j + 1 < curve.len() && w > ARGMIN_FLOOR,
            "curve y{i}: argmin w = {w}"
        );
        argmins.push(w);
    }
    for stem in ["aof13", "aof11", "aof33", "aof63"] {
        let gaps: Vec<f64> = xy(&ds, &format!("aof/{stem}.dat"))?
            .iter()
            .map(|&(_, y)| (y - 1.0).abs())
            .collect();
        ensure!(gaps.windows(2).all(|g| g[1] < g[0]), "{stem} is not monotone toward 1");
    }
    ensure!(
        xy(&ds, "aof/aof23.dat")?.iter().all(|&(_, y)| y == 1.0),
        "aof23 is not constant"
    );
    Ok(format!(
        "outage shift {shift:.3} dB, SNR argmin w = {argmins:?}, AoF curves monotone"
    ))
}

fn rendered(table: &Table) -> String {
    table.render(Format::Csv).unwrap()
}

fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = walk(dir)
        .into_iter()
        .map(|p| (p.display().to_string(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|(p, b)| (p.trim_start_matches(&dir.display().to_string()).to_owned(), b))
        .collect()
}

fn walk(dir: &Path) -> Vec<std::path::PathBuf> {
    std::fs::read_dir(dir)
        .unwrap()
        .flat_map(|e| {
            let p = e.unwrap().path();
            if p.is_dir() {
                walk(&p)
            } else {
                vec![p]
            }
        })
        .collect()
}

fn determinism(first: &Path) -> Outcome {
    let s = Settings {
        n_list: Some("8,32".into()),
        gamma_t_db_range: Some("100:110:2".into()),
        samples: Some(50_000),
        seed: Some(7),
        ..Default::default()
    };
    let sim = RunSpec::resolve(Command::Simulate, &s).map_err(|e| e.to_string())?;
    let runs: Vec<String> = [1, 4, 4]
        .into_iter()
        .map(|t| with_threads(t, || rendered(&run_simulate(&sim).unwrap())))
        .collect();
    ensure!(runs.iter().all(|r| r == &runs[0]), "simulate output depends on the run");
    let val = RunSpec::resolve(Command::Validate, &settings(20_000)).map_err(|e| e.to_string())?;
    let reports: Vec<String> = [1, 4]
        .into_iter()
        .map(|t| with_threads(t, || rendered(&run_validate(&val, &[(2, 2)]).unwrap().table)))
        .collect();
    ensure!(reports[0] == reports[1], "validate output depends on worker count");
    let again = tempfile::tempdir().unwrap();
    with_threads(1, || run_figures(again.path())).map_err(|e| e.to_string())?;
    ensure!(
        snapshot(first) == snapshot(again.path()),
        "figure files differ between 4 and 1 workers"
    );
    let bin = env!("CARGO_BIN_EXE_rrsum");
    let out = |threads: &str| {
        std::process::Command::new(bin)
            .args([
                "--threads",
                threads,
                "simulate",
                "--samples",
                "20000",
                "--seed",
                "3",
                "--format",
                "csv",
            ])
            .output()
            .unwrap()
    };
    let (a, b) = (out("1"), out("4"));
    ensure!(
        a.status.success() && a.stdout == b.stdout,
        "binary output depends on --threads"
    );
    Ok("simulate, validate, figures and the binary are byte-identical across 1 and 4 workers".into())
}

fn timed(budget: Option<Duration>, f: impl FnOnce() -> Outcome) -> (Outcome, Duration) {
    let start = Instant::now();
    let outcome = f();
    let took = start.elapsed();
    let outcome = match (outcome, budget) {
        (Ok(_), Some(b)) if took > b => Err(format!("took {took:.1?}, budget {b:?}")),
        (o, _) => o,
    };
    (outcome, took)
}

/// Bypasses the test harness capture so the lines show up on success too.
fn report(line: &str) {
    let mut out = std::io::stdout().lock();
    writeln!(out, "{line}").unwrap();
    out.flush().unwrap();
}

#[test]
fn acceptance() {
    let figure_dir = tempfile::tempdir().unwrap();
    let dir = figure_dir.path().to_owned();
    let criteria: Vec<Criterion> = vec![
        ("identity suite", Some(BUDGET_IDENTITIES), Box::new(identities)),
        (
            "normalization and cdf consistency",
            Some(BUDGET_NORMALIZATION),
            Box::new(normalization),
        ),
        ("Hankel oracle equivalence", Some(BUDGET_ORACLE), Box::new(oracle)),
        ("special-case reduction", Some(BUDGET_SPECIAL), Box::new(special_case)),
        ("Monte Carlo agreement", Some(BUDGET_MONTE_CARLO), Box::new(monte_carlo)),
        ("exact values", None, Box::new(exact_values)),
        (
            "figure reproduction",
            Some(BUDGET_FIGURES),
            Box::new({
                let dir = dir.clone();
                move || with_threads(4, || figures(&dir))
            }),
        ),
        ("determinism", None, Box::new(move || determinism(&dir))),
    ];
    let mut failures = 0;
    for (k, (name, budget, f)) in criteria.into_iter().enumerate() {
        let (outcome, took) = timed(budget, f);
        match outcome {
            Ok(detail) => report(&format!("PASS criterion {}: {name} ({took:.1?}): {detail}", k + 1)),
            Err(detail) => {
                failures += 1;
                report(&format!("FAIL criterion {}: {name} ({took:.1?}): {detail}", k + 1));
            }
        }
    }
    assert_eq!(failures, 0, "{failures} acceptance criteria failed");
}
