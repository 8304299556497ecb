//! Seeded Monte Carlo estimators for every analytic quantity.
//!
//! Draws are generated in chunks; chunk `i` uses substream `i` of the
//! configured seed and the chunks are concatenated in index order, so
//! estimates are bit-identical for any number of worker threads. Error
//! rates and capacity are averaged over their conditional expressions
//! rather than simulated bit by bit.

use num_complex::Complex64;
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::linkmetrics::{conditional_bep, LinkScenario, ModulationScheme};
use crate::sumdist::{chunk_rng, SumDistribution, DEFAULT_CHUNK};

/// Smallest sample count for which the normal-theory intervals are used.
pub const MIN_SAMPLES: usize = 1000;
const JACKKNIFE_GROUPS: usize = 100;
const MAX_MOMENT_ORDER: u32 = 8;
const DKW_CELLS: usize = 4000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McConfig {
    pub seed: u64,
    pub samples: usize,
    pub chunk_size: usize,
    pub confidence: f64,
}

impl McConfig {
    pub fn new(seed: u64, samples: usize) -> Result<Self> {
        McConfig {
            seed,
            samples,
            chunk_size: DEFAULT_CHUNK,
            confidence: 0.99,
        }
        .validated()
    }

    pub fn with_chunk_size(self, chunk_size: usize) -> Result<Self> {
        McConfig { chunk_size, ..self }.validated()
    }

    pub fn with_confidence(self, confidence: f64) -> Result<Self> {
        McConfig { confidence, ..self }.validated()
    }

    fn validated(self) -> Result<Self> {
        if self.samples < MIN_SAMPLES {
            return Err(Error::InvalidParameter(format!(
                "need at least {MIN_SAMPLES} samples for a confidence interval, got {}",
                self.samples
            )));
        }
        if self.chunk_size == 0 {
            return Err(Error::InvalidParameter("chunk size must be positive".into()));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "confidence must lie in (0, 1), got {}",
                self.confidence
            )));
        }
        Ok(self)
    }

    /// Two-sided normal quantile for the configured confidence.
    pub fn z(&self) -> f64 {
        Normal::standard().inverse_cdf(0.5 + self.confidence / 2.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub samples_used: usize,
}

impl McEstimate {
    fn new(mean: f64, std_error: f64, z: f64, samples_used: usize) -> Self {
        McEstimate {
            mean,
            std_error,
            ci_low: mean - z * std_error,
            ci_high: mean + z * std_error,
            samples_used,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        (self.ci_low..=self.ci_high).contains(&x)
    }

    /// `|x - mean| <= k * std_error`.
    pub fn within_sigma(&self, x: f64, k: f64) -> bool {
        (x - self.mean).abs() <= k * self.std_error
    }
}

/// The `|H|` draws of a run, in chunk order.
pub fn draws(d: &SumDistribution, cfg: &McConfig) -> Vec<f64> {
    let chunks = cfg.samples.div_ceil(cfg.chunk_size);
    let parts: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|i| {
            let mut rng = chunk_rng(cfg.seed, i as u64);
            let len = cfg.chunk_size.min(cfg.samples - i * cfg.chunk_size);
            (0..len).map(|_| d.draw(&mut rng)).collect()
        })
        .collect();
    parts.concat()
}

fn mean_estimate(values: impl Iterator<Item = f64>, cfg: &McConfig) -> McEstimate {
    let (mut n, mut mean, mut m2) = (0usize, 0.0f64, 0.0f64);
    for x in values {
        n += 1;
        let delta = x - mean;
        mean += delta / n as f64;
        m2 += delta * (x - mean);
    }
    let var = if n > 1 { m2 / (n - 1) as f64 } else { 0.0 };
    McEstimate::new(mean, (var / n as f64).sqrt(), cfg.z(), n)
}

/// `E[g(|H|)]` with its standard error.
pub fn mc_expectation<F: Fn(f64) -> f64>(d: &SumDistribution, cfg: &McConfig, g: F) -> McEstimate {
    mean_estimate(draws(d, cfg).into_iter().map(g), cfg)
}

pub fn mc_outage(s: &LinkScenario, cfg: &McConfig) -> McEstimate {
    let g = s.snr_gain();
    let thr = s.gamma_thr();
    let hits = draws(s.dist(), cfg).iter().filter(|&&h| g * h * h < thr).count();
    let n = cfg.samples;
    let p = hits as f64 / n as f64;
    McEstimate::new(p, (p * (1.0 - p) / n as f64).sqrt(), cfg.z(), n)
}

pub fn mc_capacity(s: &LinkScenario, cfg: &McConfig) -> McEstimate {
    let g = s.snr_gain();
    let b = s.bandwidth();
    mc_expectation(s.dist(), cfg, |h| b * (g * h * h).ln_1p() / std::f64::consts::LN_2)
}

pub fn mc_bep(s: &LinkScenario, m: &ModulationScheme, cfg: &McConfig) -> McEstimate {
    let g = s.snr_gain();
    mc_expectation(s.dist(), cfg, |h| conditional_bep(m, g * h * h))
}

/// Real and imaginary parts of `E[exp(j t |H|)]`.
pub fn mc_char_fn(d: &SumDistribution, cfg: &McConfig, t: f64) -> (McEstimate, McEstimate) {
    let h = draws(d, cfg);
    let re = mean_estimate(h.iter().map(|x| (t * x).cos()), cfg);
    let im = mean_estimate(h.iter().map(|x| (t * x).sin()), cfg);
    (re, im)
}

/// Leave-one-group-out jackknife of `stat` over grouped power sums.
fn jackknife<F: Fn(&[f64]) -> f64>(values: &[f64], orders: &[u32], stat: F, cfg: &McConfig) -> McEstimate {
    let n = values.len();
    let groups = JACKKNIFE_GROUPS.min(n);
    let mut sums = vec![vec![0.0; orders.len()]; groups];
    for (i, &h) in values.iter().enumerate() {
        let g = i * groups / n;
        for (slot, &k) in sums[g].iter_mut().zip(orders) {
            *slot += h.powi(k as i32);
        }
    }
    let total: Vec<f64> = (0..orders.len()).map(|j| sums.iter().map(|s| s[j]).sum()).collect();
    let counts: Vec<usize> = (0..groups).map(|g| (g + 1) * n / groups - g * n / groups).collect();
    let full = stat(&total.iter().map(|s| s / n as f64).collect::<Vec<_>>());
    let leave_out: Vec<f64> = sums
        .iter()
        .zip(&counts)
        .map(|(s, &c)| {
            let means: Vec<f64> = total.iter().zip(s).map(|(t, x)| (t - x) / (n - c) as f64).collect();
            stat(&means)
        })
        .collect();
    let centre = leave_out.iter().sum::<f64>() / groups as f64;
    let g = groups as f64;
    let var = (g - 1.0) / g * leave_out.iter().map(|x| (x - centre).powi(2)).sum::<f64>();
    McEstimate::new(full, var.sqrt(), cfg.z(), n)
}

/// Sample moments `E|H|^n` with jackknife standard errors.
pub fn mc_moments(d: &SumDistribution, cfg: &McConfig, orders: &[u32]) -> Result<Vec<McEstimate>> {
    if let Some(bad) = orders.iter().find(|&&k| k > MAX_MOMENT_ORDER) {
        return Err(Error::InvalidParameter(format!(
            "moment order {bad} exceeds {MAX_MOMENT_ORDER}; its sample variance is unreliable"
        )));
    }
    let h = draws(d, cfg);
    Ok(orders
        .iter()
        .map(|&k| {
            if k == 0 {
                McEstimate::new(1.0, 0.0, cfg.z(), h.len())
            } else {
                jackknife(&h, &[k], |m| m[0], cfg)
            }
        })
        .collect())
}

/// Amount of fading `E|H|^4 / (E|H|^2)^2 - 1` with a jackknife interval.
pub fn mc_aof(d: &SumDistribution, cfg: &McConfig) -> McEstimate {
    jackknife(&draws(d, cfg), &[2, 4], |m| m[1] / (m[0] * m[0]) - 1.0, cfg)
}

/// Kolmogorov distance between the sample and the closed-form cdf, next to
/// the Dvoretzky-Kiefer-Wolfowitz band at the configured confidence.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DkwCheck {
    /// Upper bound on `sup |F_n - F|`.
    pub distance: f64,
    pub band: f64,
}

impl DkwCheck {
    pub fn passed(&self) -> bool {
        self.distance <= self.band
    }
}

/// The cdf is evaluated on a grid only: inside a cell both `F` and `F_n`
/// are nondecreasing, so the cell corners bound the gap from above.
pub fn mc_dkw(d: &SumDistribution, cfg: &McConfig) -> Result<DkwCheck> {
    let mut h = draws(d, cfg);
    h.sort_by(f64::total_cmp);
    let n = h.len() as f64;
    let top = h[h.len() - 1];
    let grid: Vec<f64> = (0..=DKW_CELLS).map(|j| top * j as f64 / DKW_CELLS as f64).collect();
    let f = grid.par_iter().map(|&x| d.cdf(x)).collect::<Result<Vec<f64>>>()?;
    let below = |x: f64| h.partition_point(|&v| v < x) as f64 / n;
    let at = |x: f64| h.partition_point(|&v| v <= x) as f64 / n;
    let distance = (0..DKW_CELLS)
        .map(|j| (below(grid[j + 1]) - f[j]).max(f[j + 1] - at(grid[j])))
        .fold(0.0, f64::max);
    let alpha = 1.0 - cfg.confidence;
    Ok(DkwCheck {
        distance,
        band: ((2.0 / alpha).ln() / (2.0 * n)).sqrt(),
    })
}

/// `E[exp(j t |H|)]` as a complex point estimate.
pub fn mc_char_fn_mean(d: &SumDistribution, cfg: &McConfig, t: f64) -> Complex64 {
    let (re, im) = mc_char_fn(d, cfg, t);
    Complex64::new(re.mean, im.mean)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::linkmetrics::{outage_probability, PathLossModel};
    use crate::sumdist::NakagamiParams;

    fn dist(m1: u32, m2: u32, n: u32) -> SumDistribution {
        SumDistribution::build(
            NakagamiParams::new(m1, 1.0).unwrap(),
            NakagamiParams::new(m2, 1.0).unwrap(),
            n,
        )
        .unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(McConfig::new(1, 10).is_err());
        assert!(McConfig::new(1, 5000).unwrap().with_chunk_size(0).is_err());
        assert!(McConfig::new(1, 5000).unwrap().with_confidence(1.0).is_err());
        assert!((McConfig::new(1, 5000).unwrap().z() - 2.575_829_303_548_900_4).abs() < 1e-9);
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let d = dist(3, 1, 8);
        let cfg = McConfig::new(42, 30_000).unwrap().with_chunk_size(1000).unwrap();
        let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let a = single.install(|| draws(&d, &cfg));
        let b = draws(&d, &cfg);
        assert_eq!(a, b);
    }

    #[test]
    fn order_zero_and_order_limit() {
        let d = dist(1, 1, 2);
        let cfg = McConfig::new(3, 2000).unwrap();
        let m = mc_moments(&d, &cfg, &[0, 2]).unwrap();
        assert_eq!((m[0].mean, m[0].std_error), (1.0, 0.0));
        assert!(m[1].within_sigma(2.0, 4.0));
        assert!(mc_moments(&d, &cfg, &[9]).is_err());
    }

    #[test]
    fn tiny_threshold_gives_zero_outage() {
        let loss = PathLossModel::new(0.0, 1.0, 1.0, 1.0, 2.0, 2.0).unwrap();
        let s = LinkScenario::from_linear(Arc::new(dist(2, 2, 4)), loss, 1.0, 1e-300, 1.0).unwrap();
        let e = mc_outage(&s, &McConfig::new(9, 4000).unwrap());
        assert_eq!(e.mean, 0.0);
        assert!(outage_probability(&s).unwrap() < 1e-200);
    }

    #[test]
    fn std_error_scales_with_sample_count() {
        let d = dist(2, 1, 4);
        let a = mc_expectation(&d, &McConfig::new(5, 50_000).unwrap(), |h| h);
        let b = mc_expectation(&d, &McConfig::new(5, 100_000).unwrap(), |h| h);
        let ratio = b.std_error / a.std_error;
        assert!((ratio - std::f64::consts::FRAC_1_SQRT_2).abs() < 0.1 * std::f64::consts::FRAC_1_SQRT_2);
    }

    #[test]
    fn interval_coverage() {
        // the 99% interval of the mean of |H| must cover the exact value in at least 95 of 100 seeds
        let d = dist(2, 1, 3);
        let exact = d.moment(1);
        let covered = (0..100u64)
            .filter(|&seed| mc_expectation(&d, &McConfig::new(seed, 4000).unwrap(), |h| h).contains(exact))
            .count();
        assert!(covered >= 95, "covered {covered}");
    }
}
