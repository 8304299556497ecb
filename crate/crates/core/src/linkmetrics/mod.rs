//! Performance of a link relayed by a randomly reconfigurable surface.
//!
//! The received SNR is `l gamma_t |H|^2`. Capacity and error
//! probabilities are expectations of their conditional forms against the
//! density of `|H|`, evaluated by adaptive quadrature.

mod modulation;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quad::QuadOptions;
use crate::specfun::{erfc, ln_gamma, upper_incomplete_gamma};
use crate::sumdist::{special_cdf, special_expectation, SumDistribution};

pub use modulation::{BinaryModulation, MAryKind, MAryModulation, ModulationScheme};

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

fn positive(name: &str, x: f64) -> Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be positive and finite, got {x}"
        )))
    }
}

/// Two-hop power-law path loss `l_i = C0 (d_i / d0)^{-alpha_i}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathLossModel {
    c0: f64,
    d0: f64,
    d1: f64,
    d2: f64,
    alpha1: f64,
    alpha2: f64,
}

impl PathLossModel {
    pub fn new(c0_db: f64, d0: f64, d1: f64, d2: f64, alpha1: f64, alpha2: f64) -> Result<Self> {
        if !c0_db.is_finite() {
            return Err(Error::InvalidParameter(format!("C0 must be finite, got {c0_db} dB")));
        }
        let d0 = positive("d0", d0)?;
        for (name, d) in [("d1", d1), ("d2", d2)] {
            if !(positive(name, d)? >= d0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {d} m lies inside the reference distance d0 = {d0} m"
                )));
            }
        }
        Ok(PathLossModel {
            c0: db_to_linear(c0_db),
            d0,
            d1,
            d2,
            alpha1: positive("alpha1", alpha1)?,
            alpha2: positive("alpha2", alpha2)?,
        })
    }

    /// Surface at fraction `w` of a straight path of length `d`.
    pub fn on_path(c0_db: f64, d0: f64, d: f64, w: f64, alpha1: f64, alpha2: f64) -> Result<Self> {
        if !(w > 0.0 && w < 1.0) {
            return Err(Error::InvalidParameter(format!("w must lie in (0, 1), got {w}")));
        }
        Self::new(c0_db, d0, w * d, (1.0 - w) * d, alpha1, alpha2)
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn d0(&self) -> f64 {
        self.d0
    }

    pub fn distances(&self) -> (f64, f64) {
        (self.d1, self.d2)
    }

    pub fn exponents(&self) -> (f64, f64) {
        (self.alpha1, self.alpha2)
    }

    pub fn hop_losses(&self) -> (f64, f64) {
        (
            self.c0 * (self.d1 / self.d0).powf(-self.alpha1),
            self.c0 * (self.d2 / self.d0).powf(-self.alpha2),
        )
    }
}

/// `l = l1 l2`.
pub fn equivalent_loss(p: &PathLossModel) -> f64 {
    let (l1, l2) = p.hop_losses();
    l1 * l2
}

/// Everything needed to evaluate the link metrics.
#[derive(Clone, Debug)]
pub struct LinkScenario {
    dist: Arc<SumDistribution>,
    loss: PathLossModel,
    gamma_t: f64,
    gamma_thr: f64,
    bandwidth: f64,
}

impl LinkScenario {
    /// SNRs in dB, bandwidth in Hz.
    pub fn new(
        dist: Arc<SumDistribution>,
        loss: PathLossModel,
        gamma_t_db: f64,
        gamma_thr_db: f64,
        bandwidth: f64,
    ) -> Result<Self> {
        Self::from_linear(
            dist,
            loss,
            db_to_linear(gamma_t_db),
            db_to_linear(gamma_thr_db),
            bandwidth,
        )
    }

    pub fn from_linear(
        dist: Arc<SumDistribution>,
        loss: PathLossModel,
        gamma_t: f64,
        gamma_thr: f64,
        bandwidth: f64,
    ) -> Result<Self> {
        Ok(LinkScenario {
            dist,
            loss,
            gamma_t: positive("gamma_t", gamma_t)?,
            gamma_thr: positive("gamma_thr", gamma_thr)?,
            bandwidth: positive("bandwidth", bandwidth)?,
        })
    }

    pub fn dist(&self) -> &SumDistribution {
        &self.dist
    }

    pub fn loss(&self) -> &PathLossModel {
        &self.loss
    }

    pub fn gamma_t(&self) -> f64 {
        self.gamma_t
    }

    pub fn gamma_thr(&self) -> f64 {
        self.gamma_thr
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    /// `l gamma_t`, the factor mapping `|H|^2` to received SNR.
    pub fn snr_gain(&self) -> f64 {
        equivalent_loss(&self.loss) * self.gamma_t
    }

    pub fn with_gamma_t(&self, gamma_t: f64) -> Result<Self> {
        Self::from_linear(self.dist.clone(), self.loss, gamma_t, self.gamma_thr, self.bandwidth)
    }
}

/// Shape of the non-Rayleigh hop when one hop is Rayleigh.
fn special_shape(d: &SumDistribution) -> Option<u32> {
    let (m1, m2) = (d.link1().m(), d.link2().m());
    (m1 == 1 || m2 == 1).then_some(m1.max(m2))
}

fn expect<F: Fn(f64) -> f64>(d: &SumDistribution, g: F) -> Result<f64> {
    let opts = QuadOptions::new(1e-10, 0.0);
    match special_shape(d) {
        Some(m) => special_expectation(m, d.link1().omega(), d.link2().omega(), d.n_vectors(), g, &opts),
        None => d.expectation_with(g, &opts),
    }
}

/// `P(l gamma_t |H|^2 < gamma_thr)`.
pub fn outage_probability(s: &LinkScenario) -> Result<f64> {
    let d = s.dist();
    let r = (s.gamma_thr / s.snr_gain()).sqrt();
    match special_shape(d) {
        Some(m) => special_cdf(m, d.link1().omega(), d.link2().omega(), d.n_vectors(), r),
        None => d.cdf(r),
    }
}

/// `E[gamma_r] = l N O1 O2 gamma_t`, independent of the shapes.
pub fn average_received_snr(s: &LinkScenario) -> f64 {
    let d = s.dist();
    s.snr_gain() * f64::from(d.n_vectors()) * d.link1().omega() * d.link2().omega()
}

/// `B E[log2(1 + gamma_r)]` in bit/s.
pub fn ergodic_capacity(s: &LinkScenario) -> Result<f64> {
    let g = s.snr_gain();
    Ok(s.bandwidth * expect(s.dist(), |r| (g * r * r).ln_1p() / std::f64::consts::LN_2)?)
}

/// Conditional binary BEP `Gamma(b, a x) / (2 Gamma(b))` at received SNR `x`.
pub fn conditional_bep_binary(m: &BinaryModulation, snr: f64) -> f64 {
    let norm = 2.0 * ln_gamma(m.b).expect("table value").exp();
    upper_incomplete_gamma(m.b, m.a * snr).expect("table value") / norm
}

/// Conditional M-ary BEP `a_M sum_k erfc(sqrt(b_k x))` at received SNR `x`.
pub fn conditional_bep_mary(m: &MAryModulation, snr: f64) -> f64 {
    m.a() * m.b().iter().map(|b| erfc((b * snr).sqrt())).sum::<f64>()
}

/// Conditional BEP of any scheme at received SNR `x`.
pub fn conditional_bep(m: &ModulationScheme, snr: f64) -> f64 {
    match m {
        ModulationScheme::Binary(b) => conditional_bep_binary(b, snr),
        ModulationScheme::MAry(q) => conditional_bep_mary(q, snr),
    }
}

pub fn bep_binary(s: &LinkScenario, m: &ModulationScheme) -> Result<f64> {
    let ModulationScheme::Binary(b) = m else {
        return Err(Error::InvalidParameter(format!("{m} is not a binary scheme")));
    };
    let g = s.snr_gain();
    expect(s.dist(), |r| conditional_bep_binary(b, g * r * r))
}

pub fn bep_mary(s: &LinkScenario, m: &ModulationScheme) -> Result<f64> {
    let ModulationScheme::MAry(q) = m else {
        return Err(Error::InvalidParameter(format!("{m} is binary; use bep_binary")));
    };
    let g = s.snr_gain();
    expect(s.dist(), |r| conditional_bep_mary(q, g * r * r))
}

pub fn bep(s: &LinkScenario, m: &ModulationScheme) -> Result<f64> {
    match m {
        ModulationScheme::Binary(_) => bep_binary(s, m),
        ModulationScheme::MAry(_) => bep_mary(s, m),
    }
}

/// `1 + (1 + m1 + m2 - m1 m2) / (N m1 m2)`.
pub fn aof(d: &SumDistribution) -> f64 {
    let n = f64::from(d.n_vectors());
    if let Some(m) = special_shape(d) {
        let nm = n * f64::from(m);
        return (2.0 + nm) / nm;
    }
    let (m1, m2) = (f64::from(d.link1().m()), f64::from(d.link2().m()));
    1.0 + (1.0 + m1 + m2 - m1 * m2) / (n * m1 * m2)
}

/// `(1 + m1 + m2 + m1 m2 (N-1)) / (N^2 m1 m2 O1 O2 l gamma_t)`.
pub fn cqei(s: &LinkScenario) -> f64 {
    let d = s.dist();
    let n = f64::from(d.n_vectors());
    let spread = d.link1().omega() * d.link2().omega() * s.snr_gain();
    if let Some(m) = special_shape(d) {
        let m = f64::from(m);
        return (2.0 + n * m) / (n * n * m * spread);
    }
    let (m1, m2) = (f64::from(d.link1().m()), f64::from(d.link2().m()));
    (1.0 + m1 + m2 + m1 * m2 * (n - 1.0)) / (n * n * m1 * m2 * spread)
}
