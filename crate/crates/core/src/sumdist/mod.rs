//! Law of `|H| = |sum_k h_k e^{j theta_k}|` for `N` independent
//! double-Nakagami-m amplitudes `h_k` and uniform phases.
//!
//! Every closed form is a signed sum over the collapsed index `u`, with
//! coefficients from [`CoefficientExpansion`]. Signed sums are evaluated in
//! `f64` when the rounding bound allows it and in multiprecision otherwise,
//! so the density stays accurate even when the terms cancel by hundreds of
//! orders of magnitude.

mod closed_form;
mod coeffs;
mod hankel;
mod moments;
mod sample;
mod special;

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::LN_2;
use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::mp;
use crate::quad::{integrate_panels, QuadOptions, QuadValue};
use crate::specfun::LogSigned;
use closed_form::{precision_for, sum_f64, sum_mp, F64Sum, Kernel};

pub use coeffs::{base_weights, CoefficientExpansion};
pub use sample::{chunk_rng, DEFAULT_CHUNK};
pub use special::{double_nakagami_pdf, special_cdf, special_charfn, special_expectation, special_moment, special_pdf};

/// One hop's fading law: integer shape `m` and spread `omega`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NakagamiParams {
    m: u32,
    omega: f64,
}

impl NakagamiParams {
    pub fn new(m: u32, omega: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("shape m must be at least 1".into()));
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "spread omega must be positive and finite, got {omega}"
            )));
        }
        Ok(NakagamiParams { m, omega })
    }

    /// Accepts a real shape but rejects anything that is not a positive integer.
    pub fn from_real(m: f64, omega: f64) -> Result<Self> {
        if !(m >= 1.0 && m.fract() == 0.0 && m <= f64::from(u32::MAX)) {
            return Err(Error::InvalidParameter(format!(
                "shape m must be a positive integer, got {m}"
            )));
        }
        Self::new(m as u32, omega)
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }
}

/// The distribution of `|H|` for `N` vectors.
#[derive(Clone, Debug)]
pub struct SumDistribution {
    link1: NakagamiParams,
    link2: NakagamiParams,
    n_vectors: u32,
    expansion: CoefficientExpansion,
    scale: f64,
    rms: f64,
    support: OnceLock<f64>,
}

fn check_r(function: &'static str, r: f64) -> Result<()> {
    if r >= 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(domain(function, format!("r must be nonnegative and finite, got {r}")))
    }
}

fn check_t(function: &'static str, t: f64) -> Result<()> {
    if t.is_finite() {
        Ok(())
    } else {
        Err(domain(function, format!("t must be finite, got {t}")))
    }
}

impl SumDistribution {
    /// Precomputes the coefficient expansion. The smaller shape drives the
    /// expansion; all results are symmetric in the two links.
    pub fn build(link1: NakagamiParams, link2: NakagamiParams, n_vectors: u32) -> Result<Self> {
        if n_vectors == 0 {
            return Err(Error::InvalidParameter("need at least one vector".into()));
        }
        let (lo, hi) = if link1.m <= link2.m {
            (link1.m, link2.m)
        } else {
            (link2.m, link1.m)
        };
        let shapes = f64::from(link1.m) * f64::from(link2.m);
        Ok(SumDistribution {
            link1,
            link2,
            n_vectors,
            expansion: CoefficientExpansion::new(lo, hi, n_vectors),
            scale: (shapes / (link1.omega * link2.omega)).sqrt(),
            rms: (f64::from(n_vectors) * link1.omega * link2.omega).sqrt(),
            support: OnceLock::new(),
        })
    }

    pub fn link1(&self) -> NakagamiParams {
        self.link1
    }

    pub fn link2(&self) -> NakagamiParams {
        self.link2
    }

    pub fn n_vectors(&self) -> u32 {
        self.n_vectors
    }

    pub fn expansion(&self) -> &CoefficientExpansion {
        &self.expansion
    }

    /// `c = sqrt(m1 m2 / (O1 O2))`.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `sqrt(E|H|^2) = sqrt(N O1 O2)`.
    pub fn rms(&self) -> f64 {
        self.rms
    }

    fn resolve(&self, kernel: Kernel, t: f64, f: &F64Sum, ln_floor: f64) -> LogSigned {
        let ln_rel = 1e-13f64.ln();
        if f.ln_err() <= (ln_rel + f.value.ln_abs()).max(ln_floor) {
            return f.value;
        }
        let ln_tol = (ln_rel + f.ln_lower()).max(ln_floor);
        let prec = precision_for(&self.expansion, kernel, f.abs, ln_tol);
        mp::to_log_signed(&sum_mp(&self.expansion, kernel, t, prec))
    }

    pub fn pdf(&self, r: f64) -> Result<f64> {
        check_r("pdf", r)?;
        self.pdf_within(r, 1e-15 / self.rms)
    }

    /// Density to `1e-13` relative or `abs_tol` absolute, whichever is looser.
    fn pdf_within(&self, r: f64, abs_tol: f64) -> Result<f64> {
        if r == 0.0 {
            return Ok(0.0);
        }
        let t = self.scale * r;
        let f = sum_f64(&self.expansion, Kernel::Density, t)?;
        let ln_floor = (abs_tol / (4.0 * self.scale)).ln();
        let raw = 4.0 * self.scale * self.resolve(Kernel::Density, t, &f, ln_floor).to_f64();
        debug_assert!(raw >= -1e-9 / self.rms, "density {raw} at r = {r}");
        Ok(raw.max(0.0))
    }

    pub fn survival(&self, r: f64) -> Result<f64> {
        check_r("survival", r)?;
        if r == 0.0 {
            return Ok(1.0);
        }
        let t = self.scale * r;
        let to_s = LN_2 - t.ln();
        let f = sum_f64(&self.expansion, Kernel::Survival, t)?;
        let s = self.resolve(Kernel::Survival, t, &f, 1e-30f64.ln() - to_s);
        Ok(s.scale_ln(to_s).to_f64().clamp(0.0, 1.0))
    }

    pub fn cdf(&self, r: f64) -> Result<f64> {
        check_r("cdf", r)?;
        if r == 0.0 {
            return Ok(0.0);
        }
        let t = self.scale * r;
        let to_s = LN_2 - t.ln();
        let f = sum_f64(&self.expansion, Kernel::Survival, t)?;
        let cdf = 1.0 - f.value.scale_ln(to_s).to_f64();
        let err = (f.ln_err() + to_s).exp() + f64::EPSILON;
        if err <= (1e-13 * cdf.abs()).max(1e-30) {
            return Ok(cdf.clamp(0.0, 1.0));
        }
        let tol = (1e-13 * (cdf.abs() - err).max(0.0)).max(1e-30);
        let prec = precision_for(&self.expansion, Kernel::Survival, f.abs, tol.ln() - to_s);
        let sum = sum_mp(&self.expansion, Kernel::Survival, t, prec);
        let cdf = mp::int(1, prec) - sum * 2i64 / mp::from_f64(t, prec);
        Ok(mp::to_f64(&cdf).clamp(0.0, 1.0))
    }

    fn spread_ratio(&self) -> f64 {
        self.link1.omega * self.link2.omega / (f64::from(self.link1.m) * f64::from(self.link2.m))
    }

    /// `ln E|H|^n`, from exact integer coefficient sums.
    pub fn ln_moment(&self, n: u32) -> f64 {
        moments::ln_moment(&self.expansion, self.spread_ratio(), n)
    }

    /// `E|H|^n`; overflows to infinity only when the moment itself does.
    pub fn moment(&self, n: u32) -> f64 {
        self.ln_moment(n).exp()
    }

    /// `E|H|^n` through log-Gamma ratios in `f64`; loses accuracy when the
    /// coefficients cancel, which makes it a cross-check only.
    pub fn moment_via_gamma_ratio(&self, n: u32) -> f64 {
        moments::moment_gamma_ratio(&self.expansion, self.spread_ratio(), n).to_f64()
    }

    /// Smallest `sqrt(N O1 O2) 2^k` with survival below `1e-10`.
    pub fn support_bound(&self) -> Result<f64> {
        if let Some(&r) = self.support.get() {
            return Ok(r);
        }
        let r = support_from_survival(self.rms, |r| self.survival(r))?;
        Ok(*self.support.get_or_init(|| r))
    }

    /// Quadrature breakpoints on `[0, support_bound]`.
    pub fn panels(&self) -> Result<Vec<f64>> {
        Ok(panels(self.rms, self.support_bound()?))
    }

    /// `E[g(|H|)]` to relative accuracy `1e-10`.
    pub fn expectation<F: Fn(f64) -> f64>(&self, g: F) -> Result<f64> {
        self.expectation_with(g, &QuadOptions::new(1e-10, 0.0))
    }

    pub fn expectation_with<F: Fn(f64) -> f64>(&self, g: F, opts: &QuadOptions) -> Result<f64> {
        let breaks = self.panels()?;
        integrate_fallible(|r| Ok(g(r) * self.pdf(r)?), &breaks, opts)
    }

    /// `E[exp(j t |H|)]`.
    pub fn char_fn(&self, t: f64) -> Result<Complex64> {
        check_t("char_fn", t)?;
        // the transform only needs the density to absolute accuracy
        let abs_tol = 1e-13 / self.rms;
        transform(t, self.rms, self.support_bound()?, |r| self.pdf_within(r, abs_tol))
    }

    /// [`char_fn`](Self::char_fn) at every `t`, sharing density evaluations.
    ///
    /// Each transform bisects the same base panels, so its nodes recur
    /// across `t`; the density is computed once per distinct node.
    pub fn char_fn_many(&self, ts: &[f64]) -> Result<Vec<Complex64>> {
        for &t in ts {
            check_t("char_fn_many", t)?;
        }
        let rstar = self.support_bound()?;
        let abs_tol = 1e-13 / self.rms;
        let cache: Mutex<HashMap<u64, f64>> = Mutex::new(HashMap::new());
        let pdf = |r: f64| -> Result<f64> {
            if let Some(&p) = cache.lock().expect("cache lock").get(&r.to_bits()) {
                return Ok(p);
            }
            let p = self.pdf_within(r, abs_tol)?;
            cache.lock().expect("cache lock").insert(r.to_bits(), p);
            Ok(p)
        };
        ts.par_iter().map(|&t| transform(t, self.rms, rstar, pdf)).collect()
    }

    /// Density from the Hankel-transform route, independent of the closed form.
    pub fn oracle_pdf_hankel(&self, r: f64) -> Result<f64> {
        hankel::oracle_pdf(self.link1, self.link2, self.n_vectors, r)
    }

    /// `E[J0(h rho)]` for one product amplitude `h`.
    pub fn mean_j0(&self, rho: f64) -> f64 {
        hankel::JZeroMean::new(self.link1, self.link2).eval(rho)
    }

    /// One draw of `|H|`.
    pub fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        sample::draw(rng, self.link1, self.link2, self.n_vectors)
    }

    /// `count` draws; chunk `i` uses substream `i` of `seed`, so the result
    /// does not depend on the number of worker threads.
    pub fn sample(&self, seed: u64, count: usize) -> Vec<f64> {
        let chunks = count.div_ceil(DEFAULT_CHUNK);
        let parts: Vec<Vec<f64>> = (0..chunks)
            .into_par_iter()
            .map(|i| {
                let mut rng = chunk_rng(seed, i as u64);
                let len = DEFAULT_CHUNK.min(count - i * DEFAULT_CHUNK);
                (0..len).map(|_| self.draw(&mut rng)).collect()
            })
            .collect();
        parts.concat()
    }
}

pub(crate) fn support_from_survival<F: Fn(f64) -> Result<f64>>(rms: f64, survival: F) -> Result<f64> {
    let mut r = rms;
    for _ in 0..64 {
        if survival(r)? < 1e-10 {
            return Ok(r);
        }
        r *= 2.0;
    }
    Err(Error::InvalidParameter(format!(
        "survival function does not decay (rms {rms})"
    )))
}

pub(crate) fn panels(rms: f64, rstar: f64) -> Vec<f64> {
    let mut out = vec![0.0];
    let mut x = rms / 8.0;
    while x < rstar {
        out.push(x);
        x *= if x < rms { 2.0 } else { 1.5 };
    }
    out.push(rstar);
    out
}

/// Adaptive quadrature over an integrand that may fail; the first failure wins.
pub(crate) fn integrate_fallible<T: QuadValue, F: Fn(f64) -> Result<T>>(
    f: F,
    breaks: &[f64],
    opts: &QuadOptions,
) -> Result<T> {
    let failure = RefCell::new(None);
    let result = integrate_panels(
        |x| match f(x) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                T::zero()
            }
        },
        breaks,
        opts,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(result?.value)
}

pub(crate) fn transform<F: Fn(f64) -> Result<f64>>(t: f64, rms: f64, rstar: f64, pdf: F) -> Result<Complex64> {
    if t == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    if t < 0.0 {
        return transform(-t, rms, rstar, pdf).map(|z| z.conj());
    }
    integrate_fallible(
        |r| Ok(Complex64::from_polar(pdf(r)?, t * r)),
        &panels(rms, rstar),
        &QuadOptions::new(1e-12, 1e-12),
    )
}
