//! Signed Bessel sums `sum_s a_s G_{v_s}(t)` with `G_v = t^{v+1} K_v(2t) / v!`.
//!
//! The density is `4c * sum c_s G_{u-1}` and the survival function is
//! `(2/t) * sum c_s u G_u`. Both are evaluated in `f64` first with a
//! running rounding-error bound; when the signed terms cancel too much the
//! sum is redone in binary multiprecision, where `H_v = v! G_v` obeys
//! `H_{v+1} = t^2 H_{v-1} + v H_v`.

use std::f64::consts::LN_2;

use dashu_int::IBig;

use super::coeffs::CoefficientExpansion;
use crate::error::Result;
use crate::mp::{self, Mp};
use crate::specfun::{ln_bessel_k_upto, LogSigned};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Kernel {
    Density,
    Survival,
}

impl Kernel {
    pub(crate) fn index(self, u: u32) -> u32 {
        match self {
            Kernel::Density => u - 1,
            Kernel::Survival => u,
        }
    }

    pub(crate) fn weight(self, u: u32, c: &IBig) -> IBig {
        match self {
            Kernel::Density => c.clone(),
            Kernel::Survival => c * IBig::from(u),
        }
    }
}

pub(crate) struct F64Sum {
    pub value: LogSigned,
    /// `sum |a_s G_{v_s}|`
    pub abs: LogSigned,
    /// error bound divided by `abs`
    pub rel_err: f64,
}

impl F64Sum {
    pub fn ln_err(&self) -> f64 {
        self.rel_err.ln() + self.abs.ln_abs()
    }

    /// ln of a lower bound on `|value|`, or `-inf` when the sign is unknown.
    pub fn ln_lower(&self) -> f64 {
        let v = self.value.ln_abs();
        let e = self.ln_err();
        if self.value.is_zero() || e >= v {
            f64::NEG_INFINITY
        } else {
            v + (-(e - v).exp()).ln_1p()
        }
    }
}

pub(crate) fn sum_f64(e: &CoefficientExpansion, kernel: Kernel, t: f64) -> Result<F64Sum> {
    let eps = f64::EPSILON;
    let vmax = kernel.index(e.u_max());
    let ln_k = ln_bessel_k_upto(vmax, 2.0 * t)?;
    let ln_t = t.ln();
    let ln_fact = e.ln_factorials();
    let mut terms = Vec::with_capacity(e.collapsed().len());
    let mut errs = Vec::with_capacity(e.collapsed().len());
    for (s, c) in e.collapsed().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let u = e.u_of_s(s);
        let v = kernel.index(u) as usize;
        let power = (v + 1) as f64 * ln_t;
        let mut ln_g = power + ln_k[v] - ln_fact[v];
        if kernel == Kernel::Survival {
            ln_g += f64::from(u).ln();
        }
        let term = c.scale_ln(ln_g);
        let rel = eps * (8.0 + 2.0 * (power.abs() + ln_k[v].abs() + ln_fact[v] + v as f64));
        terms.push(term);
        errs.push(term.abs().scale_ln(rel.ln()));
    }
    let value = LogSigned::sum(terms.iter().copied());
    let abs = LogSigned::sum_abs(terms.iter().copied());
    let err = LogSigned::sum(errs);
    let rel_err = (err.ln_abs() - abs.ln_abs()).exp() + eps * terms.len() as f64;
    Ok(F64Sum { value, abs, rel_err })
}

/// Bits needed to push the error of the multiprecision sum below `exp(ln_tol)`.
pub(crate) fn precision_for(e: &CoefficientExpansion, kernel: Kernel, abs: LogSigned, ln_tol: f64) -> usize {
    let vmax = kernel.index(e.u_max());
    let headroom = ((abs.ln_abs() - ln_tol) / LN_2).ceil().max(0.0) as usize;
    (headroom + (f64::from(vmax) + 16.0).log2().ceil() as usize + 12).max(64)
}

/// The same sum at `prec` bits, including the exponential factor.
pub(crate) fn sum_mp(e: &CoefficientExpansion, kernel: Kernel, t: f64, prec: usize) -> Mp {
    let rw = e.recurrence_weights(kernel);
    let vmax = rw.weights.len() - 1;
    let (a0, a1, ln_factor) = mp::bessel_k01(2.0 * t, prec);
    let tm = mp::from_f64(t, prec);
    let t2 = &tm * &tm;
    let mut h = &tm * a0;
    let mut h_next = &t2 * a1;
    let mut acc = mp::int(0, prec);
    for (v, w) in rw.weights.iter().enumerate() {
        if let Some(w) = w {
            acc += mp::big(w, prec) * &h;
        }
        if v == vmax {
            break;
        }
        let h_after = &t2 * &h + &h_next * (v as i64 + 1);
        h = std::mem::replace(&mut h_next, h_after);
    }
    acc /= mp::big(&rw.vmax_factorial, prec);
    if ln_factor != 0.0 {
        acc *= mp::from_f64(ln_factor, prec).exp();
    }
    acc
}
