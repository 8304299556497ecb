//! Binary multiprecision helpers for sums whose terms cancel heavily.

use std::f64::consts::{LN_2, PI};
use std::sync::Mutex;

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use dashu_int::ops::BitTest;
use dashu_int::IBig;

use crate::specfun::LogSigned;

pub(crate) type Mp = FBig<HalfEven, 2>;

static EULER: Mutex<Option<Mp>> = Mutex::new(None);

pub(crate) fn int(n: i64, prec: usize) -> Mp {
    Mp::from(n).with_precision(prec).value()
}

pub(crate) fn big(n: &IBig, prec: usize) -> Mp {
    Mp::from(n.clone()).with_precision(prec).value()
}

pub(crate) fn from_f64(x: f64, prec: usize) -> Mp {
    Mp::try_from(x).expect("finite value").with_precision(prec).value()
}

pub(crate) fn set_prec(x: Mp, prec: usize) -> Mp {
    x.with_precision(prec).value()
}

/// `floor(log2 |x|) + 1`, or `None` for zero.
pub(crate) fn log2_mag(x: &Mp) -> Option<isize> {
    let sig = x.repr().significand();
    if *sig == IBig::ZERO {
        None
    } else {
        Some(x.repr().exponent() + sig.bit_len() as isize)
    }
}

pub(crate) fn to_log_signed(x: &Mp) -> LogSigned {
    let sig = x.repr().significand();
    if *sig == IBig::ZERO {
        return LogSigned::ZERO;
    }
    let shift = sig.bit_len().saturating_sub(64);
    let top = (sig.clone() >> shift).to_f64().value();
    let e = x.repr().exponent() + shift as isize;
    LogSigned::from_f64(top).scale_ln(e as f64 * LN_2)
}

pub(crate) fn to_f64(x: &Mp) -> f64 {
    x.to_f64().value()
}

/// Euler's constant by the Brent–McMillan scheme, cached at the highest
/// precision requested so far.
pub(crate) fn euler_gamma(prec: usize) -> Mp {
    let mut cache = EULER.lock().unwrap_or_else(|e| e.into_inner());
    if let Some(g) = cache.as_ref() {
        if g.precision() >= prec {
            return set_prec(g.clone(), prec);
        }
    }
    let target = prec.max(cache.as_ref().map_or(0, |g| 2 * g.precision())).max(128);
    let g = brent_mcmillan(target);
    *cache = Some(g.clone());
    set_prec(g, prec)
}

fn brent_mcmillan(prec: usize) -> Mp {
    let wp = prec + 32;
    let n = ((wp as f64 + 10.0) * LN_2 / 4.0).ceil() as i64 + 1;
    let n2 = n * n;
    let mut a = -int(n, wp).ln();
    let mut b = int(1, wp);
    let mut u = a.clone();
    let mut v = b.clone();
    let kmax = (3.6 * n as f64).ceil() as i64 + 4;
    for k in 1..=kmax {
        b = b * n2 / (k * k);
        a = (a * n2 / k + &b) / k;
        u += &a;
        v += &b;
    }
    set_prec(u / v, prec)
}

/// `K_0(x)` and `K_1(x)` to `prec` bits as `(a0, a1, ln_factor)` with
/// `K_v(x) = a_v exp(ln_factor)`.
pub(crate) fn bessel_k01(x: f64, prec: usize) -> (Mp, Mp, f64) {
    if 2.885 * x >= (prec + 40) as f64 {
        k01_asymptotic(x, prec)
    } else {
        k01_series(x, prec)
    }
}

fn k01_series(x: f64, prec: usize) -> (Mp, Mp, f64) {
    let wp = prec + (2.0 * x * std::f64::consts::LOG2_E).ceil() as usize + 24;
    let xm = from_f64(x, wp);
    let half_x = &xm / 2i64;
    let q = &half_x * &half_x;
    let lg = half_x.ln() + euler_gamma(wp);
    let one = int(1, wp);
    let mut t0 = one.clone();
    let mut t1 = one.clone();
    let mut i0 = one.clone();
    let mut s0 = int(0, wp);
    let mut i1 = one.clone();
    let mut s1 = one.clone();
    let floor = -(wp as isize) - 4;
    // h_k and h_{k+1}
    let mut h_next = one.clone();
    for k in 1i64.. {
        let h = std::mem::replace(&mut h_next, int(0, wp));
        h_next = &h + &one / (k + 1);
        t0 = t0 * &q / (k * k);
        t1 = t1 * &q / (k * (k + 1));
        i0 += &t0;
        s0 += &h * &t0;
        i1 += &t1;
        s1 += (&h + &h_next) * &t1;
        let small = |t: &Mp, s: &Mp| match (log2_mag(t), log2_mag(s)) {
            (Some(a), Some(b)) => a - b < floor,
            _ => true,
        };
        if k as f64 > x && small(&t0, &i0) && small(&t1, &i1) {
            break;
        }
    }
    let k0 = s0 - &lg * i0;
    let i1 = &half_x * i1;
    let k1 = &one / &xm + &lg * i1 - &half_x / 2i64 * s1;
    (set_prec(k0, prec), set_prec(k1, prec), 0.0)
}

fn k01_asymptotic(x: f64, prec: usize) -> (Mp, Mp, f64) {
    let wp = prec + 24;
    let inv8x = int(1, wp) / from_f64(8.0 * x, wp);
    let floor = -(wp as isize) - 4;
    let series = |mu: i64| {
        let mut term = int(1, wp);
        let mut sum = term.clone();
        let mut last = 0;
        for k in 1i64.. {
            let odd = 2 * k - 1;
            term = term * (mu - odd * odd) * &inv8x / k;
            match log2_mag(&term) {
                // divergent tail: stop at the smallest term
                Some(e) if e >= floor && e <= last => {
                    sum += &term;
                    last = e;
                }
                _ => break,
            }
        }
        sum
    };
    let a0 = series(0);
    let a1 = series(4);
    let ln_factor = 0.5 * (PI / (2.0 * x)).ln() - x;
    (set_prec(a0, prec), set_prec(a1, prec), ln_factor)
}
