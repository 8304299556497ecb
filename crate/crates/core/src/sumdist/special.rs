//! Closed forms for the Rayleigh / Nakagami-m sum (`m1 = 1`), where the
//! expansion has a single term with Bessel index `Nm`.

use std::f64::consts::LN_2;

use num_complex::Complex64;

use super::{check_t, integrate_fallible, panels, support_from_survival, transform, NakagamiParams};
use dashu_int::IBig;

use crate::error::{domain, Error, Result};
use crate::mp;
use crate::quad::QuadOptions;
use crate::specfun::{bessel_k_scaled, ln_bessel_k, ln_factorial, ln_gamma, LogSigned};

fn check(function: &'static str, m: u32, omega1: f64, omega2: f64, n_vectors: u32) -> Result<()> {
    NakagamiParams::new(m, omega2)?;
    NakagamiParams::new(1, omega1)?;
    if n_vectors == 0 {
        return Err(domain(function, "need at least one vector"));
    }
    Ok(())
}

fn check_r(function: &'static str, r: f64) -> Result<()> {
    if r >= 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(domain(function, format!("r must be nonnegative and finite, got {r}")))
    }
}

/// `f(r) = 4 (m/(O1 O2))^{(Nm+1)/2} r^{Nm} K_{Nm-1}(2 sqrt(m/(O1 O2)) r) / (Nm-1)!`
pub fn special_pdf(m: u32, omega1: f64, omega2: f64, n_vectors: u32, r: f64) -> Result<f64> {
    check("special_pdf", m, omega1, omega2, n_vectors)?;
    check_r("special_pdf", r)?;
    if r == 0.0 {
        return Ok(0.0);
    }
    let nm = n_vectors * m;
    let ln_ratio = (f64::from(m) / (omega1 * omega2)).ln();
    let c = (0.5 * ln_ratio).exp();
    let ln = 2.0 * LN_2 + 0.5 * f64::from(nm + 1) * ln_ratio - ln_factorial(u64::from(nm - 1))
        + f64::from(nm) * r.ln()
        + ln_bessel_k(nm - 1, 2.0 * c * r)?;
    Ok(ln.exp())
}

/// `F(r) = 1 - 2 (cr)^{Nm} K_{Nm}(2cr) / (Nm-1)!`
///
/// Near the lower tail `1 - S` cancels, so the subtraction is redone in
/// multiprecision until `F` carries 1e-13 relative accuracy.
pub fn special_cdf(m: u32, omega1: f64, omega2: f64, n_vectors: u32, r: f64) -> Result<f64> {
    check("special_cdf", m, omega1, omega2, n_vectors)?;
    check_r("special_cdf", r)?;
    if r == 0.0 {
        return Ok(0.0);
    }
    let nm = n_vectors * m;
    let t = (f64::from(m) / (omega1 * omega2)).sqrt() * r;
    let power = f64::from(nm) * t.ln();
    let ln_k = ln_bessel_k(nm, 2.0 * t)?;
    let ln_fact = ln_factorial(u64::from(nm - 1));
    let s = (LN_2 + power + ln_k - ln_fact).exp().min(1.0);
    let cdf = 1.0 - s;
    let err = s * f64::EPSILON * (8.0 + 2.0 * (power.abs() + ln_k.abs() + ln_fact)) + f64::EPSILON;
    if err <= 1e-13 * cdf {
        return Ok(cdf);
    }
    let digits = |f: f64| (s / (1e-14 * f.max(1e-300))).log2().ceil().max(0.0) as usize;
    let guard = (f64::from(nm) + 16.0).log2().ceil() as usize + 16;
    let mut prec = (digits((cdf - err).max(1e-30)) + guard).max(64);
    loop {
        let f = mp::to_f64(&cdf_mp(nm, t, prec));
        let need = (digits(f) + guard).max(64);
        if need <= prec || prec >= MAX_PREC {
            return Ok(f.clamp(0.0, 1.0));
        }
        prec = need.min(MAX_PREC);
    }
}

const MAX_PREC: usize = 4096;

/// `1 - 2 t^n K_n(2t) / (n-1)!` at `prec` bits, with `K_n` by upward
/// recurrence in the order.
fn cdf_mp(n: u32, t: f64, prec: usize) -> mp::Mp {
    let x = 2.0 * t;
    let (mut k_prev, mut k, ln_factor) = mp::bessel_k01(x, prec);
    let inv_x = mp::int(1, prec) / mp::from_f64(x, prec);
    for v in 1..n {
        let next = &k_prev + &k * &inv_x * (2 * i64::from(v));
        k_prev = std::mem::replace(&mut k, next);
    }
    let fact = (1..n).fold(IBig::ONE, |acc, j| acc * IBig::from(j));
    let tn = mp::from_f64(t, prec).powi(IBig::from(n));
    let mut s = tn * k * 2i64 / mp::big(&fact, prec);
    if ln_factor != 0.0 {
        s *= mp::from_f64(ln_factor, prec).exp();
    }
    mp::int(1, prec) - s
}

pub(crate) fn special_survival(m: u32, omega1: f64, omega2: f64, n_vectors: u32, r: f64) -> Result<f64> {
    check("special_cdf", m, omega1, omega2, n_vectors)?;
    check_r("special_cdf", r)?;
    if r == 0.0 {
        return Ok(1.0);
    }
    let nm = n_vectors * m;
    let t = (f64::from(m) / (omega1 * omega2)).sqrt() * r;
    let ln = LN_2 + f64::from(nm) * t.ln() + ln_bessel_k(nm, 2.0 * t)? - ln_factorial(u64::from(nm - 1));
    Ok(ln.exp().min(1.0))
}

/// `E|H|^n = (O1 O2 / m)^{n/2} Gamma(n/2+1) Gamma(n/2+Nm) / Gamma(Nm)`
pub fn special_moment(m: u32, omega1: f64, omega2: f64, n_vectors: u32, n: u32) -> Result<f64> {
    check("special_moment", m, omega1, omega2, n_vectors)?;
    let half = f64::from(n) / 2.0;
    let nm = f64::from(n_vectors * m);
    let ln =
        half * (omega1 * omega2 / f64::from(m)).ln() + ln_gamma(half + 1.0)? + ln_gamma(half + nm)? - ln_gamma(nm)?;
    Ok(ln.exp())
}

fn support(m: u32, omega1: f64, omega2: f64, n_vectors: u32) -> Result<(f64, f64)> {
    let rms = (f64::from(n_vectors) * omega1 * omega2).sqrt();
    let rstar = support_from_survival(rms, |r| special_survival(m, omega1, omega2, n_vectors, r))?;
    Ok((rms, rstar))
}

/// `E[exp(j t |H|)]` by quadrature of [`special_pdf`].
pub fn special_charfn(m: u32, omega1: f64, omega2: f64, n_vectors: u32, t: f64) -> Result<Complex64> {
    check("special_charfn", m, omega1, omega2, n_vectors)?;
    check_t("special_charfn", t)?;
    let (rms, rstar) = support(m, omega1, omega2, n_vectors)?;
    transform(t, rms, rstar, |r| special_pdf(m, omega1, omega2, n_vectors, r))
}

/// `E[g(|H|)]` by quadrature of [`special_pdf`].
pub fn special_expectation<F: Fn(f64) -> f64>(
    m: u32,
    omega1: f64,
    omega2: f64,
    n_vectors: u32,
    g: F,
    opts: &QuadOptions,
) -> Result<f64> {
    check("special_expectation", m, omega1, omega2, n_vectors)?;
    let (rms, rstar) = support(m, omega1, omega2, n_vectors)?;
    integrate_fallible(
        |r| Ok(g(r) * special_pdf(m, omega1, omega2, n_vectors, r)?),
        &panels(rms, rstar),
        opts,
    )
}

/// Density of the product of two independent Nakagami-m amplitudes.
pub fn double_nakagami_pdf(a: NakagamiParams, b: NakagamiParams, z: f64) -> Result<f64> {
    check_r("double_nakagami_pdf", z)?;
    if z == 0.0 {
        return Ok(0.0);
    }
    let (m1, m2) = (a.m(), b.m());
    let ln_c2 = (f64::from(m1) * f64::from(m2) / (a.omega() * b.omega())).ln();
    let x = 2.0 * z * (0.5 * ln_c2).exp();
    let order = m1.abs_diff(m2);
    let ln_k = match bessel_k_scaled(order, x) {
        Ok(k) => k.ln() - x,
        Err(Error::Overflow { .. }) => ln_bessel_k(order, x)?,
        Err(e) => return Err(e),
    };
    let mag = LogSigned::new(
        2.0 * LN_2 + f64::from(m1 + m2 - 1) * z.ln()
            - ln_factorial(u64::from(m1 - 1))
            - ln_factorial(u64::from(m2 - 1))
            + 0.5 * f64::from(m1 + m2) * ln_c2
            + ln_k,
        1,
    );
    Ok(mag.to_f64())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::bessel_k;

    #[test]
    fn unit_double_rayleigh() {
        let want = 4.0 * bessel_k(0, 2.0).unwrap();
        assert!((special_pdf(1, 1.0, 1.0, 1, 1.0).unwrap() - want).abs() < 1e-15);
        let want = 1.0 - 2.0 * bessel_k(1, 2.0).unwrap();
        assert!((special_cdf(1, 1.0, 1.0, 1, 1.0).unwrap() - want).abs() < 1e-15);
        assert!((special_moment(2, 1.0, 1.0, 3, 2).unwrap() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn double_nakagami_normalises() {
        use crate::quad::integrate_panels;
        let a = NakagamiParams::new(3, 0.5).unwrap();
        let b = NakagamiParams::new(1, 2.0).unwrap();
        let r = integrate_panels(
            |z| double_nakagami_pdf(a, b, z).unwrap(),
            &[0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 20.0],
            &QuadOptions::new(1e-12, 0.0),
        )
        .unwrap();
        assert!((r.value - 1.0).abs() < 1e-11);
    }
}
