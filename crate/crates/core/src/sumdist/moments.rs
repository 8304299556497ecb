use std::f64::consts::{LN_2, PI};

use dashu_int::IBig;

use super::coeffs::{ibig_to_log_signed, CoefficientExpansion};
use crate::specfun::{ln_factorial, ln_gamma_pos, LogSigned};

fn rising(u: u32, len: u32) -> IBig {
    (0..len).fold(IBig::ONE, |acc, j| acc * IBig::from(u + j))
}

fn central_binomial(u: u32) -> IBig {
    (0..u).fold(IBig::ONE, |acc, i| acc * IBig::from(2 * u - i) / IBig::from(i + 1))
}

/// `ln E|H|^n` from exact integer sums; `d = Omega1 Omega2 / (m1 m2)`.
pub(crate) fn ln_moment(e: &CoefficientExpansion, d: f64, n: u32) -> f64 {
    let half = n / 2;
    if n.is_multiple_of(2) {
        // d^l l! sum c_s (u)_l
        let z: IBig = e.terms().map(|(u, c)| c * rising(u, half)).sum();
        f64::from(half) * d.ln() + ln_factorial(u64::from(half)) + ibig_to_log_signed(&z).ln_abs()
    } else {
        // Gamma(u + l + 1/2) / Gamma(u) = sqrt(pi) u C(2u,u) prod_{j<l} (2u+1+2j) / (2^l 4^u)
        let top = e.u_max();
        let z: IBig = e
            .terms()
            .map(|(u, c)| {
                let odd: IBig = (0..half).fold(IBig::ONE, |acc, j| acc * IBig::from(2 * u + 1 + 2 * j));
                (c * IBig::from(u) * central_binomial(u) * odd) << (2 * (top - u) as usize)
            })
            .sum();
        let n_half = f64::from(n) / 2.0;
        n_half * d.ln() + ln_gamma_pos(n_half + 1.0) + 0.5 * PI.ln() + ibig_to_log_signed(&z).ln_abs()
            - f64::from(half) * LN_2
            - 2.0 * f64::from(top) * LN_2
    }
}

/// The same moment through `Gamma(n/2 + u) / Gamma(u)` in log-signed `f64`.
pub(crate) fn moment_gamma_ratio(e: &CoefficientExpansion, d: f64, n: u32) -> LogSigned {
    let n_half = f64::from(n) / 2.0;
    let terms = e.collapsed().iter().enumerate().map(|(s, c)| {
        let u = f64::from(e.u_of_s(s));
        c.scale_ln(ln_gamma_pos(n_half + u) - ln_gamma_pos(u))
    });
    LogSigned::sum(terms).scale_ln(n_half * d.ln() + ln_gamma_pos(n_half + 1.0))
}
