//! Density of `|H|` by inverting the characteristic function of the
//! planar sum: `f(r) = r * int_0^inf rho J0(r rho) Lambda(rho)^N d rho`,
//! where `Lambda(rho) = E[J0(h rho)]` has a finite-sum form for integer
//! shapes. The oscillatory tail is split at the zeros of `J0(r rho)` and
//! the partial sums are accelerated with Wynn's epsilon algorithm.

use crate::error::{Error, Result};
use crate::quad::{integrate, QuadOptions};
use crate::specfun::{bessel_j0, bessel_j0_zero};

use super::NakagamiParams;

const MAX_PIECES: u32 = 20_000;

/// Finite-sum coefficients of `Lambda` in powers of
/// `x = 4 m1 m2 / (4 m1 m2 + O1 O2 rho^2)`.
pub(crate) struct JZeroMean {
    // (exponent, coefficient)
    terms: Vec<(i32, f64)>,
    scale: f64,
}

impl JZeroMean {
    pub(crate) fn new(a: NakagamiParams, b: NakagamiParams) -> Self {
        let (m1, m2) = (f64::from(a.m()), f64::from(b.m()));
        let lead: f64 = (0..b.m() - 1).map(|j| (m1 + f64::from(j)) / f64::from(j + 1)).product();
        let mut coef = lead;
        let mut terms = Vec::new();
        for k in 0..a.m() {
            let kf = f64::from(k);
            if k > 0 {
                let j = kf - 1.0;
                coef *= (1.0 - m1 + j) * (1.0 - m2 + j) / ((2.0 - m1 - m2 + j) * kf);
            }
            terms.push((a.m() as i32 + b.m() as i32 - k as i32 - 1, coef));
        }
        JZeroMean {
            terms,
            scale: a.omega() * b.omega() / (4.0 * m1 * m2),
        }
    }

    pub(crate) fn eval(&self, rho: f64) -> f64 {
        let x = 1.0 / (1.0 + self.scale * rho * rho);
        self.terms.iter().map(|&(p, c)| c * x.powi(p)).sum()
    }
}

/// Last even-column entry of the epsilon table built on `s`.
fn wynn(s: &[f64]) -> f64 {
    let mut prev = vec![0.0; s.len() + 1];
    let mut cur = s.to_vec();
    let mut best = *s.last().expect("nonempty");
    for col in 1..s.len() {
        let next: Vec<f64> = (0..cur.len() - 1)
            .map(|i| prev[i + 1] + 1.0 / (cur[i + 1] - cur[i]))
            .collect();
        if next.iter().any(|v| !v.is_finite()) {
            break;
        }
        if col % 2 == 0 {
            best = *next.last().expect("nonempty");
        }
        prev = cur;
        cur = next;
    }
    best
}

pub(crate) fn oracle_pdf(a: NakagamiParams, b: NakagamiParams, n_vectors: u32, r: f64) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Oracle {
            r,
            detail: "r must be positive".into(),
        });
    }
    if n_vectors == 0 || n_vectors > 64 {
        return Err(Error::Oracle {
            r,
            detail: format!("N = {n_vectors} is outside 1..=64"),
        });
    }
    let lam = JZeroMean::new(a, b);
    let n = n_vectors as i32;
    let integrand = |rho: f64| rho * bessel_j0(r * rho) * lam.eval(rho).powi(n);
    let oracle_err = |detail: String| Error::Oracle { r, detail };

    let mut partial = Vec::new();
    let mut sum = 0.0;
    let mut biggest = 0.0f64;
    let mut left = 0.0;
    let mut quiet = 0;
    let mut history: Vec<f64> = Vec::new();
    for k in 1..=MAX_PIECES {
        let right = bessel_j0_zero(k) / r;
        let opts = QuadOptions::new(1e-13, 1e-17 * biggest);
        let piece = integrate(integrand, left, right, &opts)
            .map_err(|e| oracle_err(format!("piece {k}: {e}")))?
            .value;
        left = right;
        sum += piece;
        biggest = biggest.max(sum.abs()).max(piece.abs());
        partial.push(sum);

        if piece.abs() <= 1e-17 * biggest {
            quiet += 1;
            if quiet >= 3 {
                return Ok(r * sum);
            }
            continue;
        }
        quiet = 0;
        if partial.len() >= 6 {
            let window = &partial[partial.len().saturating_sub(24)..];
            let est = wynn(window);
            history.push(est);
            if let [.., a, b, c] = history[..] {
                let tol = 1e-12 * c.abs().max(1e-300);
                if (c - b).abs() <= tol && (b - a).abs() <= tol {
                    return Ok(r * c);
                }
            }
        }
    }
    Err(oracle_err(format!(
        "no convergence after {MAX_PIECES} pieces, last estimate {}",
        r * sum
    )))
}
