use std::sync::OnceLock;

use dashu_int::IBig;

use super::closed_form::Kernel;

use crate::mp;
use crate::specfun::{ln_factorial, LogSigned};

/// Exact integer binomial coefficient.
fn binomial(n: u64, k: u64) -> IBig {
    if k > n {
        return IBig::ZERO;
    }
    let k = k.min(n - k);
    let mut acc = IBig::ONE;
    for i in 0..k {
        acc = acc * IBig::from(n - i) / IBig::from(i + 1);
    }
    acc
}

/// Per-vector weights `w_k = (m2)_{m1-1-k} (1-m2)_k / ((m1-1-k)! k!)`
/// for `k = 0..m1`, in the order given (no shape swapping).
///
/// They are integers: `w_k = (-1)^k C(m1+m2-2-k, m1-1-k) C(m2-1, k)`.
pub fn base_weights(m1: u32, m2: u32) -> Vec<IBig> {
    let (m1, m2) = (u64::from(m1), u64::from(m2));
    (0..m1)
        .map(|k| {
            let w = binomial(m1 + m2 - 2 - k, m1 - 1 - k) * binomial(m2 - 1, k);
            if k % 2 == 1 {
                -w
            } else {
                w
            }
        })
        .collect()
}

fn poly_mul(a: &[IBig], b: &[IBig]) -> Vec<IBig> {
    let mut out = vec![IBig::ZERO; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if *x == IBig::ZERO {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `W(x)^n` by binary powering.
pub(crate) fn poly_pow(w: &[IBig], mut n: u32) -> Vec<IBig> {
    let mut result = vec![IBig::ONE];
    let mut base = w.to_vec();
    while n > 0 {
        if n & 1 == 1 {
            result = poly_mul(&result, &base);
        }
        n >>= 1;
        if n > 0 {
            base = poly_mul(&base, &base);
        }
    }
    result
}

pub(crate) fn ibig_to_log_signed(x: &IBig) -> LogSigned {
    mp::to_log_signed(&mp::Mp::from(x.clone()))
}

/// The collapsed coefficient structure of the N-fold sum.
///
/// `collapsed[s]` is the coefficient of `x^s` in `(sum_k w_k x^k)^N` and
/// multiplies the term with Bessel index `u = N(m1+m2-1) - s`.
#[derive(Clone, Debug)]
pub struct CoefficientExpansion {
    n_vectors: u32,
    m1: u32,
    m2: u32,
    base_exact: Vec<IBig>,
    exact: Vec<IBig>,
    base_weights: Vec<LogSigned>,
    collapsed: Vec<LogSigned>,
    ln_factorials: Vec<f64>,
    recurrence: [OnceLock<RecurrenceWeights>; 2],
}

/// Integer weights `a_v vmax! / v!` for the division-free recurrence
/// `H_{v+1} = t^2 H_{v-1} + v H_v` with `H_v = v! G_v`.
#[derive(Clone, Debug)]
pub(crate) struct RecurrenceWeights {
    pub weights: Vec<Option<IBig>>,
    pub vmax_factorial: IBig,
}

impl CoefficientExpansion {
    pub(crate) fn new(m1: u32, m2: u32, n_vectors: u32) -> Self {
        let base_exact = base_weights(m1, m2);
        let exact = poly_pow(&base_exact, n_vectors);
        CoefficientExpansion {
            n_vectors,
            m1,
            m2,
            base_weights: base_exact.iter().map(ibig_to_log_signed).collect(),
            collapsed: exact.iter().map(ibig_to_log_signed).collect(),
            ln_factorials: (0..=u64::from(n_vectors * (m1 + m2 - 1))).map(ln_factorial).collect(),
            base_exact,
            exact,
            recurrence: Default::default(),
        }
    }

    pub(crate) fn recurrence_weights(&self, kernel: Kernel) -> &RecurrenceWeights {
        let slot = match kernel {
            Kernel::Density => &self.recurrence[0],
            Kernel::Survival => &self.recurrence[1],
        };
        slot.get_or_init(|| {
            let vmax = kernel.index(self.u_max());
            let mut weights = vec![None; vmax as usize + 1];
            // vmax! / v! built downward from v = vmax
            let mut ratio = IBig::ONE;
            let mut by_index: Vec<Option<IBig>> = vec![None; vmax as usize + 1];
            for (u, c) in self.terms() {
                by_index[kernel.index(u) as usize] = Some(kernel.weight(u, c));
            }
            for v in (0..=vmax).rev() {
                if let Some(a) = &by_index[v as usize] {
                    weights[v as usize] = Some(a * &ratio);
                }
                if v > 0 {
                    ratio *= IBig::from(v);
                }
            }
            RecurrenceWeights {
                weights,
                vmax_factorial: ratio,
            }
        })
    }

    pub fn n_vectors(&self) -> u32 {
        self.n_vectors
    }

    pub fn base_weights(&self) -> &[LogSigned] {
        &self.base_weights
    }

    pub fn collapsed(&self) -> &[LogSigned] {
        &self.collapsed
    }

    pub fn base_weights_exact(&self) -> &[IBig] {
        &self.base_exact
    }

    pub fn collapsed_exact(&self) -> &[IBig] {
        &self.exact
    }

    /// Bessel index for collapsed position `s`.
    pub fn u_of_s(&self, s: usize) -> u32 {
        self.u_max() - s as u32
    }

    pub fn u_max(&self) -> u32 {
        self.n_vectors * (self.m1 + self.m2 - 1)
    }

    pub fn u_min(&self) -> u32 {
        self.n_vectors * self.m2
    }

    /// `ln v!` for `v = 0..=u_max`.
    pub(crate) fn ln_factorials(&self) -> &[f64] {
        &self.ln_factorials
    }

    /// `(u, c)` pairs over the nonzero coefficients.
    pub fn terms(&self) -> impl Iterator<Item = (u32, &IBig)> + '_ {
        self.exact
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != IBig::ZERO)
            .map(|(s, c)| (self.u_of_s(s), c))
    }

    /// `sum_s |c_s|`, the cancellation factor of every signed sum.
    pub fn abs_sum(&self) -> LogSigned {
        LogSigned::sum_abs(self.collapsed.iter().copied())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[IBig]) -> Vec<i64> {
        v.iter().map(|x| i64::try_from(x.clone()).unwrap()).collect()
    }

    #[test]
    fn weights_match_hand_values() {
        assert_eq!(ints(&base_weights(1, 7)), vec![1]);
        assert_eq!(ints(&base_weights(2, 3)), vec![3, -2]);
        assert_eq!(ints(&base_weights(2, 2)), vec![2, -1]);
        assert_eq!(ints(&base_weights(3, 3)), vec![6, -6, 1]);
        assert_eq!(ints(&base_weights(3, 2)), vec![3, -2, 0]);
    }

    #[test]
    fn squaring_by_hand() {
        let e = CoefficientExpansion::new(2, 3, 2);
        assert_eq!(ints(e.collapsed_exact()), vec![9, -12, 4]);
        assert_eq!(e.u_of_s(0), 8);
        assert_eq!(e.u_min(), 6);
    }

    #[test]
    fn power_matches_repeated_multiplication() {
        let w = base_weights(3, 4);
        let mut direct = vec![IBig::ONE];
        for _ in 0..13 {
            direct = poly_mul(&direct, &w);
        }
        assert_eq!(poly_pow(&w, 13), direct);
    }
}
