use std::cmp::Ordering;
use std::fmt;
use std::ops::{Div, Mul, Neg};

/// A real number stored as `sign * exp(ln_mag)`.
///
/// Used wherever products of factorials, Pochhammer symbols and Bessel
/// functions would overflow or underflow an `f64`. A zero value has
/// `sign == 0` and its magnitude is never consulted.
#[derive(Clone, Copy, Debug)]
pub struct LogSigned {
    ln_mag: f64,
    sign: i8,
}

impl LogSigned {
    pub const ZERO: LogSigned = LogSigned {
        ln_mag: f64::NEG_INFINITY,
        sign: 0,
    };
    pub const ONE: LogSigned = LogSigned { ln_mag: 0.0, sign: 1 };

    /// Builds a value from its natural-log magnitude and sign.
    pub fn new(ln_mag: f64, sign: i8) -> Self {
        if sign == 0 || ln_mag == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        LogSigned {
            ln_mag,
            sign: sign.signum(),
        }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            LogSigned {
                ln_mag: x.abs().ln(),
                sign: if x > 0.0 { 1 } else { -1 },
            }
        }
    }

    /// Converts back to `f64`; saturates to `±inf` or `±0`.
    pub fn to_f64(self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => f64::from(s) * self.ln_mag.exp(),
        }
    }

    pub fn ln_abs(self) -> f64 {
        self.ln_mag
    }

    pub fn sign(self) -> i8 {
        self.sign
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    pub fn abs(self) -> Self {
        LogSigned {
            ln_mag: self.ln_mag,
            sign: self.sign.abs(),
        }
    }

    pub fn recip(self) -> Self {
        assert!(self.sign != 0, "reciprocal of zero");
        LogSigned {
            ln_mag: -self.ln_mag,
            sign: self.sign,
        }
    }

    /// Multiplies by `exp(ln_factor)`.
    pub fn scale_ln(self, ln_factor: f64) -> Self {
        if self.sign == 0 {
            self
        } else {
            LogSigned {
                ln_mag: self.ln_mag + ln_factor,
                sign: self.sign,
            }
        }
    }

    pub fn powi(self, n: u32) -> Self {
        if n == 0 {
            return Self::ONE;
        }
        match self.sign {
            0 => Self::ZERO,
            s => LogSigned {
                ln_mag: self.ln_mag * f64::from(n),
                sign: if s < 0 && n % 2 == 1 { -1 } else { 1 },
            },
        }
    }

    /// Signed log-sum-exp over an iterator of terms.
    pub fn sum<I: IntoIterator<Item = LogSigned>>(terms: I) -> LogSigned {
        let terms: Vec<LogSigned> = terms.into_iter().filter(|t| !t.is_zero()).collect();
        let Some(max) = terms
            .iter()
            .map(|t| t.ln_mag)
            .max_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal))
        else {
            return Self::ZERO;
        };
        if !max.is_finite() {
            // An infinite magnitude dominates everything else.
            let s: i32 = terms
                .iter()
                .filter(|t| t.ln_mag == max)
                .map(|t| i32::from(t.sign))
                .sum();
            return LogSigned::new(max, s.signum() as i8);
        }
        let acc: f64 = terms.iter().map(|t| f64::from(t.sign) * (t.ln_mag - max).exp()).sum();
        LogSigned::from_f64(acc).scale_ln(max)
    }

    /// Sum of absolute values, in log space.
    pub fn sum_abs<I: IntoIterator<Item = LogSigned>>(terms: I) -> LogSigned {
        Self::sum(terms.into_iter().map(LogSigned::abs))
    }
}

impl Default for LogSigned {
    fn default() -> Self {
        Self::ZERO
    }
}

impl PartialEq for LogSigned {
    fn eq(&self, other: &Self) -> bool {
        self.sign == other.sign && (self.sign == 0 || self.ln_mag == other.ln_mag)
    }
}

impl Mul for LogSigned {
    type Output = LogSigned;
    fn mul(self, rhs: LogSigned) -> LogSigned {
        if self.sign == 0 || rhs.sign == 0 {
            return Self::ZERO;
        }
        LogSigned {
            ln_mag: self.ln_mag + rhs.ln_mag,
            sign: self.sign * rhs.sign,
        }
    }
}

impl Div for LogSigned {
    type Output = LogSigned;
    fn div(self, rhs: LogSigned) -> LogSigned {
        self * rhs.recip()
    }
}

impl Neg for LogSigned {
    type Output = LogSigned;
    fn neg(self) -> LogSigned {
        LogSigned {
            ln_mag: self.ln_mag,
            sign: -self.sign,
        }
    }
}

impl fmt::Display for LogSigned {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => write!(f, "0"),
            s => write!(f, "{}exp({})", if s < 0 { "-" } else { "" }, self.ln_mag),
        }
    }
}
