//! Special functions with scaled and log-space variants.
//!
//! Everything here is a pure function. Bessel `K` is computed for integer
//! orders only, by upward recurrence from `K_0` and `K_1`.

mod bessel_j;
mod bessel_k;
mod erf;
mod gamma;
mod log_signed;

pub use bessel_j::{bessel_j0, bessel_j0_zero, bessel_j1};
pub use bessel_k::{bessel_k, bessel_k_scaled, ln_bessel_k, ln_bessel_k_upto};
pub use erf::{erfc, erfcx, ln_erfc};
pub use gamma::{ln_factorial, ln_gamma, pochhammer, upper_incomplete_gamma};
pub use log_signed::LogSigned;

pub(crate) use gamma::ln_gamma_pos;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
