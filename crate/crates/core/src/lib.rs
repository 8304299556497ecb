//! Statistics of the amplitude of a sum of N independent double-Nakagami-m
//! random vectors with uniform phases, and the link-level metrics of a
//! randomly reconfigurable surface (RRS) built on top of them.
//!
//! The crate is organised bottom-up:
//!
//! - [`specfun`]: special functions (log-Gamma, Pochhammer, Bessel K/J,
//!   erfc, upper incomplete Gamma) and the [`LogSigned`] number type.
//! - [`quad`]: adaptive Gauss-Kronrod quadrature.
//! - [`sumdist`]: PDF, CDF, moments, characteristic function, sampler and
//!   an independent Hankel-transform density oracle for |H|.
//! - [`linkmetrics`]: path loss, outage, average SNR, ergodic capacity,
//!   bit error probability, amount of fading and CQEI.
//! - [`mcsim`]: seeded, chunk-parallel Monte Carlo estimators used to
//!   validate every analytic result.

#![allow(
    clippy::excessive_precision,
    clippy::neg_cmp_op_on_partial_ord,
    clippy::suspicious_arithmetic_impl
)]

mod error;
mod mp;

pub mod linkmetrics;
pub mod mcsim;
pub mod quad;
pub mod specfun;
pub mod sumdist;

pub use error::{Error, Result};
pub use specfun::LogSigned;
