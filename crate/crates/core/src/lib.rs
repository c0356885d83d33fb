//! Stable MA(q) processes under flow aggregation.
//!
//! * [`stable`]: S⁰ stable laws (parameter arithmetic, CDF, quantiles,
//!   Chambers-Mallows-Stuck sampling).
//! * [`ma`]: MA(q) models, aggregation filter weights and the law of the
//!   aggregated process.
//! * [`lqd`]: log quantile differences, the closed-form aggregation formula
//!   and its shape in `ln r`.
//! * [`region`]: MA(2) invertibility region, sub-region taxonomy and the
//!   sign of `g_alpha`.
//! * [`mc`]: Monte Carlo verification of the analytic results.

// `!(x > 0.0)` style guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod lqd;
pub mod ma;
pub mod mc;
pub mod numeric;
pub mod region;
pub mod stable;

pub use error::{Error, Result};
