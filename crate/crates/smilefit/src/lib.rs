//! Volatility-smile modeling toolkit.
//!
//! The centerpiece is a closed-form implied-volatility smile whose memory
//! level — a moneyness-dependent Hurst exponent — steepens or flattens the
//! wings while pinning `H = ½` at the money ([`ads`]). Around it sit:
//!
//! - [`marketdata`] — option-chain CSV ingestion and per-expiry quote slices;
//! - [`pricing`] — Black-Scholes calls, implied-vol inversion, and the strike
//!   and maturity derivatives the arbitrage checker consumes;
//! - [`baselines`] — the Hagan lognormal SABR smile, exact Cholesky fBm
//!   simulation, and Monte-Carlo fractional-SABR pricing;
//! - [`calibration`] — a deterministic bounded global search (quasi-random
//!   exploration, a tree-structured Parzen sampler, and a Nelder-Mead
//!   polish) minimizing smile RMSE;
//! - [`metrics`] — MSE/MAE, discrete smile curvature with its ACE/RMSCE
//!   error metrics, summary statistics, and an implied-regularity estimator;
//! - [`arbitrage`] — numeric verification of the five arbitrage-free surface
//!   conditions plus parameter admissibility;
//! - [`cli`] — batch drivers behind the `smilefit` binary.
//!
//! Every random procedure is seeded and block-deterministic: fixed seeds give
//! byte-identical results independent of thread count.

// Negated comparisons like `!(x > 0.0)` are used deliberately so that NaN
// falls into the invalid branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ads;
pub mod arbitrage;
pub mod baselines;
pub mod calibration;
pub mod cli;
pub mod error;
pub mod marketdata;
pub mod metrics;
pub mod plot;
pub mod pricing;
mod rng;

pub use ads::AdsParams;
pub use baselines::{FbmPath, FsabrParams, McConfig, SabrParams};
pub use error::{Result, SmileError};
pub use marketdata::{OptionQuoteRow, QuoteSlice};
pub use pricing::PricingContext;
