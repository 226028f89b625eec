//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, SmileError>;

/// Errors produced by data loading, model evaluation, pricing and calibration.
#[derive(Debug, Error)]
pub enum SmileError {
    /// A parameter or argument violates its documented domain.
    #[error("invalid input: {message}")]
    InvalidInput {
        /// What was wrong and what was expected.
        message: String,
    },

    /// A data file could not be parsed; carries the offending record number.
    #[error("parse error at row {row}: {message}")]
    Parse {
        /// 1-based data row (header excluded).
        row: usize,
        /// Field-level diagnostic.
        message: String,
    },

    /// Derivative evaluation requested exactly at the smile minimum, where the
    /// Hurst-function derivative carries a |g|^(delta-1) factor that diverges.
    #[error("singular point: derivative undefined at m = m_min = {m_min}")]
    Singular {
        /// The moneyness of the minimum-volatility strike.
        m_min: f64,
    },

    /// An option price lies outside the static no-arbitrage band, so no
    /// implied volatility exists.
    #[error("price {price} outside no-arbitrage band ({lower}, {upper})")]
    OutOfBand {
        /// The offending price.
        price: f64,
        /// Lower band edge, the discounted intrinsic value.
        lower: f64,
        /// Upper band edge, the spot.
        upper: f64,
    },

    /// An iterative solver exhausted its iteration budget.
    #[error("no convergence: {message}")]
    Convergence {
        /// Solver and residual diagnostics.
        message: String,
    },

    /// A numerical procedure failed (factorization breakdown, overflow, ...).
    #[error("numerical failure: {message}")]
    Numerical {
        /// What failed and with which inputs.
        message: String,
    },

    /// Calibration could not produce a usable fit.
    #[error("calibration failed: {message}")]
    Calibration {
        /// Diagnostic, including how many trials were penalized.
        message: String,
    },

    /// Underlying I/O failure.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// JSON (de)serialization failure for config or report files.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl SmileError {
    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        SmileError::InvalidInput {
            message: message.into(),
        }
    }
}
