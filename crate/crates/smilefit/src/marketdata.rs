//! Option-chain ingestion from CSV files and per-expiry quote slices.
//!
//! Input format (UTF-8, comma-separated, header required):
//!
//! ```text
//! ticker,quote_date,expiry,strike,implied_vol,underlying_close,rate
//! ```
//!
//! Dates are ISO-8601 (`YYYY-MM-DD`); `implied_vol` is absolute (0.25 = 25%);
//! `rate` is an annualized continuously compounded rate. Rows violating the
//! basic invariants are rejected with row-numbered diagnostics.

use std::collections::BTreeMap;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SmileError};
use crate::metrics::SmileCurve;

/// Expected CSV column names.
pub const CSV_COLUMNS: [&str; 7] = [
    "ticker",
    "quote_date",
    "expiry",
    "strike",
    "implied_vol",
    "underlying_close",
    "rate",
];

/// Day-count convention: calendar days over a fixed 365-day year.
pub const DAYS_PER_YEAR: f64 = 365.0;

/// One quoted option record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptionQuoteRow {
    /// Underlying symbol.
    pub ticker: String,
    /// Quote (valuation) date.
    pub quote_date: NaiveDate,
    /// Option expiry date; must come after `quote_date`.
    pub expiry: NaiveDate,
    /// Strike, `> 0`.
    pub strike: f64,
    /// Annualized implied volatility, absolute, `> 0`.
    pub implied_vol: f64,
    /// Underlying close on the quote date, `> 0`.
    pub underlying_close: f64,
    /// Continuously compounded annualized rate.
    pub rate: f64,
}

impl OptionQuoteRow {
    fn validate(&self) -> std::result::Result<(), String> {
        if !(self.strike > 0.0) || !self.strike.is_finite() {
            return Err(format!(
                "column 'strike': must be positive, got {}",
                self.strike
            ));
        }
        if !(self.implied_vol > 0.0) || !self.implied_vol.is_finite() {
            return Err(format!(
                "column 'implied_vol': must be positive, got {}",
                self.implied_vol
            ));
        }
        if !(self.underlying_close > 0.0) || !self.underlying_close.is_finite() {
            return Err(format!(
                "column 'underlying_close': must be positive, got {}",
                self.underlying_close
            ));
        }
        if !self.rate.is_finite() {
            return Err(format!("column 'rate': must be finite, got {}", self.rate));
        }
        if self.expiry <= self.quote_date {
            return Err(format!(
                "column 'expiry': {} does not come after quote_date {}",
                self.expiry, self.quote_date
            ));
        }
        Ok(())
    }
}

/// One strike of a quote slice: strike, moneyness `M = S/K`, observed vol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmilePoint {
    /// Strike.
    pub strike: f64,
    /// Moneyness `S/K`.
    pub moneyness: f64,
    /// Observed implied volatility.
    pub iv: f64,
}

/// One expiry's option chain, reduced to the quantities the models consume.
///
/// Points are strictly ascending in moneyness (descending in strike) and
/// `k_min` is the strike at which the observed volatility is minimal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuoteSlice {
    /// Spot (underlying close on the quote date).
    pub spot: f64,
    /// Continuously compounded rate.
    pub rate: f64,
    /// Time to expiry in years (ACT/365 fixed).
    pub tau: f64,
    /// Quotes sorted strictly ascending in moneyness.
    pub points: Vec<SmilePoint>,
    /// Strike of minimal observed implied volatility.
    pub k_min: f64,
}

impl QuoteSlice {
    /// Observed smile as a metric-ready curve.
    pub fn observed_curve(&self) -> SmileCurve {
        SmileCurve::new(
            self.points
                .iter()
                .map(|p| (p.moneyness, p.iv))
                .collect::<Vec<_>>(),
        )
        .expect("slice points are strictly ascending by construction")
    }

    /// Strikes in point order (descending, since moneyness ascends).
    pub fn strikes(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.strike).collect()
    }

    /// Moneyness of the minimum-vol strike, `S/k_min`.
    pub fn m_min(&self) -> f64 {
        self.spot / self.k_min
    }
}

/// Load an option chain from a CSV file.
///
/// The header must carry exactly the documented column set (any order).
/// Every row is validated; the first violation aborts the load with the
/// 1-based data row number and the offending column.
pub fn load_chain(path: &Path) -> Result<Vec<OptionQuoteRow>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| SmileError::invalid(format!("cannot open {}: {e}", path.display())))?;

    let headers = reader
        .headers()
        .map_err(|e| SmileError::invalid(format!("cannot read header: {e}")))?
        .clone();
    let mut index = BTreeMap::new();
    for (i, name) in headers.iter().enumerate() {
        index.insert(name.to_string(), i);
    }
    let mut missing: Vec<&str> = CSV_COLUMNS
        .iter()
        .copied()
        .filter(|c| !index.contains_key(*c))
        .collect();
    let extra: Vec<String> = index
        .keys()
        .filter(|k| !CSV_COLUMNS.contains(&k.as_str()))
        .cloned()
        .collect();
    if !missing.is_empty() || !extra.is_empty() {
        missing.sort_unstable();
        return Err(SmileError::invalid(format!(
            "malformed header: missing {missing:?}, unexpected {extra:?} (expected exactly {CSV_COLUMNS:?})"
        )));
    }
    let col = |name: &str| index[name];

    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row_no = i + 1;
        let record = record.map_err(|e| SmileError::Parse {
            row: row_no,
            message: format!("unreadable record: {e}"),
        })?;
        let field = |name: &str| -> Result<&str> {
            record.get(col(name)).ok_or_else(|| SmileError::Parse {
                row: row_no,
                message: format!("column '{name}': missing field"),
            })
        };
        let number = |name: &str| -> Result<f64> {
            field(name)?.parse::<f64>().map_err(|_| SmileError::Parse {
                row: row_no,
                message: format!("column '{name}': not a number: '{}'", field(name).unwrap()),
            })
        };
        let date = |name: &str| -> Result<NaiveDate> {
            field(name)?
                .parse::<NaiveDate>()
                .map_err(|_| SmileError::Parse {
                    row: row_no,
                    message: format!(
                        "column '{name}': not an ISO-8601 date: '{}'",
                        field(name).unwrap()
                    ),
                })
        };
        let row = OptionQuoteRow {
            ticker: field("ticker")?.to_string(),
            quote_date: date("quote_date")?,
            expiry: date("expiry")?,
            strike: number("strike")?,
            implied_vol: number("implied_vol")?,
            underlying_close: number("underlying_close")?,
            rate: number("rate")?,
        };
        row.validate().map_err(|message| SmileError::Parse {
            row: row_no,
            message,
        })?;
        rows.push(row);
    }
    Ok(rows)
}

/// Group rows by `(ticker, expiry)` in deterministic order.
pub fn group_by_ticker_expiry(
    rows: &[OptionQuoteRow],
) -> BTreeMap<(String, NaiveDate), Vec<OptionQuoteRow>> {
    let mut groups: BTreeMap<(String, NaiveDate), Vec<OptionQuoteRow>> = BTreeMap::new();
    for row in rows {
        groups
            .entry((row.ticker.clone(), row.expiry))
            .or_default()
            .push(row.clone());
    }
    groups
}

/// Build a quote slice from the rows carrying the given expiry.
///
/// Duplicate strikes keep their first occurrence (with a warning); at least
/// three distinct strikes must remain. `k_min` is the strike of minimal
/// observed volatility, ties broken by moneyness closest to 1, then by the
/// lower strike.
pub fn build_slice(rows: &[OptionQuoteRow], expiry: NaiveDate) -> Result<QuoteSlice> {
    let selected: Vec<&OptionQuoteRow> = rows.iter().filter(|r| r.expiry == expiry).collect();
    if selected.len() < 3 {
        return Err(SmileError::invalid(format!(
            "expiry {expiry}: need at least 3 quotes, got {}",
            selected.len()
        )));
    }

    let first = selected[0];
    let spot = first.underlying_close;
    let rate = first.rate;
    let quote_date = first.quote_date;
    for row in &selected[1..] {
        if row.underlying_close != spot || row.rate != rate || row.quote_date != quote_date {
            log::warn!(
                "expiry {expiry}: inconsistent spot/rate/quote_date across rows; keeping the first ({} / {} / {})",
                spot,
                rate,
                quote_date
            );
            break;
        }
    }

    // Deduplicate by strike, keeping the first occurrence.
    let mut seen = Vec::new();
    let mut unique: Vec<&OptionQuoteRow> = Vec::with_capacity(selected.len());
    for row in &selected {
        if seen.contains(&row.strike.to_bits()) {
            log::warn!(
                "expiry {expiry}: duplicate strike {} dropped (keeping first occurrence)",
                row.strike
            );
            continue;
        }
        seen.push(row.strike.to_bits());
        unique.push(row);
    }
    if unique.len() < 3 {
        return Err(SmileError::invalid(format!(
            "expiry {expiry}: need at least 3 distinct strikes, got {}",
            unique.len()
        )));
    }

    let mut points: Vec<SmilePoint> = unique
        .iter()
        .map(|r| SmilePoint {
            strike: r.strike,
            moneyness: spot / r.strike,
            iv: r.implied_vol,
        })
        .collect();
    points.sort_by(|a, b| a.moneyness.total_cmp(&b.moneyness));

    // argmin over observed vols; ties broken by |M - 1|, then lower strike.
    let k_min = points
        .iter()
        .min_by(|a, b| {
            a.iv.total_cmp(&b.iv)
                .then(
                    (a.moneyness - 1.0)
                        .abs()
                        .total_cmp(&(b.moneyness - 1.0).abs()),
                )
                .then(a.strike.total_cmp(&b.strike))
        })
        .expect("at least 3 points")
        .strike;

    let days = (expiry - quote_date).num_days();
    Ok(QuoteSlice {
        spot,
        rate,
        tau: days as f64 / DAYS_PER_YEAR,
        points,
        k_min,
    })
}
