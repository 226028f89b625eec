//! Baseline models: exact fBm path generation, the Hagan lognormal SABR
//! smile, and Monte-Carlo fractional-SABR pricing.

pub mod fbm;
pub mod fsabr;
pub mod sabr;

pub use fbm::{simulate_fbm, FbmPath, FbmSampler};
pub use fsabr::{
    fsabr_price, fsabr_smile, fsabr_smile_detailed, simulate_terminals, FsabrParams, McConfig,
    SmileSample,
};
pub use sabr::{sabr_implied_vol, SabrParams};
