//! Outage analysis of a half-duplex relay channel running decode-or-quantize-and-forward.
//!
//! Rates are in nats throughout. SNR values passed to the library are linear.

pub mod allocator;
pub mod channel;
pub mod dmt;
pub mod dmt_oracle;
pub mod gain;
pub mod montecarlo;
pub mod report;

mod error;

pub use error::{Error, Result};

/// `ln 2`, the factor between bits and nats.
pub const NATS_PER_BIT: f64 = std::f64::consts::LN_2;

/// Converts a rate in bits per channel use to nats.
pub fn bits_to_nats(bits: f64) -> f64 {
    bits * NATS_PER_BIT
}

/// Converts an SNR given in dB to a linear value.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
