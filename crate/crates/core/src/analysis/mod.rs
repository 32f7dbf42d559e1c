//! Offline analysis of finished codes: minimum distance, EXIT curves,
//! structural diagnostics and a systematic encoder.

mod dmin;
mod encoder;
mod exit;
mod structure;

use thiserror::Error;

pub use dmin::{dmin_bound, dmin_exact, dmin_exact_with_limit, DminResult, DEFAULT_EXACT_LIMIT};
pub use encoder::{encoder_from, Encoder};
pub use exit::{
    decoding_threshold, exit_cnd, exit_vnd, sigma_ch, tunnel_open, write_exit_csv, EdgeDistribution, ExitCurve,
    JFunction, NodeSide,
};
pub use structure::{structure_report, StructureReport, DEFAULT_SHORT_CYCLE_BOUND};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("code dimension {k} exceeds the exhaustive-search limit {limit}; use the bounded search instead")]
    DimensionTooLarge { k: usize, limit: usize },
    #[error("code has no nonzero codeword (k = 0)")]
    TrivialCode,
    #[error("degree distribution sums to {0}, expected 1")]
    Unnormalized(f64),
    #[error("invalid degree distribution: {0}")]
    InvalidDistribution(String),
    #[error("message has {got} bits, expected {want}")]
    MessageLength { got: usize, want: usize },
    #[error("invalid J-function constants: {0}")]
    JConstants(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
