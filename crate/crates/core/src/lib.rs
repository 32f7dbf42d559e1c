//! Design of short LDPC codes by a genetic algorithm that scores every
//! candidate parity-check matrix with the actual BP decoder over the actual
//! channel, plus the tooling to evaluate and analyze the resulting codes.
//!
//! * [`codes`]: parity-check matrices, GF(2) rank, accumulator templates,
//!   random regular codes, alist I/O and cycle statistics.
//! * [`channels`]: BPSK over bi-AWGN and ergodic Rayleigh fading.
//! * [`decoder`]: flooding sum-product decoder with early stopping.
//! * [`eval`]: Monte-Carlo BLER/BER, average iterations and complexity.
//! * [`genalg`]: the evolutionary optimizer.
//! * [`analysis`]: minimum distance, EXIT curves, structural diagnostics.

pub mod analysis;
pub mod channels;
pub mod codes;
pub mod decoder;
pub mod eval;
pub mod genalg;
pub mod seed;

pub use channels::{ChannelKind, ChannelSpec, LlrFrame, OperatingPoint};
pub use codes::{ParityCheckMatrix, StructureTemplate, TemplateKind};
pub use decoder::{DecodeOutcome, DecoderConfig};
pub use eval::{EvalReport, StoppingRule};
