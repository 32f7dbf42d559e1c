//! Monte-Carlo BLER/BER, average iteration count and decoding complexity.
//!
//! The all-zero codeword is transmitted. Frame `f` of an evaluation with
//! seed `s` always sees the same noise, whatever the code, the worker count
//! or the batch in which it is processed. Candidates evaluated with the same
//! seed therefore share their noise realizations (common random numbers).

use std::cmp::Ordering;
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channels::{self, ChannelError, OperatingPoint};
use crate::codes::ParityCheckMatrix;
use crate::decoder::{BpDecoder, DecodeError, DecoderConfig};
use crate::seed;

/// Frames simulated per parallel batch.
const BATCH: u64 = 512;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("stopping rule allows zero frames")]
    ZeroFrames,
    #[error("invalid stopping rule: {0}")]
    InvalidRule(String),
    #[error("code has dimension k = 0")]
    ZeroDimension,
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Run until `min_block_errors` block errors or `max_frames` frames,
/// whichever comes first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StoppingRule {
    pub min_block_errors: u64,
    pub max_frames: u64,
}

impl Default for StoppingRule {
    fn default() -> Self {
        StoppingRule { min_block_errors: 100, max_frames: 100_000 }
    }
}

impl StoppingRule {
    pub fn new(min_block_errors: u64, max_frames: u64) -> Self {
        StoppingRule { min_block_errors, max_frames }
    }

    pub fn validate(&self) -> Result<(), EvalError> {
        if self.max_frames == 0 {
            return Err(EvalError::ZeroFrames);
        }
        if self.min_block_errors == 0 {
            return Err(EvalError::InvalidRule("min_block_errors must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub ebno_db: f64,
    pub frames_sent: u64,
    pub block_errors: u64,
    pub bit_errors: u64,
    pub bler: f64,
    pub ber: f64,
    /// Mean iterations over all frames.
    pub n_it_avg: f64,
    /// `n_it_avg * E / k`.
    pub eta: f64,
    pub iterations_total: u64,
    pub iterations_sq_total: u64,
    pub edges: usize,
    pub k: usize,
    pub n: usize,
    pub seed: u64,
    /// Wall-clock time of the run; not part of equality.
    pub elapsed_secs: f64,
}

impl PartialEq for EvalReport {
    fn eq(&self, o: &Self) -> bool {
        self.ebno_db.to_bits() == o.ebno_db.to_bits()
            && self.frames_sent == o.frames_sent
            && self.block_errors == o.block_errors
            && self.bit_errors == o.bit_errors
            && self.bler.to_bits() == o.bler.to_bits()
            && self.ber.to_bits() == o.ber.to_bits()
            && self.n_it_avg.to_bits() == o.n_it_avg.to_bits()
            && self.eta.to_bits() == o.eta.to_bits()
            && self.iterations_total == o.iterations_total
            && self.iterations_sq_total == o.iterations_sq_total
            && (self.edges, self.k, self.n, self.seed) == (o.edges, o.k, o.n, o.seed)
    }
}

impl EvalReport {
    /// Binomial standard error of the BLER estimate.
    pub fn bler_std_error(&self) -> f64 {
        (self.bler * (1.0 - self.bler) / self.frames_sent as f64).sqrt()
    }

    /// Standard error of the mean iteration count.
    pub fn n_it_std_error(&self) -> f64 {
        let f = self.frames_sent as f64;
        let mean = self.n_it_avg;
        let var = (self.iterations_sq_total as f64 / f - mean * mean).max(0.0) * f / (f - 1.0).max(1.0);
        (var / f).sqrt()
    }
}

/// Complexity per information bit, `n_it_avg * edges / k`.
pub fn eta(n_it_avg: f64, edges: usize, k: usize) -> f64 {
    n_it_avg * edges as f64 / k as f64
}

#[derive(Clone, Copy, Default)]
struct FrameResult {
    bit_errors: u32,
    iterations: u32,
}

/// Simulates `h` at `point` until `rule` is met.
pub fn evaluate(
    h: &ParityCheckMatrix,
    point: &OperatingPoint,
    cfg: &DecoderConfig,
    rule: &StoppingRule,
    seed: u64,
) -> Result<EvalReport, EvalError> {
    let started = Instant::now();
    rule.validate()?;
    let profile = h.profile();
    if profile.k == 0 {
        return Err(EvalError::ZeroDimension);
    }
    let spec = point.with_rate(profile.rate)?;
    let decoder = BpDecoder::new(h, *cfg)?;
    let n = h.n();
    let key = seed::chacha_key(seed);

    let (mut frames, mut block_errors, mut bit_errors, mut it_sum, mut it_sq) = (0u64, 0u64, 0u64, 0u64, 0u64);
    let mut batch_start = 0u64;
    'outer: while frames < rule.max_frames {
        let batch_end = (batch_start + BATCH).min(rule.max_frames);
        let results: Vec<FrameResult> = (batch_start..batch_end)
            .into_par_iter()
            .map_init(
                || (decoder.workspace(), vec![0.0; n], vec![0.0; n]),
                |(ws, llrs, fading), f| {
                    let mut rng = seed::frame_rng(&key, f);
                    channels::fill_llrs(std::iter::repeat_n(0u8, n), &spec, &mut rng, llrs, fading);
                    // LLRs are finite and sized for the code.
                    let (iterations, _) = decoder.decode_llrs(llrs, ws).expect("valid frame");
                    let bit_errors = ws.hard_bits().iter().map(|&b| b as u32).sum();
                    FrameResult { bit_errors, iterations: iterations as u32 }
                },
            )
            .collect();
        for r in results {
            frames += 1;
            bit_errors += r.bit_errors as u64;
            block_errors += (r.bit_errors > 0) as u64;
            it_sum += r.iterations as u64;
            it_sq += (r.iterations as u64).pow(2);
            if block_errors >= rule.min_block_errors {
                break 'outer;
            }
        }
        batch_start = batch_end;
    }

    let n_it_avg = it_sum as f64 / frames as f64;
    Ok(EvalReport {
        ebno_db: point.ebno_db,
        frames_sent: frames,
        block_errors,
        bit_errors,
        bler: block_errors as f64 / frames as f64,
        ber: bit_errors as f64 / (frames as f64 * n as f64),
        n_it_avg,
        eta: eta(n_it_avg, profile.edges, profile.k),
        iterations_total: it_sum,
        iterations_sq_total: it_sq,
        edges: profile.edges,
        k: profile.k,
        n,
        seed,
        elapsed_secs: started.elapsed().as_secs_f64(),
    })
}

/// One report per operating point, each with its own derived seed.
pub fn sweep(
    h: &ParityCheckMatrix,
    points: &[OperatingPoint],
    cfg: &DecoderConfig,
    rule: &StoppingRule,
    seed: u64,
) -> Result<Vec<EvalReport>, EvalError> {
    points
        .iter()
        .enumerate()
        .map(|(i, p)| evaluate(h, p, cfg, rule, seed::derive(seed, &[i as u64])))
        .collect()
}

#[derive(Serialize)]
struct CsvRow {
    ebno_db: f64,
    frames: u64,
    block_errors: u64,
    bler: f64,
    ber: f64,
    n_it_avg: f64,
    eta: f64,
    seed: u64,
}

/// Writes `ebno_db,frames,block_errors,bler,ber,n_it_avg,eta,seed` rows.
pub fn write_csv<W: Write>(reports: &[EvalReport], out: W) -> Result<(), EvalError> {
    let mut w = csv::Writer::from_writer(out);
    for r in reports {
        w.serialize(CsvRow {
            ebno_db: r.ebno_db,
            frames: r.frames_sent,
            block_errors: r.block_errors,
            bler: r.bler,
            ber: r.ber,
            n_it_avg: r.n_it_avg,
            eta: r.eta,
            seed: r.seed,
        })?;
    }
    if reports.is_empty() {
        w.write_record(["ebno_db", "frames", "block_errors", "bler", "ber", "n_it_avg", "eta", "seed"])?;
    }
    w.flush()?;
    Ok(())
}

/// GA objective: BLER first, then fewer edges, then fewer iterations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fitness {
    pub bler: f64,
    pub edges: usize,
    pub n_it_avg: f64,
    pub frames: u64,
    pub block_errors: u64,
}

impl Fitness {
    pub fn from_report(r: &EvalReport) -> Self {
        Fitness {
            bler: r.bler,
            edges: r.edges,
            n_it_avg: r.n_it_avg,
            frames: r.frames_sent,
            block_errors: r.block_errors,
        }
    }

    /// Total order, lower is better.
    pub fn rank_cmp(&self, other: &Self) -> Ordering {
        self.bler
            .total_cmp(&other.bler)
            .then(self.edges.cmp(&other.edges))
            .then(self.n_it_avg.total_cmp(&other.n_it_avg))
    }
}

/// BLER of `h` at the design point under a fixed budget. Candidates scored
/// with the same `seed` share noise realizations.
pub fn fitness(
    h: &ParityCheckMatrix,
    design: &OperatingPoint,
    cfg: &DecoderConfig,
    budget: &StoppingRule,
    seed: u64,
) -> Result<Fitness, EvalError> {
    evaluate(h, design, cfg, budget, seed).map(|r| Fitness::from_report(&r))
}
