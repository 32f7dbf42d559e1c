//! BPSK over bi-AWGN and ergodic Rayleigh fading with full CSI.
//!
//! Bits map to symbols `x = 1 - 2c`. LLRs are positive when bit 0 is more
//! likely.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seed;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("noise variance must be positive (got {0})")]
    NonPositiveVariance(f64),
    #[error("rate must lie in (0, 1] (got {0})")]
    InvalidRate(f64),
    #[error("Eb/N0 is not a number")]
    NanEbNo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChannelKind {
    #[serde(rename = "awgn", alias = "biawgn")]
    BiAwgn,
    #[serde(rename = "rayleigh")]
    RayleighFullCsi,
}

impl std::str::FromStr for ChannelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "awgn" | "biawgn" | "bi-awgn" => Ok(ChannelKind::BiAwgn),
            "rayleigh" => Ok(ChannelKind::RayleighFullCsi),
            other => Err(format!("unknown channel `{other}`")),
        }
    }
}

/// Channel and Eb/N0 without a rate; the rate comes from the code under test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub kind: ChannelKind,
    pub ebno_db: f64,
}

impl OperatingPoint {
    pub fn new(kind: ChannelKind, ebno_db: f64) -> Self {
        OperatingPoint { kind, ebno_db }
    }

    pub fn with_rate(&self, rate: f64) -> Result<ChannelSpec, ChannelError> {
        ChannelSpec::new(self.kind, self.ebno_db, rate)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub kind: ChannelKind,
    pub ebno_db: f64,
    pub rate: f64,
}

impl ChannelSpec {
    pub fn new(kind: ChannelKind, ebno_db: f64, rate: f64) -> Result<Self, ChannelError> {
        let spec = ChannelSpec { kind, ebno_db, rate };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        if self.ebno_db.is_nan() {
            return Err(ChannelError::NanEbNo);
        }
        if !(self.rate > 0.0 && self.rate <= 1.0) {
            return Err(ChannelError::InvalidRate(self.rate));
        }
        let var = self.noise_variance();
        if !(var > 0.0 && var.is_finite()) {
            return Err(ChannelError::NonPositiveVariance(var));
        }
        Ok(())
    }

    /// `sigma^2 = 1 / (2 R 10^(EbN0/10))` for unit-energy symbols.
    pub fn noise_variance(&self) -> f64 {
        1.0 / (2.0 * self.rate * 10f64.powf(self.ebno_db / 10.0))
    }
}

/// Channel output for one block.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrFrame {
    pub llrs: Vec<f64>,
    /// Fading magnitudes, all one on the AWGN channel.
    pub fading: Vec<f64>,
    pub truth: Vec<u8>,
}

impl LlrFrame {
    pub fn len(&self) -> usize {
        self.llrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.llrs.is_empty()
    }
}

/// Sends `codeword` through the channel.
pub fn transmit<R: Rng + ?Sized>(
    codeword: &[u8],
    spec: &ChannelSpec,
    rng: &mut R,
) -> Result<LlrFrame, ChannelError> {
    spec.validate()?;
    let mut frame = LlrFrame {
        llrs: vec![0.0; codeword.len()],
        fading: vec![1.0; codeword.len()],
        truth: codeword.to_vec(),
    };
    fill_llrs(codeword.iter().copied(), spec, rng, &mut frame.llrs, &mut frame.fading);
    Ok(frame)
}

/// Writes LLRs and fading gains for `bits` into the output slices.
/// `spec` must already be validated.
pub(crate) fn fill_llrs<R: Rng + ?Sized>(
    bits: impl Iterator<Item = u8>,
    spec: &ChannelSpec,
    rng: &mut R,
    llrs: &mut [f64],
    fading: &mut [f64],
) {
    let var = spec.noise_variance();
    let sigma = var.sqrt();
    let scale = 2.0 / var;
    for ((bit, l), h_out) in bits.zip(llrs.iter_mut()).zip(fading.iter_mut()) {
        let x = 1.0 - 2.0 * f64::from(bit & 1);
        let h = match spec.kind {
            ChannelKind::BiAwgn => 1.0,
            ChannelKind::RayleighFullCsi => {
                let a: f64 = rng.sample(StandardNormal);
                let b: f64 = rng.sample(StandardNormal);
                ((a * a + b * b) / 2.0).sqrt()
            }
        };
        let noise: f64 = rng.sample(StandardNormal);
        let y = h * x + sigma * noise;
        *h_out = h;
        *l = scale * h * y;
    }
}

/// Hard-decision bit error rate of uncoded BPSK (all-zero input).
pub fn uncoded_ber(spec: &ChannelSpec, num_bits: usize, seed: u64) -> Result<f64, ChannelError> {
    spec.validate()?;
    if num_bits == 0 {
        return Ok(0.0);
    }
    const BLOCK: usize = 4096;
    let key = seed::chacha_key(seed);
    let mut llrs = vec![0.0; BLOCK];
    let mut fading = vec![0.0; BLOCK];
    let mut errors = 0usize;
    let mut done = 0usize;
    let mut block = 0u64;
    while done < num_bits {
        let len = BLOCK.min(num_bits - done);
        let mut rng = seed::frame_rng(&key, block);
        fill_llrs(std::iter::repeat_n(0u8, len), spec, &mut rng, &mut llrs[..len], &mut fading[..len]);
        errors += llrs[..len].iter().filter(|&&l| l < 0.0).count();
        done += len;
        block += 1;
    }
    Ok(errors as f64 / num_bits as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn noise_variance_at_5db_rate_half() {
        let s = ChannelSpec::new(ChannelKind::BiAwgn, 5.0, 0.5).unwrap();
        assert!((s.noise_variance() - 0.316_227_766).abs() < 1e-8);
    }

    #[test]
    fn invalid_specs() {
        assert_eq!(
            ChannelSpec::new(ChannelKind::BiAwgn, 1.0, 0.0).unwrap_err(),
            ChannelError::InvalidRate(0.0)
        );
        assert!(ChannelSpec::new(ChannelKind::BiAwgn, 1.0, 1.5).is_err());
        assert!(matches!(
            ChannelSpec::new(ChannelKind::BiAwgn, f64::INFINITY, 0.5),
            Err(ChannelError::NonPositiveVariance(_))
        ));
        assert!(ChannelSpec::new(ChannelKind::BiAwgn, f64::NAN, 0.5).is_err());
    }

    #[test]
    fn noiseless_limit_signs() {
        let bits: Vec<u8> = (0..200).map(|i| (i % 3 == 0) as u8).collect();
        for kind in [ChannelKind::BiAwgn, ChannelKind::RayleighFullCsi] {
            let spec = ChannelSpec::new(kind, 200.0, 0.5).unwrap();
            let f = transmit(&bits, &spec, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
            for (l, b) in f.llrs.iter().zip(&bits) {
                assert_eq!(*l < 0.0, *b == 1);
            }
        }
    }

    #[test]
    fn same_stream_same_frame() {
        let spec = ChannelSpec::new(ChannelKind::RayleighFullCsi, 3.0, 0.5).unwrap();
        let bits = vec![0u8; 64];
        let a = transmit(&bits, &spec, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        let b = transmit(&bits, &spec, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        assert_eq!(a, b);
        assert!(a.fading.iter().all(|&h| h > 0.0));
    }

    #[test]
    fn awgn_fading_is_one() {
        let spec = ChannelSpec::new(ChannelKind::BiAwgn, 3.0, 0.5).unwrap();
        let f = transmit(&[0, 1, 0], &spec, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        assert_eq!(f.fading, vec![1.0; 3]);
        assert_eq!(f.truth, vec![0, 1, 0]);
    }
}
