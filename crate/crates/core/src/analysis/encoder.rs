//! Systematic encoding from the reduced parity-check matrix.

use super::AnalysisError;
use crate::codes::gf2::{pack, unpack, BitMatrix};
use crate::codes::ParityCheckMatrix;

/// Generator of the null space of `H`.
///
/// Pivot columns of `rref(H)` carry parity, the remaining columns carry the
/// message, so codeword bit `info_positions[j]` equals message bit `j`.
#[derive(Debug, Clone)]
pub struct Encoder {
    n: usize,
    generator: BitMatrix,
    info_positions: Vec<usize>,
    parity_positions: Vec<usize>,
}

pub fn encoder_from(h: &ParityCheckMatrix) -> Encoder {
    let n = h.n();
    let mut rref = h.to_bit_matrix();
    let pivots = rref.reduce();
    let mut is_pivot = vec![false; n];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let info: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
    let mut g = BitMatrix::zeros(info.len(), n);
    for (j, &c) in info.iter().enumerate() {
        g.set(j, c, true);
        // Row i of the RREF reads x_{p_i} + sum of free columns = 0.
        for (i, &p) in pivots.iter().enumerate() {
            if rref.get(i, c) {
                g.set(j, p, true);
            }
        }
    }
    Encoder { n, generator: g, info_positions: info, parity_positions: pivots }
}

impl Encoder {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.info_positions.len()
    }

    pub fn generator(&self) -> &BitMatrix {
        &self.generator
    }

    /// Codeword positions that hold the message, in message order.
    pub fn info_positions(&self) -> &[usize] {
        &self.info_positions
    }

    pub fn parity_positions(&self) -> &[usize] {
        &self.parity_positions
    }

    /// Generator row `j` as packed words.
    pub fn row_words(&self, j: usize) -> &[u64] {
        self.generator.row_words(j)
    }

    pub fn encode(&self, message: &[u8]) -> Result<Vec<u8>, AnalysisError> {
        if message.len() != self.k() {
            return Err(AnalysisError::MessageLength { got: message.len(), want: self.k() });
        }
        let mut acc = pack(&vec![0u8; self.n]);
        for (j, &b) in message.iter().enumerate() {
            if b & 1 == 1 {
                for (a, w) in acc.iter_mut().zip(self.generator.row_words(j)) {
                    *a ^= w;
                }
            }
        }
        Ok(unpack(&acc, self.n))
    }
}
