//! Minimum distance: exhaustive Gray-code enumeration for small dimensions
//! and an information-set branch-and-bound with a certified lower bound.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::encoder::encoder_from;
use super::AnalysisError;
use crate::codes::gf2::{unpack, BitMatrix};
use crate::codes::ParityCheckMatrix;

pub const DEFAULT_EXACT_LIMIT: usize = 28;

/// High message bits enumerated as independent parallel tasks.
const PREFIX_BITS: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawDmin", into = "RawDmin")]
pub struct DminResult {
    /// Minimum distance, or the best upper bound when not certified.
    pub value: usize,
    /// True when no nonzero codeword lighter than `value` exists.
    pub certified: bool,
    /// A nonzero codeword of weight `value`.
    pub witness: Vec<u8>,
}

/// JSON form with the witness packed into hex, most significant bit first.
#[derive(Serialize, Deserialize)]
struct RawDmin {
    value: usize,
    certified: bool,
    n: usize,
    witness: String,
}

impl From<DminResult> for RawDmin {
    fn from(d: DminResult) -> Self {
        let mut hex = String::with_capacity(d.witness.len().div_ceil(4));
        for chunk in d.witness.chunks(8) {
            let byte = chunk.iter().enumerate().fold(0u8, |acc, (j, &b)| acc | ((b & 1) << (7 - j)));
            hex.push_str(&format!("{byte:02x}"));
        }
        RawDmin { value: d.value, certified: d.certified, n: d.witness.len(), witness: hex }
    }
}

impl TryFrom<RawDmin> for DminResult {
    type Error = String;

    fn try_from(r: RawDmin) -> Result<Self, String> {
        if r.witness.len() != 2 * r.n.div_ceil(8) {
            return Err(format!("witness has {} hex digits, expected {}", r.witness.len(), 2 * r.n.div_ceil(8)));
        }
        let mut bits = Vec::with_capacity(r.n);
        for i in (0..r.witness.len()).step_by(2) {
            let byte = u8::from_str_radix(&r.witness[i..i + 2], 16).map_err(|e| e.to_string())?;
            bits.extend((0..8).map(|j| (byte >> (7 - j)) & 1));
        }
        if bits[r.n..].iter().any(|&b| b != 0) {
            return Err("nonzero padding after the last witness bit".into());
        }
        bits.truncate(r.n);
        let weight = bits.iter().filter(|&&b| b == 1).count();
        if weight != r.value {
            return Err(format!("witness weight {weight} differs from value {}", r.value));
        }
        Ok(DminResult { value: r.value, certified: r.certified, witness: bits })
    }
}

fn weight(words: &[u64]) -> usize {
    words.iter().map(|w| w.count_ones() as usize).sum()
}

fn xor_into(acc: &mut [u64], row: &[u64]) {
    for (a, w) in acc.iter_mut().zip(row) {
        *a ^= w;
    }
}

/// Exhaustive search with the default dimension limit.
pub fn dmin_exact(h: &ParityCheckMatrix) -> Result<DminResult, AnalysisError> {
    dmin_exact_with_limit(h, DEFAULT_EXACT_LIMIT)
}

/// Visits all `2^k - 1` nonzero codewords, one generator-row XOR per step.
pub fn dmin_exact_with_limit(h: &ParityCheckMatrix, limit: usize) -> Result<DminResult, AnalysisError> {
    let enc = encoder_from(h);
    let k = enc.k();
    if k == 0 {
        return Err(AnalysisError::TrivialCode);
    }
    if k > limit {
        return Err(AnalysisError::DimensionTooLarge { k, limit });
    }
    let g = enc.generator();
    let high = PREFIX_BITS.min(k);
    let low = k - high;
    let words = g.row_words(0).len();

    // Best (weight, prefix, gray step) of each prefix task.
    let best = (0u64..1 << high)
        .into_par_iter()
        .filter_map(|prefix| {
            let mut cw = vec![0u64; words];
            for b in 0..high {
                if prefix >> b & 1 == 1 {
                    xor_into(&mut cw, g.row_words(low + b));
                }
            }
            let mut best: Option<(usize, u64, u64)> = None;
            if prefix != 0 {
                best = Some((weight(&cw), prefix, 0));
            }
            for step in 1u64..1 << low {
                xor_into(&mut cw, g.row_words(step.trailing_zeros() as usize));
                let w = weight(&cw);
                if best.is_none_or(|(bw, _, _)| w < bw) {
                    best = Some((w, prefix, step));
                }
            }
            best
        })
        .min()
        .expect("k >= 1 gives a nonzero codeword");

    let (value, prefix, step) = best;
    let gray = step ^ (step >> 1);
    let mut cw = vec![0u64; words];
    for b in 0..low {
        if gray >> b & 1 == 1 {
            xor_into(&mut cw, g.row_words(b));
        }
    }
    for b in 0..high {
        if prefix >> b & 1 == 1 {
            xor_into(&mut cw, g.row_words(low + b));
        }
    }
    let witness = unpack(&cw, h.n());
    debug_assert_eq!(weight(&cw), value);
    Ok(DminResult { value, certified: true, witness })
}

/// Generator in systematic form on one information set.
struct InfoSet {
    g: BitMatrix,
    /// Number of independent pivot columns; rows past it vanish on them.
    rank: usize,
}

/// Partitions the columns into successive information sets of `G`.
fn information_sets(g: &BitMatrix) -> Vec<InfoSet> {
    let n = g.cols();
    let mut used = vec![false; n];
    let mut sets = Vec::new();
    let mut current = g.clone();
    loop {
        let order: Vec<usize> = (0..n).filter(|&c| !used[c]).collect();
        let pivots = current.reduce_in(&order);
        if pivots.is_empty() {
            break;
        }
        for &p in &pivots {
            used[p] = true;
        }
        sets.push(InfoSet { g: current.clone(), rank: pivots.len() });
    }
    sets
}

fn binomial(n: usize, r: usize) -> u64 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Lightest codeword among all combinations of `t` rows of `g` whose first
/// row is `first`, visited in lexicographic order.
fn lightest_from(g: &BitMatrix, t: usize, first: usize) -> Option<(usize, Vec<usize>)> {
    fn dfs(
        g: &BitMatrix,
        acc: &mut Vec<u64>,
        chosen: &mut Vec<usize>,
        left: usize,
        best: &mut Option<(usize, Vec<usize>)>,
    ) {
        if left == 0 {
            let w = weight(acc);
            if best.as_ref().is_none_or(|(bw, _)| w < *bw) {
                *best = Some((w, chosen.clone()));
            }
            return;
        }
        let start = chosen.last().map_or(0, |&c| c + 1);
        for r in start..=g.rows() - left {
            xor_into(acc, g.row_words(r));
            chosen.push(r);
            dfs(g, acc, chosen, left - 1, best);
            chosen.pop();
            xor_into(acc, g.row_words(r));
        }
    }
    if first + t > g.rows() {
        return None;
    }
    let mut acc = g.row_words(first).to_vec();
    let mut chosen = vec![first];
    let mut best = None;
    dfs(g, &mut acc, &mut chosen, t - 1, &mut best);
    best
}

/// Searches codewords by increasing message weight on a chain of information
/// sets. After all messages of weight `t` are tried on every set, any unseen
/// codeword has weight at least `sum_i max(0, t + 1 - (k - rank_i))`; the
/// search stops as soon as this lower bound meets the lightest codeword
/// found. `effort` caps the number of codewords generated; if it runs out,
/// the lightest codeword so far is returned uncertified.
pub fn dmin_bound(h: &ParityCheckMatrix, effort: u64) -> Result<DminResult, AnalysisError> {
    let enc = encoder_from(h);
    let k = enc.k();
    if k == 0 {
        return Err(AnalysisError::TrivialCode);
    }
    let sets = information_sets(enc.generator());
    let contribution = |t: usize, s: &InfoSet| (t + 1).saturating_sub(k - s.rank);

    // Any generator row is a valid starting bound.
    let (mut best_w, mut best_cw) = (0..k)
        .map(|r| (enc.generator().row_weight(r), enc.generator().row_words(r).to_vec()))
        .min_by_key(|(w, _)| *w)
        .expect("k >= 1");
    let mut spent = 0u64;
    let mut certified = false;
    for t in 1..=k {
        let active: Vec<&InfoSet> = sets.iter().filter(|s| contribution(t, s) > 0).collect();
        let cost = binomial(k, t).saturating_mul(active.len() as u64);
        if spent.saturating_add(cost) > effort {
            break;
        }
        spent += cost;
        for s in &active {
            let found = (0..k)
                .into_par_iter()
                .filter_map(|first| lightest_from(&s.g, t, first))
                .min_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
            if let Some((w, rows)) = found {
                if w < best_w {
                    best_w = w;
                    best_cw = vec![0u64; best_cw.len()];
                    for r in rows {
                        xor_into(&mut best_cw, s.g.row_words(r));
                    }
                }
            }
        }
        let lower: usize = sets.iter().map(|s| contribution(t, s)).sum();
        // At t = k the first set has seen every message.
        if lower >= best_w || t == k {
            certified = true;
            break;
        }
    }
    let witness = unpack(&best_cw, h.n());
    debug_assert_eq!(weight(&best_cw), best_w);
    Ok(DminResult { value: best_w, certified, witness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::random_regular;

    fn repetition(n: usize) -> ParityCheckMatrix {
        ParityCheckMatrix::new(n - 1, n, (0..n - 1).flat_map(|i| [(i, i), (i, i + 1)])).unwrap()
    }

    fn hamming() -> ParityCheckMatrix {
        ParityCheckMatrix::from_dense(&[
            vec![1, 0, 1, 0, 1, 0, 1],
            vec![0, 1, 1, 0, 0, 1, 1],
            vec![0, 0, 0, 1, 1, 1, 1],
        ])
        .unwrap()
    }

    #[test]
    fn small_codes() {
        assert_eq!(dmin_exact(&repetition(9)).unwrap().value, 9);
        let spc = ParityCheckMatrix::new(1, 6, (0..6).map(|c| (0, c))).unwrap();
        assert_eq!(dmin_exact(&spc).unwrap().value, 2);
        let d = dmin_exact(&hamming()).unwrap();
        assert_eq!(d.value, 3);
        assert!(d.certified);
        for h in [repetition(9), spc, hamming()] {
            let e = dmin_exact(&h).unwrap();
            let b = dmin_bound(&h, u64::MAX).unwrap();
            assert!(b.certified);
            assert_eq!(b.value, e.value);
        }
    }

    #[test]
    fn limit_and_trivial() {
        let h = random_regular(48, 3, 6, 1).unwrap();
        assert!(matches!(
            dmin_exact_with_limit(&h, 10),
            Err(AnalysisError::DimensionTooLarge { .. })
        ));
        let full = ParityCheckMatrix::new(3, 3, [(0, 0), (1, 1), (2, 2)]).unwrap();
        assert!(matches!(dmin_exact(&full), Err(AnalysisError::TrivialCode)));
        assert!(matches!(dmin_bound(&full, 10), Err(AnalysisError::TrivialCode)));
    }

    #[test]
    fn tiny_effort_is_uncertified_but_valid() {
        let h = random_regular(96, 3, 6, 4).unwrap();
        let d = dmin_bound(&h, 10).unwrap();
        assert!(!d.certified);
        assert_eq!(d.witness.iter().filter(|&&b| b == 1).count(), d.value);
    }

    #[test]
    fn json_roundtrip() {
        let d = dmin_exact(&hamming()).unwrap();
        let s = serde_json::to_string(&d).unwrap();
        assert!(s.contains("\"witness\":\""));
        let back: DminResult = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d);
        let bad = s.replace("\"value\":3", "\"value\":4");
        assert!(serde_json::from_str::<DminResult>(&bad).is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(64, 3), 41_664);
        assert_eq!(binomial(5, 7), 0);
        assert_eq!(binomial(200, 100), u64::MAX);
    }
}
