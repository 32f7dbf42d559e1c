//! Flooding sum-product BP decoder with syndrome-based early stopping.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channels::LlrFrame;
use crate::codes::ParityCheckMatrix;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecodeError {
    #[error("frame has {got} LLRs, code length is {want}")]
    DimensionMismatch { got: usize, want: usize },
    #[error("non-finite channel LLR at position {0}")]
    NonFiniteLlr(usize),
    #[error("invalid decoder configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecoderConfig {
    /// N_it,max.
    pub max_iterations: usize,
    /// Messages are clamped to `[-llr_clamp, llr_clamp]`.
    pub llr_clamp: f64,
    /// `|tanh|` is kept at or below `1 - tanh_guard`.
    pub tanh_guard: f64,
    /// Test the channel hard decisions before the first iteration. A frame
    /// that is already a codeword then decodes in zero iterations.
    pub precheck: bool,
    /// Stop as soon as the syndrome is zero. When off, every frame runs
    /// `max_iterations` iterations.
    pub early_stop: bool,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        DecoderConfig { max_iterations: 200, llr_clamp: 30.0, tanh_guard: 1e-12, precheck: true, early_stop: true }
    }
}

impl DecoderConfig {
    pub fn with_max_iterations(max_iterations: usize) -> Self {
        DecoderConfig { max_iterations, ..Default::default() }
    }

    pub fn validate(&self) -> Result<(), DecodeError> {
        if !(self.llr_clamp > 0.0 && self.llr_clamp.is_finite()) {
            return Err(DecodeError::InvalidConfig(format!("llr_clamp = {}", self.llr_clamp)));
        }
        if !(self.tanh_guard > 0.0 && self.tanh_guard < 1e-6) {
            return Err(DecodeError::InvalidConfig(format!("tanh_guard = {}", self.tanh_guard)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeOutcome {
    pub hard_bits: Vec<u8>,
    pub iterations_used: usize,
    pub syndrome_ok: bool,
    /// First iteration with a zero syndrome (0 for the pre-iteration check).
    pub converged_at: Option<usize>,
}

/// `H * bits` over GF(2).
pub fn syndrome(h: &ParityCheckMatrix, bits: &[u8]) -> Result<Vec<u8>, DecodeError> {
    if bits.len() != h.n() {
        return Err(DecodeError::DimensionMismatch { got: bits.len(), want: h.n() });
    }
    Ok(h.rows().iter().map(|row| row.iter().fold(0u8, |acc, &c| acc ^ (bits[c] & 1))).collect())
}

/// Tanner graph in flat arrays. Edges are numbered in row-major order.
#[derive(Debug, Clone)]
pub struct BpDecoder {
    n: usize,
    cfg: DecoderConfig,
    row_ptr: Vec<usize>,
    edge_var: Vec<usize>,
    var_ptr: Vec<usize>,
    var_edges: Vec<usize>,
}

/// Scratch buffers reused across frames.
#[derive(Debug, Clone, Default)]
pub struct Workspace {
    v2c: Vec<f64>,
    c2v: Vec<f64>,
    scratch: Vec<f64>,
    hard: Vec<u8>,
}

impl Workspace {
    pub fn hard_bits(&self) -> &[u8] {
        &self.hard
    }
}

impl BpDecoder {
    pub fn new(h: &ParityCheckMatrix, cfg: DecoderConfig) -> Result<Self, DecodeError> {
        cfg.validate()?;
        let mut row_ptr = Vec::with_capacity(h.m() + 1);
        let mut edge_var = Vec::with_capacity(h.edge_count());
        row_ptr.push(0);
        for row in h.rows() {
            edge_var.extend_from_slice(row);
            row_ptr.push(edge_var.len());
        }
        let mut var_lists = vec![Vec::new(); h.n()];
        for (e, &v) in edge_var.iter().enumerate() {
            var_lists[v].push(e);
        }
        let mut var_ptr = Vec::with_capacity(h.n() + 1);
        let mut var_edges = Vec::with_capacity(edge_var.len());
        var_ptr.push(0);
        for l in var_lists {
            var_edges.extend(l);
            var_ptr.push(var_edges.len());
        }
        Ok(BpDecoder { n: h.n(), cfg, row_ptr, edge_var, var_ptr, var_edges })
    }

    pub fn config(&self) -> &DecoderConfig {
        &self.cfg
    }

    pub fn workspace(&self) -> Workspace {
        let e = self.edge_var.len();
        let max_row = self.row_ptr.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0);
        Workspace {
            v2c: vec![0.0; e],
            c2v: vec![0.0; e],
            scratch: vec![0.0; max_row],
            hard: vec![0; self.n],
        }
    }

    pub fn decode(&self, frame: &LlrFrame) -> Result<DecodeOutcome, DecodeError> {
        let mut ws = self.workspace();
        let (iterations_used, converged_at) = self.decode_llrs(&frame.llrs, &mut ws)?;
        let syndrome_ok = self.syndrome_ok(&ws.hard);
        Ok(DecodeOutcome { hard_bits: ws.hard, iterations_used, syndrome_ok, converged_at })
    }

    /// Decodes into `ws`; returns `(iterations_used, converged_at)`, where
    /// `converged_at` is the first iteration with a zero syndrome. Hard
    /// decisions are left in [`Workspace::hard_bits`].
    pub fn decode_llrs(
        &self,
        llrs: &[f64],
        ws: &mut Workspace,
    ) -> Result<(usize, Option<usize>), DecodeError> {
        if llrs.len() != self.n {
            return Err(DecodeError::DimensionMismatch { got: llrs.len(), want: self.n });
        }
        if let Some(i) = llrs.iter().position(|l| !l.is_finite()) {
            return Err(DecodeError::NonFiniteLlr(i));
        }
        let clamp = self.cfg.llr_clamp;
        for (h, &l) in ws.hard.iter_mut().zip(llrs) {
            *h = (l < 0.0) as u8;
        }
        let mut converged_at = None;
        if self.cfg.precheck && self.syndrome_ok(&ws.hard) {
            if self.cfg.early_stop {
                return Ok((0, Some(0)));
            }
            converged_at = Some(0);
        }
        for (e, &v) in self.edge_var.iter().enumerate() {
            ws.v2c[e] = llrs[v].clamp(-clamp, clamp);
        }
        for it in 1..=self.cfg.max_iterations {
            self.check_update(ws);
            self.variable_update(llrs, ws);
            if converged_at.is_none() && self.syndrome_ok(&ws.hard) {
                if self.cfg.early_stop {
                    return Ok((it, Some(it)));
                }
                converged_at = Some(it);
            }
        }
        Ok((self.cfg.max_iterations, converged_at))
    }

    fn check_update(&self, ws: &mut Workspace) {
        let clamp = self.cfg.llr_clamp;
        let limit = 1.0 - self.cfg.tanh_guard;
        let Workspace { v2c, c2v, scratch, .. } = ws;
        for w in self.row_ptr.windows(2) {
            let (start, end) = (w[0], w[1]);
            let deg = end - start;
            let t = &mut scratch[..deg];
            for (ti, &m) in t.iter_mut().zip(&v2c[start..end]) {
                *ti = half_tanh(m);
            }
            // Exclusive products via a forward then a backward sweep.
            let mut fwd = 1.0;
            for (i, ti) in t.iter().enumerate() {
                c2v[start + i] = fwd;
                fwd *= ti;
            }
            let mut bwd = 1.0;
            for i in (0..deg).rev() {
                let p = (c2v[start + i] * bwd).clamp(-limit, limit);
                bwd *= t[i];
                c2v[start + i] = (((1.0 + p) / (1.0 - p)).ln()).clamp(-clamp, clamp);
            }
        }
    }

    fn variable_update(&self, llrs: &[f64], ws: &mut Workspace) {
        let clamp = self.cfg.llr_clamp;
        for (v, w) in self.var_ptr.windows(2).enumerate() {
            let edges = &self.var_edges[w[0]..w[1]];
            let total = llrs[v] + edges.iter().map(|&e| ws.c2v[e]).sum::<f64>();
            for &e in edges {
                ws.v2c[e] = (total - ws.c2v[e]).clamp(-clamp, clamp);
            }
            ws.hard[v] = (total < 0.0) as u8;
        }
    }

    fn syndrome_ok(&self, hard: &[u8]) -> bool {
        self.row_ptr
            .windows(2)
            .all(|w| self.edge_var[w[0]..w[1]].iter().fold(0u8, |a, &v| a ^ hard[v]) == 0)
    }
}

/// `tanh(x / 2)` through a single exponential.
#[inline]
fn half_tanh(x: f64) -> f64 {
    let e = (-x.abs()).exp();
    let t = (1.0 - e) / (1.0 + e);
    if x < 0.0 {
        -t
    } else {
        t
    }
}

/// Decodes one frame with a freshly built decoder.
pub fn decode(
    h: &ParityCheckMatrix,
    frame: &LlrFrame,
    cfg: &DecoderConfig,
) -> Result<DecodeOutcome, DecodeError> {
    BpDecoder::new(h, *cfg)?.decode(frame)
}
