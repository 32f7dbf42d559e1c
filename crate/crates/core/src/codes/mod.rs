//! Parity-check matrices, their GF(2) properties, structured templates and
//! random constructions.

pub mod alist;
mod cycles;
pub mod gf2;
mod random;
mod template;

use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};
use std::sync::OnceLock;

use serde::Serialize;
use thiserror::Error;

pub use cycles::{girth_and_cycles, CycleReport};
pub use gf2::BitMatrix;
pub use random::{random_column_regular, random_regular};
pub use template::{apply_template, StructureTemplate, TemplateKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error("entry ({row}, {col}) outside a {m}x{n} matrix")]
    OutOfRange { row: usize, col: usize, m: usize, n: usize },
    #[error("duplicate edge ({row}, {col})")]
    DuplicateEdge { row: usize, col: usize },
    #[error("infeasible degree pair: {0}")]
    InfeasibleDegrees(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("template violated: {0}")]
    TemplateViolated(String),
    #[error("invalid template: {0}")]
    InvalidTemplate(String),
}

/// Binary `m x n` parity-check matrix stored as row and column adjacency
/// lists. Immutable; edits build a new matrix.
#[derive(Debug)]
pub struct ParityCheckMatrix {
    m: usize,
    n: usize,
    rows: Vec<Vec<usize>>,
    cols: Vec<Vec<usize>>,
    template: Option<StructureTemplate>,
    rank: OnceLock<usize>,
}

impl Clone for ParityCheckMatrix {
    fn clone(&self) -> Self {
        ParityCheckMatrix {
            m: self.m,
            n: self.n,
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            template: self.template.clone(),
            rank: self.rank.clone(),
        }
    }
}

impl PartialEq for ParityCheckMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m && self.n == other.n && self.rows == other.rows
    }
}

impl Eq for ParityCheckMatrix {}

impl Hash for ParityCheckMatrix {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.m.hash(state);
        self.n.hash(state);
        self.rows.hash(state);
    }
}

impl ParityCheckMatrix {
    /// Builds a matrix from `(row, col)` pairs. Empty rows and columns are
    /// allowed here; see [`ParityCheckMatrix::is_connected`].
    pub fn new(
        m: usize,
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, CodeError> {
        let mut rows = vec![Vec::new(); m];
        for (r, c) in edges {
            if r >= m || c >= n {
                return Err(CodeError::OutOfRange { row: r, col: c, m, n });
            }
            rows[r].push(c);
        }
        for (r, row) in rows.iter_mut().enumerate() {
            row.sort_unstable();
            if let Some(w) = row.windows(2).find(|w| w[0] == w[1]) {
                return Err(CodeError::DuplicateEdge { row: r, col: w[0] });
            }
        }
        Ok(Self::from_sorted_rows(n, rows, None))
    }

    /// Builds a matrix from a dense 0/1 representation (one inner vector per row).
    pub fn from_dense(dense: &[Vec<u8>]) -> Result<Self, CodeError> {
        let m = dense.len();
        let n = dense.first().map_or(0, Vec::len);
        if dense.iter().any(|r| r.len() != n) {
            return Err(CodeError::DimensionMismatch("ragged dense rows".into()));
        }
        let edges = dense.iter().enumerate().flat_map(|(r, row)| {
            row.iter().enumerate().filter(|(_, &b)| b != 0).map(move |(c, _)| (r, c))
        });
        Self::new(m, n, edges)
    }

    pub(crate) fn from_sorted_rows(
        n: usize,
        rows: Vec<Vec<usize>>,
        template: Option<StructureTemplate>,
    ) -> Self {
        let mut cols = vec![Vec::new(); n];
        for (r, row) in rows.iter().enumerate() {
            for &c in row {
                cols[c].push(r);
            }
        }
        ParityCheckMatrix { m: rows.len(), n, rows, cols, template, rank: OnceLock::new() }
    }

    /// Attaches a structure template, checking that the right `m x m` block
    /// matches it bit-exactly.
    pub fn with_template(mut self, t: StructureTemplate) -> Result<Self, CodeError> {
        if t.kind() == TemplateKind::Unstructured {
            self.template = None;
            return Ok(self);
        }
        if t.m() != self.m || self.n < self.m {
            return Err(CodeError::DimensionMismatch(format!(
                "template for m={} on a {}x{} matrix",
                t.m(),
                self.m,
                self.n
            )));
        }
        self.template = Some(t);
        self.check_template()?;
        Ok(self)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of ones, i.e. Tanner-graph edges.
    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Sorted column indices of row `r`.
    pub fn row(&self, r: usize) -> &[usize] {
        &self.rows[r]
    }

    /// Sorted row indices of column `c`.
    pub fn col(&self, c: usize) -> &[usize] {
        &self.cols[c]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn cols(&self) -> &[Vec<usize>] {
        &self.cols
    }

    pub fn contains(&self, r: usize, c: usize) -> bool {
        self.rows[r].binary_search(&c).is_ok()
    }

    /// Edges in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows.iter().enumerate().flat_map(|(r, row)| row.iter().map(move |&c| (r, c)))
    }

    pub fn template(&self) -> Option<&StructureTemplate> {
        self.template.as_ref()
    }

    /// First column of the frozen template block (`n` when unstructured).
    pub fn free_cols(&self) -> usize {
        match &self.template {
            Some(t) => self.n - t.m(),
            None => self.n,
        }
    }

    /// Whether entry `(r, c)` is fixed by the template.
    pub fn is_frozen(&self, _r: usize, c: usize) -> bool {
        c >= self.free_cols()
    }

    pub fn check_template(&self) -> Result<(), CodeError> {
        let Some(t) = &self.template else { return Ok(()) };
        let off = self.n - t.m();
        let mut expected: Vec<Vec<usize>> = vec![Vec::new(); self.m];
        for (r, c) in t.right_block() {
            expected[r].push(c + off);
        }
        for (r, exp) in expected.iter_mut().enumerate() {
            exp.sort_unstable();
            let got: Vec<usize> = self.rows[r].iter().copied().filter(|&c| c >= off).collect();
            if &got != exp {
                return Err(CodeError::TemplateViolated(format!(
                    "row {r} of the right block is {got:?}, expected {exp:?}"
                )));
            }
        }
        Ok(())
    }

    pub fn empty_rows(&self) -> Vec<usize> {
        (0..self.m).filter(|&r| self.rows[r].is_empty()).collect()
    }

    pub fn empty_cols(&self) -> Vec<usize> {
        (0..self.n).filter(|&c| self.cols[c].is_empty()).collect()
    }

    /// Every row and every column has at least one edge.
    pub fn is_connected(&self) -> bool {
        self.rows.iter().all(|r| !r.is_empty()) && self.cols.iter().all(|c| !c.is_empty())
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        let mut d = vec![vec![0u8; self.n]; self.m];
        for (r, c) in self.edges() {
            d[r][c] = 1;
        }
        d
    }

    pub fn to_bit_matrix(&self) -> BitMatrix {
        let mut b = BitMatrix::zeros(self.m, self.n);
        for (r, c) in self.edges() {
            b.set(r, c, true);
        }
        b
    }

    /// Rank over GF(2), computed once per matrix.
    pub fn rank(&self) -> usize {
        *self.rank.get_or_init(|| self.to_bit_matrix().rank())
    }

    /// Returns a copy with the given entries toggled. The template is kept.
    pub fn with_toggled(&self, entries: &[(usize, usize)]) -> Result<Self, CodeError> {
        let mut rows = self.rows.clone();
        for &(r, c) in entries {
            if r >= self.m || c >= self.n {
                return Err(CodeError::OutOfRange { row: r, col: c, m: self.m, n: self.n });
            }
            match rows[r].binary_search(&c) {
                Ok(p) => {
                    rows[r].remove(p);
                }
                Err(p) => rows[r].insert(p, c),
            }
        }
        Ok(Self::from_sorted_rows(self.n, rows, self.template.clone()))
    }

    /// Copy of `self` with the given template attached, without checking.
    pub(crate) fn retemplated(mut self, t: Option<StructureTemplate>) -> Self {
        self.template = t;
        self
    }

    pub fn profile(&self) -> CodeProfile {
        profile(self)
    }

    /// Checks the internal adjacency lists agree. Used in tests.
    #[doc(hidden)]
    pub fn assert_consistent(&self) {
        let rebuilt = Self::from_sorted_rows(self.n, self.rows.clone(), None);
        assert_eq!(rebuilt.cols, self.cols);
        for row in &self.rows {
            assert!(row.windows(2).all(|w| w[0] < w[1]));
        }
    }
}

/// Rank of `h` over GF(2).
pub fn gf2_rank(h: &ParityCheckMatrix) -> usize {
    h.rank()
}

/// Dimension, rate and degree statistics of a code.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CodeProfile {
    pub n: usize,
    pub m: usize,
    pub rank: usize,
    pub k: usize,
    /// Actual rate `k / n`.
    pub rate: f64,
    /// Design rate `(n - m) / n`.
    pub design_rate: f64,
    /// Variable-node degree -> number of columns.
    pub vn_degrees: BTreeMap<usize, usize>,
    /// Check-node degree -> number of rows.
    pub cn_degrees: BTreeMap<usize, usize>,
    pub edges: usize,
}

pub fn profile(h: &ParityCheckMatrix) -> CodeProfile {
    let rank = h.rank();
    let k = h.n() - rank;
    let mut vn_degrees = BTreeMap::new();
    for c in h.cols() {
        *vn_degrees.entry(c.len()).or_insert(0) += 1;
    }
    let mut cn_degrees = BTreeMap::new();
    for r in h.rows() {
        *cn_degrees.entry(r.len()).or_insert(0) += 1;
    }
    let n = h.n().max(1) as f64;
    CodeProfile {
        n: h.n(),
        m: h.m(),
        rank,
        k,
        rate: k as f64 / n,
        design_rate: (h.n() as f64 - h.m() as f64) / n,
        vn_degrees,
        cn_degrees,
        edges: h.edge_count(),
    }
}
