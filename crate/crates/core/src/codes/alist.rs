//! MacKay alist format.
//!
//! ```text
//! n m
//! max_col_weight max_row_weight
//! <n column weights>
//! <m row weights>
//! <n lines: 1-based row indices of each column, zero padded>
//! <m lines: 1-based column indices of each row, zero padded>
//! ```
//!
//! Blank lines are ignored. Errors carry the 1-based line number of the
//! offending line.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use super::ParityCheckMatrix;

#[derive(Debug, Error)]
pub enum AlistError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unexpected end of file: {0}")]
    Truncated(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl AlistError {
    /// Line number of a parse error.
    pub fn line(&self) -> Option<usize> {
        match self {
            AlistError::Parse { line, .. } => Some(*line),
            _ => None,
        }
    }
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn next_numbers(&mut self, what: &str) -> Result<(usize, Vec<usize>), AlistError> {
        for (i, text) in self.inner.by_ref() {
            if text.trim().is_empty() {
                continue;
            }
            let line = i + 1;
            let nums = text
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<usize>().map_err(|_| AlistError::Parse {
                        line,
                        msg: format!("invalid token `{tok}` in {what}"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            return Ok((line, nums));
        }
        Err(AlistError::Truncated(format!("missing {what}")))
    }

    fn rest(&mut self) -> Option<usize> {
        self.inner.by_ref().find(|(_, t)| !t.trim().is_empty()).map(|(i, _)| i + 1)
    }
}

fn perr(line: usize, msg: impl Into<String>) -> AlistError {
    AlistError::Parse { line, msg: msg.into() }
}

fn expect_len(line: usize, got: &[usize], want: usize, what: &str) -> Result<(), AlistError> {
    if got.len() != want {
        return Err(perr(line, format!("{what}: expected {want} values, found {}", got.len())));
    }
    Ok(())
}

/// Parses one adjacency line: `weight` 1-based indices below `bound`,
/// followed by optional zero padding up to `max_weight` entries.
fn adjacency(
    line: usize,
    nums: &[usize],
    weight: usize,
    max_weight: usize,
    bound: usize,
    what: &str,
) -> Result<Vec<usize>, AlistError> {
    // A matrix without edges still needs one placeholder per line.
    if nums.len() > max_weight.max(weight).max(1) {
        return Err(perr(line, format!("{what}: {} entries exceed max weight {max_weight}", nums.len())));
    }
    if nums.len() < weight {
        return Err(perr(
            line,
            format!("{what}: declared weight {weight} but {} entries listed", nums.len()),
        ));
    }
    let (idx, pad) = nums.split_at(weight);
    if pad.iter().any(|&p| p != 0) {
        return Err(perr(line, format!("{what}: more than the declared {weight} entries")));
    }
    let mut out = Vec::with_capacity(weight);
    for &v in idx {
        if v == 0 {
            return Err(perr(
                line,
                format!("{what}: declared weight {weight} but only {} entries listed", out.len()),
            ));
        }
        if v > bound {
            return Err(perr(line, format!("{what}: index {v} out of range 1..={bound}")));
        }
        out.push(v - 1);
    }
    let mut sorted = out.clone();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(perr(line, format!("{what}: repeated index")));
    }
    Ok(out)
}

pub fn parse_alist(text: &str) -> Result<ParityCheckMatrix, AlistError> {
    let mut lines = Lines { inner: text.lines().enumerate() };
    let (l, dims) = lines.next_numbers("header")?;
    expect_len(l, &dims, 2, "header `n m`")?;
    let (n, m) = (dims[0], dims[1]);
    if n == 0 || m == 0 {
        return Err(perr(l, "header: n and m must be positive"));
    }
    let (l, maxw) = lines.next_numbers("maximum weights")?;
    expect_len(l, &maxw, 2, "maximum weights")?;
    let (max_col, max_row) = (maxw[0], maxw[1]);
    let (l, col_w) = lines.next_numbers("column weights")?;
    expect_len(l, &col_w, n, "column weights")?;
    if let Some(&w) = col_w.iter().find(|&&w| w > max_col) {
        return Err(perr(l, format!("column weight {w} exceeds declared maximum {max_col}")));
    }
    let (l, row_w) = lines.next_numbers("row weights")?;
    expect_len(l, &row_w, m, "row weights")?;
    if let Some(&w) = row_w.iter().find(|&&w| w > max_row) {
        return Err(perr(l, format!("row weight {w} exceeds declared maximum {max_row}")));
    }
    let total: usize = col_w.iter().sum();
    if total != row_w.iter().sum::<usize>() {
        return Err(perr(l, "row weights and column weights have different sums"));
    }

    let mut edges = Vec::with_capacity(total);
    for (c, &w) in col_w.iter().enumerate() {
        let what = format!("column {}", c + 1);
        let (l, nums) = lines.next_numbers(&what)?;
        for r in adjacency(l, &nums, w, max_col, m, &what)? {
            edges.push((r, c));
        }
    }
    let h = ParityCheckMatrix::new(m, n, edges).map_err(|e| perr(0, e.to_string()))?;
    for (r, &w) in row_w.iter().enumerate() {
        let what = format!("row {}", r + 1);
        let (l, nums) = lines.next_numbers(&what)?;
        let mut cols = adjacency(l, &nums, w, max_row, n, &what)?;
        cols.sort_unstable();
        if cols != h.row(r) {
            return Err(perr(l, format!("{what} disagrees with the column lists")));
        }
    }
    if let Some(l) = lines.rest() {
        return Err(perr(l, "unexpected trailing content"));
    }
    Ok(h)
}

pub fn to_alist(h: &ParityCheckMatrix) -> String {
    let max_col = h.cols().iter().map(Vec::len).max().unwrap_or(0);
    let max_row = h.rows().iter().map(Vec::len).max().unwrap_or(0);
    let mut s = String::new();
    let join = |v: &mut dyn Iterator<Item = usize>| {
        v.map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
    };
    let _ = writeln!(s, "{} {}", h.n(), h.m());
    let _ = writeln!(s, "{max_col} {max_row}");
    let _ = writeln!(s, "{}", join(&mut h.cols().iter().map(Vec::len)));
    let _ = writeln!(s, "{}", join(&mut h.rows().iter().map(Vec::len)));
    for col in h.cols() {
        let mut it = col.iter().map(|r| r + 1).chain(std::iter::repeat_n(0, max_col.max(1) - col.len()));
        let _ = writeln!(s, "{}", join(&mut it));
    }
    for row in h.rows() {
        let mut it = row.iter().map(|c| c + 1).chain(std::iter::repeat_n(0, max_row.max(1) - row.len()));
        let _ = writeln!(s, "{}", join(&mut it));
    }
    s
}

pub fn read_alist(path: impl AsRef<Path>) -> Result<ParityCheckMatrix, AlistError> {
    parse_alist(&std::fs::read_to_string(path)?)
}

pub fn write_alist(h: &ParityCheckMatrix, path: impl AsRef<Path>) -> Result<(), AlistError> {
    std::fs::write(path, to_alist(h))?;
    Ok(())
}
