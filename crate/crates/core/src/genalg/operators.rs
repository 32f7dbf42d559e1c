//! Mutation, crossover and connectivity repair on parity-check matrices.
//!
//! All operators leave entries of a template block untouched.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::GaError;
use crate::codes::ParityCheckMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MutationKind {
    Add,
    Remove,
    Both,
}

impl MutationKind {
    pub const ALL: [MutationKind; 3] = [MutationKind::Add, MutationKind::Remove, MutationKind::Both];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    /// Split columns: left half of one parent, right half of the other.
    Vertical,
    /// Split rows: upper half of one parent, lower half of the other.
    Horizontal,
}

fn random_free_zero<R: Rng + ?Sized>(h: &ParityCheckMatrix, rng: &mut R) -> Option<(usize, usize)> {
    let (m, free) = (h.m(), h.free_cols());
    let free_ones: usize = h.rows().iter().map(|r| r.iter().filter(|&&c| c < free).count()).sum();
    let zeros = m * free - free_ones;
    if zeros == 0 {
        return None;
    }
    // Rejection sampling is uniform and fast for sparse matrices; fall back
    // to enumeration when the free region is dense.
    if zeros * 4 >= m * free {
        loop {
            let pos = (rng.random_range(0..m), rng.random_range(0..free));
            if !h.contains(pos.0, pos.1) {
                return Some(pos);
            }
        }
    }
    let pick = rng.random_range(0..zeros);
    (0..m)
        .flat_map(|r| (0..free).map(move |c| (r, c)))
        .filter(|&(r, c)| !h.contains(r, c))
        .nth(pick)
}

fn random_free_one<R: Rng + ?Sized>(h: &ParityCheckMatrix, rng: &mut R) -> Option<(usize, usize)> {
    let free = h.free_cols();
    let ones: Vec<(usize, usize)> = h.edges().filter(|&(_, c)| c < free).collect();
    if ones.is_empty() {
        return None;
    }
    Some(ones[rng.random_range(0..ones.len())])
}

/// Adds and/or removes one edge outside the template block. The result is
/// not yet repaired.
pub fn mutate<R: Rng + ?Sized>(
    parent: &ParityCheckMatrix,
    kind: MutationKind,
    rng: &mut R,
) -> Result<ParityCheckMatrix, GaError> {
    let no_zero = || GaError::NoMutableEntry("no free zero entry to set".into());
    let no_one = || GaError::NoMutableEntry("no free edge to remove".into());
    let toggles = match kind {
        MutationKind::Add => vec![random_free_zero(parent, rng).ok_or_else(no_zero)?],
        MutationKind::Remove => vec![random_free_one(parent, rng).ok_or_else(no_one)?],
        MutationKind::Both => {
            // Both positions are drawn from the parent, so they never coincide.
            let removed = random_free_one(parent, rng).ok_or_else(no_one)?;
            let added = random_free_zero(parent, rng).ok_or_else(no_zero)?;
            vec![removed, added]
        }
    };
    Ok(parent.with_toggled(&toggles)?)
}

/// Gives every empty column one edge at a random permitted row, then every
/// still-empty row one edge at a random permitted column.
pub fn repair<R: Rng + ?Sized>(h: &ParityCheckMatrix, rng: &mut R) -> ParityCheckMatrix {
    let empty_cols = h.empty_cols();
    let empty_rows = h.empty_rows();
    if empty_cols.is_empty() && empty_rows.is_empty() {
        return h.clone();
    }
    let mut adds = Vec::new();
    let mut filled_rows = vec![false; h.m()];
    for c in empty_cols {
        // Template columns are never empty, so `c` is always free.
        let r = rng.random_range(0..h.m());
        filled_rows[r] = true;
        adds.push((r, c));
    }
    let free = h.free_cols();
    for r in empty_rows {
        if !filled_rows[r] && free > 0 {
            adds.push((r, rng.random_range(0..free)));
        }
    }
    h.with_toggled(&adds).expect("repair positions are in range and empty")
}

/// Symmetric 2D crossover. Offspring A takes the first half from `p1` and
/// the second from `p2`; offspring B the reverse. Template blocks are kept;
/// in structured matrices the vertical split falls inside the free part.
pub fn crossover<R: Rng + ?Sized>(
    p1: &ParityCheckMatrix,
    p2: &ParityCheckMatrix,
    axis: Axis,
    rng: &mut R,
) -> Result<(ParityCheckMatrix, ParityCheckMatrix), GaError> {
    if p1.m() != p2.m() || p1.n() != p2.n() || p1.template() != p2.template() {
        return Err(GaError::Mismatch("crossover parents differ in shape or template".into()));
    }
    let free = p1.free_cols();
    let first_half = |r: usize, c: usize| -> bool {
        match axis {
            Axis::Vertical => c < free / 2,
            Axis::Horizontal => r < p1.m() / 2,
        }
    };
    let child = |a: &ParityCheckMatrix, b: &ParityCheckMatrix| -> ParityCheckMatrix {
        // Toggle the entries of `a` that differ from `b` in the second half.
        let mut toggles = Vec::new();
        for r in 0..a.m() {
            let (ra, rb) = (a.row(r), b.row(r));
            for &c in ra.iter().filter(|&&c| c < free && !first_half(r, c)) {
                if rb.binary_search(&c).is_err() {
                    toggles.push((r, c));
                }
            }
            for &c in rb.iter().filter(|&&c| c < free && !first_half(r, c)) {
                if ra.binary_search(&c).is_err() {
                    toggles.push((r, c));
                }
            }
        }
        a.with_toggled(&toggles).expect("positions within the matrix")
    };
    let a = child(p1, p2);
    let b = child(p2, p1);
    Ok((repair(&a, rng), repair(&b, rng)))
}
