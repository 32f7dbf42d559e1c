use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CodeError, ParityCheckMatrix};

const MAX_RESTARTS: usize = 200;

/// Random `(vn_degree, cn_degree)`-regular matrix with `n` columns and
/// `n * vn_degree / cn_degree` rows, no multi-edges.
pub fn random_regular(
    n: usize,
    vn_degree: usize,
    cn_degree: usize,
    seed: u64,
) -> Result<ParityCheckMatrix, CodeError> {
    if vn_degree == 0 || cn_degree == 0 || !(n * vn_degree).is_multiple_of(cn_degree) {
        return Err(CodeError::InfeasibleDegrees(format!(
            "n={n}, vn_degree={vn_degree}, cn_degree={cn_degree}"
        )));
    }
    let m = n * vn_degree / cn_degree;
    if vn_degree > m || cn_degree > n {
        return Err(CodeError::InfeasibleDegrees(format!(
            "degrees ({vn_degree}, {cn_degree}) do not fit a {m}x{n} matrix"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let row_degrees = vec![cn_degree; m];
    socket_match(m, n, vn_degree, &row_degrees, &mut rng)
}

/// Random `m x n` matrix with every column of weight `vn_degree` and row
/// weights differing by at most one.
pub fn random_column_regular<R: Rng + ?Sized>(
    m: usize,
    n: usize,
    vn_degree: usize,
    rng: &mut R,
) -> Result<ParityCheckMatrix, CodeError> {
    if vn_degree == 0 || vn_degree > m || (n > 0 && n * vn_degree < m) {
        return Err(CodeError::InfeasibleDegrees(format!(
            "column weight {vn_degree} in a {m}x{n} matrix"
        )));
    }
    let sockets = n * vn_degree;
    let (base, extra) = (sockets / m, sockets % m);
    let mut heavy: Vec<usize> = (0..m).collect();
    heavy.shuffle(rng);
    let mut row_degrees = vec![base; m];
    for &r in &heavy[..extra] {
        row_degrees[r] += 1;
    }
    socket_match(m, n, vn_degree, &row_degrees, rng)
}

/// Permutation-based socket matching with local collision repair.
fn socket_match<R: Rng + ?Sized>(
    m: usize,
    n: usize,
    dv: usize,
    row_degrees: &[usize],
    rng: &mut R,
) -> Result<ParityCheckMatrix, CodeError> {
    let mut sockets: Vec<usize> =
        row_degrees.iter().enumerate().flat_map(|(r, &d)| std::iter::repeat_n(r, d)).collect();
    debug_assert_eq!(sockets.len(), n * dv);
    let total = sockets.len();
    if total == 0 {
        return ParityCheckMatrix::new(m, n, std::iter::empty());
    }
    for _ in 0..MAX_RESTARTS {
        sockets.shuffle(rng);
        if resolve_collisions(&mut sockets, dv, rng) {
            let edges = sockets.iter().enumerate().map(|(s, &r)| (r, s / dv));
            return ParityCheckMatrix::new(m, n, edges);
        }
    }
    Err(CodeError::InfeasibleDegrees(format!(
        "no simple {m}x{n} matching found after {MAX_RESTARTS} restarts"
    )))
}

fn resolve_collisions<R: Rng + ?Sized>(sockets: &mut [usize], dv: usize, rng: &mut R) -> bool {
    let total = sockets.len();
    let col_has = |sockets: &[usize], col: usize, row: usize, skip: usize| {
        (col * dv..(col + 1) * dv).any(|t| t != skip && sockets[t] == row)
    };
    let budget = 100 * total;
    let mut tries = 0;
    let mut s = 0;
    while s < total {
        let col = s / dv;
        if !col_has(sockets, col, sockets[s], s) {
            s += 1;
            continue;
        }
        tries += 1;
        if tries > budget {
            return false;
        }
        let t = rng.random_range(0..total);
        let other = t / dv;
        if other == col {
            continue;
        }
        if !col_has(sockets, col, sockets[t], s) && !col_has(sockets, other, sockets[s], t) {
            sockets.swap(s, t);
            // A swap never creates a collision elsewhere, so continue from here.
            s += 1;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_3_6_n128() {
        let h = random_regular(128, 3, 6, 11).unwrap();
        assert_eq!((h.m(), h.n()), (64, 128));
        assert!(h.cols().iter().all(|c| c.len() == 3));
        assert!(h.rows().iter().all(|r| r.len() == 6));
        assert_eq!(h.edge_count(), 384);
        h.assert_consistent();
    }

    #[test]
    fn regular_1_2_n4_is_matching() {
        let h = random_regular(4, 1, 2, 5).unwrap();
        assert_eq!((h.m(), h.n()), (2, 4));
        assert!(h.cols().iter().all(|c| c.len() == 1));
        assert!(h.rows().iter().all(|r| r.len() == 2));
    }

    #[test]
    fn same_seed_same_matrix() {
        assert_eq!(random_regular(96, 3, 6, 42).unwrap(), random_regular(96, 3, 6, 42).unwrap());
        assert_ne!(random_regular(96, 3, 6, 42).unwrap(), random_regular(96, 3, 6, 43).unwrap());
    }

    #[test]
    fn infeasible_pairs() {
        assert!(random_regular(10, 3, 4, 0).is_err());
        assert!(random_regular(4, 3, 6, 0).is_err());
        assert!(random_regular(8, 0, 6, 0).is_err());
    }

    #[test]
    fn column_regular_balances_rows() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let h = random_column_regular(32, 33, 3, &mut rng).unwrap();
        assert!(h.cols().iter().all(|c| c.len() == 3));
        let (lo, hi) = h.rows().iter().fold((usize::MAX, 0), |(lo, hi), r| (lo.min(r.len()), hi.max(r.len())));
        assert!(hi - lo <= 1);
    }
}
