use evoldpc::codes::alist::{parse_alist, to_alist};
use evoldpc::codes::{girth_and_cycles, gf2_rank, random_regular, ParityCheckMatrix};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::VecDeque;

/// Rank via insertion into an XOR basis keyed by leading bit.
fn rank_oracle(dense: &[Vec<u8>]) -> usize {
    let n = dense.first().map_or(0, Vec::len);
    assert!(n <= 128);
    let mut basis = [0u128; 128];
    let mut rank = 0;
    for row in dense {
        let mut v: u128 = row.iter().enumerate().map(|(i, &b)| (b as u128) << i).fold(0, |a, b| a | b);
        while v != 0 {
            let lead = 127 - v.leading_zeros() as usize;
            if basis[lead] == 0 {
                basis[lead] = v;
                rank += 1;
                break;
            }
            v ^= basis[lead];
        }
    }
    rank
}

fn random_dense(rng: &mut ChaCha8Rng, m: usize, n: usize, p: f64) -> Vec<Vec<u8>> {
    (0..m).map(|_| (0..n).map(|_| rng.random_bool(p) as u8).collect()).collect()
}

#[test]
fn rank_matches_oracle_on_1000_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..1000 {
        let m = rng.random_range(1..=64);
        let n = rng.random_range(1..=128);
        // Mix sparse, dense and rank-deficient draws.
        let p = [0.05, 0.2, 0.5][i % 3];
        let mut dense = random_dense(&mut rng, m, n, p);
        if i % 5 == 0 && m > 2 {
            let (a, b) = (rng.random_range(0..m), rng.random_range(0..m));
            let sum: Vec<u8> = dense[a].iter().zip(&dense[b]).map(|(x, y)| x ^ y).collect();
            dense[m - 1] = sum;
        }
        let h = ParityCheckMatrix::from_dense(&dense).unwrap();
        assert_eq!(gf2_rank(&h), rank_oracle(&dense), "matrix {i}: {m}x{n}");
        assert_eq!(h.rank(), rank_oracle(&dense));
    }
}

#[test]
fn alist_roundtrip_100_random_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let m = rng.random_range(1..40);
        let n = rng.random_range(1..80);
        let h = ParityCheckMatrix::from_dense(&random_dense(&mut rng, m, n, 0.15)).unwrap();
        let back = parse_alist(&to_alist(&h)).unwrap();
        assert_eq!(back, h);
        assert_eq!(back.edges().collect::<Vec<_>>(), h.edges().collect::<Vec<_>>());
    }
}

/// Undirected graph on `n` variable nodes followed by `m` check nodes.
fn adjacency(h: &ParityCheckMatrix) -> Vec<Vec<usize>> {
    let n = h.n();
    let mut adj = vec![Vec::new(); n + h.m()];
    for (r, c) in h.edges() {
        adj[c].push(n + r);
        adj[n + r].push(c);
    }
    adj
}

fn bfs(adj: &[Vec<usize>], from: usize, skip: (usize, usize)) -> Vec<Option<usize>> {
    let mut dist = vec![None; adj.len()];
    dist[from] = Some(0);
    let mut q = VecDeque::from([from]);
    while let Some(u) = q.pop_front() {
        for &w in &adj[u] {
            if (u, w) == skip || (w, u) == skip || dist[w].is_some() {
                continue;
            }
            dist[w] = Some(dist[u].unwrap() + 1);
            q.push_back(w);
        }
    }
    dist
}

/// Shortest cycle through each variable node: drop one incident edge and
/// find the shortest path between its endpoints.
fn vn_cycle_oracle(h: &ParityCheckMatrix) -> Vec<Option<usize>> {
    let adj = adjacency(h);
    (0..h.n())
        .map(|v| {
            adj[v]
                .iter()
                .filter_map(|&c| bfs(&adj, v, (v, c))[c].map(|d| d + 1))
                .min()
        })
        .collect()
}

fn four_cycle_oracle(h: &ParityCheckMatrix) -> u64 {
    let d = h.to_dense();
    let mut count = 0;
    for r1 in 0..h.m() {
        for r2 in r1 + 1..h.m() {
            for c1 in 0..h.n() {
                for c2 in c1 + 1..h.n() {
                    count += (d[r1][c1] & d[r1][c2] & d[r2][c1] & d[r2][c2]) as u64;
                }
            }
        }
    }
    count
}

fn arb_matrix() -> impl Strategy<Value = ParityCheckMatrix> {
    (1usize..10, 1usize..14).prop_flat_map(|(m, n)| {
        proptest::collection::vec(proptest::collection::vec(prop::bool::weighted(0.3), n), m).prop_map(|rows| {
            let dense: Vec<Vec<u8>> = rows.into_iter().map(|r| r.into_iter().map(u8::from).collect()).collect();
            ParityCheckMatrix::from_dense(&dense).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn weights_sum_to_edge_count(h in arb_matrix()) {
        let rows: usize = h.rows().iter().map(Vec::len).sum();
        let cols: usize = h.cols().iter().map(Vec::len).sum();
        prop_assert_eq!(rows, h.edge_count());
        prop_assert_eq!(cols, h.edge_count());
        h.assert_consistent();
    }

    #[test]
    fn cycles_match_bfs_oracle(h in arb_matrix()) {
        let rep = girth_and_cycles(&h);
        let per_vn = vn_cycle_oracle(&h);
        prop_assert_eq!(&rep.vn_shortest_cycle, &per_vn);
        prop_assert_eq!(rep.girth, per_vn.iter().flatten().copied().min());
        prop_assert_eq!(rep.four_cycles, four_cycle_oracle(&h));
    }

    #[test]
    fn alist_roundtrip(h in arb_matrix()) {
        prop_assert_eq!(parse_alist(&to_alist(&h)).unwrap(), h);
    }

    #[test]
    fn toggling_twice_is_identity(h in arb_matrix(), r in 0usize..10, c in 0usize..14) {
        let (r, c) = (r % h.m(), c % h.n());
        let t = h.with_toggled(&[(r, c)]).unwrap();
        prop_assert_ne!(t.contains(r, c), h.contains(r, c));
        prop_assert_eq!(t.with_toggled(&[(r, c)]).unwrap(), h);
    }

    #[test]
    fn random_regular_is_regular(seed in any::<u64>()) {
        let h = random_regular(48, 3, 6, seed).unwrap();
        prop_assert!(h.cols().iter().all(|c| c.len() == 3));
        prop_assert!(h.rows().iter().all(|r| r.len() == 6));
    }
}
