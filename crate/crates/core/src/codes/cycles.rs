use std::collections::VecDeque;

use serde::Serialize;

use super::ParityCheckMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleReport {
    /// Length of the shortest Tanner-graph cycle, `None` if the graph is a forest.
    pub girth: Option<usize>,
    /// Number of length-4 cycles.
    pub four_cycles: u64,
    /// Shortest cycle through each variable node.
    pub vn_shortest_cycle: Vec<Option<usize>>,
}

/// Girth, 4-cycle count and per-VN shortest cycle lengths.
pub fn girth_and_cycles(h: &ParityCheckMatrix) -> CycleReport {
    let vn_shortest_cycle: Vec<Option<usize>> = (0..h.n()).map(|v| shortest_cycle_through(h, v)).collect();
    let girth = vn_shortest_cycle.iter().flatten().copied().min();
    CycleReport { girth, four_cycles: count_four_cycles(h), vn_shortest_cycle }
}

fn count_four_cycles(h: &ParityCheckMatrix) -> u64 {
    let mut overlap = vec![0u32; h.m()];
    let mut total = 0u64;
    for r in 0..h.m() {
        overlap.iter_mut().for_each(|o| *o = 0);
        for &c in h.row(r) {
            for &r2 in h.col(c) {
                if r2 > r {
                    overlap[r2] += 1;
                }
            }
        }
        total += overlap.iter().map(|&o| (o as u64) * (o as u64).saturating_sub(1) / 2).sum::<u64>();
    }
    total
}

/// BFS from VN `v` labelling every node with the first hop taken from `v`.
/// A non-tree edge joining two different branches closes a cycle through `v`;
/// the shortest such closure is the shortest cycle through `v`.
fn shortest_cycle_through(h: &ParityCheckMatrix, v: usize) -> Option<usize> {
    let n = h.n();
    // Nodes: VNs 0..n, CNs n..n+m.
    let total = n + h.m();
    let mut dist = vec![usize::MAX; total];
    let mut branch = vec![usize::MAX; total];
    let mut parent = vec![usize::MAX; total];
    let mut queue = VecDeque::new();
    dist[v] = 0;
    queue.push_back(v);
    let mut best: Option<usize> = None;
    while let Some(u) = queue.pop_front() {
        if let Some(b) = best {
            // Any later closure is at least 2*dist[u]+1 long.
            if 2 * dist[u] + 1 >= b {
                break;
            }
        }
        let neighbours: Box<dyn Iterator<Item = usize>> = if u < n {
            Box::new(h.col(u).iter().map(|&r| r + n))
        } else {
            Box::new(h.row(u - n).iter().copied())
        };
        for w in neighbours {
            if w == parent[u] {
                continue;
            }
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                parent[w] = u;
                branch[w] = if u == v { w } else { branch[u] };
                queue.push_back(w);
            } else if u != v && w != v && branch[w] != branch[u] {
                let len = dist[u] + dist[w] + 1;
                best = Some(best.map_or(len, |b| b.min(len)));
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_rows_sharing_two_columns() {
        let h = ParityCheckMatrix::new(2, 3, [(0, 0), (0, 1), (1, 0), (1, 1), (1, 2)]).unwrap();
        let rep = girth_and_cycles(&h);
        assert_eq!(rep.girth, Some(4));
        assert_eq!(rep.four_cycles, 1);
        assert_eq!(rep.vn_shortest_cycle, vec![Some(4), Some(4), None]);
    }

    #[test]
    fn repetition_code_is_a_tree() {
        let h = ParityCheckMatrix::new(4, 5, (0..4).flat_map(|r| [(r, r), (r, r + 1)])).unwrap();
        let rep = girth_and_cycles(&h);
        assert_eq!(rep.girth, None);
        assert_eq!(rep.four_cycles, 0);
    }

    #[test]
    fn three_rows_sharing_a_pair() {
        // Three checks on the same two columns: C(3,2) four-cycles.
        let h = ParityCheckMatrix::new(3, 2, (0..3).flat_map(|r| [(r, 0), (r, 1)])).unwrap();
        assert_eq!(girth_and_cycles(&h).four_cycles, 3);
    }
}
