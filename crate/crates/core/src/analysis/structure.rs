//! Structural diagnostics: where the degree-1 and degree-2 variable nodes
//! sit in the Tanner graph.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::codes::{girth_and_cycles, ParityCheckMatrix};

/// Cycles of this length or shorter count as short for degree-2 nodes.
pub const DEFAULT_SHORT_CYCLE_BOUND: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub n: usize,
    pub m: usize,
    pub edges: usize,
    pub girth: Option<usize>,
    pub four_cycles: u64,
    pub degree1_vns: Vec<usize>,
    /// Largest number of degree-1 variable nodes attached to one check node.
    pub max_degree1_per_cn: usize,
    /// Check nodes with two or more degree-1 neighbours.
    pub flagged_cns: Vec<usize>,
    pub degree2_vns: usize,
    pub degree2_on_4cycles: Vec<usize>,
    pub short_cycle_bound: usize,
    pub degree2_on_short_cycles: Vec<usize>,
    pub vn_degrees: BTreeMap<usize, usize>,
    pub cn_degrees: BTreeMap<usize, usize>,
}

impl StructureReport {
    /// No check node is attached to more than one degree-1 variable node.
    pub fn degree1_spread(&self) -> bool {
        self.flagged_cns.is_empty()
    }

    /// Writes `metric,value` rows; lists are space separated.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), AnalysisError> {
        let list = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
        let hist = |h: &BTreeMap<usize, usize>| h.iter().map(|(d, c)| format!("{d}:{c}")).collect::<Vec<_>>().join(" ");
        let rows = [
            ("n", self.n.to_string()),
            ("m", self.m.to_string()),
            ("edges", self.edges.to_string()),
            ("girth", self.girth.map_or_else(|| "inf".into(), |g| g.to_string())),
            ("four_cycles", self.four_cycles.to_string()),
            ("degree1_vns", list(&self.degree1_vns)),
            ("max_degree1_per_cn", self.max_degree1_per_cn.to_string()),
            ("flagged_cns", list(&self.flagged_cns)),
            ("degree2_vns", self.degree2_vns.to_string()),
            ("degree2_on_4cycles", list(&self.degree2_on_4cycles)),
            ("short_cycle_bound", self.short_cycle_bound.to_string()),
            ("degree2_on_short_cycles", list(&self.degree2_on_short_cycles)),
            ("vn_degrees", hist(&self.vn_degrees)),
            ("cn_degrees", hist(&self.cn_degrees)),
        ];
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["metric", "value"])?;
        for (k, v) in rows {
            w.write_record([k, v.as_str()])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn structure_report(h: &ParityCheckMatrix, short_cycle_bound: usize) -> StructureReport {
    let cycles = girth_and_cycles(h);
    let degree = |c: usize| h.col(c).len();
    let degree1_vns: Vec<usize> = (0..h.n()).filter(|&c| degree(c) == 1).collect();
    let mut per_cn = vec![0usize; h.m()];
    for &c in &degree1_vns {
        per_cn[h.col(c)[0]] += 1;
    }
    let degree2: Vec<usize> = (0..h.n()).filter(|&c| degree(c) == 2).collect();
    let on_cycle_within = |bound: usize| -> Vec<usize> {
        degree2
            .iter()
            .copied()
            .filter(|&c| cycles.vn_shortest_cycle[c].is_some_and(|l| l <= bound))
            .collect()
    };
    let p = h.profile();
    StructureReport {
        n: h.n(),
        m: h.m(),
        edges: h.edge_count(),
        girth: cycles.girth,
        four_cycles: cycles.four_cycles,
        max_degree1_per_cn: per_cn.iter().copied().max().unwrap_or(0),
        flagged_cns: (0..h.m()).filter(|&r| per_cn[r] >= 2).collect(),
        degree1_vns,
        degree2_vns: degree2.len(),
        degree2_on_4cycles: on_cycle_within(4),
        short_cycle_bound,
        degree2_on_short_cycles: on_cycle_within(short_cycle_bound),
        vn_degrees: p.vn_degrees,
        cn_degrees: p.cn_degrees,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{apply_template, random_regular, StructureTemplate, TemplateKind};

    #[test]
    fn ira_block_alone() {
        let t = StructureTemplate::new(TemplateKind::Ira, 6).unwrap();
        let empty = ParityCheckMatrix::new(6, 0, []).unwrap();
        let h = apply_template(&empty, &t).unwrap();
        let r = structure_report(&h, DEFAULT_SHORT_CYCLE_BOUND);
        assert_eq!(r.degree1_vns, vec![5]);
        assert_eq!(r.max_degree1_per_cn, 1);
        assert!(r.degree1_spread());
        assert_eq!(r.girth, None);
    }

    #[test]
    fn shared_degree1_flagged() {
        let h = ParityCheckMatrix::new(2, 4, [(0, 0), (0, 1), (0, 2), (1, 2), (1, 3)]).unwrap();
        let r = structure_report(&h, 6);
        assert_eq!(r.max_degree1_per_cn, 2);
        assert_eq!(r.flagged_cns, vec![0]);
    }

    #[test]
    fn regular_has_no_degree1() {
        let h = random_regular(64, 3, 6, 2).unwrap();
        let r = structure_report(&h, 6);
        assert!(r.degree1_vns.is_empty());
        assert_eq!(r.vn_degrees, BTreeMap::from([(3, 64)]));
    }

    #[test]
    fn degree2_on_four_cycle() {
        // Columns 0 and 1 both hit rows 0 and 1; column 2 hits rows 1 and 2.
        let h = ParityCheckMatrix::new(3, 3, [(0, 0), (1, 0), (0, 1), (1, 1), (1, 2), (2, 2)]).unwrap();
        let r = structure_report(&h, 6);
        assert_eq!(r.degree2_on_4cycles, vec![0, 1]);
        assert_eq!(r.degree2_on_short_cycles, vec![0, 1]);
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("max_degree1_per_cn,"));
        assert!(text.contains("degree2_on_4cycles,0 1"));
    }
}
