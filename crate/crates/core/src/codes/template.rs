use serde::{Deserialize, Serialize};

use super::{CodeError, ParityCheckMatrix};

/// Accumulator structure imposed on the rightmost `m` columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TemplateKind {
    #[serde(rename = "none", alias = "unstructured")]
    Unstructured,
    #[serde(rename = "ira")]
    Ira,
    #[serde(rename = "tbira")]
    TbIra,
    #[serde(rename = "ptbira")]
    PtbIra,
}

impl std::str::FromStr for TemplateKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "none" | "unstructured" => Ok(TemplateKind::Unstructured),
            "ira" => Ok(TemplateKind::Ira),
            "tbira" | "tb-ira" => Ok(TemplateKind::TbIra),
            "ptbira" | "ptb-ira" => Ok(TemplateKind::PtbIra),
            other => Err(format!("unknown template `{other}`")),
        }
    }
}

/// A fixed `m x m` right block `H_R`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StructureTemplate {
    kind: TemplateKind,
    m: usize,
    /// Zero-based middle row of the weight-three PTB-IRA column.
    ptb_middle_row: usize,
}

impl StructureTemplate {
    pub fn new(kind: TemplateKind, m: usize) -> Result<Self, CodeError> {
        let min_m = match kind {
            TemplateKind::Unstructured => 0,
            TemplateKind::Ira => 1,
            TemplateKind::TbIra => 2,
            TemplateKind::PtbIra => 3,
        };
        if m < min_m {
            return Err(CodeError::InvalidTemplate(format!("{kind:?} needs m >= {min_m}, got {m}")));
        }
        // Row ceil(m/2) in one-based numbering.
        let ptb_middle_row = m.div_ceil(2).saturating_sub(1);
        Ok(StructureTemplate { kind, m, ptb_middle_row })
    }

    /// Moves the middle one of the PTB-IRA weight-three column.
    pub fn with_ptb_middle_row(mut self, row: usize) -> Result<Self, CodeError> {
        if row == 0 || row + 1 >= self.m {
            return Err(CodeError::InvalidTemplate(format!(
                "middle row {row} must lie strictly between 0 and {}",
                self.m.saturating_sub(1)
            )));
        }
        self.ptb_middle_row = row;
        Ok(self)
    }

    pub fn kind(&self) -> TemplateKind {
        self.kind
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn ptb_middle_row(&self) -> usize {
        self.ptb_middle_row
    }

    /// Ones of `H_R` as `(row, col)` within the block.
    pub fn right_block(&self) -> Vec<(usize, usize)> {
        let m = self.m;
        let dual_diagonal = (0..m).map(|r| (r, r)).chain((1..m).map(|r| (r, r - 1)));
        match self.kind {
            TemplateKind::Unstructured => Vec::new(),
            TemplateKind::Ira => dual_diagonal.collect(),
            TemplateKind::TbIra => dual_diagonal.chain([(0, m - 1)]).collect(),
            TemplateKind::PtbIra => {
                let mut v = vec![(0, 0), (self.ptb_middle_row, 0), (m - 1, 0)];
                for c in 1..m {
                    v.push((c - 1, c));
                    v.push((c, c));
                }
                v
            }
        }
    }
}

/// Builds `H = [H_L  H_R]` from the `m x (n - m)` left part and a template.
/// For [`TemplateKind::Unstructured`] the left part is returned as is.
pub fn apply_template(
    h_left: &ParityCheckMatrix,
    t: &StructureTemplate,
) -> Result<ParityCheckMatrix, CodeError> {
    if t.kind() == TemplateKind::Unstructured {
        return Ok(h_left.clone().retemplated(None));
    }
    if h_left.m() != t.m() {
        return Err(CodeError::DimensionMismatch(format!(
            "left part has {} rows, template has {}",
            h_left.m(),
            t.m()
        )));
    }
    let off = h_left.n();
    let mut rows: Vec<Vec<usize>> = h_left.rows().to_vec();
    for (r, c) in t.right_block() {
        rows[r].push(off + c);
    }
    for row in &mut rows {
        row.sort_unstable();
    }
    Ok(ParityCheckMatrix::from_sorted_rows(off + t.m(), rows, Some(t.clone())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn block(kind: TemplateKind, m: usize) -> Vec<(usize, usize)> {
        let mut b = StructureTemplate::new(kind, m).unwrap().right_block();
        b.sort_unstable();
        b
    }

    fn one_based(v: &[(usize, usize)]) -> Vec<(usize, usize)> {
        let mut v: Vec<_> = v.iter().map(|&(r, c)| (r + 1, c + 1)).collect();
        v.sort_unstable();
        v
    }

    #[test]
    fn ira_m4() {
        let expected = one_based(&[(0, 0), (1, 0), (1, 1), (2, 1), (2, 2), (3, 2), (3, 3)]);
        assert_eq!(one_based(&block(TemplateKind::Ira, 4)), expected);
        assert_eq!(
            expected,
            vec![(1, 1), (2, 1), (2, 2), (3, 2), (3, 3), (4, 3), (4, 4)]
        );
    }

    #[test]
    fn tbira_adds_upper_right() {
        let mut ira = block(TemplateKind::Ira, 4);
        ira.push((0, 3));
        ira.sort_unstable();
        assert_eq!(block(TemplateKind::TbIra, 4), ira);
    }

    #[test]
    fn ptbira_m7_matches_displayed_shape() {
        let b = block(TemplateKind::PtbIra, 7);
        let first: Vec<usize> = b.iter().filter(|&&(_, c)| c == 0).map(|&(r, _)| r + 1).collect();
        assert_eq!(first, vec![1, 4, 7]);
        // Row 1 holds the first two columns, the last row the first and last.
        let row = |r: usize| -> Vec<usize> {
            b.iter().filter(|&&(rr, _)| rr == r).map(|&(_, c)| c).collect()
        };
        assert_eq!(row(0), vec![0, 1]);
        assert_eq!(row(3), vec![0, 3, 4]);
        assert_eq!(row(6), vec![0, 6]);
        for c in 1..7 {
            let col: Vec<usize> = b.iter().filter(|&&(_, cc)| cc == c).map(|&(r, _)| r).collect();
            assert_eq!(col, vec![c - 1, c]);
        }
    }

    #[test]
    fn apply_checks_dimensions() {
        let left = ParityCheckMatrix::new(3, 2, [(0, 0), (1, 1), (2, 0)]).unwrap();
        let t = StructureTemplate::new(TemplateKind::Ira, 4).unwrap();
        assert!(matches!(apply_template(&left, &t), Err(CodeError::DimensionMismatch(_))));
        let t = StructureTemplate::new(TemplateKind::Ira, 3).unwrap();
        let h = apply_template(&left, &t).unwrap();
        assert_eq!((h.m(), h.n()), (3, 5));
        h.check_template().unwrap();
        assert_eq!(h.free_cols(), 2);
        assert!(h.is_frozen(0, 2));
        let broken = h.with_toggled(&[(0, 4)]).unwrap();
        assert!(broken.check_template().is_err());
    }

    #[test]
    fn tiny_templates_rejected() {
        assert!(StructureTemplate::new(TemplateKind::PtbIra, 2).is_err());
        assert!(StructureTemplate::new(TemplateKind::TbIra, 1).is_err());
    }
}
