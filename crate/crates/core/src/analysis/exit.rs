//! EXIT curves of the variable- and check-node decoders under the Gaussian
//! approximation, with a tunnel test and a decoding-threshold search.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::codes::CodeProfile;

const DEFAULT_CONSTANTS: &str = include_str!("../../data/j_approx.json");

/// Largest mutual information fed to `J^{-1}`, which diverges at one.
const I_MAX: f64 = 1.0 - 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct Cubic {
    a: f64,
    b: f64,
    c: f64,
    #[serde(default)]
    d: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct JForward {
    sigma_split: f64,
    sigma_max: f64,
    low: Cubic,
    high: Cubic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct JInverse {
    i_split: f64,
    low: Cubic,
    high: Cubic,
}

/// Two-segment approximation of the mutual information `J(sigma)` of a
/// consistent Gaussian LLR with standard deviation `sigma`, and its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JFunction {
    j: JForward,
    j_inv: JInverse,
}

impl Default for JFunction {
    fn default() -> Self {
        Self::from_json(DEFAULT_CONSTANTS).expect("bundled J constants parse")
    }
}

impl JFunction {
    pub fn from_json(text: &str) -> Result<Self, AnalysisError> {
        let f: JFunction = serde_json::from_str(text).map_err(|e| AnalysisError::JConstants(e.to_string()))?;
        if !(f.j.sigma_split > 0.0 && f.j.sigma_max > f.j.sigma_split && (0.0..1.0).contains(&f.j_inv.i_split)) {
            return Err(AnalysisError::JConstants("segment boundaries out of order".into()));
        }
        Ok(f)
    }

    pub fn j(&self, sigma: f64) -> f64 {
        let s = sigma.abs();
        let v = if s <= self.j.sigma_split {
            let p = self.j.low;
            p.a * s.powi(3) + p.b * s * s + p.c * s
        } else if s < self.j.sigma_max {
            let p = self.j.high;
            1.0 - (p.a * s.powi(3) + p.b * s * s + p.c * s + p.d).exp()
        } else {
            1.0
        };
        v.clamp(0.0, 1.0)
    }

    pub fn j_inv(&self, i: f64) -> f64 {
        let i = i.clamp(0.0, I_MAX);
        if i <= self.j_inv.i_split {
            let p = self.j_inv.low;
            p.a * i * i + p.b * i + p.c * i.sqrt()
        } else {
            let p = self.j_inv.high;
            -p.a * (p.b * (1.0 - i)).ln() - p.c * i
        }
    }
}

/// Edge-perspective degree distribution: `fractions[d]` is the share of
/// edges attached to nodes of degree `d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeDistribution {
    pub fractions: BTreeMap<usize, f64>,
}

impl EdgeDistribution {
    pub fn new(fractions: BTreeMap<usize, f64>) -> Result<Self, AnalysisError> {
        if fractions.contains_key(&0) {
            return Err(AnalysisError::InvalidDistribution("degree 0 carries no edges".into()));
        }
        if fractions.values().any(|&f| f.is_nan() || f < 0.0) {
            return Err(AnalysisError::InvalidDistribution("negative or NaN fraction".into()));
        }
        let sum: f64 = fractions.values().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(AnalysisError::Unnormalized(sum));
        }
        Ok(EdgeDistribution { fractions })
    }

    pub fn regular(d: usize) -> Self {
        EdgeDistribution { fractions: BTreeMap::from([(d, 1.0)]) }
    }

    /// Converts a node-perspective histogram `{degree: node count}`.
    pub fn from_node_histogram(hist: &BTreeMap<usize, usize>) -> Result<Self, AnalysisError> {
        let edges: usize = hist.iter().map(|(d, c)| d * c).sum();
        if edges == 0 {
            return Err(AnalysisError::InvalidDistribution("histogram has no edges".into()));
        }
        let fractions = hist
            .iter()
            .filter(|(&d, &c)| d * c > 0)
            .map(|(&d, &c)| (d, (d * c) as f64 / edges as f64))
            .collect();
        Ok(EdgeDistribution { fractions })
    }

    /// Variable- and check-side distributions of a code.
    pub fn of_code(p: &CodeProfile) -> Result<(Self, Self), AnalysisError> {
        Ok((Self::from_node_histogram(&p.vn_degrees)?, Self::from_node_histogram(&p.cn_degrees)?))
    }

    /// Design rate `1 - (sum rho_d / d) / (sum lambda_d / d)`.
    pub fn design_rate(vn: &Self, cn: &Self) -> f64 {
        let inv = |e: &Self| e.fractions.iter().map(|(&d, &f)| f / d as f64).sum::<f64>();
        1.0 - inv(cn) / inv(vn)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeSide {
    Vnd,
    Cnd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExitCurve {
    pub side: NodeSide,
    pub distribution: EdgeDistribution,
    /// Channel LLR standard deviation, for the variable-node curve only.
    pub sigma_ch: Option<f64>,
    /// `(I_A, I_E)` samples.
    pub points: Vec<(f64, f64)>,
}

/// Standard deviation of the BPSK channel LLR on the AWGN channel:
/// `sigma_ch^2 = 8 R Eb/N0`.
pub fn sigma_ch(ebno_db: f64, rate: f64) -> f64 {
    (8.0 * rate * 10f64.powf(ebno_db / 10.0)).sqrt()
}

fn vnd_point(jf: &JFunction, dist: &EdgeDistribution, sigma_ch: f64, ia: f64) -> f64 {
    let s = jf.j_inv(ia);
    dist.fractions
        .iter()
        .map(|(&d, &f)| f * jf.j((((d - 1) as f64) * s * s + sigma_ch * sigma_ch).sqrt()))
        .sum()
}

fn cnd_point(jf: &JFunction, dist: &EdgeDistribution, ia: f64) -> f64 {
    let s = jf.j_inv(1.0 - ia);
    dist.fractions.iter().map(|(&d, &f)| f * (1.0 - jf.j(((d - 1) as f64).sqrt() * s))).sum()
}

pub fn exit_vnd(jf: &JFunction, dist: &EdgeDistribution, sigma_ch: f64, grid: &[f64]) -> ExitCurve {
    ExitCurve {
        side: NodeSide::Vnd,
        distribution: dist.clone(),
        sigma_ch: Some(sigma_ch),
        points: grid.iter().map(|&ia| (ia, vnd_point(jf, dist, sigma_ch, ia))).collect(),
    }
}

pub fn exit_cnd(jf: &JFunction, dist: &EdgeDistribution, grid: &[f64]) -> ExitCurve {
    ExitCurve {
        side: NodeSide::Cnd,
        distribution: dist.clone(),
        sigma_ch: None,
        points: grid.iter().map(|&ia| (ia, cnd_point(jf, dist, ia))).collect(),
    }
}

/// Follows the decoding trajectory between the two curves and reports
/// whether it reaches (near) full mutual information.
pub fn tunnel_open(jf: &JFunction, vn: &EdgeDistribution, cn: &EdgeDistribution, sigma_ch: f64) -> bool {
    let mut ia = 0.0;
    for _ in 0..200_000 {
        let next = cnd_point(jf, cn, vnd_point(jf, vn, sigma_ch, ia));
        if next >= 1.0 - 1e-6 {
            return true;
        }
        if next <= ia + 1e-12 {
            return false;
        }
        ia = next;
    }
    false
}

/// Smallest Eb/N0 (dB) in `[lo, hi]` with an open tunnel, found by
/// bisection to within `tol`. `None` when the tunnel is closed at `hi`.
pub fn decoding_threshold(
    jf: &JFunction,
    vn: &EdgeDistribution,
    cn: &EdgeDistribution,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Option<f64> {
    let rate = EdgeDistribution::design_rate(vn, cn);
    let open = |ebno: f64| tunnel_open(jf, vn, cn, sigma_ch(ebno, rate));
    if !open(hi) {
        return None;
    }
    if open(lo) {
        return Some(lo);
    }
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if open(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Writes curves as `side,i_a,i_e` rows.
pub fn write_exit_csv<W: Write>(curves: &[ExitCurve], out: W) -> Result<(), AnalysisError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["side", "i_a", "i_e"])?;
    for c in curves {
        let side = match c.side {
            NodeSide::Vnd => "vnd",
            NodeSide::Cnd => "cnd",
        };
        for &(a, e) in &c.points {
            w.write_record([side, &a.to_string(), &e.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(points: usize) -> Vec<f64> {
        (0..points).map(|i| i as f64 / (points - 1) as f64).collect()
    }

    #[test]
    fn j_roundtrip() {
        let jf = JFunction::default();
        assert_eq!(jf.j(0.0), 0.0);
        assert_eq!(jf.j(12.0), 1.0);
        for i in 1..99 {
            let x = i as f64 / 100.0;
            assert!((jf.j(jf.j_inv(x)) - x).abs() < 5e-3, "I = {x}");
        }
    }

    #[test]
    fn endpoints() {
        let jf = JFunction::default();
        let vnd = exit_vnd(&jf, &EdgeDistribution::regular(3), 0.0, &[0.0]);
        assert!(vnd.points[0].1.abs() < 1e-12);
        let cnd = exit_cnd(&jf, &EdgeDistribution::regular(6), &[1.0]);
        assert!((cnd.points[0].1 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn edge_perspective() {
        let hist = BTreeMap::from([(2, 2), (3, 2)]);
        let e = EdgeDistribution::from_node_histogram(&hist).unwrap();
        assert!((e.fractions[&2] - 0.4).abs() < 1e-12);
        assert!((e.fractions[&3] - 0.6).abs() < 1e-12);
        assert!(matches!(
            EdgeDistribution::new(BTreeMap::from([(3, 0.5)])),
            Err(AnalysisError::Unnormalized(_))
        ));
        let r = EdgeDistribution::design_rate(&EdgeDistribution::regular(3), &EdgeDistribution::regular(6));
        assert!((r - 0.5).abs() < 1e-12);
    }

    #[test]
    fn regular_36_threshold() {
        let jf = JFunction::default();
        let t = decoding_threshold(
            &jf,
            &EdgeDistribution::regular(3),
            &EdgeDistribution::regular(6),
            0.0,
            3.0,
            1e-3,
        )
        .unwrap();
        assert!((1.0..=1.2).contains(&t), "threshold {t}");
    }

    #[test]
    fn csv_has_both_sides() {
        let jf = JFunction::default();
        let g = grid(11);
        let curves = [
            exit_vnd(&jf, &EdgeDistribution::regular(3), 1.0, &g),
            exit_cnd(&jf, &EdgeDistribution::regular(6), &g),
        ];
        let mut buf = Vec::new();
        write_exit_csv(&curves, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 23);
        assert!(text.lines().nth(1).unwrap().starts_with("vnd,"));
        assert!(text.lines().last().unwrap().starts_with("cnd,"));
    }

    #[test]
    fn bad_constants() {
        assert!(JFunction::from_json("{}").is_err());
    }
}
