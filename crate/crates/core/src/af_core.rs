//! Bratteli diagram of the AF core and its dimension-group truncation data.
//!
//! Level `k` has one vertex per word `u = α'α ∈ W_{2k}` (the minimal projections of
//! `F_k`), and `u` is joined to every `aub ∈ W_{2k+2}`. Words are ordered
//! lexicographically inside each level.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::language::LanguageTable;
use crate::matrix::{rational_rank, BigMatrix, IntegerMatrix};
use crate::snf::{big_json, smith_normal_form, smith_normal_form_big, SnfResult};
use crate::word::Word;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BratteliDiagram {
    /// `levels[k - 1]` holds the vertices of level `k`.
    levels: Vec<Vec<Word>>,
    /// `matrices[k - 1]` is `M_k`, rows indexed by level `k + 1`.
    matrices: Vec<IntegerMatrix>,
}

/// Diagram for levels `1..=k_max` of the AF core.
pub fn build_bratteli(lang: &LanguageTable, k_max: usize) -> Result<BratteliDiagram> {
    if k_max > 0 {
        lang.require_depth(2 * k_max + 2)?;
    }
    let levels: Vec<Vec<Word>> = (1..=k_max).map(|k| lang.words(2 * k)).collect();
    let mut matrices = Vec::new();
    for k in 1..k_max {
        let (src, dst) = (&levels[k - 1], &levels[k]);
        let index: BTreeMap<&Word, usize> = src.iter().enumerate().map(|(i, w)| (w, i)).collect();
        let mut m = IntegerMatrix::zeros(dst.len(), src.len());
        for (r, v) in dst.iter().enumerate() {
            let centre = v.slice(1, v.len() - 1);
            if let Some(&c) = index.get(&centre) {
                m.set(r, c, 1);
            }
        }
        matrices.push(m);
    }
    Ok(BratteliDiagram { levels, matrices })
}

impl BratteliDiagram {
    /// A diagram with the same vertex names and inclusion matrix at every level.
    pub fn stationary(vertices: Vec<Word>, matrix: IntegerMatrix, k_max: usize) -> Result<Self> {
        let n = vertices.len();
        if matrix.rows() != n || matrix.cols() != n {
            return Err(Error::InvalidArgument(format!(
                "stationary matrix is {}x{}, expected {n}x{n}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Self {
            levels: vec![vertices; k_max],
            matrices: vec![matrix; k_max.saturating_sub(1)],
        })
    }

    /// Number of levels `K`.
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Vertices at level `k` (1-based).
    pub fn level(&self, k: usize) -> &[Word] {
        &self.levels[k - 1]
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.len()).collect()
    }

    /// Edges from level `k` to level `k + 1`.
    pub fn edges(&self, k: usize) -> Vec<(Word, Word)> {
        let m = &self.matrices[k - 1];
        let mut out = Vec::new();
        for (c, u) in self.levels[k - 1].iter().enumerate() {
            for (r, v) in self.levels[k].iter().enumerate() {
                for _ in 0..*m.get(r, c) {
                    out.push((u.clone(), v.clone()));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        (1..self.depth()).map(|k| self.edges(k).len()).sum()
    }

    /// Checks that every vertex above level 1 has exactly one incoming edge and every
    /// vertex below the top level has at least one outgoing edge. Returns the first
    /// offending vertex.
    pub fn check_structure(&self) -> std::result::Result<(), (usize, Word)> {
        for (i, m) in self.matrices.iter().enumerate() {
            for r in 0..m.rows() {
                if m.row(r).iter().sum::<i64>() != 1 {
                    return Err((i + 2, self.levels[i + 1][r].clone()));
                }
            }
            for c in 0..m.cols() {
                if m.column(c).iter().all(|&x| x == 0) {
                    return Err((i + 1, self.levels[i][c].clone()));
                }
            }
        }
        Ok(())
    }
}

/// `M_k`, the 0/1 matrix with `M_k[aub, u] = 1`.
pub fn inclusion_matrix(d: &BratteliDiagram, k: usize) -> Result<IntegerMatrix> {
    if k == 0 || k >= d.depth() {
        return Err(Error::InvalidArgument(format!("no inclusion matrix at level {k} of {}", d.depth())));
    }
    Ok(d.matrices[k - 1].clone())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompositeData {
    /// Composite `M_{to-1} ⋯ M_from`.
    pub from: usize,
    pub to: usize,
    pub rank: usize,
    pub snf: SnfResult,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimensionData {
    pub level_sizes: Vec<usize>,
    /// Composites ending at the top level, one per starting level.
    pub to_top: Vec<CompositeData>,
    /// Composites starting at level 1, one per end level.
    pub from_bottom: Vec<CompositeData>,
    /// Order unit at each level: the all-ones vector at level 1 pushed forward.
    pub order_unit: Vec<Vec<num_bigint::BigInt>>,
}

impl Serialize for DimensionData {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let unit: Vec<Vec<serde_json::Value>> =
            self.order_unit.iter().map(|v| v.iter().map(big_json).collect()).collect();
        let mut st = s.serialize_struct("DimensionData", 5)?;
        st.serialize_field("kind", "truncation data")?;
        st.serialize_field("level_sizes", &self.level_sizes)?;
        st.serialize_field("to_top", &self.to_top)?;
        st.serialize_field("from_bottom", &self.from_bottom)?;
        st.serialize_field("order_unit", &unit)?;
        st.end()
    }
}

impl DimensionData {
    pub fn from_bottom_ranks(&self) -> Vec<usize> {
        self.from_bottom.iter().map(|c| c.rank).collect()
    }

    pub fn to_top_ranks(&self) -> Vec<usize> {
        self.to_top.iter().map(|c| c.rank).collect()
    }
}

/// Product `M_{to-1} ⋯ M_from`; identity when `from == to`.
fn composite(d: &BratteliDiagram, from: usize, to: usize) -> Result<BigMatrix> {
    let mut acc = BigMatrix::identity(d.level(from).len());
    for k in from..to {
        acc = inclusion_matrix(d, k)?.to_big().mul(&acc);
    }
    Ok(acc)
}

fn composite_data(d: &BratteliDiagram, from: usize, to: usize) -> Result<CompositeData> {
    let m = composite(d, from, to)?;
    let snf = match m.to_i64() {
        Some(small) => smith_normal_form(&small),
        None => smith_normal_form_big(&m),
    };
    Ok(CompositeData { from, to, rank: rational_rank(&m), snf })
}

/// Ranks, image-lattice divisors and the order unit of the truncated diagram.
pub fn dimension_data(d: &BratteliDiagram) -> Result<DimensionData> {
    let top = d.depth();
    if top < 2 {
        return Err(Error::InvalidArgument("dimension data needs at least two levels".into()));
    }
    let to_top = (1..top).map(|k| composite_data(d, k, top)).collect::<Result<_>>()?;
    let from_bottom = (2..=top).map(|k| composite_data(d, 1, k)).collect::<Result<_>>()?;
    let ones: Vec<_> = vec![num_bigint::BigInt::from(1); d.level(1).len()];
    let mut order_unit = vec![ones];
    for k in 1..top {
        let next = inclusion_matrix(d, k)?.to_big().apply(order_unit.last().unwrap()).expect("bigint");
        order_unit.push(next);
    }
    Ok(DimensionData { level_sizes: d.level_sizes(), to_top, from_bottom, order_unit })
}

fn node_id(k: usize, w: &Word) -> String {
    format!("\"{k}:{w}\"")
}

/// Deterministic DOT text with one rank per level.
pub fn export_dot(d: &BratteliDiagram) -> String {
    let mut out = String::from("digraph bratteli {\n  rankdir=TB;\n");
    for k in 1..=d.depth() {
        let _ = writeln!(out, "  subgraph level_{k} {{\n    rank=same;");
        for w in d.level(k) {
            let _ = writeln!(out, "    {} [label=\"{w}\"];", node_id(k, w));
        }
        out.push_str("  }\n");
    }
    for k in 1..d.depth() {
        for (u, v) in d.edges(k) {
            let _ = writeln!(out, "  {} -> {};", node_id(k, &u), node_id(k + 1, &v));
        }
    }
    out.push_str("}\n");
    out
}

/// Vertex and edge counts of a document written by [`export_dot`].
pub fn parse_dot_counts(text: &str) -> (usize, usize) {
    let vertices = text.lines().filter(|l| l.contains("[label=")).count();
    let edges = text.lines().filter(|l| l.contains(" -> ")).count();
    (vertices, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::language::factors;
    use crate::seqgen::SequenceSource;
    use num_bigint::BigInt;

    fn tm() -> LanguageTable {
        factors(&SequenceSource::thue_morse().window(1 << 12).unwrap(), 12).unwrap()
    }

    #[test]
    fn level_sizes_match_complexity() {
        let l = tm();
        let d = build_bratteli(&l, 1).unwrap();
        assert_eq!(d.level_sizes(), vec![4]);
        let d = build_bratteli(&l, 2).unwrap();
        assert_eq!(d.level(2).len(), 10);
        assert_eq!(d.level(2).len(), l.complexity(4).unwrap());
    }

    #[test]
    fn depth_is_checked() {
        assert!(matches!(build_bratteli(&tm(), 6), Err(Error::DepthExceeded { .. })));
    }

    #[test]
    fn unique_incoming_edges_and_column_sums() {
        let l = tm();
        let d = build_bratteli(&l, 5).unwrap();
        assert_eq!(d.check_structure(), Ok(()));
        let m = inclusion_matrix(&d, 1).unwrap();
        for (c, u) in d.level(1).iter().enumerate() {
            let ext = l.words(4).iter().filter(|v| v[1..3] == u[..]).count() as i64;
            assert_eq!(m.column(c).iter().sum::<i64>(), ext);
        }
    }

    #[test]
    fn outgoing_edges_of_a_word() {
        let l = tm();
        let d = build_bratteli(&l, 2).unwrap();
        let targets: Vec<Word> = d.edges(1).into_iter().filter(|(u, _)| u.as_bytes() == b"01").map(|e| e.1).collect();
        let direct: Vec<Word> = l.words(4).into_iter().filter(|v| &v[1..3] == b"01").collect();
        assert_eq!(targets, direct);
    }

    #[test]
    fn identity_diagram() {
        let d = BratteliDiagram::stationary(vec![Word::from("v")], IntegerMatrix::identity(1), 3).unwrap();
        let data = dimension_data(&d).unwrap();
        assert!(data.to_top.iter().all(|c| c.rank == 1 && c.snf.divisors == vec![BigInt::from(1)]));
    }

    #[test]
    fn composite_ranks_are_monotone() {
        let d = build_bratteli(&tm(), 5).unwrap();
        let data = dimension_data(&d).unwrap();
        let r = data.from_bottom_ranks();
        assert!(r.windows(2).all(|w| w[1] <= w[0]));
        assert!(r.iter().all(|&x| x <= 4));
        let t = data.to_top_ranks();
        assert!(t.windows(2).all(|w| w[1] >= w[0]));
        assert!(data.order_unit.iter().all(|v| v.iter().all(|x| *x == BigInt::from(1))));
    }

    #[test]
    fn dot_is_stable_and_parsable() {
        let l = tm();
        let d = build_bratteli(&l, 1).unwrap();
        let a = export_dot(&d);
        assert_eq!(a, export_dot(&build_bratteli(&l, 1).unwrap()));
        assert_eq!(parse_dot_counts(&a), (4, 0));
        let d3 = build_bratteli(&l, 3).unwrap();
        assert_eq!(parse_dot_counts(&export_dot(&d3)), (4 + 10 + 16, d3.edge_count()));
        let empty = build_bratteli(&l, 0).unwrap();
        assert_eq!(export_dot(&empty), "digraph bratteli {\n  rankdir=TB;\n}\n");
    }
}
