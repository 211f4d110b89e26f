//! The map `1 − Φ` on level bases and its kernel/cokernel truncation data.
//!
//! At level `l` the source basis is `{χ_w : w ∈ W_l}` and the target basis is
//! `{χ_u : u ∈ W_{l+1}}`. A source vector is first rewritten at level `l + 1` through
//! `[w]_l = ∪_b [bw]_{l+1}` and the relative ranges `r([w]_l, a) = [wa]_{l+1}` are then
//! subtracted. Everything here is exact integer arithmetic.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::Zero;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::language::LanguageTable;
use crate::matrix::{BigMatrix, IntegerMatrix};
use crate::snf::{big_json, smith_normal_form, smith_normal_form_big, SnfResult};
use crate::word::Word;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PhiLevelMap {
    pub level: usize,
    pub source: Vec<Word>,
    pub target: Vec<Word>,
    /// `|W_{l+1}| × |W_l|`.
    pub matrix: IntegerMatrix,
}

fn index(words: &[Word]) -> BTreeMap<&Word, usize> {
    words.iter().enumerate().map(|(i, w)| (w, i)).collect()
}

pub fn phi_map(lang: &LanguageTable, l: usize) -> Result<PhiLevelMap> {
    lang.require_depth(l + 1)?;
    let source = lang.words(l);
    let target = lang.words(l + 1);
    let rows = index(&target);
    let mut m = IntegerMatrix::zeros(target.len(), source.len());
    let syms = lang.symbols();
    for (c, w) in source.iter().enumerate() {
        for &s in &syms {
            if let Some(&r) = rows.get(&Word::from_bytes(&[&[s], w.as_bytes()].concat())) {
                m.set(r, c, m.get(r, c) + 1);
            }
            if let Some(&r) = rows.get(&w.concat(&[s])) {
                m.set(r, c, m.get(r, c) - 1);
            }
        }
    }
    Ok(PhiLevelMap { level: l, source, target, matrix: m })
}

/// `R_l : Z^{W_l} → Z^{W_{l+1}}`, `χ_w ↦ Σ_b χ_{bw}`.
pub fn refinement_matrix(lang: &LanguageTable, l: usize) -> Result<IntegerMatrix> {
    multi_refinement(lang, l, 1)
}

/// `χ_w ↦ Σ_{|u| = k} χ_{uw}` from level `l` to level `l + k`, built directly from words.
pub fn multi_refinement(lang: &LanguageTable, l: usize, k: usize) -> Result<IntegerMatrix> {
    lang.require_depth(l + k)?;
    let source = lang.words(l);
    let cols = index(&source);
    let target = lang.words(l + k);
    let mut m = IntegerMatrix::zeros(target.len(), source.len());
    for (r, u) in target.iter().enumerate() {
        if let Some(&c) = cols.get(&u.slice(k, u.len())) {
            m.set(r, c, 1);
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct K1Witness {
    pub level: usize,
    pub pass: bool,
    /// Target words where `(1 − Φ)(Σ χ_w)` is nonzero, with the value.
    pub residue: Vec<(Word, i64)>,
}

/// Checks `(1 − Φ)(Σ_{w ∈ W_l} χ_w) = 0`.
pub fn k1_witness(map: &PhiLevelMap) -> K1Witness {
    let ones = vec![1i64; map.source.len()];
    let image = map.matrix.apply(&ones).expect("entries are bounded by the alphabet size");
    let residue: Vec<(Word, i64)> =
        map.target.iter().zip(image).filter(|(_, v)| *v != 0).map(|(w, v)| (w.clone(), v)).collect();
    K1Witness { level: map.level, pass: residue.is_empty(), residue }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NaturalityFailure {
    pub source: Word,
    pub target: Word,
    pub refine_then_phi: i64,
    pub phi_then_refine: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NaturalityReport {
    pub level: usize,
    pub pass: bool,
    pub failure: Option<NaturalityFailure>,
}

/// Checks `R_{l+1} (1 − Φ)_l = (1 − Φ)_{l+1} R_l` entrywise.
pub fn naturality_check(lang: &LanguageTable, l: usize) -> Result<NaturalityReport> {
    lang.require_depth(l + 2)?;
    let a_l = phi_map(lang, l)?;
    let a_next = phi_map(lang, l + 1)?;
    let lhs = refinement_matrix(lang, l + 1)?.checked_mul(&a_l.matrix).expect("small entries");
    let rhs = a_next.matrix.checked_mul(&refinement_matrix(lang, l)?).expect("small entries");
    let mut failure = None;
    'outer: for c in 0..lhs.cols() {
        for r in 0..lhs.rows() {
            if lhs.get(r, c) != rhs.get(r, c) {
                failure = Some(NaturalityFailure {
                    source: a_l.source[c].clone(),
                    target: a_next.target[r].clone(),
                    refine_then_phi: *rhs.get(r, c),
                    phi_then_refine: *lhs.get(r, c),
                });
                break 'outer;
            }
        }
    }
    Ok(NaturalityReport { level: l, pass: failure.is_none(), failure })
}

/// Smith normal form of the level matrix.
pub fn snf_report(map: &PhiLevelMap) -> SnfResult {
    smith_normal_form(&map.matrix)
}

/// Per-level summary: basis sizes, divisors, ranks, the witness verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelReport {
    pub level: usize,
    pub source_size: usize,
    pub target_size: usize,
    pub snf: SnfResult,
    pub k1_witness: bool,
}

pub fn level_report(lang: &LanguageTable, l: usize) -> Result<LevelReport> {
    let map = phi_map(lang, l)?;
    Ok(LevelReport {
        level: l,
        source_size: map.source.len(),
        target_size: map.target.len(),
        snf: snf_report(&map),
        k1_witness: k1_witness(&map).pass,
    })
}

/// Map between cokernels `Z^{W_{l+1}} / im(1 − Φ)_l → Z^{W_{l+2}} / im(1 − Φ)_{l+1}`
/// written in Smith coordinates `y = U x` of both sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectingMap {
    pub from: usize,
    pub to: usize,
    pub matrix: BigMatrix,
    /// The image lattice of the source is carried into the image lattice of the target.
    pub well_defined: bool,
    /// Restriction to the free summands.
    pub free_block: BigMatrix,
    pub free_block_snf: SnfResult,
}

impl Serialize for ConnectingMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let block: Vec<Vec<serde_json::Value>> =
            self.free_block.to_rows().iter().map(|r| r.iter().map(big_json).collect()).collect();
        let mut st = s.serialize_struct("ConnectingMap", 5)?;
        st.serialize_field("from", &self.from)?;
        st.serialize_field("to", &self.to)?;
        st.serialize_field("well_defined", &self.well_defined)?;
        st.serialize_field("free_block", &block)?;
        st.serialize_field("free_block_snf", &self.free_block_snf)?;
        st.end()
    }
}

/// Whether every column of `m` lies in `D Z^n` for the Smith data `snf` of the target.
fn in_image_lattice(m: &BigMatrix, snf: &SnfResult) -> bool {
    (0..m.cols()).all(|c| {
        (0..m.rows()).all(|r| match snf.divisors.get(r) {
            Some(d) => m.get(r, c).is_multiple_of(d),
            None => Zero::is_zero(m.get(r, c)),
        })
    })
}

/// Scales column `i` of `m` by the `i`-th divisor and drops the free columns.
fn lattice_columns(m: &BigMatrix, snf: &SnfResult) -> BigMatrix {
    let mut out = BigMatrix::zeros(m.rows(), snf.rank);
    for (c, d) in snf.divisors.iter().enumerate() {
        for r in 0..m.rows() {
            out.set(r, c, m.get(r, c) * d);
        }
    }
    out
}

fn free_block(m: &BigMatrix, src: &SnfResult, dst: &SnfResult) -> BigMatrix {
    let mut out = BigMatrix::zeros(dst.cokernel_free_rank, src.cokernel_free_rank);
    for r in 0..dst.cokernel_free_rank {
        for c in 0..src.cokernel_free_rank {
            out.set(r, c, m.get(dst.rank + r, src.rank + c).clone());
        }
    }
    out
}

fn snf_any(m: &BigMatrix) -> SnfResult {
    match m.to_i64() {
        Some(small) => smith_normal_form(&small),
        None => smith_normal_form_big(m),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RouteCheck {
    pub from: usize,
    pub to: usize,
    /// Composition of connecting maps equals the direct refinement modulo the target
    /// image lattice.
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct K0Report {
    pub kind: &'static str,
    pub levels: Vec<LevelReport>,
    pub connecting_maps: Vec<ConnectingMap>,
    pub route_checks: Vec<RouteCheck>,
    /// Free ranks and torsion coincide at every level of the range.
    pub stable: bool,
    /// All connecting maps are well defined and both routes agree everywhere.
    pub consistent: bool,
}

/// Cokernel data for levels `l1..=l2` together with the induced connecting maps.
///
/// Two computations are compared. Each connecting map is conjugated into Smith
/// coordinates from the per-level certificates, and their product from `l1` to `l`
/// must agree, modulo the image lattice at `l`, with the direct multi-step
/// refinement from words conjugated the same way.
pub fn k0_stabilization(lang: &LanguageTable, l1: usize, l2: usize) -> Result<K0Report> {
    if l1 > l2 {
        return Err(Error::InvalidArgument(format!("empty level range {l1}..{l2}")));
    }
    lang.require_depth(l2 + 1)?;
    let levels: Vec<LevelReport> = (l1..=l2).map(|l| level_report(lang, l)).collect::<Result<_>>()?;
    let mut connecting_maps = Vec::new();
    for (i, l) in (l1..l2).enumerate() {
        let (src, dst) = (&levels[i].snf, &levels[i + 1].snf);
        let r = refinement_matrix(lang, l + 1)?.to_big();
        let c = dst.u.mul(&r).mul(&src.u_inv);
        let well_defined = in_image_lattice(&lattice_columns(&c, src), dst);
        let fb = free_block(&c, src, dst);
        let free_block_snf = snf_any(&fb);
        connecting_maps.push(ConnectingMap { from: l, to: l + 1, matrix: c, well_defined, free_block: fb, free_block_snf });
    }
    let mut route_checks = Vec::new();
    let mut product = BigMatrix::identity(levels[0].target_size);
    for (i, cm) in connecting_maps.iter().enumerate() {
        product = cm.matrix.mul(&product);
        let dst = &levels[i + 1].snf;
        let direct = multi_refinement(lang, l1 + 1, i + 1)?.to_big();
        let direct = dst.u.mul(&direct).mul(&levels[0].snf.u_inv);
        let diff = product.checked_sub(&direct).expect("bigint");
        route_checks.push(RouteCheck { from: l1, to: cm.to, agree: in_image_lattice(&diff, dst) });
    }
    let first = &levels[0].snf;
    let stable = levels
        .iter()
        .all(|lv| lv.snf.cokernel_free_rank == first.cokernel_free_rank && lv.snf.torsion() == first.torsion());
    let consistent =
        connecting_maps.iter().all(|c| c.well_defined) && route_checks.iter().all(|r| r.agree);
    Ok(K0Report { kind: "truncation data", levels, connecting_maps, route_checks, stable, consistent })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::language::factors;
    use crate::matrix::rational_rank;
    use crate::seqgen::{periodic_window, SequenceSource};

    fn tm(depth: usize) -> LanguageTable {
        factors(&SequenceSource::thue_morse().window(1 << 12).unwrap(), depth).unwrap()
    }

    fn periodic(depth: usize) -> LanguageTable {
        factors(&periodic_window(&Word::from("01"), 256).unwrap(), depth).unwrap()
    }

    fn column(map: &PhiLevelMap, w: &str) -> Vec<(String, i64)> {
        let c = map.source.iter().position(|x| x.as_bytes() == w.as_bytes()).unwrap();
        map.target
            .iter()
            .enumerate()
            .filter(|(r, _)| *map.matrix.get(*r, c) != 0)
            .map(|(r, u)| (u.to_string(), *map.matrix.get(r, c)))
            .collect()
    }

    #[test]
    fn thue_morse_column_of_zero() {
        let map = phi_map(&tm(4), 1).unwrap();
        assert_eq!(column(&map, "0"), vec![("01".into(), -1), ("10".into(), 1)]);
    }

    #[test]
    fn periodic_column_of_zero() {
        let map = phi_map(&periodic(4), 1).unwrap();
        assert_eq!(column(&map, "0"), vec![("01".into(), -1), ("10".into(), 1)]);
    }

    #[test]
    fn rows_telescope() {
        let map = phi_map(&tm(8), 5).unwrap();
        for r in 0..map.matrix.rows() {
            assert_eq!(map.matrix.row(r).iter().sum::<i64>(), 0);
        }
    }

    #[test]
    fn witness_and_naturality() {
        let l = tm(10);
        for lvl in 1..=8 {
            assert!(k1_witness(&phi_map(&l, lvl).unwrap()).pass);
            assert!(naturality_check(&l, lvl).unwrap().pass);
        }
    }

    #[test]
    fn fault_breaks_witness_and_names_a_word() {
        let l = tm(6).without_word(&Word::from("01"));
        let w = k1_witness(&phi_map(&l, 2).unwrap());
        assert!(!w.pass);
        assert!(!w.residue.is_empty());
        let n = naturality_check(&tm(6).without_word(&Word::from("01")), 1).unwrap();
        assert!(!n.pass);
        assert!(n.failure.is_some());
    }

    #[test]
    fn rank_duality() {
        let l = tm(8);
        for lvl in 1..=6 {
            let map = phi_map(&l, lvl).unwrap();
            let s = snf_report(&map);
            assert!(s.kernel_rank >= 1);
            assert_eq!(s.rank, rational_rank(&map.matrix));
            assert_eq!(s.kernel_rank + s.rank, map.source.len());
        }
    }

    #[test]
    fn zero_map() {
        let s = smith_normal_form(&IntegerMatrix::zeros(6, 4));
        assert_eq!((s.kernel_rank, s.cokernel_free_rank), (4, 6));
    }

    #[test]
    fn single_level_is_stable() {
        let r = k0_stabilization(&tm(6), 3, 3).unwrap();
        assert!(r.stable && r.consistent);
        assert!(r.connecting_maps.is_empty());
    }

    #[test]
    fn periodic_control_is_small_and_stable() {
        let r = k0_stabilization(&periodic(10), 2, 8).unwrap();
        assert!(r.consistent);
        assert!(r.stable);
        assert!(r.levels.iter().all(|l| l.source_size == 2 && l.target_size == 2));
    }
}
