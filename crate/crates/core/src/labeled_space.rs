//! The labeled space `(E_Z, L_ω, Ē_Z)` in the word encoding.
//!
//! Every vertex of `E_Z` receives a single labeled path of each length, so the
//! generalized vertex `[v]_l` is the range `r(α)` of its length-`l` past word `α`. An
//! element of `Ē_Z` at level `l` is therefore a set of length-`l` factors; level `0`
//! holds the sentinel `{ε}` for `E⁰`. Relative ranges append a path on the right,
//! refinement prepends letters on the left.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::clopen::ClopenSet;
use crate::error::{Error, Result};
use crate::language::LanguageTable;
use crate::word::Word;

/// A finite union of generalized vertices at a fixed level.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EbarSet {
    level: usize,
    words: BTreeSet<Word>,
}

impl EbarSet {
    pub fn empty(level: usize) -> Self {
        Self { level, words: BTreeSet::new() }
    }

    /// `E⁰`, the level-0 sentinel.
    pub fn everything() -> Self {
        Self { level: 0, words: [Word::empty()].into_iter().collect() }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn words(&self) -> &BTreeSet<Word> {
        &self.words
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, w: &[u8]) -> bool {
        self.words.contains(w)
    }
}

impl fmt::Display for EbarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.words.iter().map(|w| w.to_string()).collect();
        write!(f, "{{{}}}_{}", parts.join(","), self.level)
    }
}

/// Set operations on `Ē_Z` backed by a language table.
#[derive(Debug, Clone, Copy)]
pub struct LabeledSpace<'a> {
    lang: &'a LanguageTable,
}

impl<'a> LabeledSpace<'a> {
    pub fn new(lang: &'a LanguageTable) -> Self {
        Self { lang }
    }

    pub fn language(&self) -> &'a LanguageTable {
        self.lang
    }

    /// Builds a set from words of one length, keeping only factors.
    pub fn set<I, W>(&self, level: usize, words: I) -> Result<EbarSet>
    where
        I: IntoIterator<Item = W>,
        W: Into<Word>,
    {
        self.lang.require_depth(level)?;
        let mut out = EbarSet::empty(level);
        for w in words {
            let w = w.into();
            if w.len() != level {
                return Err(Error::InvalidArgument(format!("{w} does not have length {level}")));
            }
            if self.lang.contains(&w) {
                out.words.insert(w);
            }
        }
        Ok(out)
    }

    /// All of `W_l`, which is `E⁰` written at level `l`.
    pub fn full(&self, level: usize) -> Result<EbarSet> {
        self.lang.require_depth(level)?;
        Ok(EbarSet { level, words: self.lang.words(level).into_iter().collect() })
    }

    /// `r(α) = [v]_{|α|}` as the singleton `{α}`; empty when `α` is not a factor and
    /// `E⁰` when `α = ε`.
    pub fn gen_vertex(&self, alpha: &[u8]) -> Result<EbarSet> {
        if alpha.is_empty() {
            return Ok(EbarSet::everything());
        }
        self.set(alpha.len(), [Word::from_bytes(alpha)])
    }

    /// `r(A, α) = {wα : w ∈ A, wα ∈ L}`; `r(A, ε) = A`.
    pub fn relative_range(&self, a: &EbarSet, alpha: &[u8]) -> Result<EbarSet> {
        let level = a.level + alpha.len();
        self.lang.require_depth(level)?;
        let words = a
            .words
            .iter()
            .map(|w| w.concat(alpha))
            .filter(|x| self.lang.contains(x))
            .collect();
        Ok(EbarSet { level, words })
    }

    /// The same vertex set written at level `m >= l`: `{uw ∈ W_m : w ∈ A}`.
    pub fn refine(&self, a: &EbarSet, m: usize) -> Result<EbarSet> {
        if m < a.level {
            return Err(Error::InvalidArgument(format!(
                "cannot refine level {} down to {m}",
                a.level
            )));
        }
        if m == a.level {
            return Ok(a.clone());
        }
        self.lang.require_depth(m)?;
        let off = m - a.level;
        let words = self.lang.words(m).into_iter().filter(|x| a.words.contains(&x[off..])).collect();
        Ok(EbarSet { level: m, words })
    }

    fn common(&self, a: &EbarSet, b: &EbarSet) -> Result<(EbarSet, EbarSet)> {
        let m = a.level.max(b.level);
        Ok((self.refine(a, m)?, self.refine(b, m)?))
    }

    pub fn union(&self, a: &EbarSet, b: &EbarSet) -> Result<EbarSet> {
        let (mut x, y) = self.common(a, b)?;
        x.words.extend(y.words);
        Ok(x)
    }

    pub fn intersection(&self, a: &EbarSet, b: &EbarSet) -> Result<EbarSet> {
        let (x, y) = self.common(a, b)?;
        Ok(EbarSet { level: x.level, words: x.words.intersection(&y.words).cloned().collect() })
    }

    /// Relative complement `A \ B`.
    pub fn difference(&self, a: &EbarSet, b: &EbarSet) -> Result<EbarSet> {
        let (x, y) = self.common(a, b)?;
        Ok(EbarSet { level: x.level, words: x.words.difference(&y.words).cloned().collect() })
    }

    /// `E⁰ \ A` at the level of `A`.
    pub fn complement(&self, a: &EbarSet) -> Result<EbarSet> {
        self.difference(&self.full(a.level)?, a)
    }

    pub fn same_set(&self, a: &EbarSet, b: &EbarSet) -> Result<bool> {
        let (x, y) = self.common(a, b)?;
        Ok(x.words == y.words)
    }

    pub fn is_subset(&self, a: &EbarSet, b: &EbarSet) -> Result<bool> {
        let (x, y) = self.common(a, b)?;
        Ok(x.words.is_subset(&y.words))
    }

    /// Indicator vector of `A` in the basis `W_m` (lexicographic).
    pub fn indicator(&self, a: &EbarSet, m: usize) -> Result<Vec<i64>> {
        let r = self.refine(a, m)?;
        Ok(self.lang.words(m).iter().map(|w| i64::from(r.words.contains(w))).collect())
    }

    /// Letters `a` with `r(A, a) ≠ ∅`, i.e. `L(AE¹)`.
    pub fn out_labels(&self, a: &EbarSet) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        for s in self.lang.symbols() {
            if !self.relative_range(a, &[s])?.is_empty() {
                out.push(s);
            }
        }
        Ok(out)
    }

    /// Past cylinder `[A.]` of a set, as a clopen set.
    pub fn past_cylinder(&self, a: &EbarSet) -> Result<ClopenSet> {
        ClopenSet::from_words(self.lang, a.level, 0, a.words.iter().cloned())
    }

    /// The generating family at level `l`: the empty set, every singleton and every
    /// singleton's complement.
    fn family(&self, l: usize) -> Result<Vec<EbarSet>> {
        let mut fam = vec![EbarSet::empty(l)];
        if l == 0 {
            fam.push(EbarSet::everything());
            return Ok(fam);
        }
        for w in self.lang.words(l) {
            let single = self.gen_vertex(&w)?;
            fam.push(self.complement(&single)?);
            fam.push(single);
        }
        Ok(fam)
    }

    /// Checks representation axioms (i)–(iv) as exact identities between word sets for
    /// every level `1..=max_level`. Needs depth `max_level + 2`.
    pub fn verify_axioms(&self, max_level: usize) -> Result<Vec<AxiomReport>> {
        self.lang.require_depth(max_level + 2)?;
        let syms = self.lang.symbols();
        let families: Vec<Vec<EbarSet>> =
            (0..=max_level).map(|l| self.family(l)).collect::<Result<_>>()?;
        let mut reports = Vec::new();
        for l in 1..=max_level {
            let fam = &families[l];

            // (i) Boolean laws through indicator vectors, mixing levels 0..=l
            let mut r1 = AxiomReport::new("i", l);
            for a in fam {
                let ia = self.indicator(a, l)?;
                for b in families[..=l].iter().flatten() {
                    let ib = self.indicator(b, l)?;
                    let meet = self.indicator(&self.intersection(a, b)?, l)?;
                    let join = self.indicator(&self.union(a, b)?, l)?;
                    let prod: Vec<i64> = ia.iter().zip(&ib).map(|(x, y)| x * y).collect();
                    let incl_excl: Vec<i64> =
                        ia.iter().zip(&ib).zip(&meet).map(|((x, y), z)| x + y - z).collect();
                    r1.record(prod == meet && incl_excl == join, || vec![format!("A={a}"), format!("B={b}")]);
                }
                let whole = self.union(a, &self.complement(a)?)?;
                r1.record(self.same_set(&whole, &self.full(l)?)?, || vec![format!("A={a}")]);
            }
            r1.record(self.indicator(&EbarSet::empty(l), l)?.iter().all(|&x| x == 0), || {
                vec!["p_∅ ≠ 0".into()]
            });
            reports.push(r1);

            // (ii) p_A s_a = s_a p_r(A,a): relative ranges respect ∩, ∪ and refinement
            let mut r2 = AxiomReport::new("ii", l);
            for a_set in fam {
                for b_set in fam {
                    for &s in &syms {
                        let rab = self.relative_range(&self.intersection(a_set, b_set)?, &[s])?;
                        let ra_rb = self.intersection(
                            &self.relative_range(a_set, &[s])?,
                            &self.relative_range(b_set, &[s])?,
                        )?;
                        let uab = self.relative_range(&self.union(a_set, b_set)?, &[s])?;
                        let ua_ub = self.union(
                            &self.relative_range(a_set, &[s])?,
                            &self.relative_range(b_set, &[s])?,
                        )?;
                        let ok = self.same_set(&rab, &ra_rb)? && self.same_set(&uab, &ua_ub)?;
                        r2.record(ok, || vec![format!("A={a_set}"), format!("B={b_set}"), format!("a={}", s as char)]);
                    }
                }
                for &s in &syms {
                    let lhs = self.relative_range(&self.refine(a_set, l + 1)?, &[s])?;
                    let rhs = self.refine(&self.relative_range(a_set, &[s])?, l + 2)?;
                    r2.record(self.same_set(&lhs, &rhs)?, || {
                        vec![format!("A={a_set}"), format!("a={}", s as char), format!("{lhs} vs {rhs}")]
                    });
                }
            }
            reports.push(r2);

            // (iii) s_a* s_a = p_r(a), s_a* s_b = 0
            let mut r3 = AxiomReport::new("iii", l);
            for &s in &syms {
                let lhs = self.relative_range(&EbarSet::everything(), &[s])?;
                let rhs = self.gen_vertex(&[s])?;
                r3.record(self.same_set(&lhs, &rhs)?, || vec![format!("r(E⁰,{})", s as char)]);
            }
            for a_set in fam {
                for &s in &syms {
                    for &t in syms.iter().filter(|&&t| t != s) {
                        let meet = self.intersection(
                            &self.relative_range(a_set, &[s])?,
                            &self.relative_range(a_set, &[t])?,
                        )?;
                        r3.record(meet.is_empty(), || {
                            meet.words.iter().map(|w| w.to_string()).collect()
                        });
                    }
                }
            }
            reports.push(r3);

            // (iv) p_A = Σ_{a ∈ L(AE¹)} s_a p_r(A,a) s_a*, compared in cylinder form at (l, 2)
            let mut r4 = AxiomReport::new("iv", l);
            for a_set in fam.iter().filter(|s| !s.is_empty()) {
                let lhs = self.past_cylinder(a_set)?.refine(self.lang, l, 2)?;
                let mut counts: BTreeMap<Word, usize> = BTreeMap::new();
                for s in self.out_labels(a_set)? {
                    let range = self.relative_range(a_set, &[s])?;
                    let piece = ClopenSet::from_words(self.lang, l, 1, range.words.iter().cloned())?;
                    for x in piece.refine(self.lang, l, 2)?.words() {
                        *counts.entry(x.clone()).or_default() += 1;
                    }
                }
                let ok = counts.values().all(|&c| c == 1) && counts.keys().eq(lhs.words().iter());
                r4.record(ok, || {
                    let mut diff: Vec<String> = lhs
                        .words()
                        .iter()
                        .filter(|w| counts.get(*w) != Some(&1))
                        .map(|w| w.to_string())
                        .collect();
                    diff.extend(counts.keys().filter(|w| !lhs.words().contains(*w)).map(|w| w.to_string()));
                    diff.insert(0, format!("A={a_set}"));
                    diff
                });
            }
            reports.push(r4);
        }
        Ok(reports)
    }

    /// Strong-cofinality certificate for the generalized vertex `r(w)` against every
    /// `u ∈ W_N`: a path `λ` with `r(u) ⊆ r(r(w), λ)` for each `u`.
    ///
    /// For each `u` the last occurrence of `w` that leaves a nonempty suffix `λ` is used,
    /// so every `λ` is a path of length `>= 1`. Requires `N >= d(w) + |w|` where `d(w)` is
    /// the maximal recurrence gap of `w` in the scanned window.
    pub fn strong_cofinality_certificate(&self, w: &Word, n: usize) -> Result<CofinalityCertificate> {
        if w.is_empty() {
            return Err(Error::InvalidArgument("cofinality needs a nonempty word".into()));
        }
        self.lang.require_depth(n.max(w.len()))?;
        if !self.lang.contains(w) {
            return Err(Error::UnknownWord(w.clone()));
        }
        let gap = self.lang.recurrence(w)?.max_gap as usize;
        let bound = gap + w.len();
        if n < bound {
            return Err(Error::InvalidArgument(format!(
                "N = {n} is below the recurrence bound d + l = {gap} + {}",
                w.len()
            )));
        }
        let base = self.gen_vertex(w)?;
        let mut per_word = Vec::new();
        let mut paths = BTreeSet::new();
        for u in self.lang.words(n) {
            let l = w.len();
            let hit = (0..n - l).rev().find(|&i| &u[i..i + l] == w.as_bytes());
            let Some(i) = hit else {
                return Err(Error::CertificateFailure {
                    witness: u,
                    reason: format!("no occurrence of {w} with a nonempty suffix"),
                });
            };
            let lambda = u.slice(i + l, n);
            paths.insert(lambda.clone());
            per_word.push(CofinalityStep { word: u, path: lambda });
        }
        let mut cover = EbarSet::empty(n);
        for p in &paths {
            cover = self.union(&cover, &self.relative_range(&base, p)?)?;
        }
        for step in &per_word {
            if !self.is_subset(&self.gen_vertex(&step.word)?, &cover)?
                || !self.is_subset(&self.gen_vertex(&step.word)?, &self.relative_range(&base, &step.path)?)?
            {
                return Err(Error::CertificateFailure {
                    witness: step.word.clone(),
                    reason: format!("r({}) is not inside r(r({w}), {})", step.word, step.path),
                });
            }
        }
        Ok(CofinalityCertificate {
            word: w.clone(),
            level: w.len(),
            n,
            recurrence_gap: gap,
            paths: paths.into_iter().collect(),
            per_word,
            window_relative: true,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub axiom: String,
    pub level: usize,
    pub checked: usize,
    pub pass: bool,
    pub counterexample: Option<Vec<String>>,
}

impl AxiomReport {
    fn new(axiom: &str, level: usize) -> Self {
        Self { axiom: axiom.into(), level, checked: 0, pass: true, counterexample: None }
    }

    fn record(&mut self, ok: bool, witness: impl FnOnce() -> Vec<String>) {
        self.checked += 1;
        if !ok {
            self.pass = false;
            if self.counterexample.is_none() {
                self.counterexample = Some(witness());
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CofinalityStep {
    pub word: Word,
    pub path: Word,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CofinalityCertificate {
    pub word: Word,
    pub level: usize,
    pub n: usize,
    pub recurrence_gap: usize,
    /// Distinct paths `λ_i`.
    pub paths: Vec<Word>,
    pub per_word: Vec<CofinalityStep>,
    pub window_relative: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::language::factors;
    use crate::seqgen::{periodic_window, SequenceSource, Window};

    fn tm() -> LanguageTable {
        factors(&SequenceSource::thue_morse().window(1 << 12).unwrap(), 10).unwrap()
    }

    #[test]
    fn gen_vertex_examples() {
        let l = tm();
        let s = LabeledSpace::new(&l);
        assert_eq!(s.gen_vertex(b"01").unwrap().to_string(), "{01}_2");
        assert!(s.gen_vertex(b"000").unwrap().is_empty());
        assert_eq!(s.gen_vertex(b"").unwrap(), EbarSet::everything());
    }

    #[test]
    fn relative_range_examples() {
        let l = tm();
        let s = LabeledSpace::new(&l);
        let zero = s.gen_vertex(b"0").unwrap();
        assert_eq!(s.relative_range(&zero, b"1").unwrap().to_string(), "{01}_2");
        let zz = s.gen_vertex(b"00").unwrap();
        assert!(s.relative_range(&zz, b"0").unwrap().is_empty());
    }

    #[test]
    fn refine_examples() {
        let l = tm();
        let s = LabeledSpace::new(&l);
        let zero = s.gen_vertex(b"0").unwrap();
        assert_eq!(s.refine(&zero, 2).unwrap().to_string(), "{00,10}_2");
        assert_eq!(s.refine(&s.full(3).unwrap(), 4).unwrap(), s.full(4).unwrap());
        assert!(matches!(s.refine(&zero, 11), Err(Error::DepthExceeded { .. })));
    }

    #[test]
    fn mixed_level_union() {
        let l = tm();
        let s = LabeledSpace::new(&l);
        let u = s.union(&s.gen_vertex(b"0").unwrap(), &s.gen_vertex(b"01").unwrap()).unwrap();
        assert_eq!(u.to_string(), "{00,01,10}_2");
        let a = s.gen_vertex(b"011").unwrap();
        assert!(s.intersection(&a, &EbarSet::empty(1)).unwrap().is_empty());
    }

    #[test]
    fn cofinality_zero_has_short_suffixes() {
        let l = tm();
        let s = LabeledSpace::new(&l);
        let c = s.strong_cofinality_certificate(&Word::from("0"), 8).unwrap();
        assert!(c.paths.iter().all(|p| !p.is_empty() && p.len() <= 3));
        assert_eq!(c.per_word.len(), l.complexity(8).unwrap());
    }

    #[test]
    fn cofinality_unknown_word_in_periodic_control() {
        let l = factors(&periodic_window(&Word::from("01"), 128).unwrap(), 8).unwrap();
        let s = LabeledSpace::new(&l);
        assert_eq!(
            s.strong_cofinality_certificate(&Word::from("00"), 4),
            Err(Error::UnknownWord(Word::from("00")))
        );
    }

    #[test]
    fn cofinality_fails_for_non_recurrent_window() {
        let mut left = vec![b'0'; 40];
        let right = vec![b'0'; 40];
        left[38] = b'1';
        left[35] = b'1';
        let win = Window::from_halves(&left, &right).unwrap();
        let l = factors(&win, 8).unwrap();
        let s = LabeledSpace::new(&l);
        match s.strong_cofinality_certificate(&Word::from("1"), 4) {
            Err(Error::CertificateFailure { witness, .. }) => assert_eq!(witness, Word::from("0000")),
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn axioms_hold_for_thue_morse() {
        let l = tm();
        let reports = LabeledSpace::new(&l).verify_axioms(3).unwrap();
        assert_eq!(reports.len(), 12);
        assert!(reports.iter().all(|r| r.pass), "{reports:?}");
    }

    #[test]
    fn dropping_a_factor_breaks_partition_axiom() {
        let l = tm().without_word(&Word::from("010"));
        let reports = LabeledSpace::new(&l).verify_axioms(2).unwrap();
        let iv = reports.iter().find(|r| r.axiom == "iv" && r.level == 2).unwrap();
        assert!(!iv.pass);
        assert!(iv.counterexample.is_some());
    }

    #[test]
    fn weak_left_resolving_on_short_paths() {
        let l = tm();
        let s = LabeledSpace::new(&l);
        let sets: Vec<EbarSet> = l.words(2).iter().map(|w| s.gen_vertex(w).unwrap()).collect();
        let paths: Vec<Word> = (1..=2).flat_map(|n| l.words(n)).collect();
        for a in &sets {
            for b in &sets {
                for p in &paths {
                    let lhs = s.intersection(&s.relative_range(a, p).unwrap(), &s.relative_range(b, p).unwrap()).unwrap();
                    let rhs = s.relative_range(&s.intersection(a, b).unwrap(), p).unwrap();
                    assert!(s.same_set(&lhs, &rhs).unwrap(), "{a} {b} {p}");
                }
            }
        }
    }
}
