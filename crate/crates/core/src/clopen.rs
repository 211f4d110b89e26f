//! Cylinder-set calculus on the orbit closure.
//!
//! A [`ClopenSet`] with past length `p` and future length `f` is a finite union of
//! cylinders `[β.α]` (`|β| = p`, `|α| = f`), stored as the words `βα`. Elements of the
//! commutative core `s_α p_{r(βα)} s_α*` map to cylinders through [`rho`], and the shift
//! moves the dot one place to the right. Only the commutative image and the shift are
//! modelled; the gauge action and the conditional expectation stay implicit (only
//! `|α| = |β|` generators are representable here).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::language::LanguageTable;
use crate::word::Word;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClopenSet {
    past: usize,
    future: usize,
    words: BTreeSet<Word>,
}

impl ClopenSet {
    pub fn empty(past: usize, future: usize) -> Self {
        Self { past, future, words: BTreeSet::new() }
    }

    /// The whole orbit closure, `[.]` at `(0, 0)`.
    pub fn full() -> Self {
        Self { past: 0, future: 0, words: [Word::empty()].into_iter().collect() }
    }

    /// `[β.α]`, or the empty set at `(|β|, |α|)` when `βα` is not a factor.
    pub fn cylinder(lang: &LanguageTable, beta: &[u8], alpha: &[u8]) -> Result<Self> {
        lang.require_depth(beta.len() + alpha.len())?;
        let w = Word::from_bytes(beta).concat(alpha);
        let mut s = Self::empty(beta.len(), alpha.len());
        if lang.contains(&w) {
            s.words.insert(w);
        }
        Ok(s)
    }

    /// Builds a set from raw words; words outside the language are dropped.
    pub fn from_words<I: IntoIterator<Item = Word>>(
        lang: &LanguageTable,
        past: usize,
        future: usize,
        words: I,
    ) -> Result<Self> {
        lang.require_depth(past + future)?;
        let words = words
            .into_iter()
            .filter(|w| w.len() == past + future && lang.contains(w))
            .collect();
        Ok(Self { past, future, words })
    }

    pub fn past(&self) -> usize {
        self.past
    }

    pub fn future(&self) -> usize {
        self.future
    }

    pub fn words(&self) -> &BTreeSet<Word> {
        &self.words
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// The same set written with past length `past >= p` and future length `future >= f`.
    pub fn refine(&self, lang: &LanguageTable, past: usize, future: usize) -> Result<Self> {
        assert!(past >= self.past && future >= self.future, "refinement cannot coarsen");
        if past == self.past && future == self.future {
            return Ok(self.clone());
        }
        lang.require_depth(past + future)?;
        let off = past - self.past;
        let n = self.past + self.future;
        let words = lang
            .words(past + future)
            .into_iter()
            .filter(|x| self.words.contains(&x[off..off + n]))
            .collect();
        Ok(Self { past, future, words })
    }

    fn common(&self, other: &Self, lang: &LanguageTable) -> Result<(Self, Self)> {
        let p = self.past.max(other.past);
        let f = self.future.max(other.future);
        Ok((self.refine(lang, p, f)?, other.refine(lang, p, f)?))
    }

    pub fn union(&self, other: &Self, lang: &LanguageTable) -> Result<Self> {
        let (mut a, b) = self.common(other, lang)?;
        a.words.extend(b.words);
        Ok(a)
    }

    pub fn intersection(&self, other: &Self, lang: &LanguageTable) -> Result<Self> {
        let (a, b) = self.common(other, lang)?;
        let words = a.words.intersection(&b.words).cloned().collect();
        Ok(Self { words, ..a })
    }

    pub fn difference(&self, other: &Self, lang: &LanguageTable) -> Result<Self> {
        let (a, b) = self.common(other, lang)?;
        let words = a.words.difference(&b.words).cloned().collect();
        Ok(Self { words, ..a })
    }

    /// Set equality, decided at the common refinement.
    pub fn same_set(&self, other: &Self, lang: &LanguageTable) -> Result<bool> {
        let (a, b) = self.common(other, lang)?;
        Ok(a.words == b.words)
    }

    pub fn is_subset(&self, other: &Self, lang: &LanguageTable) -> Result<bool> {
        let (a, b) = self.common(other, lang)?;
        Ok(a.words.is_subset(&b.words))
    }

    /// `T([β.α]) = [βα₁.α₂…α_n]`, refining by one future letter first when `f = 0`.
    pub fn shift(&self, lang: &LanguageTable) -> Result<Self> {
        let base = if self.future == 0 { self.refine(lang, self.past, 1)? } else { self.clone() };
        Ok(Self { past: base.past + 1, future: base.future - 1, words: base.words })
    }

    /// `T⁻¹([β.α]) = [β₁…β_{p-1}.β_p α]`, refining by one past letter first when `p = 0`.
    pub fn unshift(&self, lang: &LanguageTable) -> Result<Self> {
        let base = if self.past == 0 { self.refine(lang, 1, self.future)? } else { self.clone() };
        Ok(Self { past: base.past - 1, future: base.future + 1, words: base.words })
    }
}

impl fmt::Display for ClopenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.words.is_empty() {
            return f.write_str("∅");
        }
        let parts: Vec<String> = self
            .words
            .iter()
            .map(|w| {
                format!(
                    "{}.{}",
                    String::from_utf8_lossy(&w[..self.past]),
                    String::from_utf8_lossy(&w[self.past..])
                )
            })
            .collect();
        f.write_str(&parts.join(" ∪ "))
    }
}

/// The core element `s_α p_{r(βα)} s_α*`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoreGenerator {
    pub alpha: Word,
    pub beta: Word,
}

impl CoreGenerator {
    pub fn new(alpha: impl Into<Word>, beta: impl Into<Word>) -> Self {
        Self { alpha: alpha.into(), beta: beta.into() }
    }
}

/// `ρ(s_α p_{r(βα)} s_α*) = χ_[β.α]`; zero generators map to the empty set.
pub fn rho(lang: &LanguageTable, g: &CoreGenerator) -> Result<ClopenSet> {
    ClopenSet::cylinder(lang, &g.beta, &g.alpha)
}

/// Result of an exhaustive identity check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub name: String,
    pub max_len: usize,
    pub checked: usize,
    pub pass: bool,
    pub failures: Vec<String>,
}

impl IdentityReport {
    fn new(name: &str, max_len: usize) -> Self {
        Self { name: name.into(), max_len, checked: 0, pass: true, failures: Vec::new() }
    }

    fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.pass = false;
            if self.failures.len() < 16 {
                self.failures.push(witness());
            }
        }
    }
}

/// Checks `T(ρ(α, β)) = ρ(α₂…α_n, βα₁)` for `1 <= |α|, |β| <= max_len`.
pub fn verify_tprime(lang: &LanguageTable, max_len: usize) -> Result<IdentityReport> {
    verify_tprime_with(lang, max_len, |c| c.shift(lang))
}

/// [`verify_tprime`] with a caller-supplied shift.
pub fn verify_tprime_with<F>(lang: &LanguageTable, max_len: usize, shift: F) -> Result<IdentityReport>
where
    F: Fn(&ClopenSet) -> Result<ClopenSet>,
{
    lang.require_depth(2 * max_len)?;
    let mut report = IdentityReport::new("T'", max_len);
    for n in 2..=2 * max_len {
        for w in lang.words(n) {
            for p in 1..n {
                let (beta, alpha) = w.split_at(p);
                if beta.len() > max_len || alpha.len() > max_len {
                    continue;
                }
                let lhs = shift(&rho(lang, &CoreGenerator::new(alpha.to_vec(), beta.to_vec()))?)?;
                let rhs = rho(
                    lang,
                    &CoreGenerator::new(alpha[1..].to_vec(), Word::from_bytes(beta).concat(&alpha[..1])),
                )?;
                let ok = lhs.same_set(&rhs, lang)?;
                report.record(ok, || {
                    format!(
                        "T([{}.{}]) = {lhs}, expected {rhs}",
                        String::from_utf8_lossy(beta),
                        String::from_utf8_lossy(alpha)
                    )
                });
            }
        }
    }
    Ok(report)
}

/// Checks `T([β.]) = ∪_a [βa.]` for every `β` with `|β| <= max_len`, including `ε`.
pub fn verify_conjugation(lang: &LanguageTable, max_len: usize) -> Result<IdentityReport> {
    lang.require_depth(max_len + 1)?;
    let mut report = IdentityReport::new("u p_r(β) u* = Σ_a p_r(βa)", max_len);
    for n in 0..=max_len {
        for beta in lang.words(n) {
            let lhs = ClopenSet::cylinder(lang, &beta, b"")?.shift(lang)?;
            let mut rhs = ClopenSet::empty(n + 1, 0);
            for a in lang.symbols() {
                rhs = rhs.union(&ClopenSet::cylinder(lang, &beta.concat(&[a]), b"")?, lang)?;
            }
            let ok = lhs.same_set(&rhs, lang)?;
            report.record(ok, || format!("T([{beta}.]) = {lhs}, expected {rhs}"));
        }
    }
    Ok(report)
}

/// Checks `[β.α] = ⊔_{a,b} [aβ.αb]` for all factors `βα` with `|βα| <= max_len`, with
/// disjointness verified by counting multiplicities.
pub fn verify_partition_axiom(lang: &LanguageTable, max_len: usize) -> Result<IdentityReport> {
    lang.require_depth(max_len + 2)?;
    let mut report = IdentityReport::new("[β.α] = ⊔ [aβ.αb]", max_len);
    let syms = lang.symbols();
    for n in 0..=max_len {
        for w in lang.words(n) {
            for p in 0..=n {
                let (beta, alpha) = w.split_at(p);
                let lhs = ClopenSet::cylinder(lang, beta, alpha)?.refine(lang, p + 1, n - p + 1)?;
                let mut counts: BTreeMap<Word, usize> = BTreeMap::new();
                for &a in &syms {
                    for &b in &syms {
                        let mut ab = vec![a];
                        ab.extend_from_slice(beta);
                        let mut ob = alpha.to_vec();
                        ob.push(b);
                        for x in ClopenSet::cylinder(lang, &ab, &ob)?.words {
                            *counts.entry(x).or_default() += 1;
                        }
                    }
                }
                let disjoint = counts.values().all(|&c| c == 1);
                let same = counts.keys().eq(lhs.words.iter());
                report.record(disjoint && same, || {
                    format!(
                        "[{}.{}] refines to {lhs}, pieces {:?}",
                        String::from_utf8_lossy(beta),
                        String::from_utf8_lossy(alpha),
                        counts
                    )
                });
            }
        }
    }
    Ok(report)
}

/// Cylinder-calculus checks for `t_a := u* p_r(a)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TGeneratorReport {
    pub symbol: String,
    pub max_len: usize,
    pub checks: Vec<IdentityReport>,
    pub pass: bool,
}

/// Verifies for `t_a`: `t_a* t_a = p_r(a)`, `t_a* t_b = 0` for `b ≠ a`,
/// `p_r(β) t_a = t_a p_r(βa)` and `p_r(β) = Σ_a t_a p_r(βa) t_a*`, the last two for every
/// `β` with `|β| <= max_len`.
pub fn t_generator(lang: &LanguageTable, a: u8, max_len: usize) -> Result<TGeneratorReport> {
    if !lang.contains(&[a]) {
        return Err(Error::UnknownWord(Word::from_bytes(&[a])));
    }
    lang.require_depth(max_len + 2)?;
    let syms = lang.symbols();
    let ra = ClopenSet::cylinder(lang, &[a], b"")?;

    let mut isometry = IdentityReport::new("t_a* t_a = p_r(a)", max_len);
    let back = ra.shift(lang)?.unshift(lang)?;
    isometry.record(back.same_set(&ra, lang)?, || format!("T⁻¹T([{}.]) = {back}", a as char));

    let mut orth = IdentityReport::new("t_a* t_b = 0", max_len);
    for &b in syms.iter().filter(|&&b| b != a) {
        let rb = ClopenSet::cylinder(lang, &[b], b"")?;
        let meet = ra.intersection(&rb, lang)?;
        orth.record(meet.is_empty(), || format!("[{}.] ∩ [{}.] = {meet}", a as char, b as char));
    }

    let mut covariance = IdentityReport::new("p_r(β) t_a = t_a p_r(βa)", max_len);
    let mut ck = IdentityReport::new("p_r(β) = Σ_a t_a p_r(βa) t_a*", max_len);
    for n in 0..=max_len {
        for beta in lang.words(n) {
            let beta_a = ClopenSet::cylinder(lang, &beta.concat(&[a]), b"")?;
            // u p_r(β) u* p_r(a) = p_r(βa), and p_r(βa) <= p_r(a)
            let conj = ClopenSet::cylinder(lang, &beta, b"")?.shift(lang)?;
            let lhs = conj.intersection(&ra, lang)?;
            let ok = lhs.same_set(&beta_a, lang)?
                && beta_a.is_subset(&ra, lang)?
                && lhs.unshift(lang)?.same_set(&beta_a.unshift(lang)?, lang)?;
            covariance.record(ok, || format!("β = {beta}: T([β.]) ∩ [a.] = {lhs}, [βa.] = {beta_a}"));

            let target = ClopenSet::cylinder(lang, &beta, b"")?.refine(lang, n, 1)?;
            let mut counts: BTreeMap<Word, usize> = BTreeMap::new();
            for &c in &syms {
                let piece = ClopenSet::cylinder(lang, &beta.concat(&[c]), b"")?.unshift(lang)?;
                for x in piece.refine(lang, n, 1)?.words {
                    *counts.entry(x).or_default() += 1;
                }
            }
            let ok = counts.values().all(|&c| c == 1) && counts.keys().eq(target.words.iter());
            ck.record(ok, || format!("β = {beta}: [β.] = {target}, pieces {counts:?}"));
        }
    }
    let checks = vec![isometry, orth, covariance, ck];
    let pass = checks.iter().all(|c| c.pass);
    Ok(TGeneratorReport { symbol: (a as char).to_string(), max_len, checks, pass })
}
