//! Factor language of a window: occurrence tables, recurrence gaps, repetition powers.
//!
//! Only full occurrences inside the scan region count. For a window on `[-N, N)` and
//! depth `L`, the scan region is the cell range `[-N + L, N - L)`, so every counted
//! occurrence can be extended by `L` symbols on both sides inside the window. All verdicts
//! are relative to the scanned region.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::seqgen::Window;
use crate::word::Word;

/// Length-`n` factors `W_n` for every `n <= L`, with sorted start positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguageTable {
    max_len: usize,
    region: (i64, i64),
    per_length: Vec<BTreeMap<Word, Vec<i64>>>,
}

/// Enumerates the factors of `window` up to length `max_len`.
pub fn factors(window: &Window, max_len: usize) -> Result<LanguageTable> {
    let len = window.len();
    if max_len == 0 || len < 3 * max_len {
        return Err(Error::InsufficientWindow { len, depth: max_len });
    }
    let n_half = window.half() as i64;
    let l = max_len as i64;
    let region = (-n_half + l, n_half - l);
    let offset = |t: i64| (t + n_half) as usize;
    let syms = window.symbols();
    let mut per_length = vec![BTreeMap::new()];
    for n in 1..=max_len {
        let mut map: BTreeMap<Word, Vec<i64>> = BTreeMap::new();
        for t in region.0..=region.1 - n as i64 {
            let f = &syms[offset(t)..offset(t) + n];
            match map.get_mut(f) {
                Some(v) => v.push(t),
                None => {
                    map.insert(Word::from_bytes(f), vec![t]);
                }
            }
        }
        per_length.push(map);
    }
    Ok(LanguageTable { max_len, region, per_length })
}

impl LanguageTable {
    pub fn max_len(&self) -> usize {
        self.max_len
    }

    /// Scan region as a half-open cell range.
    pub fn region(&self) -> (i64, i64) {
        self.region
    }

    /// `W_n` in lexicographic order; `W_0 = {ε}`.
    pub fn words(&self, n: usize) -> Vec<Word> {
        if n == 0 {
            return vec![Word::empty()];
        }
        self.per_length.get(n).map(|m| m.keys().cloned().collect()).unwrap_or_default()
    }

    /// Membership for `|w| <= L`; `ε` is always a member.
    pub fn contains(&self, w: &[u8]) -> bool {
        if w.is_empty() {
            return true;
        }
        self.per_length.get(w.len()).is_some_and(|m| m.contains_key(w))
    }

    /// Fails with [`Error::DepthExceeded`] unless the table reaches length `needed`.
    pub fn require_depth(&self, needed: usize) -> Result<()> {
        if needed > self.max_len {
            Err(Error::DepthExceeded { depth: self.max_len, needed })
        } else {
            Ok(())
        }
    }

    pub fn positions(&self, w: &[u8]) -> Option<&[i64]> {
        self.per_length.get(w.len())?.get(w).map(|v| v.as_slice())
    }

    pub fn symbols(&self) -> Vec<u8> {
        self.words(1).iter().map(|w| w[0]).collect()
    }

    /// `p(n) = |W_n|`.
    pub fn complexity(&self, n: usize) -> Result<usize> {
        if n > self.max_len {
            return Err(Error::OutOfRange(n));
        }
        Ok(if n == 0 { 1 } else { self.per_length[n].len() })
    }

    /// Copy of the table with `w` removed. The result is in general no longer
    /// factor-closed; it exists to exercise the verifiers.
    pub fn without_word(&self, w: &Word) -> LanguageTable {
        let mut t = self.clone();
        if let Some(m) = t.per_length.get_mut(w.len()) {
            m.remove(w);
        }
        t
    }

    /// Maximal gap between consecutive occurrences of `w`.
    pub fn recurrence(&self, w: &Word) -> Result<RecurrenceReport> {
        self.require_depth(w.len())?;
        let pos = self.positions(w).unwrap_or(&[]);
        RecurrenceReport::from_positions(w, pos)
    }

    /// CSV with columns `word,length,count,first,last,max_gap`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("word,length,count,first,last,max_gap\n");
        for map in self.per_length.iter().skip(1) {
            for (w, pos) in map {
                let gap = pos.windows(2).map(|p| p[1] - p[0]).max();
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    w,
                    w.len(),
                    pos.len(),
                    pos[0],
                    pos[pos.len() - 1],
                    gap.map(|g| g.to_string()).unwrap_or_default()
                );
            }
        }
        out
    }
}

/// Gap statistics for one word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecurrenceReport {
    pub word: Word,
    pub max_gap: u64,
    pub occurrence_count: usize,
}

impl RecurrenceReport {
    fn from_positions(w: &Word, pos: &[i64]) -> Result<Self> {
        if pos.len() < 2 {
            return Err(Error::InsufficientOccurrences { word: w.clone(), count: pos.len() });
        }
        let max_gap = pos.windows(2).map(|p| (p[1] - p[0]) as u64).max().unwrap_or(0);
        Ok(Self { word: w.clone(), max_gap, occurrence_count: pos.len() })
    }
}

/// Maximal recurrence gap of `w` in `window`, scanning the region trimmed by `|w|`.
pub fn max_gap(window: &Window, w: &Word) -> Result<RecurrenceReport> {
    if w.is_empty() {
        return Err(Error::InvalidArgument("recurrence of the empty word".into()));
    }
    let n = w.len();
    if window.len() < 3 * n {
        return Err(Error::InsufficientWindow { len: window.len(), depth: n });
    }
    let syms = window.symbols();
    let pos: Vec<i64> = (n..=syms.len() - 2 * n)
        .filter(|&i| &syms[i..i + n] == w.as_bytes())
        .map(|i| i as i64 + window.start())
        .collect();
    RecurrenceReport::from_positions(w, &pos)
}

/// Largest `k` with `α^k` in the table; `capped` means the table depth was reached and
/// the true value is `>= power`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MaxPower {
    pub power: usize,
    pub capped: bool,
}

pub fn max_power(table: &LanguageTable, alpha: &Word) -> Result<MaxPower> {
    if alpha.is_empty() {
        return Err(Error::InvalidArgument("powers of the empty word".into()));
    }
    table.require_depth(alpha.len())?;
    if !table.contains(alpha) {
        return Err(Error::UnknownWord(alpha.clone()));
    }
    let cap = table.max_len() / alpha.len();
    let mut k = 1;
    while k < cap && table.contains(&alpha.power(k + 1)) {
        k += 1;
    }
    Ok(MaxPower { power: k, capped: k == cap })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PowerEntry {
    pub word: Word,
    pub max_power: usize,
    pub capped: bool,
}

/// Certificate that no word up to `len_bound` repeats `power_ceiling` times.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DisagreeabilityReport {
    pub len_bound: usize,
    pub power_ceiling: usize,
    pub per_word: Vec<PowerEntry>,
    pub pass: bool,
    /// First candidate repeatable path, by length then lexicographic order.
    pub witness: Option<Word>,
    pub window_relative: bool,
}

pub fn disagreeability_certificate(
    table: &LanguageTable,
    len_bound: usize,
    power_ceiling: usize,
) -> Result<DisagreeabilityReport> {
    if len_bound == 0 || power_ceiling < 2 {
        return Err(Error::InvalidArgument("need len_bound >= 1 and power_ceiling >= 2".into()));
    }
    table.require_depth(len_bound * power_ceiling)?;
    let mut per_word = Vec::new();
    let mut witness = None;
    for n in 1..=len_bound {
        for w in table.words(n) {
            let mp = max_power(table, &w)?;
            if mp.power >= power_ceiling && witness.is_none() {
                witness = Some(w.clone());
            }
            per_word.push(PowerEntry { word: w, max_power: mp.power, capped: mp.capped });
        }
    }
    Ok(DisagreeabilityReport {
        len_bound,
        power_ceiling,
        per_word,
        pass: witness.is_none(),
        witness,
        window_relative: true,
    })
}

pub fn complexity(table: &LanguageTable, n: usize) -> Result<usize> {
    table.complexity(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqgen::{periodic_window, SequenceSource};

    fn tm_table(depth: usize) -> LanguageTable {
        let win = SequenceSource::thue_morse().window(1 << 12).unwrap();
        factors(&win, depth).unwrap()
    }

    #[test]
    fn window_too_short() {
        let win = periodic_window(&Word::from("01"), 4).unwrap();
        assert!(matches!(factors(&win, 3), Err(Error::InsufficientWindow { .. })));
    }

    #[test]
    fn periodic_two_factors() {
        let win = periodic_window(&Word::from("01"), 64).unwrap();
        let t = factors(&win, 4).unwrap();
        assert_eq!(t.words(2), vec![Word::from("01"), Word::from("10")]);
        assert_eq!(t.recurrence(&Word::from("01")).unwrap().max_gap, 2);
        let mp = max_power(&t, &Word::from("01")).unwrap();
        assert_eq!(mp, MaxPower { power: 2, capped: true });
    }

    #[test]
    fn unknown_word_and_out_of_range() {
        let t = tm_table(6);
        assert_eq!(max_power(&t, &Word::from("000")), Err(Error::UnknownWord(Word::from("000"))));
        assert_eq!(t.complexity(7), Err(Error::OutOfRange(7)));
        assert!(matches!(
            disagreeability_certificate(&t, 2, 4),
            Err(Error::DepthExceeded { depth: 6, needed: 8 })
        ));
    }

    #[test]
    fn single_occurrence_has_no_gap() {
        let win: Window = "0000000000001.0000000000000".parse().unwrap();
        assert!(matches!(
            max_gap(&win, &Word::from("1")),
            Err(Error::InsufficientOccurrences { count: 1, .. })
        ));
    }

    #[test]
    fn csv_header_and_rows() {
        let t = tm_table(2);
        let csv = t.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("word,length,count,first,last,max_gap"));
        assert_eq!(csv.lines().count(), 1 + 2 + 4);
        assert!(csv.lines().any(|l| l.starts_with("0,1,")));
    }

    #[test]
    fn fault_injection_removes_exactly_one_word() {
        let t = tm_table(4);
        let f = t.without_word(&Word::from("010"));
        assert_eq!(f.complexity(3).unwrap(), t.complexity(3).unwrap() - 1);
        assert!(f.contains(b"0100"));
    }
}
