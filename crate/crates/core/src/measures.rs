//! Invariant measure on cylinders and the trace it induces on generator symbols.
//!
//! Cylinder measures are position free: `m([β.α]) = m(βα)`, so a measure is a table of
//! word frequencies. Three modes exist. Exact frequencies come from the Perron eigenvector
//! of the induced `n`-block substitution when its eigenvalue is an integer, certified
//! rational intervals cover the other primitive substitutions, and empirical frequencies
//! come from counting in a window.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::clopen::ClopenSet;
use crate::error::{Error, Result};
use crate::labeled_space::{EbarSet, LabeledSpace};
use crate::language::LanguageTable;
use crate::matrix::rational_kernel;
use crate::seqgen::{primitivity_witness, SequenceSource, Substitution, Window};
use crate::word::Word;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Certified,
    Empirical,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeasureValue {
    Exact(BigRational),
    /// Closed interval with rational endpoints known to contain the value.
    Interval(BigRational, BigRational),
    Approx(f64),
}

fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

impl MeasureValue {
    pub fn zero(mode: Mode) -> Self {
        match mode {
            Mode::Exact => MeasureValue::Exact(BigRational::zero()),
            Mode::Certified => MeasureValue::Interval(BigRational::zero(), BigRational::zero()),
            Mode::Empirical => MeasureValue::Approx(0.0),
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            MeasureValue::Exact(q) => Some(q),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            MeasureValue::Exact(q) => to_f64(q),
            MeasureValue::Interval(lo, hi) => (to_f64(lo) + to_f64(hi)) / 2.0,
            MeasureValue::Approx(x) => *x,
        }
    }

    pub fn width(&self) -> f64 {
        match self {
            MeasureValue::Interval(lo, hi) => to_f64(&(hi - lo)),
            _ => 0.0,
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        use MeasureValue::*;
        match (self, o) {
            (Exact(a), Exact(b)) => Exact(a + b),
            (Approx(_), _) | (_, Approx(_)) => Approx(self.to_f64() + o.to_f64()),
            _ => {
                let (a0, a1) = self.bounds();
                let (b0, b1) = o.bounds();
                Interval(a0 + b0, a1 + b1)
            }
        }
    }

    pub fn scale(&self, k: i64) -> Self {
        let q = BigRational::from_integer(BigInt::from(k));
        match self {
            MeasureValue::Exact(a) => MeasureValue::Exact(a * q),
            MeasureValue::Interval(lo, hi) if k >= 0 => MeasureValue::Interval(lo * &q, hi * q),
            MeasureValue::Interval(lo, hi) => MeasureValue::Interval(hi * &q, lo * q),
            MeasureValue::Approx(x) => MeasureValue::Approx(x * k as f64),
        }
    }

    fn bounds(&self) -> (BigRational, BigRational) {
        match self {
            MeasureValue::Exact(q) => (q.clone(), q.clone()),
            MeasureValue::Interval(lo, hi) => (lo.clone(), hi.clone()),
            MeasureValue::Approx(x) => {
                let q = BigRational::from_float(*x).unwrap_or_default();
                (q.clone(), q)
            }
        }
    }

    /// Equality in exact mode, overlap for intervals, `|a - b| <= tol` otherwise.
    pub fn agrees(&self, o: &Self, tol: f64) -> bool {
        use MeasureValue::*;
        match (self, o) {
            (Exact(a), Exact(b)) => a == b,
            (Approx(_), _) | (_, Approx(_)) => (self.to_f64() - o.to_f64()).abs() <= tol,
            _ => {
                let (a0, a1) = self.bounds();
                let (b0, b1) = o.bounds();
                a0 <= b1 && b0 <= a1
            }
        }
    }

    /// Absolute difference, as a display string and a float.
    pub fn defect(&self, o: &Self) -> (String, f64) {
        match (self, o) {
            (MeasureValue::Exact(a), MeasureValue::Exact(b)) => {
                let d = (a - b).abs();
                (d.to_string(), to_f64(&d))
            }
            _ => {
                let d = (self.to_f64() - o.to_f64()).abs();
                (format!("{d:e}"), d)
            }
        }
    }
}

impl fmt::Display for MeasureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureValue::Exact(q) => write!(f, "{q}"),
            MeasureValue::Interval(lo, hi) => write!(f, "[{:.15}, {:.15}]", to_f64(lo), to_f64(hi)),
            MeasureValue::Approx(x) => write!(f, "{x:.9}"),
        }
    }
}

impl Serialize for MeasureValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Word frequencies up to a fixed length.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyMeasure {
    depth: usize,
    mode: Mode,
    values: BTreeMap<Word, MeasureValue>,
    scan_length: Option<usize>,
}

impl FrequencyMeasure {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn scan_length(&self) -> Option<usize> {
        self.scan_length
    }

    /// Words of length `n` with positive measure.
    pub fn support(&self, n: usize) -> Vec<Word> {
        if n == 0 {
            return vec![Word::empty()];
        }
        self.values.keys().filter(|w| w.len() == n).cloned().collect()
    }

    /// `m(w)`; zero for words outside the support, `1` for `ε`.
    pub fn value(&self, w: &[u8]) -> Result<MeasureValue> {
        if w.len() > self.depth {
            return Err(Error::MeasureDepth { depth: self.depth, needed: w.len() });
        }
        if w.is_empty() {
            return Ok(match self.mode {
                Mode::Exact => MeasureValue::Exact(BigRational::one()),
                Mode::Certified => MeasureValue::Interval(BigRational::one(), BigRational::one()),
                Mode::Empirical => MeasureValue::Approx(1.0),
            });
        }
        Ok(self.values.get(w).cloned().unwrap_or_else(|| MeasureValue::zero(self.mode)))
    }

    pub fn exact(&self, w: &[u8]) -> Result<BigRational> {
        match self.value(w)? {
            MeasureValue::Exact(q) => Ok(q),
            _ => Err(Error::InvalidArgument(format!("measure is not exact ({:?} mode)", self.mode))),
        }
    }

    /// Sum of `m` over a set of words of a common length.
    pub fn total<'w>(&self, words: impl IntoIterator<Item = &'w Word>) -> Result<MeasureValue> {
        let mut acc = MeasureValue::zero(self.mode);
        for w in words {
            acc = acc.add(&self.value(w)?);
        }
        Ok(acc)
    }

    /// Measure of a vertex set, i.e. of the past cylinder `[A.]`.
    pub fn of_set(&self, a: &EbarSet) -> Result<MeasureValue> {
        self.total(a.words())
    }

    pub fn of_clopen(&self, c: &ClopenSet) -> Result<MeasureValue> {
        self.total(c.words())
    }

    /// Copy with `m(w)` overwritten. Used to exercise the checks.
    pub fn with_value(&self, w: &Word, v: MeasureValue) -> Self {
        let mut out = self.clone();
        out.values.insert(w.clone(), v);
        out
    }

    /// Largest Kolmogorov defect `|m(w) - Σ_a m(wa)|`, `|m(w) - Σ_b m(bw)|` over words of
    /// length `< depth`, and the normalization defect `|1 - Σ_{W_n} m|`.
    pub fn consistency_defect(&self) -> Result<f64> {
        let syms: BTreeSet<u8> = self.support(1).iter().map(|w| w[0]).collect();
        let mut worst = 0.0f64;
        for n in 0..self.depth {
            for w in self.support(n) {
                let m = self.value(&w)?;
                let mut right = MeasureValue::zero(self.mode);
                let mut left = MeasureValue::zero(self.mode);
                for &s in &syms {
                    right = right.add(&self.value(&w.concat(&[s]))?);
                    left = left.add(&self.value(&[&[s], w.as_bytes()].concat())?);
                }
                worst = worst.max(m.defect(&right).1).max(m.defect(&left).1);
            }
        }
        for n in 1..=self.depth {
            let total = self.total(&self.support(n))?;
            worst = worst.max(total.defect(&self.value(b"")?).1);
        }
        Ok(worst)
    }

    /// Rows `word,exact,empirical,defect`.
    pub fn to_csv(&self, empirical: Option<&FrequencyMeasure>) -> Result<String> {
        let mut out = String::from("word,exact,empirical,defect\n");
        for (w, v) in &self.values {
            let emp = match empirical {
                Some(e) if w.len() <= e.depth => Some(e.value(w)?.to_f64()),
                _ => None,
            };
            let (e_str, d_str) = match emp {
                Some(x) => (format!("{x:.9}"), format!("{:.3e}", (x - v.to_f64()).abs())),
                None => (String::new(), String::new()),
            };
            let _ = writeln!(out, "{w},{v},{e_str},{d_str}");
        }
        Ok(out)
    }
}

impl Serialize for FrequencyMeasure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("FrequencyMeasure", 4)?;
        st.serialize_field("depth", &self.depth)?;
        st.serialize_field("mode", &self.mode)?;
        st.serialize_field("scan_length", &self.scan_length)?;
        st.serialize_field("values", &self.values)?;
        st.end()
    }
}

/// Matrix of the induced substitution on `n`-blocks: entry `[v][w]` counts `v` among the
/// first `|σ(w₀)|` length-`n` windows of `σ(w)`.
fn block_matrix(sigma: &Substitution, blocks: &[Word]) -> Vec<Vec<BigInt>> {
    let index: BTreeMap<&Word, usize> = blocks.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let n = blocks.first().map_or(0, |w| w.len());
    let mut m = vec![vec![BigInt::zero(); blocks.len()]; blocks.len()];
    for (c, w) in blocks.iter().enumerate() {
        let img = sigma.apply(w);
        for i in 0..sigma.image(w[0]).len() {
            let v = &img[i..i + n];
            let r = index[&Word::from_bytes(v)];
            m[r][c] += 1;
        }
    }
    m
}

fn is_primitive(m: &[Vec<BigInt>]) -> bool {
    let n = m.len();
    let one: Vec<Vec<bool>> = m.iter().map(|r| r.iter().map(|x| x.is_positive()).collect()).collect();
    let mut reach = one.clone();
    for _ in 0..=(n.saturating_sub(1)).pow(2) + 1 {
        if reach.iter().all(|r| r.iter().all(|&x| x)) {
            return true;
        }
        reach = (0..n).map(|i| (0..n).map(|j| (0..n).any(|k| reach[i][k] && one[k][j])).collect()).collect();
    }
    false
}

/// Positive kernel vector of `M - λ I` normalized to sum 1, if the kernel is a line.
fn exact_pf_vector(m: &[Vec<BigInt>], lambda: &BigInt) -> Option<Vec<BigRational>> {
    let n = m.len();
    let rows: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let x = if i == j { &m[i][j] - lambda } else { m[i][j].clone() };
                    BigRational::from_integer(x)
                })
                .collect()
        })
        .collect();
    let kernel = rational_kernel(&rows, n);
    if kernel.len() != 1 {
        return None;
    }
    let v = &kernel[0];
    let sum: BigRational = v.iter().sum();
    if sum.is_zero() {
        return None;
    }
    let v: Vec<BigRational> = v.iter().map(|x| x / &sum).collect();
    v.iter().all(|x| x.is_positive()).then_some(v)
}

/// Integer Perron eigenvalue of the letter matrix, verified by a positive kernel vector.
fn integer_pf_eigenvalue(m: &[Vec<BigInt>]) -> Option<BigInt> {
    let sums: Vec<BigInt> = (0..m.len()).map(|j| m.iter().map(|r| &r[j]).sum()).collect();
    let lo = sums.iter().min()?.clone();
    let hi = sums.iter().max()?.clone();
    let mut lambda = lo;
    while lambda <= hi {
        if exact_pf_vector(m, &lambda).is_some() {
            return Some(lambda);
        }
        lambda += 1;
    }
    None
}

/// Normalized Perron vector enclosed componentwise by the normalized columns of `M^(2^k)`.
fn certified_pf_vector(m: &[Vec<BigInt>], width: f64) -> Option<Vec<(BigRational, BigRational)>> {
    if !is_primitive(m) {
        return None;
    }
    let n = m.len();
    let tol = BigRational::from_float(width)?;
    let mut p: Vec<Vec<BigInt>> = m.to_vec();
    for _ in 0..24 {
        let sums: Vec<BigInt> = (0..n).map(|j| p.iter().map(|r| &r[j]).sum()).collect();
        let bounds: Vec<(BigRational, BigRational)> = (0..n)
            .map(|i| {
                let fr = (0..n).map(|j| BigRational::new(p[i][j].clone(), sums[j].clone()));
                let (mut lo, mut hi): (Option<BigRational>, Option<BigRational>) = (None, None);
                for x in fr {
                    lo = Some(lo.map_or(x.clone(), |l| l.min(x.clone())));
                    hi = Some(hi.map_or(x.clone(), |h| h.max(x)));
                }
                (lo.unwrap(), hi.unwrap())
            })
            .collect();
        if bounds.iter().all(|(lo, hi)| lo.is_positive() && hi - lo <= tol) {
            return Some(bounds);
        }
        p = (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| &p[i][k] * &p[k][j]).sum()).collect())
            .collect();
    }
    None
}

/// Width of certified intervals.
pub const CERTIFIED_WIDTH: f64 = 1e-12;

/// Frequencies of words up to length `depth` for a primitive substitution.
pub fn pf_frequencies(sigma: &Substitution, depth: usize) -> Result<FrequencyMeasure> {
    let d = sigma.alphabet().size();
    let wielandt = (d - 1) * (d - 1) + 1;
    if primitivity_witness(sigma, wielandt).is_none() {
        return Err(Error::NotUniquelyCertified(wielandt));
    }
    if depth == 0 {
        return Err(Error::InvalidArgument("measure depth must be positive".into()));
    }
    let tables: Vec<(Vec<Word>, Vec<Vec<BigInt>>)> = (1..=depth)
        .map(|n| {
            let blocks: Vec<Word> = sigma.legal_words(n)?.into_iter().collect();
            let m = block_matrix(sigma, &blocks);
            Ok((blocks, m))
        })
        .collect::<Result<_>>()?;
    let mut values = BTreeMap::new();
    if let Some(lambda) = integer_pf_eigenvalue(&tables[0].1) {
        let exact: Option<Vec<Vec<BigRational>>> =
            tables.iter().map(|(_, m)| exact_pf_vector(m, &lambda)).collect();
        if let Some(vs) = exact {
            for ((blocks, _), v) in tables.iter().zip(vs) {
                for (w, q) in blocks.iter().zip(v) {
                    values.insert(w.clone(), MeasureValue::Exact(q));
                }
            }
            return Ok(FrequencyMeasure { depth, mode: Mode::Exact, values, scan_length: None });
        }
    }
    for (blocks, m) in &tables {
        let bounds = certified_pf_vector(m, CERTIFIED_WIDTH).ok_or(Error::NotUniquelyCertified(blocks[0].len()))?;
        for (w, (lo, hi)) in blocks.iter().zip(bounds) {
            values.insert(w.clone(), MeasureValue::Interval(lo, hi));
        }
    }
    Ok(FrequencyMeasure { depth, mode: Mode::Certified, values, scan_length: None })
}

/// Exact frequencies of the bi-infinite repetition of `pattern`.
pub fn periodic_frequencies(pattern: &Word, depth: usize) -> Result<FrequencyMeasure> {
    if pattern.is_empty() || depth == 0 {
        return Err(Error::InvalidArgument("need a nonempty pattern and positive depth".into()));
    }
    let p = pattern.len();
    let mut values = BTreeMap::new();
    for n in 1..=depth {
        let mut counts: BTreeMap<Word, usize> = BTreeMap::new();
        for i in 0..p {
            let w: Vec<u8> = (0..n).map(|k| pattern[(i + k) % p]).collect();
            *counts.entry(Word::from(w)).or_default() += 1;
        }
        for (w, c) in counts {
            values.insert(w, MeasureValue::Exact(BigRational::new(c.into(), p.into())));
        }
    }
    Ok(FrequencyMeasure { depth, mode: Mode::Exact, values, scan_length: None })
}

/// Minimum window length for empirical frequencies.
pub const MIN_EMPIRICAL_WINDOW: usize = 1 << 16;

/// Occurrence counts over a common range of start positions divided by its length.
pub fn empirical_frequencies(window: &Window, depth: usize) -> Result<FrequencyMeasure> {
    let len = window.len();
    if len < MIN_EMPIRICAL_WINDOW || depth == 0 {
        return Err(Error::InsufficientWindow { len, depth });
    }
    let scan = len - depth;
    let syms = window.symbols();
    let mut values = BTreeMap::new();
    for n in 1..=depth {
        let mut counts: BTreeMap<&[u8], usize> = BTreeMap::new();
        for i in 0..scan {
            *counts.entry(&syms[i..i + n]).or_default() += 1;
        }
        for (w, c) in counts {
            values.insert(Word::from_bytes(w), MeasureValue::Approx(c as f64 / scan as f64));
        }
    }
    Ok(FrequencyMeasure { depth, mode: Mode::Empirical, values, scan_length: Some(scan) })
}

/// The invariant measure attached to a source: exact or certified for substitutive
/// sources, exact for periodic ones, empirical over a `2·half` window otherwise.
pub fn measure_for_source(source: &SequenceSource, depth: usize, half: usize) -> Result<FrequencyMeasure> {
    match source {
        SequenceSource::ExplicitPeriodic(p) => periodic_frequencies(p, depth),
        _ => match source.substitution() {
            Some(sigma) => pf_frequencies(&sigma, depth),
            None => empirical_frequencies(&source.window(half)?, depth),
        },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShiftInvarianceReport {
    pub max_len: usize,
    pub checked: usize,
    pub pass: bool,
    pub max_defect: String,
    pub witness: Option<String>,
}

/// Checks `m(shift(C)) = m(C)` for every cylinder `[β.α]` with `|βα| <= max_len`.
pub fn shift_invariance_check(
    measure: &FrequencyMeasure,
    lang: &LanguageTable,
    max_len: usize,
    tol: f64,
) -> Result<ShiftInvarianceReport> {
    lang.require_depth(max_len + 1)?;
    if measure.depth < max_len + 1 {
        return Err(Error::MeasureDepth { depth: measure.depth, needed: max_len + 1 });
    }
    let mut checked = 0;
    let mut worst = (String::from("0"), 0.0f64);
    let mut witness = None;
    for n in 1..=max_len {
        for w in lang.words(n) {
            for p in 0..=n {
                let c = ClopenSet::cylinder(lang, &w[..p], &w[p..])?;
                for img in [c.shift(lang)?, c.unshift(lang)?] {
                    let (a, b) = (measure.of_clopen(&c)?, measure.of_clopen(&img)?);
                    checked += 1;
                    let d = a.defect(&b);
                    if d.1 > worst.1 {
                        worst = d;
                    }
                    if !a.agrees(&b, tol) && witness.is_none() {
                        witness = Some(format!("{c}"));
                    }
                }
            }
        }
    }
    Ok(ShiftInvarianceReport { max_len, checked, pass: witness.is_none(), max_defect: worst.0, witness })
}

/// `s_α p_{r(να)} s_β^*`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneratorSymbol {
    pub alpha: Word,
    pub nu: Word,
    pub beta: Word,
}

impl GeneratorSymbol {
    pub fn new(alpha: impl Into<Word>, nu: impl Into<Word>, beta: impl Into<Word>) -> Self {
        Self { alpha: alpha.into(), nu: nu.into(), beta: beta.into() }
    }
}

/// `τ(s_α p_{r(να)} s_β^*) = δ_{α,β} m(να)`.
pub fn trace_eval(g: &GeneratorSymbol, measure: &FrequencyMeasure) -> Result<MeasureValue> {
    let na = g.nu.concat(&g.alpha);
    if na.len() > measure.depth {
        return Err(Error::MeasureDepth { depth: measure.depth, needed: na.len() });
    }
    if g.alpha != g.beta {
        return Ok(MeasureValue::zero(measure.mode));
    }
    measure.value(&na)
}

/// `s_α p_A s_β^*` with `A` a vertex set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monomial {
    pub alpha: Word,
    pub set: EbarSet,
    pub beta: Word,
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s_{} p_{} s_{}*", self.alpha, self.set, self.beta)
    }
}

/// Product of two monomials by prefix contraction of `s_β^* s_μ`; `None` is zero.
pub fn multiply(space: &LabeledSpace<'_>, x: &Monomial, y: &Monomial) -> Result<Option<Monomial>> {
    let (beta, mu) = (&x.beta, &y.alpha);
    let out = if let Some(rest) = mu.strip_prefix(beta.as_bytes()) {
        // s_β^* s_μ = p_r(β) s_μ'
        let a = space.intersection(&x.set, &space.gen_vertex(beta)?)?;
        let set = space.intersection(&space.relative_range(&a, rest)?, &y.set)?;
        Monomial { alpha: x.alpha.concat(rest), set, beta: y.beta.clone() }
    } else if let Some(rest) = beta.strip_prefix(mu.as_bytes()) {
        // s_β^* s_μ = s_β'^* p_r(μ)
        let b = space.intersection(&y.set, &space.gen_vertex(mu)?)?;
        let set = space.intersection(&x.set, &space.relative_range(&b, rest)?)?;
        Monomial { alpha: x.alpha.clone(), set, beta: y.beta.concat(rest) }
    } else {
        return Ok(None);
    };
    Ok((!out.set.is_empty()).then_some(out))
}

/// `τ(s_γ p_C s_δ^*) = δ_{γ,δ} m(C ∩ r(γ))`.
pub fn trace_monomial(space: &LabeledSpace<'_>, x: &Monomial, measure: &FrequencyMeasure) -> Result<MeasureValue> {
    if x.alpha != x.beta {
        return Ok(MeasureValue::zero(measure.mode));
    }
    let c = space.intersection(&x.set, &space.gen_vertex(&x.alpha)?)?;
    measure.of_set(&c)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TracialReport {
    pub len_bound: usize,
    pub monomials: usize,
    pub checked: usize,
    /// Pairs where `XY` or `YX` is nonzero.
    pub nonzero_pairs: usize,
    pub pass: bool,
    pub witness: Option<(String, String)>,
}

/// Monomials `s_α p_{r(γ)} s_β^*` with `|α|, |β| <= len_bound`, where `γ` has length
/// `l` or `l + 1` for `l = max(|α|, |β|, 1)` and ends with both `α` and `β`.
pub fn monomial_family(space: &LabeledSpace<'_>, len_bound: usize) -> Result<Vec<Monomial>> {
    let lang = space.language();
    let words: Vec<Word> = (0..=len_bound).flat_map(|n| lang.words(n)).collect();
    let mut out = Vec::new();
    for alpha in &words {
        for beta in &words {
            let l = alpha.len().max(beta.len()).max(1);
            for m in [l, l + 1] {
                for gamma in lang.words(m) {
                    if gamma.ends_with(alpha) && gamma.ends_with(beta) {
                        out.push(Monomial { alpha: alpha.clone(), set: space.gen_vertex(&gamma)?, beta: beta.clone() });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Checks `τ(XY) = τ(YX)` for every pair drawn from [`monomial_family`].
pub fn tracial_property_check(
    space: &LabeledSpace<'_>,
    measure: &FrequencyMeasure,
    len_bound: usize,
    tol: f64,
) -> Result<TracialReport> {
    space.language().require_depth(2 * len_bound + 1)?;
    if measure.depth < 2 * len_bound + 1 {
        return Err(Error::MeasureDepth { depth: measure.depth, needed: 2 * len_bound + 1 });
    }
    let family = monomial_family(space, len_bound)?;
    let zero = MeasureValue::zero(measure.mode);
    let mut checked = 0;
    let mut nonzero_pairs = 0;
    let mut witness = None;
    for x in &family {
        for y in &family {
            let xy = multiply(space, x, y)?;
            let yx = multiply(space, y, x)?;
            checked += 1;
            if xy.is_some() || yx.is_some() {
                nonzero_pairs += 1;
            }
            let a = match &xy {
                Some(p) => trace_monomial(space, p, measure)?,
                None => zero.clone(),
            };
            let b = match &yx {
                Some(p) => trace_monomial(space, p, measure)?,
                None => zero.clone(),
            };
            if !a.agrees(&b, tol) && witness.is_none() {
                witness = Some((x.to_string(), y.to_string()));
            }
        }
    }
    Ok(TracialReport {
        len_bound,
        monomials: family.len(),
        checked,
        nonzero_pairs,
        pass: witness.is_none(),
        witness,
    })
}
