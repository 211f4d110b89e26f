//! Deterministic generators for two-sided windows of subshift points.
//!
//! A [`Window`] of half-width `N` holds the symbols `ω_{-N} … ω_{N-1}`; the dot sits
//! between index `-1` and index `0`, so the window prints as `ω_{-N}…ω_{-1}.ω_0…ω_{N-1}`.
//! Three kinds of sources are supported: fixed points of substitutions (from an explicit
//! seed pair `b.a`), generalized Morse sequences built with the Keane block product, and
//! periodic controls.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::word::{Alphabet, Word};

fn check_binary(w: &Word) -> Result<()> {
    if w.iter().all(|&s| s == b'0' || s == b'1') {
        Ok(())
    } else {
        Err(Error::UnsupportedAlphabet(w.clone()))
    }
}

/// Bitwise complement of a binary word.
pub fn mirror(b: &Word) -> Result<Word> {
    check_binary(b)?;
    Ok(b.iter().map(|&s| if s == b'0' { b'1' } else { b'0' }).collect::<Vec<_>>().into())
}

/// The Keane product `b × c`: one copy of `b` for every letter of `c`, mirrored where the
/// letter is `1`.
pub fn keane_product(b: &Word, c: &Word) -> Result<Word> {
    if b.is_empty() || c.is_empty() {
        return Err(Error::InvalidArgument("Keane product of an empty word".into()));
    }
    check_binary(c)?;
    let tilde = mirror(b)?;
    let mut out = Vec::with_capacity(b.len() * c.len());
    for &ci in c.iter() {
        out.extend_from_slice(if ci == b'0' { b } else { &tilde });
    }
    Ok(out.into())
}

/// Block data `b⁰, b¹, …` of a generalized Morse sequence `x = b⁰ × b¹ × ⋯`.
///
/// The list is either finite or, with `cycle`, repeated periodically forever.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorseSpec {
    blocks: Vec<Word>,
    cycle: bool,
}

impl MorseSpec {
    pub fn new(blocks: Vec<Word>, cycle: bool) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidArgument("Morse spec needs at least one block".into()));
        }
        for b in &blocks {
            check_binary(b)?;
            if b.len() < 2 || b[0] != b'0' {
                return Err(Error::InvalidArgument(format!(
                    "Morse block {b} must have length >= 2 and start with 0"
                )));
            }
        }
        Ok(Self { blocks, cycle })
    }

    /// Every block equal to `01`.
    pub fn thue_morse() -> Self {
        Self { blocks: vec![Word::from("01")], cycle: true }
    }

    pub fn blocks(&self) -> &[Word] {
        &self.blocks
    }

    pub fn is_cyclic(&self) -> bool {
        self.cycle
    }

    pub fn block(&self, i: usize) -> Option<&Word> {
        if self.cycle {
            Some(&self.blocks[i % self.blocks.len()])
        } else {
            self.blocks.get(i)
        }
    }

    /// The first `n` letters of the one-sided product `x`.
    pub fn one_sided_prefix(&self, n: usize) -> Result<Word> {
        let mut x = self.blocks[0].clone();
        let mut i = 1;
        while x.len() < n {
            let b = self.block(i).ok_or(Error::NeedsMoreBlocks { covered: x.len(), needed: n })?;
            x = keane_product(&x, b)?;
            i += 1;
        }
        Ok(x.slice(0, n))
    }

    /// A constant block sequence `b, b, …` is the fixed point of `0 ↦ b, 1 ↦ b̃`.
    pub fn as_substitution(&self) -> Option<Substitution> {
        if !self.cycle || self.blocks.iter().any(|b| b != &self.blocks[0]) {
            return None;
        }
        let b = self.blocks[0].clone();
        let tilde = mirror(&b).ok()?;
        Substitution::new(Alphabet::binary(), vec![(b'0', b), (b'1', tilde)]).ok()
    }
}

/// Symbols `ω_{-N} … ω_{N-1}` of a two-sided sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Window {
    half: usize,
    symbols: Vec<u8>,
}

impl Window {
    /// Builds a window from its left half (indices `-N..-1`) and right half (`0..N-1`).
    pub fn from_halves(left: &[u8], right: &[u8]) -> Result<Self> {
        if left.len() != right.len() {
            return Err(Error::InvalidArgument(format!(
                "window halves differ in length ({} vs {})",
                left.len(),
                right.len()
            )));
        }
        let mut symbols = left.to_vec();
        symbols.extend_from_slice(right);
        Ok(Self { half: right.len(), symbols })
    }

    pub fn half(&self) -> usize {
        self.half
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn left(&self) -> &[u8] {
        &self.symbols[..self.half]
    }

    pub fn right(&self) -> &[u8] {
        &self.symbols[self.half..]
    }

    /// Lowest index covered, `-N`.
    pub fn start(&self) -> i64 {
        -(self.half as i64)
    }

    /// `ω_i` for `-N <= i < N`.
    pub fn at(&self, i: i64) -> u8 {
        self.symbols[(i + self.half as i64) as usize]
    }

    /// The sub-window on `[-n, n)`.
    pub fn restrict(&self, n: usize) -> Window {
        assert!(n <= self.half, "cannot restrict a window of half-width {} to {n}", self.half);
        Window { half: n, symbols: self.symbols[self.half - n..self.half + n].to_vec() }
    }

    /// Smallest `p <= len/2` such that the window is `p`-periodic, if any.
    pub fn smallest_period(&self) -> Option<usize> {
        let s = &self.symbols;
        (1..=s.len() / 2).find(|&p| (0..s.len() - p).all(|i| s[i] == s[i + p]))
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}.{}",
            String::from_utf8_lossy(self.left()),
            String::from_utf8_lossy(self.right())
        )
    }
}

impl FromStr for Window {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (l, r) = s
            .trim()
            .split_once('.')
            .ok_or_else(|| Error::Parse(format!("window {s:?} has no dot marker")))?;
        Window::from_halves(l.as_bytes(), r.as_bytes())
    }
}

/// The two-sided Morse point `x⁻¹.x` on `[-N, N)`: `ω_i = x_i` and `ω_{-1-i} = x_i`.
pub fn morse_window(spec: &MorseSpec, n: usize) -> Result<Window> {
    if n == 0 {
        return Err(Error::InvalidArgument("window half-width must be positive".into()));
    }
    let x = spec.one_sided_prefix(n)?;
    let left: Vec<u8> = x.iter().rev().copied().collect();
    Window::from_halves(&left, &x)
}

/// A substitution `σ: A → A⁺`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Substitution {
    alphabet: Alphabet,
    rules: BTreeMap<u8, Word>,
}

impl Substitution {
    pub fn new(alphabet: Alphabet, rules: Vec<(u8, Word)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (a, img) in rules {
            alphabet.check(&[a])?;
            alphabet.check(&img)?;
            if img.is_empty() {
                return Err(Error::InvalidArgument(format!("image of {} is empty", a as char)));
            }
            if map.insert(a, img).is_some() {
                return Err(Error::InvalidArgument(format!("duplicate rule for {}", a as char)));
            }
        }
        if let Some(&a) = alphabet.symbols().iter().find(|a| !map.contains_key(a)) {
            return Err(Error::InvalidArgument(format!("no rule for symbol {}", a as char)));
        }
        Ok(Self { alphabet, rules: map })
    }

    /// Parses rules written as `0:01, 1:10` (or `0->01`). The alphabet is the list of
    /// left-hand sides in order of appearance.
    pub fn parse(text: &str) -> Result<Self> {
        let mut syms = Vec::new();
        let mut rules = Vec::new();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (lhs, rhs) = part
                .split_once("->")
                .or_else(|| part.split_once(':'))
                .ok_or_else(|| Error::Parse(format!("rule {part:?} needs ':' or '->'")))?;
            let lhs = lhs.trim().as_bytes();
            if lhs.len() != 1 {
                return Err(Error::Parse(format!("rule {part:?} must map a single symbol")));
            }
            syms.push(lhs[0]);
            rules.push((lhs[0], rhs.trim().parse::<Word>()?));
        }
        Substitution::new(Alphabet::new(&syms)?, rules)
    }

    /// `0 ↦ 01, 1 ↦ 10`.
    pub fn thue_morse() -> Self {
        Self::parse("0:01,1:10").expect("static rules")
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn image(&self, a: u8) -> &Word {
        &self.rules[&a]
    }

    pub fn rules(&self) -> impl Iterator<Item = (u8, &Word)> {
        self.rules.iter().map(|(a, w)| (*a, w))
    }

    /// Letterwise image of a word.
    pub fn apply(&self, w: &[u8]) -> Word {
        let mut out = Vec::new();
        for a in w {
            out.extend_from_slice(&self.rules[a]);
        }
        out.into()
    }

    /// `σ^k(a)`, with `σ⁰(a) = a`.
    pub fn iterate(&self, a: u8, k: usize) -> Word {
        let mut w = Word::from_bytes(&[a]);
        for _ in 0..k {
            w = self.apply(&w);
        }
        w
    }

    /// The substitution `σ^p`.
    pub fn power(&self, p: usize) -> Substitution {
        let rules = self.rules.keys().map(|&a| (a, self.iterate(a, p))).collect();
        Substitution { alphabet: self.alphabet.clone(), rules }
    }

    /// Incidence counts: `m[i][j]` is the number of occurrences of symbol `j` in `σ(i)`,
    /// indices following the alphabet order.
    pub fn incidence(&self) -> Vec<Vec<u64>> {
        let syms = self.alphabet.symbols();
        syms.iter()
            .map(|a| {
                let img = &self.rules[a];
                syms.iter().map(|b| img.iter().filter(|c| *c == b).count() as u64).collect()
            })
            .collect()
    }

    fn image_lengths(&self, k: usize) -> Vec<u64> {
        let m = self.incidence();
        let mut len = vec![1u64; m.len()];
        for _ in 0..k {
            len = m
                .iter()
                .map(|row| row.iter().zip(&len).fold(0u64, |s, (c, l)| s.saturating_add(c.saturating_mul(*l))))
                .collect();
        }
        len
    }

    /// Legal words of length `n`: factors of some `σ^k(a)`, `k >= 1`.
    pub fn legal_words(&self, n: usize) -> Result<BTreeSet<Word>> {
        let mut out = BTreeSet::new();
        if n == 0 {
            out.insert(Word::empty());
            return Ok(out);
        }
        if n == 1 {
            for img in self.rules.values() {
                for &s in img.iter() {
                    out.insert(Word::from_bytes(&[s]));
                }
            }
            return Ok(out);
        }
        // two-letter words: closure of the 2-factors of σ(a) under taking 2-factors of σ(xy)
        let mut two: BTreeSet<Word> = BTreeSet::new();
        for img in self.rules.values() {
            for f in img.windows(2) {
                two.insert(Word::from_bytes(f));
            }
        }
        loop {
            let mut next = two.clone();
            for w in &two {
                for f in self.apply(w).windows(2) {
                    next.insert(Word::from_bytes(f));
                }
            }
            if next.len() == two.len() {
                break;
            }
            two = next;
        }
        // k with every |σ^k(a)| >= n - 1
        let mut k = 1;
        loop {
            if self.image_lengths(k).iter().all(|&l| l >= (n - 1) as u64) {
                break;
            }
            k += 1;
            if k > 64 {
                return Err(Error::InvalidArgument(
                    "substitution does not grow every symbol; language is not computable this way"
                        .into(),
                ));
            }
        }
        for w in &two {
            let img = self.power(k).apply(w);
            for f in img.windows(n) {
                out.insert(Word::from_bytes(f));
            }
        }
        for j in 1..=k {
            for &a in self.rules.keys() {
                for f in self.iterate(a, j).windows(n) {
                    out.insert(Word::from_bytes(f));
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.rules.iter().map(|(a, w)| format!("{}:{}", *a as char, w)).collect();
        f.write_str(&parts.join(","))
    }
}

/// Smallest `k <= kmax` such that every symbol occurs in every `σ^k(a)`.
pub fn primitivity_witness(sigma: &Substitution, kmax: usize) -> Option<usize> {
    let one: Vec<Vec<bool>> =
        sigma.incidence().iter().map(|r| r.iter().map(|&c| c > 0).collect()).collect();
    let n = one.len();
    let mut reach = one.clone();
    for k in 1..=kmax {
        if reach.iter().all(|r| r.iter().all(|&x| x)) {
            return Some(k);
        }
        // letters of σ^{k+1}(a) are the letters of σ^k(b) for b in σ(a)
        reach = (0..n)
            .map(|a| (0..n).map(|c| (0..n).any(|b| one[a][b] && reach[b][c])).collect())
            .collect();
    }
    None
}

/// Window of the two-sided fixed point of `σ^power` grown from the seed `b.a`.
pub fn fixed_point_window(sigma: &Substitution, seed: (u8, u8), power: usize, n: usize) -> Result<Window> {
    let (b, a) = seed;
    sigma.alphabet().check(&[b, a])?;
    if power == 0 || n == 0 {
        return Err(Error::InvalidArgument("power and half-width must be positive".into()));
    }
    let tau = sigma.power(power);
    if tau.image(a)[0] != a {
        return Err(Error::InvalidSeed(format!(
            "σ^{power}({}) = {} does not start with {}",
            a as char,
            tau.image(a),
            a as char
        )));
    }
    if *tau.image(b).last().expect("nonempty image") != b {
        return Err(Error::InvalidSeed(format!(
            "σ^{power}({}) = {} does not end with {}",
            b as char,
            tau.image(b),
            b as char
        )));
    }
    if !sigma.legal_words(2)?.contains(&[b, a][..]) {
        return Err(Error::InvalidSeed(format!(
            "{}{} is not a legal word of the substitution",
            b as char, a as char
        )));
    }
    let mut right = Word::from_bytes(&[a]);
    while right.len() < n {
        let next = tau.apply(&right);
        if next.len() == right.len() {
            return Err(Error::InvalidSeed(format!("σ^{power} does not grow {}", a as char)));
        }
        right = if next.len() > n { next.slice(0, n) } else { next };
    }
    let mut left = Word::from_bytes(&[b]);
    while left.len() < n {
        let next = tau.apply(&left);
        if next.len() == left.len() {
            return Err(Error::InvalidSeed(format!("σ^{power} does not grow {}", b as char)));
        }
        left = if next.len() > n { next.slice(next.len() - n, next.len()) } else { next };
    }
    Window::from_halves(&left[left.len() - n..], &right[..n])
}

/// `ω_i = pattern_{i mod |pattern|}` on `[-N, N)`.
pub fn periodic_window(pattern: &Word, n: usize) -> Result<Window> {
    if pattern.is_empty() {
        return Err(Error::InvalidArgument("periodic pattern must be nonempty".into()));
    }
    let p = pattern.len() as i64;
    let symbols: Vec<u8> =
        (-(n as i64)..n as i64).map(|i| pattern[i.rem_euclid(p) as usize]).collect();
    Window::from_halves(&symbols[..n], &symbols[n..])
}

/// A deterministic two-sided sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SequenceSource {
    SubstitutionFixedPoint { sigma: Substitution, seed: (u8, u8), power: usize },
    MorseProduct(MorseSpec),
    ExplicitPeriodic(Word),
}

impl SequenceSource {
    /// Thue–Morse as the fixed point of `σ²` with seed `1.0`.
    pub fn thue_morse() -> Self {
        SequenceSource::SubstitutionFixedPoint {
            sigma: Substitution::thue_morse(),
            seed: (b'1', b'0'),
            power: 2,
        }
    }

    pub fn window(&self, n: usize) -> Result<Window> {
        match self {
            SequenceSource::SubstitutionFixedPoint { sigma, seed, power } => {
                fixed_point_window(sigma, *seed, *power, n)
            }
            SequenceSource::MorseProduct(spec) => morse_window(spec, n),
            SequenceSource::ExplicitPeriodic(p) => periodic_window(p, n),
        }
    }

    /// The substitution whose fixed point generates this source, if there is one.
    pub fn substitution(&self) -> Option<Substitution> {
        match self {
            SequenceSource::SubstitutionFixedPoint { sigma, .. } => Some(sigma.clone()),
            SequenceSource::MorseProduct(spec) => spec.as_substitution(),
            SequenceSource::ExplicitPeriodic(_) => None,
        }
    }
}
