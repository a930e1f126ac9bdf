//! Words over `{0..q-1}`, per-level word sets, length profiles and their
//! exact Kraft sums, prefix/suffix/bifix shadows and freeness predicates.

use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use num::{BigInt, BigRational, One, Zero};

use crate::error::{Error, Result};

/// Exact rational number used for every Kraft computation.
pub type Rational = BigRational;

/// Largest alphabet that has a one-character digit representation.
pub const MAX_Q: u32 = 36;

/// Default cap on the number of cells (`q^l`) of one level of a [`LevelSet`].
pub const DEFAULT_CELL_CAP: u64 = 1 << 26;

pub(crate) fn check_q(q: u32) -> Result<()> {
    if (2..=MAX_Q).contains(&q) {
        Ok(())
    } else {
        Err(Error::InvalidAlphabet(q))
    }
}

/// `q^e` if it fits in a `u64`.
pub fn checked_pow(q: u32, e: usize) -> Option<u64> {
    let e = u32::try_from(e).ok()?;
    (q as u64).checked_pow(e)
}

/// Number of words of length `l`, refusing levels above the cell cap.
pub(crate) fn cells(q: u32, l: usize) -> Result<usize> {
    match checked_pow(q, l) {
        Some(c) if c <= DEFAULT_CELL_CAP => Ok(c as usize),
        _ => Err(Error::LevelTooLarge { q, level: l }),
    }
}

pub(crate) fn upow(q: u32, e: usize) -> u64 {
    checked_pow(q, e).expect("power overflow")
}

/// `a / b` as an exact rational.
pub fn ratio(a: u64, b: u64) -> Rational {
    Rational::new(BigInt::from(a), BigInt::from(b))
}

/// `q^{-l}` exactly.
pub fn inv_pow(q: u32, l: usize) -> Rational {
    Rational::new(BigInt::one(), num::pow(BigInt::from(q), l))
}

/// Formats a rational as `a/b`, always with the denominator.
pub fn fmt_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `a/b`, an integer, or a finite decimal such as `0.3`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    if let Some((a, b)) = s.split_once('/') {
        let a = BigInt::from_str(a.trim()).map_err(|_| bad())?;
        let b = BigInt::from_str(b.trim()).map_err(|_| bad())?;
        if b.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(a, b));
    }
    if let Some((i, f)) = s.split_once('.') {
        if f.is_empty() || !f.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let whole = format!("{}{}", i, f);
        let n = BigInt::from_str(&whole).map_err(|_| bad())?;
        return Ok(Rational::new(n, num::pow(BigInt::from(10), f.len())));
    }
    let n = BigInt::from_str(s).map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

fn digit_char(d: u8) -> char {
    char::from_digit(d as u32, MAX_Q).expect("digit below 36")
}

/// A word of length `len` over `{0..q-1}`, stored by its base-q value.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Word {
    pub q: u32,
    pub len: usize,
    pub val: u64,
}

impl Word {
    pub fn new(q: u32, len: usize, val: u64) -> Result<Self> {
        check_q(q)?;
        let size = checked_pow(q, len)
            .ok_or_else(|| Error::InvalidWord(format!("length {len} overflows for q={q}")))?;
        if val >= size {
            return Err(Error::InvalidWord(format!(
                "value {val} out of range for length {len}"
            )));
        }
        Ok(Word { q, len, val })
    }

    /// The empty word.
    pub fn empty(q: u32) -> Self {
        Word { q, len: 0, val: 0 }
    }

    pub fn from_digits(q: u32, digits: &[u8]) -> Result<Self> {
        check_q(q)?;
        let mut val: u64 = 0;
        for &d in digits {
            if d as u32 >= q {
                return Err(Error::InvalidWord(format!("digit {d} not below q={q}")));
            }
            val = val
                .checked_mul(q as u64)
                .and_then(|v| v.checked_add(d as u64))
                .ok_or_else(|| Error::InvalidWord("word too long".into()))?;
        }
        Ok(Word {
            q,
            len: digits.len(),
            val,
        })
    }

    /// Parses a digit string such as `"0110"`.
    pub fn parse(q: u32, s: &str) -> Result<Self> {
        let mut digits = Vec::with_capacity(s.len());
        for c in s.chars() {
            let d = c
                .to_digit(MAX_Q)
                .ok_or_else(|| Error::InvalidWord(format!("bad character {c:?} in {s:?}")))?;
            digits.push(d as u8);
        }
        Self::from_digits(q, &digits)
    }

    /// Digits, most significant first.
    pub fn digits(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.len];
        let mut v = self.val;
        for slot in out.iter_mut().rev() {
            *slot = (v % self.q as u64) as u8;
            v /= self.q as u64;
        }
        out
    }

    pub fn num(&self) -> u64 {
        self.val
    }

    pub fn concat(&self, other: &Word) -> Result<Word> {
        let shift = checked_pow(self.q, other.len)
            .ok_or_else(|| Error::InvalidWord("word too long".into()))?;
        let val = self
            .val
            .checked_mul(shift)
            .and_then(|v| v.checked_add(other.val))
            .ok_or_else(|| Error::InvalidWord("word too long".into()))?;
        Ok(Word {
            q: self.q,
            len: self.len + other.len,
            val,
        })
    }

    /// True if `self` is a prefix of `other` (equality included).
    pub fn is_prefix_of(&self, other: &Word) -> bool {
        self.len <= other.len && other.val / upow(self.q, other.len - self.len) == self.val
    }

    /// True if `self` is a suffix of `other` (equality included).
    pub fn is_suffix_of(&self, other: &Word) -> bool {
        self.len <= other.len && other.val % upow(self.q, self.len) == self.val
    }

    pub fn reversed(&self) -> Word {
        let mut d = self.digits();
        d.reverse();
        Word::from_digits(self.q, &d).expect("same length")
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in self.digits() {
            write!(f, "{}", digit_char(d))?;
        }
        Ok(())
    }
}

/// Base-q value of a word; a bijection from `A^l` onto `0..q^l`.
pub fn num(w: &Word) -> u64 {
    w.val
}

/// Prefix, suffix or both (fix / bifix).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Mode {
    Prefix,
    Suffix,
    Fix,
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "prefix" => Ok(Mode::Prefix),
            "suffix" => Ok(Mode::Suffix),
            "fix" | "bifix" => Ok(Mode::Fix),
            _ => Err(Error::Parse(format!("unknown mode {s:?}"))),
        }
    }
}

/// Codeword counts `alpha_1..alpha_N` over an alphabet of size `q`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Profile {
    q: u32,
    counts: Vec<u64>,
}

impl Profile {
    /// `counts[0]` is the number of words of length 1. Trailing zeros are dropped.
    pub fn new(q: u32, counts: Vec<u64>) -> Result<Self> {
        check_q(q)?;
        let mut counts = counts;
        while counts.last() == Some(&0) {
            counts.pop();
        }
        Ok(Profile { q, counts })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// `alpha_l` for `l >= 1`; zero beyond the last populated level.
    pub fn alpha(&self, l: usize) -> u64 {
        if l == 0 {
            0
        } else {
            self.counts.get(l - 1).copied().unwrap_or(0)
        }
    }

    /// Largest populated level, 0 for the empty profile.
    pub fn max_level(&self) -> usize {
        self.counts.len()
    }

    /// Smallest populated level, `None` for the empty profile.
    pub fn min_level(&self) -> Option<usize> {
        self.counts.iter().position(|&c| c > 0).map(|i| i + 1)
    }

    pub fn populated_levels(&self) -> Vec<usize> {
        (1..=self.max_level())
            .filter(|&l| self.alpha(l) > 0)
            .collect()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn kraft_sum(&self) -> Rational {
        let mut s = Rational::zero();
        for (i, &c) in self.counts.iter().enumerate() {
            if c > 0 {
                s += Rational::from_integer(BigInt::from(c)) * inv_pow(self.q, i + 1);
            }
        }
        s
    }

    /// Copy with `alpha_l` replaced.
    pub fn with_alpha(&self, l: usize, value: u64) -> Profile {
        assert!(l >= 1);
        let mut counts = self.counts.clone();
        if counts.len() < l {
            counts.resize(l, 0);
        }
        counts[l - 1] = value;
        Profile::new(self.q, counts).expect("q already validated")
    }

    /// Copy restricted to levels `1..=n`.
    pub fn truncated(&self, n: usize) -> Profile {
        let counts = self.counts.iter().take(n).copied().collect();
        Profile::new(self.q, counts).expect("q already validated")
    }

    /// Parses `q=<int> alpha=<c1>,<c2>,...`.
    pub fn parse(s: &str) -> Result<Profile> {
        let mut q = None;
        let mut alpha = None;
        for tok in s.split_whitespace() {
            if let Some(v) = tok.strip_prefix("q=") {
                q = Some(
                    v.parse::<u32>()
                        .map_err(|_| Error::Parse(format!("bad q in {tok:?}")))?,
                );
            } else if let Some(v) = tok.strip_prefix("alpha=") {
                let mut counts = Vec::new();
                if !v.is_empty() {
                    for part in v.split(',') {
                        counts.push(
                            part.trim()
                                .parse::<u64>()
                                .map_err(|_| Error::Parse(format!("bad count {part:?}")))?,
                        );
                    }
                }
                alpha = Some(counts);
            } else {
                return Err(Error::Parse(format!("unexpected token {tok:?}")));
            }
        }
        let q = q.ok_or_else(|| Error::Parse("missing q=".into()))?;
        let alpha = alpha.ok_or_else(|| Error::Parse("missing alpha=".into()))?;
        Profile::new(q, alpha)
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.counts.iter().map(|c| c.to_string()).collect();
        write!(f, "q={} alpha={}", self.q, parts.join(","))
    }
}

/// A finite set of nonempty words stored as one bitset per level.
#[derive(Clone, Debug)]
pub struct LevelSet {
    q: u32,
    /// `levels[l - 1]` has `q^l` bits.
    levels: Vec<FixedBitSet>,
}

impl PartialEq for LevelSet {
    fn eq(&self, other: &Self) -> bool {
        if self.q != other.q {
            return false;
        }
        let top = self.max_level().max(other.max_level());
        (1..=top).all(|l| match (self.level_bits(l), other.level_bits(l)) {
            (Some(a), Some(b)) => a == b,
            (Some(a), None) | (None, Some(a)) => a.count_ones(..) == 0,
            (None, None) => true,
        })
    }
}

impl Eq for LevelSet {}

impl LevelSet {
    pub fn new(q: u32) -> Result<Self> {
        check_q(q)?;
        Ok(LevelSet { q, levels: vec![] })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Allocates storage up to level `l`.
    pub fn ensure_level(&mut self, l: usize) -> Result<()> {
        while self.levels.len() < l {
            let c = cells(self.q, self.levels.len() + 1)?;
            self.levels.push(FixedBitSet::with_capacity(c));
        }
        Ok(())
    }

    pub fn from_words<'a, I: IntoIterator<Item = &'a Word>>(q: u32, words: I) -> Result<Self> {
        let mut s = LevelSet::new(q)?;
        for w in words {
            s.insert(w)?;
        }
        Ok(s)
    }

    /// Builds a set from digit strings.
    pub fn parse_words(q: u32, words: &[&str]) -> Result<Self> {
        let mut s = LevelSet::new(q)?;
        for w in words {
            s.insert(&Word::parse(q, w)?)?;
        }
        Ok(s)
    }

    pub fn insert(&mut self, w: &Word) -> Result<bool> {
        if w.q != self.q {
            return Err(Error::InvalidWord(format!("alphabet mismatch for {w}")));
        }
        if w.len == 0 {
            return Err(Error::InvalidWord("empty word".into()));
        }
        self.insert_num(w.len, w.val)
    }

    /// Inserts the word of length `l` with value `v`; returns true if new.
    pub fn insert_num(&mut self, l: usize, v: u64) -> Result<bool> {
        if l == 0 {
            return Err(Error::InvalidWord("empty word".into()));
        }
        self.ensure_level(l)?;
        let bits = &mut self.levels[l - 1];
        if v as usize >= bits.len() {
            return Err(Error::InvalidWord(format!("value {v} too large for level {l}")));
        }
        Ok(!bits.put(v as usize))
    }

    pub fn remove_num(&mut self, l: usize, v: u64) -> bool {
        match self.levels.get_mut(l.wrapping_sub(1)) {
            Some(bits) if (v as usize) < bits.len() && bits[v as usize] => {
                bits.set(v as usize, false);
                true
            }
            _ => false,
        }
    }

    pub fn contains(&self, w: &Word) -> bool {
        w.q == self.q && self.contains_num(w.len, w.val)
    }

    pub fn contains_num(&self, l: usize, v: u64) -> bool {
        match self.level_bits(l) {
            Some(bits) => (v as usize) < bits.len() && bits[v as usize],
            None => false,
        }
    }

    pub fn level_bits(&self, l: usize) -> Option<&FixedBitSet> {
        if l == 0 {
            None
        } else {
            self.levels.get(l - 1)
        }
    }

    /// Number of words of length `l`.
    pub fn count(&self, l: usize) -> usize {
        self.level_bits(l).map_or(0, |b| b.count_ones(..))
    }

    /// Values of the words of length `l`, ascending.
    pub fn level_nums(&self, l: usize) -> Vec<u64> {
        self.level_bits(l)
            .map(|b| b.ones().map(|v| v as u64).collect())
            .unwrap_or_default()
    }

    /// Largest populated level, 0 when empty.
    pub fn max_level(&self) -> usize {
        (1..=self.levels.len())
            .rev()
            .find(|&l| self.count(l) > 0)
            .unwrap_or(0)
    }

    pub fn min_level(&self) -> Option<usize> {
        (1..=self.levels.len()).find(|&l| self.count(l) > 0)
    }

    pub fn len(&self) -> usize {
        (1..=self.levels.len()).map(|l| self.count(l)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All words ordered by length, then by value.
    pub fn words(&self) -> Vec<Word> {
        let mut out = Vec::new();
        for l in 1..=self.levels.len() {
            for v in self.levels[l - 1].ones() {
                out.push(Word {
                    q: self.q,
                    len: l,
                    val: v as u64,
                });
            }
        }
        out
    }

    pub fn profile(&self) -> Profile {
        let counts = (1..=self.max_level()).map(|l| self.count(l) as u64).collect();
        Profile::new(self.q, counts).expect("q already validated")
    }

    pub fn kraft_sum(&self) -> Rational {
        self.profile().kraft_sum()
    }

    pub fn union_with(&mut self, other: &LevelSet) -> Result<()> {
        if other.q != self.q {
            return Err(Error::InvalidWord("alphabet mismatch".into()));
        }
        self.ensure_level(other.levels.len())?;
        for (a, b) in self.levels.iter_mut().zip(other.levels.iter()) {
            a.union_with(b);
        }
        Ok(())
    }

    pub fn is_disjoint(&self, other: &LevelSet) -> bool {
        self.levels
            .iter()
            .zip(other.levels.iter())
            .all(|(a, b)| a.is_disjoint(b))
    }

    /// Code text form: a `q=<int>` header, then one word per line.
    pub fn to_code_text(&self) -> String {
        let mut s = format!("q={}\n", self.q);
        for w in self.words() {
            s.push_str(&w.to_string());
            s.push('\n');
        }
        s
    }

    pub fn parse_code_text(text: &str) -> Result<LevelSet> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty code text".into()))?;
        let q = header
            .strip_prefix("q=")
            .and_then(|v| v.trim().parse::<u32>().ok())
            .ok_or_else(|| Error::Parse(format!("bad header {header:?}")))?;
        let mut set = LevelSet::new(q)?;
        for line in lines {
            if !set.insert(&Word::parse(q, line)?)? {
                return Err(Error::Parse(format!("duplicate word {line}")));
            }
        }
        Ok(set)
    }
}

/// Kraft sum of a profile or of a word set.
pub trait KraftSum {
    fn kraft_sum(&self) -> Rational;
}

impl KraftSum for Profile {
    fn kraft_sum(&self) -> Rational {
        Profile::kraft_sum(self)
    }
}

impl KraftSum for LevelSet {
    fn kraft_sum(&self) -> Rational {
        LevelSet::kraft_sum(self)
    }
}

pub fn kraft_sum<T: KraftSum + ?Sized>(x: &T) -> Rational {
    x.kraft_sum()
}

/// Words of length `n` having a prefix (suffix, either) in `c`.
///
/// Words of `c` longer than `n` contribute nothing.
pub fn shadow(c: &LevelSet, n: usize, mode: Mode) -> Result<FixedBitSet> {
    let q = c.q();
    let size = cells(q, n)?;
    let mut out = FixedBitSet::with_capacity(size);
    for l in 1..=n.min(c.max_level()) {
        let span = upow(q, n - l) as usize;
        let step = upow(q, l) as usize;
        for x in c.level_bits(l).into_iter().flat_map(|b| b.ones()) {
            if mode != Mode::Suffix {
                out.insert_range(x * span..(x + 1) * span);
            }
            if mode != Mode::Prefix {
                for t in 0..span {
                    out.insert(t * step + x);
                }
            }
        }
    }
    Ok(out)
}

/// True when no word of `c` is a proper prefix (suffix, either) of another.
pub fn is_free(c: &LevelSet, mode: Mode) -> bool {
    let q = c.q();
    let top = c.max_level();
    let populated: Vec<usize> = (1..=top).filter(|&k| c.count(k) > 0).collect();
    let pw: Vec<u64> = (0..=top).map(|e| upow(q, e)).collect();
    for l in 2..=top {
        for x in c.level_nums(l) {
            for &k in populated.iter().take_while(|&&k| k < l) {
                if mode != Mode::Suffix && c.contains_num(k, x / pw[l - k]) {
                    return false;
                }
                if mode != Mode::Prefix && c.contains_num(k, x % pw[k]) {
                    return false;
                }
            }
        }
    }
    true
}

/// True when `c` has exactly `alpha_l` words of every length `l`.
pub fn fits(c: &LevelSet, p: &Profile) -> bool {
    c.q() == p.q() && c.profile() == *p
}

/// Number of words `z` of length `n` with prefix `x` and suffix `y`.
pub fn overlap_count(x: &Word, y: &Word, n: usize) -> u128 {
    let q = x.q;
    if n < x.len || n < y.len {
        return 0;
    }
    if n >= x.len + y.len {
        return (q as u128).pow((n - x.len - y.len) as u32);
    }
    let o = x.len + y.len - n;
    let tail = x.val % upow(q, o);
    let head = y.val / upow(q, y.len - o);
    u128::from(tail == head)
}

/// Incremental bifix shadow of a code that only grows at the current level
/// or above, used by the level-by-level builders.
#[derive(Clone, Debug)]
pub struct ShadowTracker {
    q: u32,
    n: usize,
    pre: FixedBitSet,
    suf: FixedBitSet,
}

impl ShadowTracker {
    /// Tracker positioned at level `n` for the words of `c` (all of length `<= n`).
    pub fn new(c: &LevelSet, n: usize) -> Result<Self> {
        if c.max_level() > n {
            return Err(Error::Internal("code has words above tracker level".into()));
        }
        Ok(ShadowTracker {
            q: c.q(),
            n,
            pre: shadow(c, n, Mode::Prefix)?,
            suf: shadow(c, n, Mode::Suffix)?,
        })
    }

    pub fn level(&self) -> usize {
        self.n
    }

    /// True if `v` at the current level can join the code.
    pub fn is_free(&self, v: u64) -> bool {
        !self.pre[v as usize] && !self.suf[v as usize]
    }

    pub fn prefix_hit(&self, v: u64) -> bool {
        self.pre[v as usize]
    }

    pub fn suffix_hit(&self, v: u64) -> bool {
        self.suf[v as usize]
    }

    /// Marks the word `v` of the current level as a codeword.
    pub fn add(&mut self, v: u64) {
        self.pre.insert(v as usize);
        self.suf.insert(v as usize);
    }

    /// Number of words of the current level outside the bifix shadow.
    pub fn free_count(&self) -> usize {
        let mut u = self.pre.clone();
        u.union_with(&self.suf);
        u.len() - u.count_ones(..)
    }

    /// Values of the current level outside the bifix shadow, ascending.
    pub fn free_words(&self) -> Vec<u64> {
        let mut u = self.pre.clone();
        u.union_with(&self.suf);
        u.toggle_range(..);
        u.ones().map(|v| v as u64).collect()
    }

    /// Moves to level `n + 1`.
    pub fn advance(&mut self) -> Result<()> {
        let q = self.q as usize;
        let size = cells(self.q, self.n + 1)?;
        let old = upow(self.q, self.n) as usize;
        let mut pre = FixedBitSet::with_capacity(size);
        let mut suf = FixedBitSet::with_capacity(size);
        for v in self.pre.ones() {
            pre.insert_range(v * q..(v + 1) * q);
        }
        for v in self.suf.ones() {
            for a in 0..q {
                suf.insert(a * old + v);
            }
        }
        self.pre = pre;
        self.suf = suf;
        self.n += 1;
        Ok(())
    }
}

/// All words of length `l` over `{0..q-1}`, ascending.
pub fn all_words(q: u32, l: usize) -> impl Iterator<Item = Word> {
    let size = upow(q, l);
    (0..size).map(move |val| Word { q, len: l, val })
}
