//! pi-systems: fix-free sets of Kraft sum `k/q` split into `k` blocks whose
//! prefix and suffix shadows each cover a `1/q` share of the top level.
//! Any such system extends to a fix-free code for every profile that agrees
//! with it below the top level and has Kraft sum at most `gamma(q, k)`.

use std::collections::BTreeSet;
use std::fmt;

use num::{BigInt, One};

use crate::debruijn::{k_regular_subgraph, one_factor_decomposition};
use crate::error::{Error, Result};
use crate::words::{
    check_q, fmt_rational, is_free, ratio, shadow, upow, LevelSet, Mode, Profile, Rational,
    ShadowTracker, Word,
};

/// A code together with an ordered partition into `k` blocks.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PiSystem {
    pub q: u32,
    pub k: usize,
    /// Top level: every word has length at most `n`.
    pub n: usize,
    pub blocks: Vec<LevelSet>,
}

impl PiSystem {
    pub fn new(q: u32, k: usize, n: usize, blocks: Vec<LevelSet>) -> Result<Self> {
        check_q(q)?;
        if blocks.iter().any(|b| b.q() != q) {
            return Err(Error::InvalidWord("alphabet mismatch between blocks".into()));
        }
        if blocks.iter().any(|b| b.max_level() > n) {
            return Err(Error::OutOfRange(format!("block word longer than {n}")));
        }
        Ok(PiSystem { q, k, n, blocks })
    }

    /// Union of the blocks.
    pub fn code(&self) -> LevelSet {
        let mut c = LevelSet::new(self.q).expect("q validated");
        for b in &self.blocks {
            c.union_with(b).expect("same alphabet");
        }
        c
    }

    /// Text form: header, then `<word> <block>` per line with blocks numbered from 1.
    pub fn to_text(&self) -> String {
        let mut lines: Vec<(Word, usize)> = Vec::new();
        for (i, b) in self.blocks.iter().enumerate() {
            for w in b.words() {
                lines.push((w, i + 1));
            }
        }
        lines.sort();
        let mut s = format!("q={} k={} n={}\n", self.q, self.k, self.n);
        for (w, i) in lines {
            s.push_str(&format!("{w} {i}\n"));
        }
        s
    }
}

impl fmt::Display for PiSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Extension threshold: `1/2 + k/(2q)` for `k <= q/2`, else `((q-k)/q)^2 + k/q`.
pub fn gamma(q: u32, k: usize) -> Result<Rational> {
    check_q(q)?;
    let qq = q as u64;
    let k = k as u64;
    if k == 0 || k >= qq {
        return Err(Error::OutOfRange(format!("gamma needs 1 <= k < q, got k={k}, q={qq}")));
    }
    if k <= qq / 2 {
        Ok(ratio(1, 2) + ratio(k, 2 * qq))
    } else {
        let r = ratio(qq - k, qq);
        Ok(&r * &r + ratio(k, qq))
    }
}

type WordSet = BTreeSet<(usize, u64)>;

fn words_of(c: &LevelSet) -> WordSet {
    c.words().into_iter().map(|w| (w.len, w.val)).collect()
}

fn drop_first(q: u32, s: &WordSet) -> WordSet {
    s.iter()
        .map(|&(l, v)| (l - 1, v % upow(q, l - 1)))
        .collect()
}

fn drop_last(q: u32, s: &WordSet) -> WordSet {
    s.iter().map(|&(l, v)| (l - 1, v / q as u64)).collect()
}

fn kraft_of(q: u32, s: &WordSet) -> Rational {
    s.iter().fold(Rational::from_integer(0.into()), |acc, &(l, _)| {
        acc + Rational::new(BigInt::one(), num::pow(BigInt::from(q), l))
    })
}

/// Prefix-free (or suffix-free) check over a set that may contain the empty word.
fn free_in(q: u32, s: &WordSet, prefix: bool) -> bool {
    for &(l, v) in s {
        for &(m, u) in s {
            if m >= l {
                continue;
            }
            let part = if prefix {
                v / upow(q, l - m)
            } else {
                v % upow(q, m)
            };
            if part == u {
                return false;
            }
        }
    }
    true
}

fn basic_checks(p: &PiSystem) -> bool {
    if p.k == 0 || p.k > p.q as usize || p.blocks.len() != p.k {
        return false;
    }
    for i in 0..p.blocks.len() {
        for j in i + 1..p.blocks.len() {
            if !p.blocks[i].is_disjoint(&p.blocks[j]) {
                return false;
            }
        }
    }
    let code = p.code();
    code.max_level() <= p.n && is_free(&code, Mode::Fix)
}

fn block_shadow_sizes(p: &PiSystem, block: &LevelSet) -> Option<[usize; 4]> {
    let q = p.q;
    let n = p.n;
    let pre = shadow(block, n, Mode::Prefix).ok()?;
    let suf = shadow(block, n, Mode::Suffix).ok()?;
    let tail = upow(q, n - 1);
    let pre_cut: BTreeSet<u64> = pre.ones().map(|v| v as u64 % tail).collect();
    let suf_cut: BTreeSet<u64> = suf.ones().map(|v| v as u64 / q as u64).collect();
    Some([
        pre.count_ones(..),
        pre_cut.len(),
        suf.count_ones(..),
        suf_cut.len(),
    ])
}

/// Every block has prefix shadow, suffix shadow and their one-letter cuts of size `q^{n-1}`.
pub fn pi_property_1(p: &PiSystem) -> bool {
    if p.n == 0 {
        return false;
    }
    let target = upow(p.q, p.n - 1) as usize;
    p.blocks.iter().all(|b| match block_shadow_sizes(p, b) {
        Some(s) => s.iter().all(|&x| x == target),
        None => false,
    })
}

/// Kraft sum `k/q`, and cutting a letter off each block shadow loses nothing.
pub fn pi_property_2(p: &PiSystem) -> bool {
    if p.n == 0 || p.code().kraft_sum() != ratio(p.k as u64, p.q as u64) {
        return false;
    }
    p.blocks.iter().all(|b| match block_shadow_sizes(p, b) {
        Some([a, b, c, d]) => a == b && c == d,
        None => false,
    })
}

/// Each block minus its first letters is maximal prefix-free, minus its last
/// letters is maximal suffix-free, and neither cut merges words.
pub fn pi_property_3(p: &PiSystem) -> bool {
    let q = p.q;
    p.blocks.iter().all(|b| {
        let d = words_of(b);
        let front = drop_first(q, &d);
        let back = drop_last(q, &d);
        front.len() == d.len()
            && back.len() == d.len()
            && free_in(q, &front, true)
            && free_in(q, &back, false)
            && kraft_of(q, &front).is_one()
            && kraft_of(q, &back).is_one()
    })
}

/// Validates a pi-system. Debug builds also evaluate the two equivalent
/// characterizations and assert that all three agree.
pub fn is_pi_system(p: &PiSystem) -> bool {
    if !basic_checks(p) {
        return false;
    }
    let one = pi_property_1(p);
    if cfg!(debug_assertions) {
        let two = pi_property_2(p);
        let three = pi_property_3(p);
        debug_assert_eq!(one, two, "pi-system characterizations disagree");
        debug_assert_eq!(one, three, "pi-system characterizations disagree");
    }
    one
}

fn check_k(q: u32, k: usize) -> Result<()> {
    check_q(q)?;
    if k == 0 || k >= q as usize {
        return Err(Error::OutOfRange(format!("need 1 <= k < q, got k={k}, q={q}")));
    }
    Ok(())
}

/// One-level system in `A^n` with blocks `a A^{n-2} (a + i mod q)`, `i < k`.
pub fn one_level_pi(q: u32, n: usize, k: usize) -> Result<PiSystem> {
    check_k(q, k)?;
    if n == 0 {
        return Err(Error::OutOfRange("level must be at least 1".into()));
    }
    let qq = q as u64;
    let mut blocks = Vec::with_capacity(k);
    for i in 0..k as u64 {
        let mut b = LevelSet::new(q)?;
        if n == 1 {
            b.insert_num(1, i)?;
        } else {
            let head = upow(q, n - 1);
            for a in 0..qq {
                for w in 0..upow(q, n - 2) {
                    b.insert_num(n, a * head + w * qq + (a + i) % qq)?;
                }
            }
        }
        blocks.push(b);
    }
    PiSystem::new(q, k, n, blocks)
}

/// Two-level system with top level `n`: the level `n-1` words are the edges of
/// a `k`-regular subgraph of `B_q(n-2)` with `L` vertices `V`, and block `i`
/// adds the words `a v (a + i mod q)` for `v` outside `V`.
pub fn two_level_pi(q: u32, n: usize, k: usize, l: u64) -> Result<PiSystem> {
    check_k(q, k)?;
    if n < 3 {
        return Err(Error::OutOfRange(format!("two-level systems need n >= 3, got {n}")));
    }
    let verts = upow(q, n - 2);
    if l == 0 {
        return Err(Error::OutOfRange("need at least one vertex".into()));
    }
    if l > verts {
        return Err(Error::Impossible(format!(
            "B_{q}({}) has only {verts} vertices, {l} requested",
            n - 2
        )));
    }
    let g = k_regular_subgraph(q, n - 2, k, l)?;
    let factors = one_factor_decomposition(&g, k)?;
    let vset = g.vertices();
    let qq = q as u64;
    let head = upow(q, n - 1);
    let mut blocks = Vec::with_capacity(k);
    for (i, f) in factors.iter().enumerate() {
        let mut b = LevelSet::new(q)?;
        for &e in &f.edges {
            b.insert_num(n - 1, e)?;
        }
        for v in (0..verts).filter(|v| !vset.contains(v)) {
            for a in 0..qq {
                b.insert_num(n, a * head + v * qq + (a + i as u64) % qq)?;
            }
        }
        blocks.push(b);
    }
    PiSystem::new(q, k, n, blocks)
}

/// The level-(n-1) edge set of a two-level system.
pub fn lower_level_edges(p: &PiSystem) -> Result<crate::debruijn::EdgeSet> {
    let code = p.code();
    crate::debruijn::EdgeSet::from_edges(p.q, p.n - 2, code.level_nums(p.n - 1))
}

fn check_chain_args(q: u32, k: usize, d: usize) -> Result<()> {
    check_q(q)?;
    let qd = q as usize;
    if d == 0 || d >= qd || k == 0 || k > d.min(qd - d) {
        return Err(Error::OutOfRange(format!(
            "chain family needs 1 <= d < q and 1 <= k <= min(d, q-d); got q={q}, k={k}, d={d}"
        )));
    }
    Ok(())
}

/// Enumerates `first · middle · last` where `middle` ranges over all words of
/// length `m` over `letters`.
fn push_chain(
    b: &mut LevelSet,
    q: u32,
    first: u64,
    letters: &[u64],
    m: usize,
    last: u64,
) -> Result<()> {
    let qq = q as u64;
    let mut idx = vec![0usize; m];
    loop {
        let mut v = first;
        for &j in &idx {
            v = v * qq + letters[j];
        }
        b.insert_num(m + 2, v * qq + last)?;
        let mut pos = m;
        loop {
            if pos == 0 {
                return Ok(());
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < letters.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

fn cyc(set: &[u64], x: u64, i: usize) -> u64 {
    let pos = set.iter().position(|&y| y == x).unwrap();
    set[(pos + i) % set.len()]
}

/// Chain system with `X = {0..d-1}`, `Y` the rest, and blocks
/// `y Y^{n-2} phi_i(y)` together with `x Y^m varphi_i(x)` for `m <= n-2`.
pub fn chain_pi(q: u32, n: usize, k: usize, d: usize) -> Result<PiSystem> {
    check_chain_args(q, k, d)?;
    if n < 2 {
        return Err(Error::OutOfRange("chain family needs n >= 2".into()));
    }
    let xs: Vec<u64> = (0..d as u64).collect();
    let ys: Vec<u64> = (d as u64..q as u64).collect();
    let mut blocks = Vec::with_capacity(k);
    for i in 0..k {
        let mut b = LevelSet::new(q)?;
        for &y in &ys {
            push_chain(&mut b, q, y, &ys, n - 2, cyc(&ys, y, i))?;
        }
        for m in 0..=n - 2 {
            for &x in &xs {
                push_chain(&mut b, q, x, &ys, m, cyc(&xs, x, i))?;
            }
        }
        blocks.push(b);
    }
    PiSystem::new(q, k, n, blocks)
}

/// Mixed chain system: blocks `x Y^l varphi_i(x)`, `y X^l phi_i(y)` for
/// `1 <= l <= n-2`, and `x X^{n-2} varphi_i(x)`, `y Y^{n-2} phi_i(y)`.
pub fn mixed_chain_pi(q: u32, n: usize, k: usize, d: usize) -> Result<PiSystem> {
    check_chain_args(q, k, d)?;
    if n < 3 {
        return Err(Error::OutOfRange("mixed chain family needs n >= 3".into()));
    }
    let xs: Vec<u64> = (0..d as u64).collect();
    let ys: Vec<u64> = (d as u64..q as u64).collect();
    let mut blocks = Vec::with_capacity(k);
    for i in 0..k {
        let mut b = LevelSet::new(q)?;
        for l in 1..=n - 2 {
            for &x in &xs {
                push_chain(&mut b, q, x, &ys, l, cyc(&xs, x, i))?;
            }
            for &y in &ys {
                push_chain(&mut b, q, y, &xs, l, cyc(&ys, y, i))?;
            }
        }
        for &x in &xs {
            push_chain(&mut b, q, x, &xs, n - 2, cyc(&xs, x, i))?;
        }
        for &y in &ys {
            push_chain(&mut b, q, y, &ys, n - 2, cyc(&ys, y, i))?;
        }
        blocks.push(b);
    }
    PiSystem::new(q, k, n, blocks)
}

/// Adds up to `count` free words of the tracker's level in ascending order.
pub(crate) fn take_free(
    tracker: &mut ShadowTracker,
    code: &mut LevelSet,
    count: u64,
) -> Result<bool> {
    if count == 0 {
        return Ok(true);
    }
    let l = tracker.level();
    let mut left = count;
    for v in tracker.free_words() {
        tracker.add(v);
        code.insert_num(l, v)?;
        left -= 1;
        if left == 0 {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Extends a pi-system to a fix-free code fitting `target`: first the
/// remaining words of the top level, then each higher level, always taking
/// the smallest words outside the current bifix shadow.
pub fn pi_extend(p: &PiSystem, target: &Profile) -> Result<LevelSet> {
    if target.q() != p.q {
        return Err(Error::PreconditionViolated("alphabet mismatch".into()));
    }
    let g = gamma(p.q, p.k).map_err(|e| Error::PreconditionViolated(e.to_string()))?;
    let sum = target.kraft_sum();
    if sum > g {
        return Err(Error::PreconditionViolated(format!(
            "Kraft sum {} exceeds gamma {}",
            fmt_rational(&sum),
            fmt_rational(&g)
        )));
    }
    let code = p.code();
    for l in 1..p.n {
        if code.count(l) as u64 != target.alpha(l) {
            return Err(Error::PreconditionViolated(format!(
                "level {l} of the system does not match the target"
            )));
        }
    }
    let beta = code.count(p.n) as u64;
    if beta > target.alpha(p.n) {
        return Err(Error::PreconditionViolated(format!(
            "system has {beta} words at level {} but the target only {}",
            p.n,
            target.alpha(p.n)
        )));
    }
    if !is_pi_system(p) {
        return Err(Error::PreconditionViolated("not a pi-system".into()));
    }
    let mut out = code;
    let mut tracker = ShadowTracker::new(&out, p.n)?;
    if !take_free(&mut tracker, &mut out, target.alpha(p.n) - beta)? {
        return Err(Error::Internal(format!("no room at level {}", p.n)));
    }
    for l in p.n + 1..=target.max_level() {
        tracker.advance()?;
        if !take_free(&mut tracker, &mut out, target.alpha(l))? {
            return Err(Error::Internal(format!("no room at level {l}")));
        }
    }
    Ok(out)
}
