//! One builder per constructive existence result, and a dispatcher that
//! routes a profile to the first builder whose hypothesis it meets.

use std::fmt;

use num::{BigInt, Integer, One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::pisystems::{
    chain_pi, gamma, mixed_chain_pi, one_level_pi, pi_extend, take_free, two_level_pi,
};
use crate::verifier::{search, SearchOptions, Verdict};
use crate::words::{
    fits, fmt_rational, inv_pow, is_free, ratio, shadow, upow, LevelSet, Mode, Profile, Rational,
    ShadowTracker,
};

/// Which builder produced a code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Tag {
    PrefixFree,
    Half,
    TwoLevel,
    Spaced,
    Bounded,
    FirstTwoLevels,
    Binary58,
    TernaryBlocks,
    Quaternary,
    ExactKraft,
    Search,
    Trivial,
}

impl Tag {
    pub fn name(self) -> &'static str {
        match self {
            Tag::PrefixFree => "prefix_free",
            Tag::Half => "half",
            Tag::TwoLevel => "two_level",
            Tag::Spaced => "spaced",
            Tag::Bounded => "bounded",
            Tag::FirstTwoLevels => "first_two_levels",
            Tag::Binary58 => "binary_58",
            Tag::TernaryBlocks => "ternary_blocks",
            Tag::Quaternary => "quaternary_lift",
            Tag::ExactKraft => "exact_kraftsum",
            Tag::Search => "search",
            Tag::Trivial => "trivial",
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A code with the builder that produced it and the facts that licensed it.
#[derive(Clone, Debug)]
pub struct BuildReport {
    pub tag: Tag,
    pub code: LevelSet,
    pub notes: Vec<String>,
}

/// Dispatcher outcome.
#[derive(Clone, Debug)]
pub enum Construction {
    Found(BuildReport),
    Nonexistent { reason: String },
    Unknown { reason: String },
}

fn kraft_gate(p: &Profile, bound: &Rational) -> Result<Rational> {
    let sum = p.kraft_sum();
    if &sum > bound {
        return Err(Error::KraftExceeded {
            sum: fmt_rational(&sum),
            bound: fmt_rational(bound),
        });
    }
    Ok(sum)
}

fn certify(code: LevelSet, p: &Profile, mode: Mode, who: &str) -> Result<LevelSet> {
    if !fits(&code, p) {
        return Err(Error::Internal(format!("{who}: output does not fit the profile")));
    }
    if !is_free(&code, mode) {
        return Err(Error::Internal(format!("{who}: output is not {mode:?}-free")));
    }
    Ok(code)
}

/// Adds `alpha_l` words at every level `l >= from`, each the smallest values
/// outside the current bifix shadow. `code` must live below `from`.
fn greedy_from(code: LevelSet, p: &Profile, from: usize, who: &str) -> Result<LevelSet> {
    let top = p.max_level();
    if from > top {
        return Ok(code);
    }
    let mut out = code;
    let mut tracker = ShadowTracker::new(&out, from)?;
    for l in from..=top {
        if l > from {
            tracker.advance()?;
        }
        if !take_free(&mut tracker, &mut out, p.alpha(l))? {
            return Err(Error::Internal(format!("{who}: no room at level {l}")));
        }
    }
    Ok(out)
}

fn greedy_all(p: &Profile, who: &str) -> Result<LevelSet> {
    let empty = LevelSet::new(p.q())?;
    match p.min_level() {
        Some(m) => greedy_from(empty, p, m, who),
        None => Ok(empty),
    }
}

/// Prefix code by ascending picks outside the prefix shadow.
pub fn build_prefix_free(p: &Profile) -> Result<LevelSet> {
    kraft_gate(p, &Rational::one())?;
    let mut code = LevelSet::new(p.q())?;
    for l in p.populated_levels() {
        let sh = shadow(&code, l, Mode::Prefix)?;
        let mut left = p.alpha(l);
        for v in sh.zeroes() {
            if left == 0 {
                break;
            }
            code.insert_num(l, v as u64)?;
            left -= 1;
        }
        if left > 0 {
            return Err(Error::Internal(format!("prefix greedy: no room at level {l}")));
        }
    }
    certify(code, p, Mode::Prefix, "prefix_free")
}

/// Level-by-level greedy for Kraft sums up to 1/2.
pub fn build_half(p: &Profile) -> Result<LevelSet> {
    kraft_gate(p, &ratio(1, 2))?;
    let code = greedy_all(p, "half")?;
    certify(code, p, Mode::Fix, "half")
}

/// True if every pair of consecutive populated levels `k < l` has `l >= 2k`.
pub fn is_spaced(p: &Profile) -> bool {
    p.populated_levels().windows(2).all(|w| w[1] >= 2 * w[0])
}

/// Level-by-level greedy for profiles whose populated levels at least double.
pub fn build_spaced(p: &Profile) -> Result<LevelSet> {
    kraft_gate(p, &ratio(3, 4))?;
    if !is_spaced(p) {
        return Err(Error::HypothesisNotMet(
            "consecutive populated levels k < l need l >= 2k".into(),
        ));
    }
    let code = greedy_all(p, "spaced")?;
    certify(code, p, Mode::Fix, "spaced")
}

/// Two populated levels `m < n`: the `alpha_m` smallest words of `A^m`, then
/// level `n` by ascending picks outside the bifix shadow.
pub fn build_two_level(p: &Profile) -> Result<LevelSet> {
    let levels = p.populated_levels();
    if levels.len() > 2 {
        return Err(Error::HypothesisNotMet(format!(
            "{} populated levels, at most two allowed",
            levels.len()
        )));
    }
    if p.kraft_sum() > ratio(3, 4) {
        return Err(Error::HypothesisNotMet(format!(
            "Kraft sum {} exceeds 3/4",
            fmt_rational(&p.kraft_sum())
        )));
    }
    let mut code = LevelSet::new(p.q())?;
    if let Some(&m) = levels.first() {
        for v in 0..p.alpha(m) {
            code.insert_num(m, v)?;
        }
        if let Some(&n) = levels.get(1) {
            code = greedy_from(code, p, n, "two_level")?;
        }
    }
    certify(code, p, Mode::Fix, "two_level")
}

/// Per-level cap `q^{lmin-2} floor(q/2)^2 ceil(q/2)^{l-lmin}` of the bounded construction.
pub fn bounded_cap(q: u32, lmin: usize, l: usize) -> Option<u64> {
    let f = (q / 2) as u64;
    let c = q.div_ceil(2) as u64;
    crate::words::checked_pow(q, lmin - 2)?
        .checked_mul(f * f)?
        .checked_mul(c.checked_pow((l - lmin) as u32)?)
}

/// Checks the hypothesis of the bounded-level construction.
pub fn bounded_applies(p: &Profile) -> bool {
    let (Some(lmin), lmax) = (p.min_level(), p.max_level()) else {
        return false;
    };
    lmin >= 2
        && p.kraft_sum() <= ratio(3, 4)
        && (lmin..lmax).all(|l| matches!(bounded_cap(p.q(), lmin, l), Some(b) if p.alpha(l) <= b))
}

/// Digits of the word `(l, v)`, most significant first.
fn digits_of(q: u32, l: usize, v: u64) -> Vec<u64> {
    let mut d = vec![0u64; l];
    let mut v = v;
    for i in (0..l).rev() {
        d[i] = v % q as u64;
        v /= q as u64;
    }
    d
}

/// Appends every word of `letters^m` (each letter set given per position) to `v`.
fn expand(q: u32, prefix: &[(usize, u64)], parts: &[&[u64]]) -> Vec<(usize, u64)> {
    let mut cur: Vec<(usize, u64)> = prefix.to_vec();
    for set in parts {
        let mut next = Vec::with_capacity(cur.len() * set.len());
        for &(l, v) in &cur {
            for &a in set.iter() {
                next.push((l + 1, v * q as u64 + a));
            }
        }
        cur = next;
    }
    cur
}

/// Bounded-level construction: base code `B ∪ D1 ∪ D2` of Kraft sum at least
/// 3/4, then per level delete the surplus words of `B` and add their
/// replacement words at the top level, finally trimming the top level.
pub fn build_bounded(p: &Profile) -> Result<LevelSet> {
    let q = p.q();
    if !bounded_applies(p) {
        return Err(Error::HypothesisNotMet(
            "bounded construction needs lmin >= 2, Kraft sum <= 3/4 and the per-level caps".into(),
        ));
    }
    let lmin = p.min_level().unwrap();
    let lmax = p.max_level();
    if lmax <= lmin + 1 {
        return build_two_level(p);
    }
    let qq = q as u64;
    let fl = (q / 2) as u64;
    let xs: Vec<u64> = (0..fl).collect();
    let ys: Vec<u64> = (fl..qq).collect();
    let all: Vec<u64> = (0..qq).collect();
    let is_y = |a: u64| a >= fl;
    let rep = |s: &[u64], n: usize| -> Vec<Vec<u64>> { vec![s.to_vec(); n] };

    // B = x1 Y^i x2 A^{lmin-2}, 0 <= i <= lmax-lmin-1.
    let mut base = LevelSet::new(q)?;
    base.ensure_level(lmax)?;
    for i in 0..lmax - lmin {
        let mut parts: Vec<Vec<u64>> = vec![xs.clone()];
        parts.extend(rep(&ys, i));
        parts.push(xs.clone());
        parts.extend(rep(&all, lmin - 2));
        let refs: Vec<&[u64]> = parts.iter().map(|v| v.as_slice()).collect();
        for (l, v) in expand(q, &[(0, 0)], &refs) {
            base.insert_num(l, v)?;
        }
    }
    let mut top = LevelSet::new(q)?;
    // D1 = Y A^{lmax-lmin} Y A^{lmin-2}
    {
        let mut parts = vec![ys.clone()];
        parts.extend(rep(&all, lmax - lmin));
        parts.push(ys.clone());
        parts.extend(rep(&all, lmin - 2));
        let refs: Vec<&[u64]> = parts.iter().map(|v| v.as_slice()).collect();
        for (l, v) in expand(q, &[(0, 0)], &refs) {
            top.insert_num(l, v)?;
        }
    }
    // D2 = X Y^{lmax-lmin} A^{lmin-1}
    {
        let mut parts = vec![xs.clone()];
        parts.extend(rep(&ys, lmax - lmin));
        parts.extend(rep(&all, lmin - 1));
        let refs: Vec<&[u64]> = parts.iter().map(|v| v.as_slice()).collect();
        for (l, v) in expand(q, &[(0, 0)], &refs) {
            top.insert_num(l, v)?;
        }
    }

    let mut extra = LevelSet::new(q)?;
    let add_top = |extra: &mut LevelSet, words: Vec<(usize, u64)>| -> Result<()> {
        for (l, v) in words {
            debug_assert_eq!(l, lmax);
            extra.insert_num(l, v)?;
        }
        Ok(())
    };
    // Y A^{lmax-l-1} e
    let left_ext = |l: usize, v: u64| -> Vec<(usize, u64)> {
        let mut parts = vec![ys.clone()];
        parts.extend(rep(&all, lmax - l - 1));
        let refs: Vec<&[u64]> = parts.iter().map(|s| s.as_slice()).collect();
        expand(q, &[(0, 0)], &refs)
            .into_iter()
            .map(|(m, u)| (m + l, u * upow(q, l) + v))
            .collect()
    };
    // e A^{lmax-l}
    let right_ext = |l: usize, v: u64| -> Vec<(usize, u64)> {
        let refs: Vec<&[u64]> = (0..lmax - l).map(|_| all.as_slice()).collect();
        expand(q, &[(l, v)], &refs)
    };
    let pos = lmax - lmin + 2;
    for l in lmin..lmax {
        let cap = bounded_cap(q, lmin, l).unwrap();
        let surplus = cap - p.alpha(l);
        if surplus == 0 {
            continue;
        }
        let words = base.level_nums(l);
        let share = fl * upow(q, lmax - l - 1);
        if l <= lmax - lmin + 1 {
            // Step 1.
            for &v in words.iter().take(surplus as usize) {
                base.remove_num(l, v);
                // e A^{lmax-lmin-l+1} Y A^{lmin-2}
                let mut parts: Vec<Vec<u64>> = rep(&all, lmax - lmin + 1 - l);
                parts.push(ys.clone());
                parts.extend(rep(&all, lmin - 2));
                let refs: Vec<&[u64]> = parts.iter().map(|s| s.as_slice()).collect();
                add_top(&mut extra, expand(q, &[(l, v)], &refs))?;
                add_top(&mut extra, left_ext(l, v).into_iter().take(share as usize).collect())?;
            }
            continue;
        }
        let form1: Vec<u64> = words
            .iter()
            .copied()
            .filter(|&v| is_y(digits_of(q, l, v)[pos - 1]))
            .collect();
        let form2: Vec<u64> = words
            .iter()
            .copied()
            .filter(|&v| !is_y(digits_of(q, l, v)[pos - 1]))
            .collect();
        let beta = upow(q, lmin - 3) * fl * fl * fl * (q.div_ceil(2) as u64).pow((l - lmin) as u32);
        if p.alpha(l) >= beta {
            // Step 2.
            if (form1.len() as u64) < surplus {
                return Err(Error::Internal(format!("bounded: too few form-1 words at level {l}")));
            }
            for &v in form1.iter().take(surplus as usize) {
                base.remove_num(l, v);
                add_top(&mut extra, left_ext(l, v))?;
                add_top(&mut extra, right_ext(l, v).into_iter().take(share as usize).collect())?;
            }
        } else {
            // Step 3.
            let need2 = beta - p.alpha(l);
            if (form2.len() as u64) < need2 {
                return Err(Error::Internal(format!("bounded: too few form-2 words at level {l}")));
            }
            for &v in &form1 {
                base.remove_num(l, v);
                add_top(&mut extra, left_ext(l, v))?;
                add_top(&mut extra, right_ext(l, v))?;
            }
            for &v in form2.iter().take(need2 as usize) {
                base.remove_num(l, v);
                add_top(&mut extra, left_ext(l, v))?;
            }
        }
    }
    let mut code = base;
    code.union_with(&top)?;
    code.union_with(&extra)?;
    let have = code.count(lmax) as u64;
    let want = p.alpha(lmax);
    if have < want {
        return Err(Error::Internal(format!(
            "bounded: only {have} top-level words for {want}"
        )));
    }
    for v in code.level_nums(lmax).into_iter().rev().take((have - want) as usize) {
        code.remove_num(lmax, v);
    }
    certify(code, p, Mode::Fix, "bounded")
}

/// Pi-system route: a one-level system when the first populated level `n`
/// carries at least `k q^{n-1}` words, otherwise a two-level system from a
/// `k`-regular subgraph with `alpha_n / k` vertices; then the greedy extension.
pub fn build_first_two_levels(p: &Profile, k: usize) -> Result<LevelSet> {
    let q = p.q();
    let g = gamma(q, k).map_err(|e| Error::HypothesisNotMet(e.to_string()))?;
    let sum = p.kraft_sum();
    if sum > g {
        return Err(Error::HypothesisNotMet(format!(
            "Kraft sum {} exceeds gamma {}",
            fmt_rational(&sum),
            fmt_rational(&g)
        )));
    }
    let Some(n) = p.min_level() else {
        return Ok(LevelSet::new(q)?);
    };
    let mass = Rational::from_integer(p.alpha(n).into()) * inv_pow(q, n)
        + Rational::from_integer(p.alpha(n + 1).into()) * inv_pow(q, n + 1);
    if mass < ratio(k as u64, q as u64) {
        return Err(Error::HypothesisNotMet(format!(
            "first two levels carry {} < {k}/{q}",
            fmt_rational(&mass)
        )));
    }
    let kk = k as u64;
    let full = kk * upow(q, n - 1);
    let system = if p.alpha(n) >= full {
        one_level_pi(q, n, k)?
    } else {
        if p.alpha(n) % kk != 0 {
            return Err(Error::HypothesisNotMet(format!(
                "alpha_{n} = {} is not divisible by k = {k}",
                p.alpha(n)
            )));
        }
        let l = p.alpha(n) / kk;
        match two_level_pi(q, n + 1, k, l) {
            Ok(s) => s,
            Err(Error::Impossible(m)) => return Err(Error::HypothesisNotMet(m)),
            Err(e) => return Err(e),
        }
    };
    let code = pi_extend(&system, p)?;
    certify(code, p, Mode::Fix, "first_two_levels")
}

/// Exact per-block Kraft budgets for the two-letter block decompositions.
fn block_budgets(q: u32) -> Vec<((u64, u64), Rational)> {
    let q3 = (q as u64).pow(3);
    let mut out = Vec::new();
    for a in 0..q as u64 {
        for b in 0..q as u64 {
            let num = if a == b { q as u64 - a } else { 1 };
            out.push(((a, b), ratio(num, q3)));
        }
    }
    out
}

/// Splits a profile whose Kraft sum equals the total budget into one profile
/// per block `ab` (lexicographic order), each block filling its budget level
/// by level before later blocks take words.
fn decompose(p: &Profile) -> Result<Vec<((u64, u64), Profile)>> {
    let q = p.q();
    let budgets = block_budgets(q);
    let total: Rational = budgets.iter().map(|(_, r)| r.clone()).sum();
    if p.kraft_sum() != total {
        return Err(Error::HypothesisNotMet(format!(
            "Kraft sum {} must equal {}",
            fmt_rational(&p.kraft_sum()),
            fmt_rational(&total)
        )));
    }
    let top = p.max_level();
    let mut rem: Vec<Rational> = budgets.iter().map(|(_, r)| r.clone()).collect();
    let mut counts = vec![vec![0u64; top]; budgets.len()];
    for l in 1..=top {
        let mut left = p.alpha(l);
        let scale = Rational::from_integer(num::pow(BigInt::from(q), l));
        for (i, r) in rem.iter_mut().enumerate() {
            if left == 0 {
                break;
            }
            let cap = (&*r * &scale).floor().to_integer();
            let cap = cap.to_u64().unwrap_or(u64::MAX);
            let t = cap.min(left);
            if l < 2 && t > 0 {
                return Err(Error::HypothesisNotMet("block words need length >= 2".into()));
            }
            counts[i][l - 1] = t;
            *r -= Rational::from_integer(t.into()) * inv_pow(q, l);
            left -= t;
        }
        if left > 0 {
            return Err(Error::HypothesisNotMet(format!(
                "{left} words at level {l} fit no block budget"
            )));
        }
    }
    if rem.iter().any(|r| !r.is_zero()) {
        return Err(Error::Internal("block budgets not exhausted".into()));
    }
    budgets
        .iter()
        .zip(counts)
        .map(|((ab, _), c)| Ok((*ab, Profile::new(q, c)?)))
        .collect()
}

/// The four binary blocks `00, 01, 10, 11` with Kraft sums 1/4, 1/8, 1/8, 1/8.
pub fn beta_decompose(p: &Profile) -> Result<[Profile; 4]> {
    if p.q() != 2 {
        return Err(Error::HypothesisNotMet("binary profiles only".into()));
    }
    if p.alpha(1) != 0 || p.alpha(2) >= 2 {
        return Err(Error::HypothesisNotMet("need alpha_1 = 0 and alpha_2 < 2".into()));
    }
    let d = decompose(p)?;
    Ok([d[0].1.clone(), d[1].1.clone(), d[2].1.clone(), d[3].1.clone()])
}

/// The nine ternary blocks in lexicographic order with budgets `(3-a)/27` on the
/// diagonal and `1/27` elsewhere.
pub fn ternary_decompose(p: &Profile) -> Result<Vec<Profile>> {
    if p.q() != 3 {
        return Err(Error::HypothesisNotMet("ternary profiles only".into()));
    }
    if p.alpha(1) != 0 || p.alpha(2) > 1 {
        return Err(Error::HypothesisNotMet("need alpha_1 = 0 and alpha_2 <= 1".into()));
    }
    Ok(decompose(p)?.into_iter().map(|(_, b)| b).collect())
}

/// Adds enough words at level `max(lmax, 3)` to reach the Kraft sum `target`.
fn pad_to(p: &Profile, target: &Rational) -> Result<(Profile, usize, u64)> {
    let sum = p.kraft_sum();
    if &sum > target {
        return Err(Error::KraftExceeded {
            sum: fmt_rational(&sum),
            bound: fmt_rational(target),
        });
    }
    let level = p.max_level().max(3);
    let extra = (target - &sum) * Rational::from_integer(num::pow(BigInt::from(p.q()), level));
    if !extra.is_integer() {
        return Err(Error::Internal("padding is not integral".into()));
    }
    let extra = extra.to_integer().to_u64().ok_or_else(|| Error::Internal("pad overflow".into()))?;
    Ok((p.with_alpha(level, p.alpha(level) + extra), level, extra))
}

/// Places each block's words inside `a A^{l-2} b` outside the bifix shadow,
/// level by level and block by block, smallest values first.
fn place_blocks(q: u32, blocks: &[((u64, u64), Profile)], who: &str) -> Result<LevelSet> {
    let top = blocks.iter().map(|(_, b)| b.max_level()).max().unwrap_or(0);
    let mut code = LevelSet::new(q)?;
    if top < 2 {
        return Ok(code);
    }
    let qq = q as u64;
    let mut tracker = ShadowTracker::new(&code, 2)?;
    for l in 2..=top {
        if l > 2 {
            tracker.advance()?;
        }
        let head = upow(q, l - 1);
        let mid = upow(q, l - 2);
        for ((a, b), prof) in blocks {
            let mut left = prof.alpha(l);
            let mut m = 0;
            while left > 0 && m < mid {
                let v = a * head + m * qq + b;
                if tracker.is_free(v) {
                    tracker.add(v);
                    code.insert_num(l, v)?;
                    left -= 1;
                }
                m += 1;
            }
            if left > 0 {
                return Err(Error::Internal(format!(
                    "{who}: no room for block {a}{b} at level {l}"
                )));
            }
        }
    }
    Ok(code)
}

fn trim(code: &mut LevelSet, level: usize, count: u64) {
    for v in code.level_nums(level).into_iter().rev().take(count as usize) {
        code.remove_num(level, v);
    }
}

/// Binary codes of Kraft sum at most 5/8.
pub fn build_58_binary(p: &Profile) -> Result<LevelSet> {
    if p.q() != 2 {
        return Err(Error::HypothesisNotMet("binary profiles only".into()));
    }
    kraft_gate(p, &ratio(5, 8))?;
    if p.alpha(1) == 1 || p.alpha(2) == 2 {
        return build_first_two_levels(p, 1);
    }
    let (padded, level, extra) = pad_to(p, &ratio(5, 8))?;
    let blocks = decompose(&padded)?;
    let mut code = place_blocks(2, &blocks, "binary_58")?;
    trim(&mut code, level, extra);
    certify(code, p, Mode::Fix, "binary_58")
}

/// Ternary codes of Kraft sum at most 4/9 with `alpha_1 = 0`, `alpha_2 <= 1`,
/// built from the nine-block decomposition.
pub fn build_ternary_blocks(p: &Profile) -> Result<LevelSet> {
    if p.q() != 3 {
        return Err(Error::HypothesisNotMet("ternary profiles only".into()));
    }
    if p.alpha(1) != 0 || p.alpha(2) > 1 {
        return Err(Error::HypothesisNotMet("need alpha_1 = 0 and alpha_2 <= 1".into()));
    }
    let target = ratio(4, 9);
    if p.kraft_sum() > target {
        return Err(Error::HypothesisNotMet(format!(
            "Kraft sum {} exceeds 4/9",
            fmt_rational(&p.kraft_sum())
        )));
    }
    let (padded, level, extra) = pad_to(p, &target)?;
    let blocks = decompose(&padded)?;
    let mut code = place_blocks(3, &blocks, "ternary_blocks")?;
    trim(&mut code, level, extra);
    certify(code, p, Mode::Fix, "ternary_blocks")
}

/// Maps every quaternary letter to its two-bit binary form.
pub fn lift_code(c: &LevelSet) -> Result<LevelSet> {
    if c.q() != 4 {
        return Err(Error::InvalidAlphabet(c.q()));
    }
    let mut out = LevelSet::new(2)?;
    for w in c.words() {
        // Base-4 digits become bit pairs, so the value is unchanged.
        out.insert_num(2 * w.len, w.val)?;
    }
    Ok(out)
}

/// Binary profile populated only at even levels, read as a quaternary profile.
pub fn halve_profile(p: &Profile) -> Result<Profile> {
    if p.q() != 2 {
        return Err(Error::HypothesisNotMet("binary profiles only".into()));
    }
    if (1..=p.max_level()).step_by(2).any(|l| p.alpha(l) != 0) {
        return Err(Error::HypothesisNotMet("odd levels must be empty".into()));
    }
    let counts = (1..=p.max_level() / 2).map(|l| p.alpha(2 * l)).collect();
    Profile::new(4, counts)
}

fn chain_level(b: &Profile, first: usize, shift: usize) -> Option<usize> {
    // Smallest n >= first with b_l = 2^{l+shift} below n and b_n >= 2^{n+shift+1}.
    for l in first..=b.max_level() {
        let want = 1u64.checked_shl((l + shift) as u32)?;
        if b.alpha(l) == want {
            continue;
        }
        return (b.alpha(l) >= 2 * want).then_some(l);
    }
    None
}

/// Builds the binary code through a quaternary code for the halved profile.
pub fn lift_from_quaternary(p: &Profile) -> Result<LevelSet> {
    let b = halve_profile(p)?;
    if b.kraft_sum() > ratio(3, 4) {
        return Err(Error::HypothesisNotMet(format!(
            "Kraft sum {} exceeds 3/4",
            fmt_rational(&b.kraft_sum())
        )));
    }
    let quat = quaternary_code(&b)?;
    let code = lift_code(&quat)?;
    certify(code, p, Mode::Fix, "quaternary_lift")
}

fn quaternary_code(b: &Profile) -> Result<LevelSet> {
    let mut errors = Vec::new();
    if b.alpha(1) == 0 {
        if let Some(n) = chain_level(b, 2, 0) {
            match chain_pi(4, n, 2, 2).and_then(|s| pi_extend(&s, b)) {
                Ok(c) => return Ok(c),
                Err(e) => errors.push(e),
            }
        }
        if b.alpha(2) == 0 {
            if let Some(n) = chain_level(b, 3, 1) {
                match mixed_chain_pi(4, n, 2, 2).and_then(|s| pi_extend(&s, b)) {
                    Ok(c) => return Ok(c),
                    Err(e) => errors.push(e),
                }
            }
        }
    }
    match build_first_two_levels(b, 2) {
        Ok(c) => return Ok(c),
        Err(e) => errors.push(e),
    }
    if bounded_applies(b) {
        match build_bounded(b) {
            Ok(c) => return Ok(c),
            Err(e) => errors.push(e),
        }
    }
    Err(errors
        .into_iter()
        .find(|e| matches!(e, Error::Internal(_)))
        .unwrap_or_else(|| Error::HypothesisNotMet("no quaternary route applies".into())))
}

/// Base-`q` digits of `g` in `(0,1)` if the expansion is finite.
fn expansion(q: u32, g: &Rational) -> Result<Vec<u64>> {
    let den = g.denom().clone();
    let qb = BigInt::from(q);
    let mut pow = BigInt::one();
    let mut len = 0usize;
    while !(&pow % &den).is_zero() {
        pow *= &qb;
        len += 1;
        if len > 64 {
            return Err(Error::InfiniteExpansion(fmt_rational(g)));
        }
    }
    let mut a = (g * Rational::from_integer(pow)).to_integer();
    let mut digits = vec![0u64; len];
    for i in (0..len).rev() {
        let (quo, r) = a.div_rem(&qb);
        digits[i] = r.to_u64().unwrap();
        a = quo;
    }
    Ok(digits)
}

/// A fix-free code of Kraft sum exactly `g`, drawn from the family
/// `C_1 = {0..b_1-1}` and `C_l = D C_1^{l-2} D` with `D = A - C_1`.
pub fn build_exact_kraftsum(q: u32, g: &Rational) -> Result<LevelSet> {
    crate::words::check_q(q)?;
    if g <= &Rational::zero() || g > &Rational::one() {
        return Err(Error::OutOfRange(format!("{} is not in (0, 1]", fmt_rational(g))));
    }
    let mut code = LevelSet::new(q)?;
    if g.is_one() {
        for v in 0..q as u64 {
            code.insert_num(1, v)?;
        }
        return Ok(code);
    }
    let beta = expansion(q, g)?;
    let b1 = beta[0];
    let c1: Vec<u64> = if b1 == 0 { vec![0] } else { (0..b1).collect() };
    let d: Vec<u64> = (0..q as u64).filter(|a| !c1.contains(a)).collect();
    for &a in c1.iter().take(b1 as usize) {
        code.insert_num(1, a)?;
    }
    // Count per level first: words still owed carry to the next level,
    // where each becomes q words. |C_l| = |D|^2 |C_1|^{l-2}.
    let mut plan: Vec<(usize, u64)> = Vec::new();
    let mut owed = BigInt::zero();
    let qb = BigInt::from(q);
    let (nd, nc) = (d.len() as u64, c1.len() as u64);
    let mut size = nd * nd;
    let mut l = 2usize;
    while l <= beta.len() || !owed.is_zero() {
        let digit = beta.get(l - 1).copied().unwrap_or(0);
        owed = owed * &qb + BigInt::from(digit);
        let take = owed.to_u64().unwrap_or(u64::MAX).min(size);
        if take > 0 {
            crate::words::checked_pow(q, l)
                .filter(|&c| c <= crate::words::DEFAULT_CELL_CAP)
                .ok_or(Error::LevelTooLarge { q, level: l })?;
            plan.push((l, take));
        }
        owed -= BigInt::from(take);
        size = size.saturating_mul(nc);
        l += 1;
    }
    for (l, take) in plan {
        let mut parts: Vec<&[u64]> = vec![&d];
        parts.extend(std::iter::repeat(c1.as_slice()).take(l - 2));
        parts.push(&d);
        for_each_word(q, &parts, take, |v| code.insert_num(l, v).map(|_| ()))?;
    }
    certify_exact(code, q, g)
}

/// Visits up to `limit` words of `parts[0] parts[1] ...` in ascending order.
fn for_each_word(
    q: u32,
    parts: &[&[u64]],
    limit: u64,
    mut f: impl FnMut(u64) -> Result<()>,
) -> Result<u64> {
    let mut idx = vec![0usize; parts.len()];
    let mut done = 0u64;
    loop {
        if done == limit {
            return Ok(done);
        }
        let v = idx
            .iter()
            .zip(parts)
            .fold(0u64, |acc, (&i, set)| acc * q as u64 + set[i]);
        f(v)?;
        done += 1;
        let mut pos = parts.len();
        loop {
            if pos == 0 {
                return Ok(done);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < parts[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

fn certify_exact(code: LevelSet, q: u32, g: &Rational) -> Result<LevelSet> {
    if code.q() != q || &code.kraft_sum() != g || !is_free(&code, Mode::Fix) {
        return Err(Error::Internal("exact Kraft construction failed".into()));
    }
    Ok(code)
}

/// Runs the builders in order and falls back to the exhaustive search.
pub fn construct(p: &Profile) -> Construction {
    construct_with(p, &SearchOptions::default())
}

pub fn construct_with(p: &Profile, opts: &SearchOptions) -> Construction {
    let q = p.q();
    let sum = p.kraft_sum();
    let found = |tag: Tag, code: LevelSet, note: String| {
        Construction::Found(BuildReport {
            tag,
            code,
            notes: vec![format!("kraft={}", fmt_rational(&sum)), note],
        })
    };
    if p.total() == 0 {
        return found(Tag::Trivial, LevelSet::new(q).unwrap(), "empty profile".into());
    }
    if sum > Rational::one() {
        return Construction::Nonexistent {
            reason: format!("Kraft sum {} exceeds 1", fmt_rational(&sum)),
        };
    }
    if let Ok(c) = build_half(p) {
        return found(Tag::Half, c, "kraft<=1/2".into());
    }
    if p.populated_levels().len() <= 2 {
        if let Ok(c) = build_two_level(p) {
            return found(Tag::TwoLevel, c, "two populated levels, kraft<=3/4".into());
        }
    }
    if is_spaced(p) {
        if let Ok(c) = build_spaced(p) {
            return found(Tag::Spaced, c, "populated levels at least double".into());
        }
    }
    if bounded_applies(p) {
        if let Ok(c) = build_bounded(p) {
            return found(Tag::Bounded, c, "per-level caps hold".into());
        }
    }
    for k in (1..=(q as usize).div_ceil(2).min(q as usize - 1)).rev() {
        if let Ok(c) = build_first_two_levels(p, k) {
            return found(Tag::FirstTwoLevels, c, format!("k={k}"));
        }
    }
    if q == 2 && sum <= ratio(5, 8) {
        if let Ok(c) = build_58_binary(p) {
            return found(Tag::Binary58, c, "kraft<=5/8".into());
        }
    }
    if q == 2 {
        if let Ok(c) = lift_from_quaternary(p) {
            return found(Tag::Quaternary, c, "even levels only".into());
        }
    }
    let r = search(p, opts);
    match r.verdict {
        Verdict::Found => found(
            Tag::Search,
            r.witness.expect("found implies witness"),
            format!("nodes={}", r.nodes),
        ),
        Verdict::Nonexistent => Construction::Nonexistent {
            reason: format!("exhaustive search, nodes={}", r.nodes),
        },
        Verdict::Unknown => Construction::Unknown {
            reason: format!("search budget exhausted after {} nodes", r.nodes),
        },
    }
}
