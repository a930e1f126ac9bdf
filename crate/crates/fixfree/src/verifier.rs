//! Exhaustive existence search, counterexamples above 3/4, and the binary
//! su/ne conditions on lengths sequences.

use std::fmt;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use fixedbitset::FixedBitSet;
use num::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::words::{
    cells, fits, fmt_rational, inv_pow, is_free, ratio, upow, LevelSet, Mode, Profile, Rational,
    DEFAULT_CELL_CAP,
};

/// Outcome of a search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Found,
    Nonexistent,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Found => "found",
            Verdict::Nonexistent => "nonexistent",
            Verdict::Unknown => "unknown",
        })
    }
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    /// Node budget; a search that would exceed it reports `Unknown`.
    pub budget: u64,
    /// Worker threads for the top-level branches (1 = sequential).
    pub jobs: usize,
    /// Return the first witness in enumeration order regardless of scheduling.
    pub deterministic: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            budget: 10_000_000,
            jobs: 1,
            deterministic: true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub verdict: Verdict,
    pub witness: Option<LevelSet>,
    pub nodes: u64,
    pub elapsed: Duration,
}

/// Least member of the orbit of `v` under letter permutations and reversal.
/// Any letter permutation maps a word to the word obtained by relabelling
/// letters in order of first appearance, so the least image uses `0, 1, ...`.
fn orbit_min(q: u32, l: usize, v: u64) -> u64 {
    let relabel = |digits: &[u64]| -> u64 {
        let mut map = vec![u64::MAX; q as usize];
        let mut next = 0;
        let mut out = 0u64;
        for &d in digits {
            if map[d as usize] == u64::MAX {
                map[d as usize] = next;
                next += 1;
            }
            out = out * q as u64 + map[d as usize];
        }
        out
    };
    let mut digits = vec![0u64; l];
    let mut x = v;
    for i in (0..l).rev() {
        digits[i] = x % q as u64;
        x /= q as u64;
    }
    let a = relabel(&digits);
    digits.reverse();
    a.min(relabel(&digits))
}

struct Ctx<'a> {
    q: u32,
    alpha: Vec<u64>,
    top: usize,
    first: usize,
    reps: FixedBitSet,
    nodes: &'a AtomicU64,
    budget: u64,
    stop: &'a AtomicBool,
}

#[derive(Clone)]
struct State {
    free: Vec<FixedBitSet>,
    chosen: Vec<Vec<u64>>,
    has_rep: bool,
}

enum Step {
    Found(State),
    Exhausted,
    Budget,
}

impl State {
    fn new(q: u32, top: usize) -> State {
        let mut free = vec![FixedBitSet::new()];
        for l in 1..=top {
            let mut b = FixedBitSet::with_capacity(upow(q, l) as usize);
            b.insert_range(..);
            free.push(b);
        }
        State {
            free,
            chosen: vec![Vec::new(); top + 1],
            has_rep: false,
        }
    }

    /// Adds `v` at level `l` and clears its extensions at every higher level.
    /// Returns false when some level can no longer host its words.
    fn pick(&mut self, ctx: &Ctx, l: usize, v: u64) -> bool {
        self.free[l].set(v as usize, false);
        self.chosen[l].push(v);
        for big in l + 1..=ctx.top {
            let span = upow(ctx.q, big - l) as usize;
            let stride = upow(ctx.q, l) as usize;
            let f = &mut self.free[big];
            f.remove_range(v as usize * span..(v as usize + 1) * span);
            let mut s = v as usize;
            while s < f.len() {
                f.set(s, false);
                s += stride;
            }
            if (f.count_ones(..) as u64) < ctx.alpha[big] {
                return false;
            }
        }
        true
    }
}

impl Ctx<'_> {
    fn tick(&self) -> bool {
        if self.stop.load(Ordering::Relaxed) {
            return false;
        }
        self.nodes.fetch_add(1, Ordering::Relaxed) < self.budget
    }

    /// Continues filling level `l`, whose candidates must exceed `after`.
    fn dfs(&self, st: State, l: usize, after: Option<u64>) -> Step {
        if l > self.top {
            return Step::Found(st);
        }
        let need = self.alpha[l] - st.chosen[l].len() as u64;
        if need == 0 {
            return self.dfs(st, l + 1, None);
        }
        let start = after.map_or(0, |a| a as usize + 1);
        let cands: Vec<usize> = st.free[l].ones().filter(|&v| v >= start).collect();
        if (cands.len() as u64) < need {
            return Step::Exhausted;
        }
        let on_first = l == self.first && !st.has_rep;
        for (i, &v) in cands.iter().enumerate() {
            if ((cands.len() - i) as u64) < need {
                break;
            }
            let is_rep = self.reps.contains(v);
            if on_first && !is_rep && !cands[i..].iter().any(|&w| self.reps.contains(w)) {
                break;
            }
            if !self.tick() {
                return Step::Budget;
            }
            let mut next = st.clone();
            if on_first && is_rep {
                next.has_rep = true;
            }
            if !next.pick(self, l, v as u64) {
                continue;
            }
            // The last pick at the first level must supply a representative.
            if on_first && need == 1 && !next.has_rep {
                continue;
            }
            match self.dfs(next, l, Some(v as u64)) {
                Step::Exhausted => {}
                other => return other,
            }
        }
        Step::Exhausted
    }
}

fn witness_of(q: u32, st: &State) -> LevelSet {
    let mut c = LevelSet::new(q).expect("valid alphabet");
    for (l, vs) in st.chosen.iter().enumerate() {
        for &v in vs {
            c.insert_num(l, v).expect("level within cap");
        }
    }
    c
}

/// Decides whether a fix-free code fits `p` by depth-first search over the
/// levels, choosing subsets of free words in ascending order. Branches whose
/// first-level set contains no orbit representative are skipped.
pub fn search(p: &Profile, opts: &SearchOptions) -> SearchResult {
    let t0 = Instant::now();
    let q = p.q();
    let done = |verdict, witness, nodes| SearchResult {
        verdict,
        witness,
        nodes,
        elapsed: t0.elapsed(),
    };
    let Some(first) = p.min_level() else {
        return done(Verdict::Found, Some(LevelSet::new(q).expect("valid q")), 0);
    };
    if p.kraft_sum() > Rational::one() {
        // Every fix-free code is prefix-free, hence has Kraft sum at most 1.
        return done(Verdict::Nonexistent, None, 0);
    }
    let top = p.max_level();
    if cells(q, top).is_err() || upow(q, top) > DEFAULT_CELL_CAP {
        return done(Verdict::Unknown, None, 0);
    }
    let mut reps = FixedBitSet::with_capacity(upow(q, first) as usize);
    for v in 0..upow(q, first) {
        if orbit_min(q, first, v) == v {
            reps.insert(v as usize);
        }
    }
    let nodes = AtomicU64::new(0);
    let stop = AtomicBool::new(false);
    let ctx = Ctx {
        q,
        alpha: (0..=top).map(|l| p.alpha(l)).collect(),
        top,
        first,
        reps,
        nodes: &nodes,
        budget: opts.budget,
        stop: &stop,
    };
    let root = State::new(q, top);
    let step = if opts.jobs <= 1 {
        ctx.dfs(root, first, None)
    } else {
        parallel_root(&ctx, root, opts)
    };
    let n = nodes.load(Ordering::Relaxed).min(opts.budget);
    match step {
        Step::Found(st) => {
            let w = witness_of(q, &st);
            debug_assert!(fits(&w, p) && is_free(&w, Mode::Fix));
            done(Verdict::Found, Some(w), n)
        }
        Step::Exhausted => done(Verdict::Nonexistent, None, n),
        Step::Budget => done(Verdict::Unknown, None, n),
    }
}

/// Splits on the smallest word of the first level and explores the branches
/// on a private thread pool.
fn parallel_root(ctx: &Ctx, root: State, opts: &SearchOptions) -> Step {
    let l = ctx.first;
    let cands: Vec<u64> = root.free[l].ones().map(|v| v as u64).collect();
    let branch = |&v: &u64| -> Step {
        if ctx.stop.load(Ordering::Relaxed) {
            return Step::Budget;
        }
        let is_rep = ctx.reps.contains(v as usize);
        let mut st = root.clone();
        st.has_rep = is_rep;
        if !ctx.tick() {
            return Step::Budget;
        }
        if !st.pick(ctx, l, v) || (ctx.alpha[l] == 1 && !is_rep) {
            return Step::Exhausted;
        }
        let out = ctx.dfs(st, l, Some(v));
        if matches!(out, Step::Found(_)) && !opts.deterministic {
            ctx.stop.store(true, Ordering::Relaxed);
        }
        out
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(opts.jobs).build() {
        Ok(p) => p,
        Err(_) => return ctx.dfs(root, l, None),
    };
    let results: Vec<Step> = pool.install(|| cands.par_iter().map(branch).collect());
    let mut budget_hit = false;
    for r in results {
        match r {
            Step::Found(st) => return Step::Found(st),
            Step::Budget => {
                budget_hit = true;
                if opts.deterministic {
                    // An earlier branch is undecided, so the first witness is unknown.
                    return Step::Budget;
                }
            }
            Step::Exhausted => {}
        }
    }
    if budget_hit {
        Step::Budget
    } else {
        Step::Exhausted
    }
}

/// Integer inequality proving that no fix-free code fits a profile with
/// words at exactly two levels `m < n`, `n >= 2m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub q: u32,
    pub m: usize,
    pub alpha_m: u64,
    pub n: usize,
    pub alpha_n: u64,
    /// Size of the bifix shadow at level `n` of any `alpha_m` words of level `m`.
    pub shadow: u128,
    /// `shadow + alpha_n`.
    pub lhs: u128,
    /// `q^n`.
    pub rhs: u128,
}

impl Certificate {
    pub fn holds(&self) -> bool {
        self.lhs > self.rhs
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "2*{am}*{q}^{d} - {am}^2*{q}^{e} + {an} = {lhs} > {rhs} = {q}^{n}",
            am = self.alpha_m,
            q = self.q,
            d = self.n - self.m,
            e = self.n - 2 * self.m,
            an = self.alpha_n,
            lhs = self.lhs,
            rhs = self.rhs,
            n = self.n
        )
    }
}

/// A profile with Kraft sum in `(3/4, 3/4 + eps)` that no fix-free code fits.
/// `eps` above 1/2 is clamped to 1/2.
pub fn counterexample(q: u32, eps: &Rational) -> Result<(Profile, Certificate)> {
    crate::words::check_q(q)?;
    if !eps.is_positive() {
        return Err(Error::OutOfRange(format!("eps = {} must be positive", fmt_rational(eps))));
    }
    let eps = eps.clone().min(ratio(1, 2));
    let big = |x: u128| Rational::from_integer(x.into());
    let qq = q as u128;
    let mut m = 1usize;
    while &eps * big(qq.pow(m as u32)) <= big(2) {
        m += 1;
    }
    let mut n = 2 * m;
    while &eps * big(2 * qq.pow(n as u32)) <= big(4) {
        n += 1;
    }
    if n > 40 {
        return Err(Error::OutOfRange("eps too small for a representable profile".into()));
    }
    let qm = qq.pow(m as u32);
    let qn = qq.pow(n as u32);
    let alpha_m = qm / 2 + 1;
    let alpha_n = qn / 4 + 1;
    debug_assert!(big(2 * alpha_m) < big(qm) * (Rational::one() + &eps));
    debug_assert!(big(4 * alpha_n) < big(qn) * (Rational::one() + &eps * big(2)));
    let shadow = 2 * alpha_m * qq.pow((n - m) as u32) - alpha_m * alpha_m * qq.pow((n - 2 * m) as u32);
    let mut counts = vec![0u64; n];
    counts[m - 1] = alpha_m as u64;
    counts[n - 1] = alpha_n as u64;
    let cert = Certificate {
        q,
        m,
        alpha_m: alpha_m as u64,
        n,
        alpha_n: alpha_n as u64,
        shadow,
        lhs: shadow + alpha_n,
        rhs: qn,
    };
    Ok((Profile::new(q, counts)?, cert))
}

/// Nondecreasing binary codeword lengths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LengthsSeq {
    lengths: Vec<usize>,
}

impl LengthsSeq {
    pub fn new(lengths: Vec<usize>) -> Result<Self> {
        if lengths.iter().any(|&l| l == 0) {
            return Err(Error::OutOfRange("lengths must be positive".into()));
        }
        if lengths.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::OutOfRange("lengths must be nondecreasing".into()));
        }
        if lengths.last().is_some_and(|&l| l > 62) {
            return Err(Error::OutOfRange("lengths above 62 are not supported".into()));
        }
        Ok(LengthsSeq { lengths })
    }

    pub fn parse(s: &str) -> Result<Self> {
        let v = s
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| t.trim().parse::<usize>().map_err(|e| Error::Parse(format!("{t}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        LengthsSeq::new(v)
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    /// `l_i`, 1-indexed.
    pub fn l(&self, i: usize) -> usize {
        self.lengths[i - 1]
    }

    /// Least 1-based index `j` with `l_j = l_{i+1}`, for `0 <= i < n`.
    pub fn h(&self, i: usize) -> usize {
        let target = self.lengths[i];
        self.lengths.iter().position(|&l| l == target).unwrap() + 1
    }

    pub fn profile(&self) -> Profile {
        let top = self.lengths.last().copied().unwrap_or(0);
        let mut counts = vec![0u64; top];
        for &l in &self.lengths {
            counts[l - 1] += 1;
        }
        Profile::new(2, counts).expect("binary")
    }

    pub fn kraft_sum(&self) -> Rational {
        self.lengths.iter().map(|&l| inv_pow(2, l)).sum()
    }
}

impl fmt::Display for LengthsSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.lengths.iter().map(|l| l.to_string()).collect();
        f.write_str(&s.join(","))
    }
}

/// How the index-ambiguous terms of the su/ne products are read.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reading {
    /// Shadow sum over `j <= i` of `2^{-l_j}`; same-length and overlap terms
    /// measured at level `l_{i+1}`; ordered pairs `(j, k)` including `j = k`.
    Shifted,
    /// Indices taken as typeset: `i 2^{-l_i}`, `2^{1-l_i}` and the overlap
    /// condition `l_j + l_k <= l_i + 1`.
    Literal,
}

impl Reading {
    pub fn name(self) -> &'static str {
        match self {
            Reading::Shifted => "shifted",
            Reading::Literal => "literal",
        }
    }
}

/// The reading the calibration run accepted.
pub const CHOSEN_READING: Reading = Reading::Shifted;

fn pos(x: Rational) -> Rational {
    if x.is_positive() {
        x
    } else {
        Rational::zero()
    }
}

fn pow2(e: i64) -> Rational {
    if e >= 0 {
        Rational::from_integer(num::BigInt::one() << e as usize)
    } else {
        inv_pow(2, (-e) as usize)
    }
}

fn factor(s: &LengthsSeq, i: usize, reading: Reading, upper: bool) -> Rational {
    let li1 = s.l(i + 1) as i64;
    let li = s.l(i) as i64;
    let h = s.h(i);
    let mut x = Rational::one();
    let same = Rational::from_integer(((i + 1 - h) as i64).into());
    match reading {
        Reading::Shifted => {
            for j in 1..=i {
                x -= pow2(1 - s.l(j) as i64);
            }
            x += same * pow2(-li1);
        }
        Reading::Literal => {
            x -= Rational::from_integer((2 * i as i64).into()) * pow2(-li);
            x += same * pow2(1 - li);
        }
    }
    let bound = match reading {
        Reading::Shifted => li1,
        Reading::Literal => li + 1,
    };
    for j in 1..h {
        for k in 1..h {
            let (lj, lk) = (s.l(j) as i64, s.l(k) as i64);
            if upper {
                x += pow2((li1 - lj - lk).max(0) - li1);
            } else if lj + lk <= bound {
                x += pow2(-lj - lk);
            }
        }
    }
    pos(x)
}

fn product(s: &LengthsSeq, reading: Reading, upper: bool) -> Rational {
    (1..s.len()).map(|i| factor(s, i, reading, upper)).product()
}

/// Sufficient-condition product under the chosen reading.
pub fn su(s: &LengthsSeq) -> Rational {
    su_with(s, CHOSEN_READING)
}

/// Necessary-condition product under the chosen reading.
pub fn ne(s: &LengthsSeq) -> Rational {
    ne_with(s, CHOSEN_READING)
}

pub fn su_with(s: &LengthsSeq, reading: Reading) -> Rational {
    product(s, reading, false)
}

pub fn ne_with(s: &LengthsSeq, reading: Reading) -> Rational {
    product(s, reading, true)
}

/// True if `sum 2^{-l_j} < 1/2 + (n + 2 - h(n-1))/2 * 2^{-l_n}`.
pub fn madcor_check(s: &LengthsSeq) -> bool {
    let n = s.len();
    if n == 0 {
        return true;
    }
    let h = s.h(n - 1) as i64;
    let coeff = Rational::new((n as i64 + 2 - h).into(), 2.into());
    s.kraft_sum() < ratio(1, 2) + coeff * inv_pow(2, s.l(n))
}
