//! The de Bruijn digraph `B_q(n)`: vertices are words of length `n`, the edge
//! `a u b` of length `n + 1` runs from `a u` to `u b`.
//!
//! Closed paths are handled as cyclic sequences, whose windows of length
//! `n + 1` are the traversed edges.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num::BigInt;

use crate::error::{Error, Result};
use crate::words::{check_q, checked_pow, upow, MAX_Q};

/// Node budget of the exhaustive fallback in [`k_regular_subgraph`].
pub const DEFAULT_SUBGRAPH_BUDGET: u64 = 2_000_000;

/// Largest vertex count handled by the exhaustive fallback.
pub const SUBGRAPH_SEARCH_VERTEX_CAP: u64 = 4096;

/// A cyclic sequence `[w_0 .. w_{L-1}]`; indices are taken mod `L`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CyclicSeq {
    pub q: u32,
    pub letters: Vec<u8>,
}

impl CyclicSeq {
    pub fn new(q: u32, letters: Vec<u8>) -> Result<Self> {
        check_q(q)?;
        if letters.is_empty() {
            return Err(Error::InvalidWord("empty cyclic sequence".into()));
        }
        if let Some(&d) = letters.iter().find(|&&d| d as u32 >= q) {
            return Err(Error::InvalidWord(format!("letter {d} not below q={q}")));
        }
        Ok(CyclicSeq { q, letters })
    }

    pub fn parse(q: u32, s: &str) -> Result<Self> {
        let mut letters = Vec::new();
        for c in s.trim().chars() {
            let d = c
                .to_digit(MAX_Q)
                .ok_or_else(|| Error::Parse(format!("bad letter {c:?}")))?;
            letters.push(d as u8);
        }
        Self::new(q, letters)
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letter(&self, i: usize) -> u8 {
        self.letters[i % self.letters.len()]
    }

    /// Value of the window `w_i .. w_{i+n-1}`.
    pub fn window(&self, i: usize, n: usize) -> u64 {
        let q = self.q as u64;
        (0..n).fold(0u64, |acc, j| acc * q + self.letter(i + j) as u64)
    }

    /// `Sub_w(n)`: the distinct windows of length `n`.
    pub fn sub(&self, n: usize) -> BTreeSet<u64> {
        (0..self.len()).map(|i| self.window(i, n)).collect()
    }

    /// `Num_w(u)`: the number of positions where the window of length `n` equals `u`.
    pub fn occurrences(&self, u: u64, n: usize) -> usize {
        (0..self.len()).filter(|&i| self.window(i, n) == u).count()
    }

    /// The sequence rotated left by `t`.
    pub fn shifted(&self, t: usize) -> CyclicSeq {
        let letters = (0..self.len()).map(|i| self.letter(i + t)).collect();
        CyclicSeq { q: self.q, letters }
    }
}

impl fmt::Display for CyclicSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &d in &self.letters {
            write!(f, "{}", char::from_digit(d as u32, MAX_Q).unwrap())?;
        }
        Ok(())
    }
}

/// How a cyclic sequence sits in `B_q(n)`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CycleKind {
    /// Distinct vertices.
    Cycle,
    /// Distinct edges, some vertex repeated.
    ClosedPath,
    Neither,
}

pub fn cycle_check(w: &CyclicSeq, n: usize) -> CycleKind {
    if w.sub(n).len() == w.len() {
        CycleKind::Cycle
    } else if w.sub(n + 1).len() == w.len() {
        CycleKind::ClosedPath
    } else {
        CycleKind::Neither
    }
}

/// A set of edges of `B_q(n)`, each a word of length `n + 1` stored by value.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EdgeSet {
    pub q: u32,
    pub n: usize,
    pub edges: BTreeSet<u64>,
}

impl EdgeSet {
    pub fn new(q: u32, n: usize) -> Result<Self> {
        check_q(q)?;
        checked_pow(q, n + 1).ok_or(Error::LevelTooLarge { q, level: n + 1 })?;
        Ok(EdgeSet {
            q,
            n,
            edges: BTreeSet::new(),
        })
    }

    pub fn from_edges<I: IntoIterator<Item = u64>>(q: u32, n: usize, edges: I) -> Result<Self> {
        let mut g = EdgeSet::new(q, n)?;
        for e in edges {
            g.insert(e)?;
        }
        Ok(g)
    }

    /// The complete digraph `B_q(n)`.
    pub fn complete(q: u32, n: usize) -> Result<Self> {
        let size = checked_pow(q, n + 1).ok_or(Error::LevelTooLarge { q, level: n + 1 })?;
        Self::from_edges(q, n, 0..size)
    }

    /// Edges traversed by a closed path given as a cyclic sequence.
    pub fn from_cycle(w: &CyclicSeq, n: usize) -> Result<Self> {
        Self::from_edges(w.q, n, w.sub(n + 1))
    }

    pub fn insert(&mut self, e: u64) -> Result<bool> {
        if e >= upow(self.q, self.n + 1) {
            return Err(Error::OutOfRange(format!("edge value {e}")));
        }
        Ok(self.edges.insert(e))
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn start(&self, e: u64) -> u64 {
        e / self.q as u64
    }

    pub fn end(&self, e: u64) -> u64 {
        e % upow(self.q, self.n)
    }

    /// Vertices touched by some edge.
    pub fn vertices(&self) -> BTreeSet<u64> {
        let mut v = BTreeSet::new();
        for &e in &self.edges {
            v.insert(self.start(e));
            v.insert(self.end(e));
        }
        v
    }

    /// `(out, in)` degree of every touched vertex.
    pub fn degrees(&self) -> BTreeMap<u64, (usize, usize)> {
        let mut d: BTreeMap<u64, (usize, usize)> = BTreeMap::new();
        for &e in &self.edges {
            d.entry(self.start(e)).or_default().0 += 1;
            d.entry(self.end(e)).or_default().1 += 1;
        }
        d
    }

    /// Every touched vertex has in- and out-degree `k`.
    pub fn is_k_regular(&self, k: usize) -> bool {
        self.degrees().values().all(|&(o, i)| o == k && i == k)
    }

    /// Weakly connected components, as a map from vertex to component index.
    pub fn components(&self) -> HashMap<u64, usize> {
        let verts: Vec<u64> = self.vertices().into_iter().collect();
        let index: HashMap<u64, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut parent: Vec<usize> = (0..verts.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &e in &self.edges {
            let a = find(&mut parent, index[&self.start(e)]);
            let b = find(&mut parent, index[&self.end(e)]);
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut label = HashMap::new();
        let mut out = HashMap::new();
        for (i, &v) in verts.iter().enumerate() {
            let r = find(&mut parent, i);
            let next = label.len();
            let c = *label.entry(r).or_insert(next);
            out.insert(v, c);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        let comps = self.components();
        comps.values().all(|&c| c == 0)
    }

    /// Text form: header `q=.. n=..`, then one edge word per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("q={} n={}\n", self.q, self.n);
        for &e in &self.edges {
            let w = crate::words::Word {
                q: self.q,
                len: self.n + 1,
                val: e,
            };
            s.push_str(&w.to_string());
            s.push('\n');
        }
        s
    }

    /// The edges of the line digraph, viewed inside `B_q(n + 1)`: words of
    /// length `n + 2` whose two windows of length `n + 1` are both edges.
    pub fn line_graph(&self) -> Result<EdgeSet> {
        let mut g = EdgeSet::new(self.q, self.n + 1)?;
        let q = self.q as u64;
        for &e in &self.edges {
            for b in 0..q {
                let next = (e % upow(self.q, self.n)) * q + b;
                if self.edges.contains(&next) {
                    g.insert(e * q + b)?;
                }
            }
        }
        Ok(g)
    }
}

fn edge_letters(g: &EdgeSet, circuit: &[u64]) -> CyclicSeq {
    let head = upow(g.q, g.n);
    CyclicSeq {
        q: g.q,
        letters: circuit.iter().map(|&e| (e / head) as u8).collect(),
    }
}

/// Euler circuit of a connected balanced edge set, always leaving a vertex
/// by its smallest unused edge.
pub fn euler_circuit(g: &EdgeSet) -> Result<CyclicSeq> {
    if g.is_empty() {
        return Err(Error::NotEulerian);
    }
    if !g.degrees().values().all(|&(o, i)| o == i) {
        return Err(Error::NotEulerian);
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let q = g.q as u64;
    let mut next_letter: HashMap<u64, u64> = HashMap::new();
    let mut take = |v: u64| -> Option<u64> {
        let ptr = next_letter.entry(v).or_insert(0);
        while *ptr < q {
            let e = v * q + *ptr;
            *ptr += 1;
            if g.edges.contains(&e) {
                return Some(e);
            }
        }
        None
    };
    let first = *g.edges.iter().next().unwrap();
    let mut vstack = vec![g.start(first)];
    let mut estack: Vec<u64> = Vec::new();
    let mut circuit = Vec::with_capacity(g.len());
    while let Some(&v) = vstack.last() {
        if let Some(e) = take(v) {
            vstack.push(g.end(e));
            estack.push(e);
        } else {
            vstack.pop();
            if let Some(e) = estack.pop() {
                circuit.push(e);
            }
        }
    }
    circuit.reverse();
    if circuit.len() != g.len() {
        return Err(Error::Internal("circuit does not cover all edges".into()));
    }
    Ok(edge_letters(g, &circuit))
}

/// Reinterprets a closed path of `B_q(from_n)` in `B_q(from_n + m)`.
pub fn line_lift(w: &CyclicSeq, from_n: usize, m: usize) -> Result<CyclicSeq> {
    if w.sub(from_n + 1).len() != w.len() {
        return Err(Error::NotClosedPath);
    }
    let _ = m;
    Ok(w.clone())
}

/// A total map `F: A^n -> A` such that `a -> F(a u)` permutes `A` for every
/// `u` of length `n - 1`. Its edges `x F(x)` form a 1-factor of `B_q(n)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SuccessorMap {
    pub q: u32,
    pub n: usize,
    pub f: Vec<u8>,
}

impl SuccessorMap {
    pub fn new(q: u32, n: usize, f: Vec<u8>) -> Result<Self> {
        check_q(q)?;
        if n == 0 || f.len() as u64 != upow(q, n) {
            return Err(Error::OutOfRange("successor table size".into()));
        }
        let s = SuccessorMap { q, n, f };
        if !s.is_valid() {
            return Err(Error::NotOneRegular);
        }
        Ok(s)
    }

    pub fn apply(&self, v: u64) -> u8 {
        self.f[v as usize]
    }

    /// Checks that every section `a -> F(a u)` is a permutation.
    pub fn is_valid(&self) -> bool {
        let inner = upow(self.q, self.n - 1);
        (0..inner).all(|u| {
            let mut seen = vec![false; self.q as usize];
            for a in 0..self.q as u64 {
                let b = self.f[(a * inner + u) as usize] as usize;
                if b >= seen.len() || seen[b] {
                    return false;
                }
                seen[b] = true;
            }
            true
        })
    }

    pub fn edges(&self) -> EdgeSet {
        let q = self.q as u64;
        let edges = (0..self.f.len() as u64).map(|v| v * q + self.f[v as usize] as u64);
        EdgeSet::from_edges(self.q, self.n, edges).expect("valid edge values")
    }

    /// The `(m+1)`-factor with edges `x (F(x) + i mod q)` for `i = 0..=m`.
    pub fn shifted_factor(&self, m: usize) -> EdgeSet {
        let q = self.q as u64;
        let mut g = EdgeSet::new(self.q, self.n).expect("valid size");
        for v in 0..self.f.len() as u64 {
            for i in 0..=m as u64 {
                g.edges.insert(v * q + (self.f[v as usize] as u64 + i) % q);
            }
        }
        g
    }
}

/// Extends a 1-regular edge set to a full 1-factor of `B_q(n)`, filling the
/// free letters of each section in ascending order.
pub fn extend_to_one_factor(c: &EdgeSet) -> Result<SuccessorMap> {
    if c.n == 0 {
        return Err(Error::OutOfRange("order must be at least 1".into()));
    }
    if !c.is_k_regular(1) {
        return Err(Error::NotOneRegular);
    }
    let q = c.q as u64;
    let inner = upow(c.q, c.n - 1);
    let mut f: Vec<Option<u8>> = vec![None; upow(c.q, c.n) as usize];
    for &e in &c.edges {
        f[c.start(e) as usize] = Some((e % q) as u8);
    }
    for u in 0..inner {
        let mut used = vec![false; q as usize];
        for a in 0..q {
            if let Some(b) = f[(a * inner + u) as usize] {
                used[b as usize] = true;
            }
        }
        let mut free = (0..q as u8).filter(|&b| !used[b as usize]);
        for a in 0..q {
            let slot = &mut f[(a * inner + u) as usize];
            if slot.is_none() {
                *slot = Some(free.next().ok_or(Error::NotOneRegular)?);
            }
        }
    }
    SuccessorMap::new(c.q, c.n, f.into_iter().map(|b| b.unwrap()).collect())
}

/// Kuhn augmenting paths on the out/in bipartite double of `g`.
fn perfect_matching(g: &EdgeSet, verts: &[u64]) -> Option<Vec<u64>> {
    let q = g.q as u64;
    let idx: HashMap<u64, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let adj: Vec<Vec<usize>> = verts
        .iter()
        .map(|&v| {
            (0..q)
                .map(|b| v * q + b)
                .filter(|e| g.edges.contains(e))
                .map(|e| idx[&g.end(e)])
                .collect()
        })
        .collect();
    let mut match_right: Vec<Option<usize>> = vec![None; verts.len()];
    fn augment(
        u: usize,
        adj: &[Vec<usize>],
        seen: &mut [bool],
        match_right: &mut [Option<usize>],
    ) -> bool {
        for &r in &adj[u] {
            if seen[r] {
                continue;
            }
            seen[r] = true;
            if match_right[r].is_none() || augment(match_right[r].unwrap(), adj, seen, match_right)
            {
                match_right[r] = Some(u);
                return true;
            }
        }
        false
    }
    for u in 0..verts.len() {
        let mut seen = vec![false; verts.len()];
        if !augment(u, &adj, &mut seen, &mut match_right) {
            return None;
        }
    }
    let mut edges = Vec::with_capacity(verts.len());
    for (r, l) in match_right.iter().enumerate() {
        let l = l.expect("perfect matching");
        edges.push(verts[l] * q + verts[r] % q);
    }
    Some(edges)
}

/// Splits a `k`-regular edge set into `k` edge-disjoint 1-factors on its vertex set.
pub fn one_factor_decomposition(g: &EdgeSet, k: usize) -> Result<Vec<EdgeSet>> {
    if k == 0 || !g.is_k_regular(k) {
        return Err(Error::NotKRegular(k));
    }
    let verts: Vec<u64> = g.vertices().into_iter().collect();
    let mut rest = g.clone();
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        let m = perfect_matching(&rest, &verts).ok_or(Error::MatchingFailed)?;
        let factor = EdgeSet::from_edges(g.q, g.n, m.iter().copied())?;
        for e in &m {
            rest.edges.remove(e);
        }
        out.push(factor);
    }
    if !rest.is_empty() {
        return Err(Error::MatchingFailed);
    }
    Ok(out)
}

/// A cycle of length `L` in `B_q(n)`, built by Lempel's induction.
pub fn lempel_cycle(q: u32, n: usize, l: u64) -> Result<CyclicSeq> {
    check_q(q)?;
    let size = checked_pow(q, n).ok_or(Error::LevelTooLarge { q, level: n })?;
    if l == 0 || l > size {
        return Err(Error::OutOfRange(format!("cycle length {l} in B_{q}({n})")));
    }
    lempel(q, n, l)
}

fn lempel(q: u32, n: usize, l: u64) -> Result<CyclicSeq> {
    if n == 0 {
        return CyclicSeq::new(q, vec![0]);
    }
    if n == 1 {
        return CyclicSeq::new(q, (0..l as u8).collect());
    }
    let below = upow(q, n - 1);
    if l <= below {
        return lempel(q, n - 1, l);
    }
    let m = (l - 1) / below;
    let k = l - m * below;
    let l_short = below - k;
    // Connected balanced subgraph of B_q(n-1) with l edges.
    let c = if l_short > 0 {
        EdgeSet::from_cycle(&lempel(q, n - 1, l_short)?, n - 1)?
    } else {
        EdgeSet::new(q, n - 1)?
    };
    let factor = extend_to_one_factor(&c)?;
    let mut g = factor.shifted_factor(m as usize);
    for e in &c.edges {
        g.edges.remove(e);
    }
    merge_components(&mut g)?;
    euler_circuit(&g)
}

/// Joins the components of a balanced edge set without isolated vertices by
/// swapping `w1 v b, a v wn` for `w1 v wn, a v b`.
fn merge_components(g: &mut EdgeSet) -> Result<()> {
    let q = g.q as u64;
    let n = g.n;
    let mid_count = upow(g.q, n - 1);
    let head = upow(g.q, n);
    loop {
        let comp = g.components();
        if comp.values().all(|&c| c == 0) {
            return Ok(());
        }
        let mut swapped = false;
        'outer: for v in 0..mid_count {
            let with_mid: Vec<u64> = (0..q)
                .flat_map(|a| (0..q).map(move |b| a * head + v * q + b))
                .filter(|e| g.edges.contains(e))
                .collect();
            for &x in &with_mid {
                let cx = comp[&g.start(x)];
                for &y in &with_mid {
                    if comp[&g.start(y)] == cx {
                        continue;
                    }
                    let (w1, b) = (x / head, x % q);
                    let (a, wn) = (y / head, y % q);
                    let e = w1 * head + v * q + wn;
                    let f = a * head + v * q + b;
                    g.edges.remove(&x);
                    g.edges.remove(&y);
                    g.edges.insert(e);
                    g.edges.insert(f);
                    swapped = true;
                    break 'outer;
                }
            }
        }
        if !swapped {
            return Err(Error::Internal("no merging swap found".into()));
        }
    }
}

/// `k`-regular subgraph of `B_q(n)` with exactly `L` vertices.
pub fn k_regular_subgraph(q: u32, n: usize, k: usize, l: u64) -> Result<EdgeSet> {
    k_regular_subgraph_with_budget(q, n, k, l, DEFAULT_SUBGRAPH_BUDGET)
}

pub fn k_regular_subgraph_with_budget(
    q: u32,
    n: usize,
    k: usize,
    l: u64,
    budget: u64,
) -> Result<EdgeSet> {
    check_q(q)?;
    if n == 0 || k == 0 || k > q as usize {
        return Err(Error::OutOfRange(format!("n={n}, k={k}, q={q}")));
    }
    let size = checked_pow(q, n).ok_or(Error::LevelTooLarge { q, level: n })?;
    checked_pow(q, n + 1).ok_or(Error::LevelTooLarge { q, level: n + 1 })?;
    if l == 0 || l > size {
        return Err(Error::OutOfRange(format!("{l} vertices in B_{q}({n})")));
    }
    let kn = (k as u64).pow(n as u32);
    let kn1 = (k as u64).pow(n as u32 - 1);
    if l < kn || (kn < l && l < kn + kn1) {
        return Err(Error::Impossible(format!(
            "no {k}-regular subgraph of B_{q}({n}) has {l} vertices"
        )));
    }
    if k == 1 {
        return EdgeSet::from_cycle(&lempel_cycle(q, n, l)?, n);
    }
    if (l - kn) % kn1 == 0 && (l - kn) / kn1 <= (q as u64 - k as u64) {
        let p = (l - kn) / kn1;
        return normal_graph(q, n, k, p as usize);
    }
    if size > SUBGRAPH_SEARCH_VERTEX_CAP {
        return Err(Error::Unsupported(format!(
            "{k}-regular subgraph of B_{q}({n}) with {l} vertices"
        )));
    }
    search_regular(q, n, k, l, budget)
}

/// The lifted graph on `k^n + p k^{n-1}` vertices with `a -> a + i mod (k+p)`, `i < k`.
fn normal_graph(q: u32, n: usize, k: usize, p: usize) -> Result<EdgeSet> {
    let r = (k + p) as u64;
    let qq = q as u64;
    let base = (0..r).flat_map(|a| (0..k as u64).map(move |i| a * qq + (a + i) % r));
    let mut g = EdgeSet::from_edges(q, 1, base)?;
    for _ in 1..n {
        g = g.line_graph()?;
    }
    Ok(g)
}

struct RegularSearch {
    q: u64,
    n: usize,
    k: u64,
    target: u64,
    size: u64,
    inner: u64,
    chosen: Vec<bool>,
    s_in: Vec<u64>,
    s_left: Vec<u64>,
    t_in: Vec<u64>,
    t_left: Vec<u64>,
    picked: u64,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl RegularSearch {
    fn feasible_block(&self, lo_s: u64, hi_s: u64, lo_t: u64, hi_t: u64) -> bool {
        let lo = lo_s.max(lo_t);
        let hi = hi_s.min(hi_t);
        if lo > hi {
            return false;
        }
        lo == 0 || hi >= self.k.max(lo)
    }

    fn block_ok(&self, u: usize) -> bool {
        self.feasible_block(
            self.s_in[u],
            self.s_in[u] + self.s_left[u],
            self.t_in[u],
            self.t_in[u] + self.t_left[u],
        )
    }

    fn dfs(&mut self, x: u64) -> bool {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return false;
        }
        if self.picked == self.target {
            // Remaining vertices are excluded; every block must close cleanly.
            return (0..self.inner as usize).all(|u| {
                self.feasible_block(self.s_in[u], self.s_in[u], self.t_in[u], self.t_in[u])
            });
        }
        if x == self.size || self.picked + (self.size - x) < self.target {
            return false;
        }
        let su = (x % self.inner) as usize;
        let pu = (x / self.q) as usize;
        self.s_left[su] -= 1;
        self.t_left[pu] -= 1;
        for include in [true, false] {
            if include {
                self.s_in[su] += 1;
                self.t_in[pu] += 1;
                self.picked += 1;
            }
            if self.block_ok(su) && self.block_ok(pu) {
                self.chosen[x as usize] = include;
                if self.dfs(x + 1) {
                    return true;
                }
                if self.exhausted {
                    return false;
                }
            }
            if include {
                self.s_in[su] -= 1;
                self.t_in[pu] -= 1;
                self.picked -= 1;
            }
        }
        self.chosen[x as usize] = false;
        self.s_left[su] += 1;
        self.t_left[pu] += 1;
        false
    }
}

fn search_regular(q: u32, n: usize, k: usize, l: u64, budget: u64) -> Result<EdgeSet> {
    let qq = q as u64;
    let size = upow(q, n);
    let inner = upow(q, n - 1);
    let mut st = RegularSearch {
        q: qq,
        n,
        k: k as u64,
        target: l,
        size,
        inner,
        chosen: vec![false; size as usize],
        s_in: vec![0; inner as usize],
        s_left: vec![qq; inner as usize],
        t_in: vec![0; inner as usize],
        t_left: vec![qq; inner as usize],
        picked: 0,
        nodes: 0,
        budget,
        exhausted: false,
    };
    if !st.dfs(0) {
        if st.exhausted {
            return Err(Error::Unsupported(format!(
                "search budget {budget} exhausted for {k}-regular subgraph of B_{q}({n})"
            )));
        }
        return Err(Error::Impossible(format!(
            "no {k}-regular subgraph of B_{q}({n}) has {l} vertices"
        )));
    }
    let mut g = EdgeSet::new(q, st.n)?;
    for u in 0..inner {
        let left: Vec<u64> = (0..qq)
            .map(|a| a * inner + u)
            .filter(|&v| st.chosen[v as usize])
            .collect();
        let right: Vec<u64> = (0..qq)
            .map(|b| u * qq + b)
            .filter(|&v| st.chosen[v as usize])
            .collect();
        let s = left.len();
        for (i, &x) in left.iter().enumerate() {
            for j in 0..k {
                let y = right[(i + j) % s];
                g.insert(x * qq + y % qq)?;
            }
        }
    }
    Ok(g)
}

/// Checks that `w` is a `(k, L, n)`-regular sequence.
pub fn regular_sequence_check(w: &CyclicSeq, k: usize, l: usize, n: usize) -> bool {
    let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
    for i in 0..w.len() {
        *counts.entry(w.window(i, n)).or_default() += 1;
    }
    counts.len() == l
        && counts.values().all(|&c| c == k)
        && w.len() == k * l
        && w.sub(n + 1).len() == w.len()
}

/// Number of Hamilton circuits of `B_q(n)`:
/// `((q-1)!)^{q^{n-1}} q^{q^{n-1} - n}`.
pub fn hamilton_circuit_count(q: u32, n: usize) -> BigInt {
    assert!(n >= 1);
    let e = upow(q, n - 1) as usize;
    let fact: BigInt = (1..q as u64).map(BigInt::from).product();
    num::pow(fact, e) * num::pow(BigInt::from(q), e - n)
}

/// The binary sequence of the linear map with coefficients `c`, started at
/// `1 0^{n-1}`, up to its period.
pub fn linear_sequence(c: &[u8]) -> CyclicSeq {
    let n = c.len();
    let mut state: Vec<u8> = std::iter::once(1).chain(std::iter::repeat(0).take(n - 1)).collect();
    let start = state.clone();
    let mut letters = Vec::new();
    loop {
        letters.push(state[0]);
        let f = c.iter().zip(&state).map(|(a, b)| a * b).sum::<u8>() % 2;
        state.remove(0);
        state.push(f);
        if state == start || letters.len() > (1usize << n) {
            break;
        }
    }
    CyclicSeq { q: 2, letters }
}

/// Every maximal linear successor map of order `n` over `{0, 1}`, ascending.
pub fn all_maximal_linear_maps(n: usize) -> Vec<Vec<u8>> {
    assert!((1..=24).contains(&n));
    let period = (1usize << n) - 1;
    (1u64 << (n - 1)..1u64 << n)
        .map(|v| (0..n).map(|i| ((v >> (n - 1 - i)) & 1) as u8).collect::<Vec<u8>>())
        .filter(|c| linear_sequence(c).len() == period)
        .collect()
}

/// The first maximal linear successor map of order `n` (ascending coefficient value).
pub fn maximal_linear_map(n: usize) -> Result<Vec<u8>> {
    if !(1..=24).contains(&n) {
        return Err(Error::OutOfRange(format!("order {n}")));
    }
    static CACHE: OnceLock<Mutex<HashMap<usize, Vec<u8>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(c) = cache.lock().unwrap().get(&n) {
        return Ok(c.clone());
    }
    let period = (1usize << n) - 1;
    let found = (1u64 << (n - 1)..1u64 << n)
        .map(|v| (0..n).map(|i| ((v >> (n - 1 - i)) & 1) as u8).collect::<Vec<u8>>())
        .find(|c| linear_sequence(c).len() == period);
    let c = found.ok_or_else(|| Error::Internal(format!("no maximal linear map of order {n}")))?;
    cache.lock().unwrap().insert(n, c.clone());
    Ok(c)
}

/// Splits the maximal linear cycle of order `n` into vertex-disjoint cycles
/// of lengths `L` and `2^n - 1 - L`.
pub fn golomb_split(n: usize, l: u64) -> Result<(CyclicSeq, CyclicSeq)> {
    if !(2..=24).contains(&n) {
        return Err(Error::OutOfRange(format!("order {n}")));
    }
    let period = (1u64 << n) - 1;
    if l < 2 || l > period - 1 {
        return Err(Error::OutOfRange(format!("split length {l} for order {n}")));
    }
    let w = linear_sequence(&maximal_linear_map(n)?);
    let p = period as usize;
    let l = l as usize;
    let diff: Vec<u8> = (0..p).map(|i| w.letter(i) ^ w.letter(i + l)).collect();
    let head = (0..n).fold(0u64, |acc, i| acc * 2 + diff[i] as u64);
    let shift = (0..p)
        .find(|&t| w.window(t, n) == head)
        .ok_or_else(|| Error::Internal("difference is not a shift".into()))?;
    if (0..p).any(|i| diff[i] != w.letter(i + shift)) {
        return Err(Error::Internal("difference is not a shift".into()));
    }
    let j = (0..p)
        .find(|&t| w.window(t, n) == 1)
        .ok_or_else(|| Error::Internal("missing window 0..01".into()))?;
    let m = (j + p - shift) % p;
    let first = CyclicSeq::new(2, (0..l).map(|i| w.letter(m + i)).collect())?;
    let second = CyclicSeq::new(2, (l..p).map(|i| w.letter(m + i)).collect())?;
    Ok((first, second))
}
