//! Integer and digit-string oracles for de Bruijn graph questions.

use std::collections::{BTreeMap, BTreeSet};

// Independent window enumeration used as the oracle for every cycle check.
pub fn windows(w: &[u8], q: u64, n: usize) -> Vec<u64> {
    let len = w.len();
    (0..len)
        .map(|i| (0..n).fold(0u64, |acc, j| acc * q + w[(i + j) % len] as u64))
        .collect()
}

pub fn distinct(w: &[u8], q: u64, n: usize) -> usize {
    windows(w, q, n).into_iter().collect::<BTreeSet<_>>().len()
}

// Brute force over vertex subsets and induced edge subsets of B_q(n).
pub fn brute_regular_exists(q: u64, n: usize, k: usize, l: usize) -> bool {
    let size = q.pow(n as u32);
    for mask in 0u64..(1 << size) {
        if mask.count_ones() as usize != l {
            continue;
        }
        let inside = |v: u64| mask >> v & 1 == 1;
        let edges: Vec<u64> = (0..size * q)
            .filter(|&e| inside(e / q) && inside(e % size))
            .collect();
        let m = edges.len();
        let mut found = false;
        let mut sub = 0u64;
        loop {
            if sub.count_ones() as usize == k * l {
                let mut out = BTreeMap::new();
                let mut inn = BTreeMap::new();
                for (i, &e) in edges.iter().enumerate() {
                    if sub >> i & 1 == 1 {
                        *out.entry(e / q).or_insert(0usize) += 1;
                        *inn.entry(e % size).or_insert(0usize) += 1;
                    }
                }
                if (0..size).filter(|&v| inside(v)).all(|v| {
                    out.get(&v).copied().unwrap_or(0) == k && inn.get(&v).copied().unwrap_or(0) == k
                }) {
                    found = true;
                    break;
                }
            }
            sub += 1;
            if sub >= 1 << m {
                break;
            }
        }
        if found {
            return true;
        }
    }
    false
}

pub fn euler_phi(mut m: u64) -> u64 {
    let mut r = m;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            r -= r / p;
        }
        p += 1;
    }
    if m > 1 {
        r -= r / m;
    }
    r
}

// Period of the binary recurrence with the given taps, computed on integers.
pub fn lfsr_period(n: usize, taps: u64) -> u64 {
    let start = 1u64 << (n - 1);
    let mut s = start;
    let mut steps = 0;
    loop {
        let f = (s & taps).count_ones() as u64 & 1;
        s = ((s << 1) & ((1 << n) - 1)) | f;
        steps += 1;
        if s == start || steps > 1 << n {
            return steps;
        }
    }
}

// Counts Hamilton circuits of B_q(n) by depth-first search from vertex 0.
pub fn brute_hamilton(q: u64, n: usize) -> u64 {
    let size = q.pow(n as u32);
    fn go(v: u64, q: u64, size: u64, seen: &mut Vec<bool>, depth: u64) -> u64 {
        if depth == size {
            return u64::from((0..q).any(|b| (v * q + b) % size == 0));
        }
        let mut total = 0;
        for b in 0..q {
            let u = (v * q + b) % size;
            if !seen[u as usize] {
                seen[u as usize] = true;
                total += go(u, q, size, seen, depth + 1);
                seen[u as usize] = false;
            }
        }
        total
    }
    let mut seen = vec![false; size as usize];
    seen[0] = true;
    go(0, q, size, &mut seen, 1)
}
