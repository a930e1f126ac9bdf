//! Brute-force oracles shared by the integration tests. They work on digit
//! strings and plain integers and never call the library's shadow code.
#![allow(dead_code)]

pub mod gen;
pub mod graph;

use std::collections::HashSet;

use fixfree::words::LevelSet;

pub fn strings(c: &LevelSet) -> Vec<String> {
    c.words().iter().map(|w| w.to_string()).collect()
}

/// No word is a proper prefix or suffix of another, checked through the set
/// of all proper prefixes and suffixes.
pub fn naive_fix_free(words: &[String]) -> bool {
    let set: HashSet<&str> = words.iter().map(|s| s.as_str()).collect();
    if set.len() != words.len() {
        return false;
    }
    words.iter().all(|w| {
        (1..w.len()).all(|i| !set.contains(&w[..i]) && !set.contains(&w[w.len() - i..]))
    })
}

pub fn naive_prefix_free(words: &[String]) -> bool {
    let set: HashSet<&str> = words.iter().map(|s| s.as_str()).collect();
    set.len() == words.len() && words.iter().all(|w| (1..w.len()).all(|i| !set.contains(&w[..i])))
}

/// Per-length word counts, index 0 = length 1, trailing zeros removed.
pub fn naive_counts(words: &[String]) -> Vec<u64> {
    let top = words.iter().map(|w| w.len()).max().unwrap_or(0);
    let mut c = vec![0u64; top];
    for w in words {
        assert!(!w.is_empty(), "empty word emitted");
        c[w.len() - 1] += 1;
    }
    c
}

pub fn trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

/// Kraft sum as the integer numerator over `q^top`.
pub fn kraft_units(q: u32, counts: &[u64], top: usize) -> u128 {
    counts
        .iter()
        .enumerate()
        .map(|(i, &a)| a as u128 * (q as u128).pow((top - i - 1) as u32))
        .sum()
}

/// Asserts `c` is fix-free, fits `counts`, and uses only digits below `q`.
pub fn assert_fix_free_fit(q: u32, c: &LevelSet, counts: &[u64], ctx: &str) {
    let w = strings(c);
    assert!(
        w.iter().all(|s| s.bytes().all(|b| ((b - b'0') as u32) < q)),
        "{ctx}: bad digit"
    );
    assert!(naive_fix_free(&w), "{ctx}: not fix-free: {w:?}");
    assert_eq!(naive_counts(&w), trim(counts.to_vec()), "{ctx}: wrong profile");
}

/// Every length-`l` word over `{0..q-1}`.
pub fn words_of(q: u32, l: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    for _ in 0..l {
        out = out
            .into_iter()
            .flat_map(|s| (0..q).map(move |d| format!("{s}{d}")))
            .collect();
    }
    out
}

/// Exhaustive existence check: chooses subsets level by level and rejects
/// any partial choice that breaks fix-freeness.
pub fn brute_exists(q: u32, counts: &[u64]) -> bool {
    fn rec(q: u32, counts: &[u64], l: usize, chosen: &mut Vec<String>) -> bool {
        if l > counts.len() {
            return true;
        }
        let need = counts[l - 1] as usize;
        let cands: Vec<String> = words_of(q, l)
            .into_iter()
            .filter(|z| {
                chosen
                    .iter()
                    .all(|w| !z.starts_with(w.as_str()) && !z.ends_with(w.as_str()))
            })
            .collect();
        pick(q, counts, l, &cands, 0, need, chosen)
    }
    fn pick(
        q: u32,
        counts: &[u64],
        l: usize,
        cands: &[String],
        from: usize,
        need: usize,
        chosen: &mut Vec<String>,
    ) -> bool {
        if need == 0 {
            return rec(q, counts, l + 1, chosen);
        }
        for i in from..cands.len() {
            if cands.len() - i < need {
                break;
            }
            chosen.push(cands[i].clone());
            if pick(q, counts, l, cands, i + 1, need - 1, chosen) {
                chosen.pop();
                return true;
            }
            chosen.pop();
        }
        false
    }
    rec(q, counts, 1, &mut Vec::new())
}
