use std::collections::BTreeSet;

use fixfree::debruijn::k_regular_subgraph;
use fixfree::pisystems::*;
use fixfree::words::{fits, is_free, ratio, LevelSet, Mode, Profile};
use fixfree::Error;
use proptest::prelude::*;

fn set(q: u32, ws: &[&str]) -> LevelSet {
    LevelSet::parse_words(q, ws).unwrap()
}

/// Shadow sizes computed on digit strings: |P|, |A^{-1}P|, |S|, |S A^{-1}|.
fn naive_shadow_sizes(q: u32, n: usize, block: &LevelSet) -> [usize; 4] {
    let words: Vec<String> = block.words().iter().map(|w| w.to_string()).collect();
    let mut pre = BTreeSet::new();
    let mut suf = BTreeSet::new();
    for z in fixfree::words::all_words(q, n) {
        let s = z.to_string();
        if words.iter().any(|w| s.starts_with(w.as_str())) {
            pre.insert(s.clone());
        }
        if words.iter().any(|w| s.ends_with(w.as_str())) {
            suf.insert(s);
        }
    }
    let pre_cut: BTreeSet<String> = pre.iter().map(|s| s[1..].to_string()).collect();
    let suf_cut: BTreeSet<String> = suf.iter().map(|s| s[..s.len() - 1].to_string()).collect();
    [pre.len(), pre_cut.len(), suf.len(), suf_cut.len()]
}

fn naive_property_1(p: &PiSystem) -> bool {
    let t = (p.q as usize).pow(p.n as u32 - 1);
    p.blocks
        .iter()
        .all(|b| naive_shadow_sizes(p.q, p.n, b).iter().all(|&x| x == t))
}

#[test]
fn gamma_table() {
    let table: &[(u32, usize, u64, u64)] = &[
        (2, 1, 3, 4),
        (3, 1, 2, 3),
        (3, 2, 7, 9),
        (4, 1, 5, 8),
        (4, 2, 3, 4),
        (4, 3, 13, 16),
        (5, 1, 3, 5),
        (5, 2, 7, 10),
        (5, 3, 19, 25),
        (5, 4, 21, 25),
        (6, 1, 7, 12),
        (6, 2, 2, 3),
        (6, 3, 3, 4),
        (6, 4, 7, 9),
        (6, 5, 31, 36),
    ];
    for &(q, k, a, b) in table {
        assert_eq!(gamma(q, k).unwrap(), ratio(a, b), "q={q} k={k}");
    }
    assert!(matches!(gamma(3, 3), Err(Error::OutOfRange(_))));
    assert!(matches!(gamma(3, 0), Err(Error::OutOfRange(_))));
}

fn worked_ternary() -> PiSystem {
    let mut d1 = set(3, &["000", "010", "020", "101", "121", "202", "212"]);
    d1.union_with(&set(3, &["0110", "0220", "1111", "1221", "2112", "2222"]))
        .unwrap();
    let mut d2 = set(3, &["002", "012", "021", "100", "120", "201", "210"]);
    d2.union_with(&set(3, &["0111", "0221", "1112", "1222", "2110", "2220"]))
        .unwrap();
    PiSystem::new(3, 2, 4, vec![d1, d2]).unwrap()
}

#[test]
fn worked_ternary_system() {
    let p = worked_ternary();
    assert!(is_pi_system(&p));
    assert!(naive_property_1(&p));
    let c = p.code();
    assert_eq!(c.count(3), 14);
    assert_eq!(c.count(4), 12);
    assert_eq!(c.kraft_sum(), ratio(2, 3));
    // The level-3 words form a 2-regular edge set on 7 vertices.
    let g = lower_level_edges(&p).unwrap();
    assert!(g.is_k_regular(2));
    assert_eq!(g.vertices().len(), 7);
}

#[test]
fn small_negative_systems() {
    let p = PiSystem::new(2, 1, 2, vec![set(2, &["00", "01"])]).unwrap();
    assert!(!is_pi_system(&p));
    assert!(!naive_property_1(&p));
    // The spec-listed one-level binary set with k=1 at n=3.
    let p = PiSystem::new(2, 1, 3, vec![set(2, &["000", "010", "100", "110"])]).unwrap();
    assert!(!is_pi_system(&p));
    assert!(!naive_property_1(&p));
    // Full level split by last letter.
    let blocks = (0..3)
        .map(|b| {
            let mut s = LevelSet::new(3).unwrap();
            for v in 0..9u64 {
                s.insert_num(3, v * 3 + b).unwrap();
            }
            s
        })
        .collect();
    let p = PiSystem::new(3, 3, 3, blocks).unwrap();
    assert!(!is_pi_system(&p));
    assert!(!naive_property_1(&p));
    // Blocks overlapping or not fix-free.
    let p = PiSystem::new(2, 1, 2, vec![set(2, &["0", "01"])]).unwrap();
    assert!(!is_pi_system(&p));
}

#[test]
fn one_level_examples() {
    let p = one_level_pi(2, 3, 1).unwrap();
    assert_eq!(p.code(), set(2, &["000", "010", "101", "111"]));
    assert!(is_pi_system(&p) && naive_property_1(&p));
    let p = one_level_pi(3, 1, 2).unwrap();
    assert_eq!(p.blocks, vec![set(3, &["0"]), set(3, &["1"])]);
    assert!(is_pi_system(&p));
    let p = one_level_pi(3, 2, 1).unwrap();
    assert_eq!(p.code(), set(3, &["00", "11", "22"]));
    assert!(is_pi_system(&p));
    // k = q blocks of the same shape also satisfy the shadow condition.
    let blocks = one_level_pi(3, 3, 2).unwrap().blocks;
    assert_eq!(blocks.len(), 2);
    for q in 2..=4u32 {
        for n in 1..=4 {
            for k in 1..q as usize {
                let p = one_level_pi(q, n, k).unwrap();
                assert!(is_pi_system(&p), "q={q} n={n} k={k}");
                assert!(naive_property_1(&p));
                assert_eq!(p.code().kraft_sum(), ratio(k as u64, q as u64));
            }
        }
    }
    assert!(matches!(one_level_pi(3, 2, 3), Err(Error::OutOfRange(_))));
}

#[test]
fn two_level_examples() {
    let p = two_level_pi(3, 4, 2, 7).unwrap();
    assert!(is_pi_system(&p));
    let c = p.code();
    assert_eq!((c.count(3), c.count(4)), (14, 12));
    assert_eq!(c.kraft_sum(), ratio(2, 3));
    for n in 2..=5usize {
        for l in 1..=(1u64 << (n - 1)) {
            let p = two_level_pi(2, n + 1, 1, l).unwrap();
            assert!(is_pi_system(&p), "n={n} L={l}");
            let c = p.code();
            assert_eq!(c.count(n) as u64, l);
            assert_eq!(c.count(n + 1) as u64, (1 << n) - 2 * l);
        }
    }
    assert!(matches!(two_level_pi(3, 4, 2, 5), Err(Error::Impossible(_))));
    assert!(matches!(two_level_pi(3, 3, 2, 5), Err(Error::Impossible(_))));
}

#[test]
fn two_level_round_trip() {
    for q in 2..=3u32 {
        for n in 3..=4usize {
            for k in 1..q as usize {
                let verts = (q as u64).pow(n as u32 - 2);
                for l in 1..=verts {
                    let Ok(g) = k_regular_subgraph(q, n - 2, k, l) else {
                        continue;
                    };
                    assert!(g.is_k_regular(k));
                    let p = two_level_pi(q, n, k, l).unwrap();
                    assert!(is_pi_system(&p), "q={q} n={n} k={k} L={l}");
                    assert!(naive_property_1(&p));
                    assert_eq!(p.code().kraft_sum(), ratio(k as u64, q as u64));
                    let back = lower_level_edges(&p).unwrap();
                    assert_eq!(back.edges, g.edges);
                    let degs = back.degrees();
                    assert!(degs.values().all(|&(i, o)| i == k && o == k));
                }
            }
        }
    }
}

#[test]
fn chain_families() {
    for n in 2..=6usize {
        let p = chain_pi(4, n, 2, 2).unwrap();
        assert!(is_pi_system(&p), "n={n}");
        let c = p.code();
        for l in 2..n {
            assert_eq!(c.count(l), 1 << l);
        }
        assert_eq!(c.count(n), 1 << (n + 1));
    }
    for n in 3..=5usize {
        let p = mixed_chain_pi(4, n, 2, 2).unwrap();
        assert!(is_pi_system(&p), "n={n}");
        let c = p.code();
        for l in 3..n {
            assert_eq!(c.count(l), 1 << (l + 1));
        }
        assert_eq!(c.count(n), 1 << (n + 2));
    }
    for q in 2..=5u32 {
        for d in 1..q as usize {
            for k in 1..=d.min(q as usize - d) {
                for n in 3..=4 {
                    let p = chain_pi(q, n, k, d).unwrap();
                    assert!(is_pi_system(&p) && naive_property_1(&p), "q={q} d={d} k={k}");
                    let p = mixed_chain_pi(q, n, k, d).unwrap();
                    assert!(is_pi_system(&p) && naive_property_1(&p), "q={q} d={d} k={k}");
                }
            }
        }
    }
}

#[test]
fn text_form() {
    let p = one_level_pi(3, 1, 2).unwrap();
    assert_eq!(p.to_text(), "q=3 k=2 n=1\n0 1\n1 2\n");
}

fn check_extension(p: &PiSystem, target: &Profile) {
    let c = pi_extend(p, target).unwrap();
    assert!(is_free(&c, Mode::Fix));
    assert!(fits(&c, target));
    assert_eq!(c.profile(), *target);
    assert_eq!(c.kraft_sum(), target.kraft_sum());
    let base = p.code();
    for w in base.words() {
        assert!(c.contains(&w));
    }
}

#[test]
fn extend_examples() {
    let p = worked_ternary();
    let own = p.code().profile();
    assert_eq!(pi_extend(&p, &own).unwrap(), p.code());
    // Binary, k = 1: first two levels carry mass 1/2.
    let p = two_level_pi(2, 3, 1, 1).unwrap();
    let t = Profile::new(2, vec![0, 1, 2, 4]).unwrap();
    check_extension(&p, &t);
    let t = Profile::new(2, vec![0, 1, 3, 0, 7]).unwrap();
    assert!(t.kraft_sum() > ratio(3, 4));
    assert!(matches!(pi_extend(&p, &t), Err(Error::PreconditionViolated(_))));
    let t = Profile::new(2, vec![0, 2, 2]).unwrap();
    assert!(matches!(pi_extend(&p, &t), Err(Error::PreconditionViolated(_))));
    // Ternary worked system up to 7/9.
    let p = worked_ternary();
    let t = Profile::new(3, vec![0, 0, 14, 14, 9, 30]).unwrap();
    assert!(t.kraft_sum() <= ratio(7, 9));
    check_extension(&p, &t);
}

fn fix_free_subset(q: u32, n: usize, picks: &[u64]) -> LevelSet {
    let mut c = LevelSet::new(q).unwrap();
    for &r in picks {
        let l = 1 + (r % n as u64) as usize;
        let v = (r / n as u64) % (q as u64).pow(l as u32);
        let mut t = c.clone();
        t.insert_num(l, v).unwrap();
        if is_free(&t, Mode::Fix) {
            c = t;
        }
    }
    c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn characterizations_agree(
        q in 2u32..=3,
        n in 1usize..=4,
        k in 1usize..=3,
        picks in prop::collection::vec(any::<u64>(), 0..30),
        assign in prop::collection::vec(any::<u64>(), 30),
    ) {
        let k = k.min(q as usize);
        let code = fix_free_subset(q, n, &picks);
        let mut blocks = vec![LevelSet::new(q).unwrap(); k];
        for (i, w) in code.words().iter().enumerate() {
            blocks[(assign[i % assign.len()] % k as u64) as usize].insert(w).unwrap();
        }
        let p = PiSystem::new(q, k, n, blocks).unwrap();
        let one = pi_property_1(&p);
        prop_assert_eq!(one, pi_property_2(&p));
        prop_assert_eq!(one, pi_property_3(&p));
        prop_assert_eq!(one, naive_property_1(&p));
    }

    #[test]
    fn one_level_systems_agree(q in 2u32..=4, n in 1usize..=4, seed in any::<u64>()) {
        let k = 1 + (seed % (q as u64 - 1)) as usize;
        let p = one_level_pi(q, n, k).unwrap();
        prop_assert!(pi_property_1(&p) && pi_property_2(&p) && pi_property_3(&p));
    }

    #[test]
    fn quaternary_extension(extra in prop::collection::vec(0.0f64..1.0, 3), n in 2usize..=3) {
        let p = chain_pi(4, n, 2, 2).unwrap();
        let mut counts = p.code().profile().counts().to_vec();
        counts.resize(n + 3, 0);
        for (i, e) in extra.iter().enumerate() {
            counts[n - 1 + i] += (e * 4f64.powi((n + i) as i32) / 12.0) as u64;
        }
        let target = Profile::new(4, counts).unwrap();
        prop_assert!(target.kraft_sum() <= ratio(3, 4));
        check_extension(&p, &target);
    }
}
