//! Seeded random profiles inside each builder's hypothesis region. Every
//! gate is restated here with integer arithmetic.

use fixfree::debruijn::k_regular_subgraph;
use fixfree::words::Profile;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::kraft_units;

fn pw(q: u32, e: usize) -> u128 {
    (q as u128).pow(e as u32)
}

/// True if `sum counts_l q^{-l} <= num/den`.
pub fn within(q: u32, counts: &[u64], num: u128, den: u128) -> bool {
    let top = counts.len().max(1);
    kraft_units(q, counts, top) * den <= num * pw(q, top)
}

/// Adds random words at levels `lo..=hi` while the sum stays at most `num/den`.
pub fn fill(rng: &mut ChaCha8Rng, q: u32, counts: &mut Vec<u64>, lo: usize, hi: usize, num: u128, den: u128, tries: usize) {
    if counts.len() < hi {
        counts.resize(hi, 0);
    }
    for _ in 0..tries {
        let l = rng.gen_range(lo..=hi);
        let burst = rng.gen_range(1..=(pw(q, l) as u64 / 4).max(1));
        counts[l - 1] += burst;
        if !within(q, counts, num, den) {
            counts[l - 1] -= burst;
        }
    }
}

fn profile(q: u32, counts: Vec<u64>) -> Option<Profile> {
    let p = Profile::new(q, counts).unwrap();
    (p.total() > 0).then_some(p)
}

pub fn half(rng: &mut ChaCha8Rng) -> Option<Profile> {
    let q = rng.gen_range(2..=4);
    let top = rng.gen_range(1..=if q == 2 { 12 } else { 7 });
    let mut c = Vec::new();
    fill(rng, q, &mut c, 1, top, 1, 2, 30);
    profile(q, c)
}

pub fn spaced(rng: &mut ChaCha8Rng) -> Option<Profile> {
    let q = rng.gen_range(2..=3);
    let cap = if q == 2 { 14 } else { 9 };
    let mut levels = vec![rng.gen_range(1..=3)];
    while levels.len() < 3 {
        let last = *levels.last().unwrap();
        let next = 2 * last + rng.gen_range(0..=2);
        if next > cap {
            break;
        }
        levels.push(next);
    }
    let mut c = vec![0u64; *levels.last().unwrap()];
    for &l in &levels {
        let room = pw(q, l) as u64;
        let a = rng.gen_range(0..=room);
        c[l - 1] = a;
        while !within(q, &c, 3, 4) {
            c[l - 1] /= 2;
        }
    }
    profile(q, c)
}

pub fn two_level(rng: &mut ChaCha8Rng) -> Option<Profile> {
    let q = rng.gen_range(2..=4);
    let cap = if q == 2 { 14 } else { 7 };
    let m = rng.gen_range(1..cap);
    let n = rng.gen_range(m + 1..=cap);
    let mut c = vec![0u64; n];
    c[m - 1] = rng.gen_range(0..=(pw(q, m) * 3 / 4) as u64);
    let left = pw(q, n) * 3 / 4 - c[m - 1] as u128 * pw(q, n - m);
    c[n - 1] = rng.gen_range(0..=left as u64);
    profile(q, c)
}

/// `q^{lmin-2} floor(q/2)^2 ceil(q/2)^{l-lmin}`.
pub fn bounded_cap(q: u32, lmin: usize, l: usize) -> u64 {
    let f = (q / 2) as u64;
    let c = q.div_ceil(2) as u64;
    (q as u64).pow(lmin as u32 - 2) * f * f * c.pow((l - lmin) as u32)
}

pub fn bounded_ok(p: &Profile) -> bool {
    let c = p.counts();
    let q = p.q();
    let Some(lmin) = c.iter().position(|&a| a > 0).map(|i| i + 1) else {
        return false;
    };
    let lmax = c.len();
    lmin >= 2 && within(q, c, 3, 4) && (lmin..lmax).all(|l| c[l - 1] <= bounded_cap(q, lmin, l))
}

pub fn bounded(rng: &mut ChaCha8Rng) -> Option<Profile> {
    let q = rng.gen_range(2..=5);
    let lmin = rng.gen_range(2..=3);
    let mut lmax = lmin + rng.gen_range(0..=5);
    while pw(q, lmax) > 1 << 18 {
        lmax -= 1;
    }
    if lmax < lmin {
        return None;
    }
    let mut c = vec![0u64; lmax];
    for l in lmin..lmax {
        let b = bounded_cap(q, lmin, l);
        c[l - 1] = match rng.gen_range(0..4) {
            0 => b,
            1 => 0,
            _ => rng.gen_range(0..=b),
        };
        while !within(q, &c, 3, 4) {
            c[l - 1] /= 2;
        }
    }
    if c[lmin - 1] == 0 {
        c[lmin - 1] = 1;
    }
    let used = kraft_units(q, &c, lmax);
    let left = (pw(q, lmax) * 3 / 4).saturating_sub(used) as u64;
    c[lmax - 1] = if rng.gen_bool(0.5) { left } else { rng.gen_range(0..=left) };
    let p = profile(q, c)?;
    bounded_ok(&p).then_some(p)
}

/// gamma(q,k) as a fraction.
pub fn gamma_frac(q: u32, k: u32) -> (u128, u128) {
    let q = q as u128;
    let k = k as u128;
    if k <= q / 2 {
        (q + k, 2 * q)
    } else {
        ((q - k) * (q - k) + k * q, q * q)
    }
}

/// A profile for the pi-system route with alphabet `q`, block count `k`.
pub fn first_two_levels_in(rng: &mut ChaCha8Rng, q: u32, k: u32) -> Option<Profile> {
    let (gn, gd) = gamma_frac(q, k);
    let n = rng.gen_range(1..=if q == 2 { 5 } else { 3 });
    let kk = k as u64;
    let mut c = vec![0u64; n + 1];
    let full = kk * pw(q, n - 1) as u64;
    if n == 1 || rng.gen_bool(0.4) {
        c[n - 1] = full + rng.gen_range(0..=pw(q, n) as u64 / 8);
    } else {
        let lcount = rng.gen_range(1..pw(q, n - 1) as u64);
        k_regular_subgraph(q, n - 1, k as usize, lcount).ok()?;
        c[n - 1] = kk * lcount;
        let need = (kk * pw(q, n) as u64).saturating_sub(q as u64 * c[n - 1]);
        c[n] = need + rng.gen_range(0..=pw(q, n + 1) as u64 / 16);
    }
    if !within(q, &c, gn, gd) {
        return None;
    }
    let top = n + rng.gen_range(1..=3);
    if pw(q, top) <= 1 << 16 {
        fill(rng, q, &mut c, n + 1, top, gn, gd, 10);
    }
    profile(q, c)
}

pub fn first_two_levels(rng: &mut ChaCha8Rng) -> Option<(Profile, usize)> {
    let q: u32 = rng.gen_range(2..=4);
    let k = rng.gen_range(1..=q.div_ceil(2).min(q - 1));
    first_two_levels_in(rng, q, k).map(|p| (p, k as usize))
}

pub fn binary_58(rng: &mut ChaCha8Rng) -> Option<Profile> {
    let top = rng.gen_range(1..=14);
    let mut c = Vec::new();
    let tries = rng.gen_range(1..=25);
    fill(rng, 2, &mut c, 1, top, 5, 8, tries);
    profile(2, c)
}

pub fn ternary(rng: &mut ChaCha8Rng) -> Option<Profile> {
    let top = rng.gen_range(3..=9);
    let mut c = vec![0u64; top];
    c[1] = rng.gen_range(0..=1);
    let tries = rng.gen_range(1..=25);
    fill(rng, 3, &mut c, 3, top, 4, 9, tries);
    profile(3, c)
}

/// Binary profile at even levels whose halved quaternary profile meets one
/// of the five lift routes; also returns the route number.
pub fn quaternary(rng: &mut ChaCha8Rng) -> Option<(Profile, u32)> {
    let route = rng.gen_range(1..=5u32);
    let mut b: Vec<u64>;
    match route {
        1 => {
            let n = rng.gen_range(2..=4);
            b = vec![0; n];
            for l in 2..n {
                b[l - 1] = 1 << l;
            }
            b[n - 1] = (1 << (n + 1)) + rng.gen_range(0..=4u64.pow(n as u32) / 8);
        }
        2 => {
            let n = rng.gen_range(3..=5);
            b = vec![0; n];
            for l in 3..n {
                b[l - 1] = 1 << (l + 1);
            }
            b[n - 1] = (1 << (n + 2)) + rng.gen_range(0..=4u64.pow(n as u32) / 8);
        }
        3 => {
            let n = rng.gen_range(2..=3);
            let lcount = rng.gen_range(1..4u64.pow(n as u32 - 1));
            k_regular_subgraph(4, n - 1, 2, lcount).ok()?;
            b = vec![0; n + 1];
            b[n - 1] = 2 * lcount;
            b[n] = (2 * 4u64.pow(n as u32)).saturating_sub(4 * b[n - 1]) + rng.gen_range(0..=8);
        }
        4 => {
            let n = rng.gen_range(1..=4);
            b = vec![0; n];
            b[n - 1] = 4u64.pow(n as u32) / 2 + rng.gen_range(0..=4u64.pow(n as u32) / 4);
        }
        _ => {
            let lmin = rng.gen_range(2..=3);
            let lmax = lmin + rng.gen_range(0..=3);
            b = vec![0; lmax];
            for l in lmin..lmax {
                let cap = 1u64 << (lmin - 2 + l);
                b[l - 1] = rng.gen_range(0..=cap);
            }
            b[lmin - 1] = b[lmin - 1].max(1);
            let used = kraft_units(4, &b, lmax);
            let left = (pw(4, lmax) * 3 / 4).saturating_sub(used) as u64;
            b[lmax - 1] = rng.gen_range(0..=left);
        }
    }
    if !within(4, &b, 3, 4) {
        return None;
    }
    if route <= 4 {
        let top = b.len() + rng.gen_range(0..=2);
        if top > b.len() && pw(4, top) <= 1 << 16 {
            let lo = b.len() + 1;
            fill(rng, 4, &mut b, lo, top, 3, 4, 8);
        }
    }
    let mut c = vec![0u64; 2 * b.len()];
    for (i, &x) in b.iter().enumerate() {
        c[2 * i + 1] = x;
    }
    profile(2, c).map(|p| (p, route))
}

/// Names of the builders covered by the randomized campaign.
pub const BUILDERS: [&str; 9] = [
    "build_half",
    "build_spaced",
    "build_two_level",
    "build_bounded",
    "build_first_two_levels",
    "build_58_binary",
    "build_ternary_blocks",
    "lift_from_quaternary",
    "build_exact_kraftsum",
];

/// Runs `count` in-region instances of one builder and returns the
/// descriptions of every instance whose output fails the oracle.
pub fn campaign(builder: &str, seed: u64, count: usize) -> Vec<String> {
    use fixfree::constructors as b;
    use rand::SeedableRng;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let mut done = 0;
    let mut attempts = 0;
    while done < count {
        attempts += 1;
        assert!(attempts < 200 * count, "{builder}: generator starved");
        let (p, out, ctx) = match builder {
            "build_exact_kraftsum" => {
                let q = rng.gen_range(2..=5u32);
                let l = rng.gen_range(1..=5usize);
                let den = pw(q, l) as u64;
                let num = rng.gen_range(1..=den);
                let g = fixfree::words::ratio(num, den);
                let out = b::build_exact_kraftsum(q, &g);
                if matches!(out, Err(fixfree::Error::LevelTooLarge { .. }))
                    && family_depth(q, num, den) > max_level(q)
                {
                    // Dense levels cannot hold this code; not counted.
                    continue;
                }
                done += 1;
                match out {
                    Ok(c) => {
                        let w = super::strings(&c);
                        let counts = super::naive_counts(&w);
                        let top = counts.len();
                        let exact = super::kraft_units(q, &counts, top) * den as u128
                            == num as u128 * pw(q, top);
                        if !super::naive_fix_free(&w) || !exact {
                            failures.push(format!("q={q} gamma={num}/{den}: {w:?}"));
                        }
                    }
                    Err(e) => failures.push(format!("q={q} gamma={num}/{den}: {e}")),
                }
                continue;
            }
            "build_half" => {
                let Some(p) = half(&mut rng) else { continue };
                let r = b::build_half(&p);
                (p, r, String::new())
            }
            "build_spaced" => {
                let Some(p) = spaced(&mut rng) else { continue };
                let r = b::build_spaced(&p);
                (p, r, String::new())
            }
            "build_two_level" => {
                let Some(p) = two_level(&mut rng) else { continue };
                let r = b::build_two_level(&p);
                (p, r, String::new())
            }
            "build_bounded" => {
                let Some(p) = bounded(&mut rng) else { continue };
                let r = b::build_bounded(&p);
                (p, r, String::new())
            }
            "build_first_two_levels" => {
                let Some((p, k)) = first_two_levels(&mut rng) else { continue };
                let r = b::build_first_two_levels(&p, k);
                (p, r, format!(" k={k}"))
            }
            "build_58_binary" => {
                let Some(p) = binary_58(&mut rng) else { continue };
                let r = b::build_58_binary(&p);
                (p, r, String::new())
            }
            "build_ternary_blocks" => {
                let Some(p) = ternary(&mut rng) else { continue };
                let r = b::build_ternary_blocks(&p);
                (p, r, String::new())
            }
            "lift_from_quaternary" => {
                let Some((p, route)) = quaternary(&mut rng) else { continue };
                let r = b::lift_from_quaternary(&p);
                (p, r, format!(" route={route}"))
            }
            other => panic!("unknown builder {other}"),
        };
        done += 1;
        match out {
            Ok(c) => {
                let w = super::strings(&c);
                if !super::naive_fix_free(&w) || super::naive_counts(&w) != super::trim(p.counts().to_vec()) {
                    failures.push(format!("{p}{ctx}: bad output"));
                }
            }
            Err(e) => failures.push(format!("{p}{ctx}: {e}")),
        }
    }
    failures
}

/// Deepest level whose dense form fits in 2^26 cells.
pub fn max_level(q: u32) -> usize {
    (1..).take_while(|&l| pw(q, l) <= 1 << 26).last().unwrap()
}

/// Least depth `N` at which the words of `D C_1^{l-2} D` (`2 <= l <= N`),
/// together with `C_1` at level 1, can carry Kraft sum `num/den`, where
/// `|C_1| = floor(q num/den)` and `D` is the rest of the alphabet. Returns
/// 0 when every level fits its digit directly.
pub fn family_depth(q: u32, num: u64, den: u64) -> usize {
    use num::{BigRational, BigInt};
    let b1 = (q as u64 * num / den) as i64;
    if b1 <= 1 {
        return 0;
    }
    let qi = q as i64;
    let target = BigRational::new(BigInt::from(num), BigInt::from(den))
        - BigRational::new(BigInt::from(b1), BigInt::from(qi));
    let mut mass = BigRational::from_integer(BigInt::from(0));
    for n in 2..200 {
        let cap = BigInt::from((qi - b1) * (qi - b1)) * num::pow(BigInt::from(b1), n - 2);
        mass += BigRational::new(cap, num::pow(BigInt::from(qi), n));
        if mass >= target {
            return n;
        }
    }
    usize::MAX
}
