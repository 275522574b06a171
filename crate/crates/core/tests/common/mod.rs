#![allow(dead_code)]

use palstream::fingerprint::{
    concat_forward, concat_reverse, split_left, split_left_reverse, split_right, split_right_reverse, sub_forward,
    sub_reverse, Fp, FpContext,
};
use palstream::gen::{gen_lower_bound, gen_random, gen_run, gen_unary, mirrored_assignments};
use palstream::Symbol;

/// Reference fingerprints in plain `u128` arithmetic.
pub fn ref_forward(s: &[Symbol], p: u64, r: u64) -> u64 {
    let (p, r) = (p as u128, r as u128);
    let mut rp = 1u128;
    let mut v = 0u128;
    for &x in s {
        rp = rp * r % p;
        v = (v + x as u128 * rp) % p;
    }
    v as u64
}

pub fn ref_reverse(s: &[Symbol], p: u64, r: u64) -> u64 {
    let rev: Vec<Symbol> = s.iter().rev().copied().collect();
    ref_forward(&rev, p, r)
}

fn fwd(s: &[Symbol], ctx: &FpContext) -> Fp {
    Fp { value: ref_forward(s, ctx.p(), ctx.r()), len: s.len() as u64 }
}

fn rev(s: &[Symbol], ctx: &FpContext) -> Fp {
    Fp { value: ref_reverse(s, ctx.p(), ctx.r()), len: s.len() as u64 }
}

/// Checks the substring, concatenation and split identities for
/// `S[i, j] = S[i, k] ∘ S[k+1, j]` with `1 <= i <= k <= j <= n` (1-based).
pub fn identities_hold(s: &[Symbol], i: usize, k: usize, j: usize, ctx: &FpContext) -> bool {
    let (left, right, whole) = (&s[i - 1..k], &s[k..j], &s[i - 1..j]);
    let sub_ok = sub_forward(fwd(&s[..j], ctx), fwd(&s[..i - 1], ctx), ctx).ok() == Some(fwd(whole, ctx))
        && sub_reverse(rev(&s[..j], ctx), rev(&s[..i - 1], ctx), ctx).ok() == Some(rev(whole, ctx));
    let concat_ok = concat_forward(fwd(left, ctx), fwd(right, ctx), ctx) == fwd(whole, ctx)
        && concat_reverse(rev(left, ctx), rev(right, ctx), ctx) == rev(whole, ctx);
    let split_ok = split_right(fwd(whole, ctx), fwd(left, ctx), ctx).ok() == Some(fwd(right, ctx))
        && split_left(fwd(whole, ctx), fwd(right, ctx), ctx).ok() == Some(fwd(left, ctx))
        && split_right_reverse(rev(whole, ctx), rev(left, ctx), ctx).ok() == Some(rev(right, ctx))
        && split_left_reverse(rev(whole, ctx), rev(right, ctx), ctx).ok() == Some(rev(left, ctx));
    sub_ok && concat_ok && split_ok
}

/// All strings over `1..=sigma` of length `len`.
pub fn all_strings(len: usize, sigma: Symbol) -> Vec<Vec<Symbol>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| (1..=sigma).map(move |c| {
                let mut w = w.clone();
                w.push(c);
                w
            }))
            .collect();
    }
    out
}

/// A named test stream.
pub struct Case {
    pub name: String,
    pub symbols: Vec<Symbol>,
}

/// Seeded random streams over alphabets {2, 4, 26} and lengths
/// {256, 1024, 4096}, `count` in total, cycling through the combinations.
pub fn random_corpus(count: usize) -> Vec<Case> {
    let combos: Vec<(u32, usize)> =
        [2u32, 4, 26].iter().flat_map(|&a| [256usize, 1024, 4096].map(|n| (a, n))).collect();
    (0..count)
        .map(|k| {
            let (sigma, n) = combos[k % combos.len()];
            Case { name: format!("random(n={n},sigma={sigma},seed={k})"), symbols: gen_random(n, sigma, k as u64).unwrap() }
        })
        .collect()
}

/// Unary, planted-run and padded streams.
pub fn family_corpus() -> Vec<Case> {
    let mut out = Vec::new();
    for n in [2usize, 3, 17, 256, 1024, 4096] {
        out.push(Case { name: format!("unary(n={n})"), symbols: gen_unary(n, 1) });
    }
    let runs: [(&[Symbol], usize, usize); 6] =
        [(&[1, 2], 40, 10), (&[1, 2, 3], 100, 30), (&[1, 1, 2], 25, 50), (&[2, 1, 3, 3], 200, 7), (&[1], 60, 5), (&[1, 2, 1, 2, 2], 150, 100)];
    for (seed, (w, h, pad)) in runs.into_iter().enumerate() {
        let g = gen_run(w, h, pad, seed as u64).unwrap();
        out.push(Case { name: format!("run(w={w:?},h={h},pad={pad})"), symbols: g.symbols });
    }
    for (seed, (n, k)) in [(1024usize, 300usize), (4096, 900), (4096, 64)].into_iter().enumerate() {
        let mut s = gen_random(n, 2, 1000 + seed as u64).unwrap();
        let at = n / 3;
        for x in &mut s[at..at + k] {
            *x = 3;
        }
        out.push(Case { name: format!("padded_unary(n={n},block={k})"), symbols: s });
    }
    for seed in 0..60u64 {
        let n = [300usize, 1000, 3000][seed as usize % 3];
        let mut s = gen_random(n, 2 + (seed % 3) as u32, 2000 + seed).unwrap();
        let half = 5 + (seed as usize * 37) % (n / 3);
        let at = (seed as usize * 101) % (n - 2 * half);
        let w: Vec<Symbol> = s[at..at + half].to_vec();
        for (k, &x) in w.iter().rev().enumerate() {
            s[at + half + k] = x;
        }
        out.push(Case { name: format!("planted(n={n},arm={half},seed={seed})"), symbols: s });
    }
    for m in 2..=5 {
        for e_r in 1..=3 {
            let s = gen_lower_bound(m, e_r, &mirrored_assignments(m)).unwrap();
            out.push(Case { name: format!("lower_bound(m={m},e_r={e_r})"), symbols: s });
        }
    }
    out
}
