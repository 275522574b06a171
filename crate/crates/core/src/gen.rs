//! Seeded stream generators for tests, benchmarks and the CLI.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::oracle;
use crate::Symbol;

/// `n` symbols drawn uniformly from `1..=sigma`.
pub fn gen_random(n: usize, sigma: u32, seed: u64) -> Result<Vec<Symbol>> {
    if n == 0 {
        return Err(Error::Config("generated stream must be non-empty".into()));
    }
    if sigma < 2 {
        return Err(Error::Config(format!("alphabet size must be at least 2, got {sigma}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n).map(|_| rng.gen_range(1..=sigma)).collect())
}

pub fn gen_unary(n: usize, sym: Symbol) -> Vec<Symbol> {
    vec![sym; n]
}

/// A generated string with a planted run of `h` midpoints spaced `d` apart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenRun {
    pub symbols: Vec<Symbol>,
    pub m1: u64,
    pub d: u64,
    pub h: u64,
}

impl GenRun {
    pub fn midpoints(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.h).map(move |k| self.m1 + k * self.d)
    }
}

/// `pad` random symbols, then `w^R w w^R ...` (`h + 1` blocks), then `pad`
/// random symbols. Pads are resampled until the arms just outside the run
/// are shorter than `|w|`, so the run does not extend into them.
pub fn gen_run(w: &[Symbol], h: usize, pad: usize, seed: u64) -> Result<GenRun> {
    if w.is_empty() || h < 3 {
        return Err(Error::Config(format!("run needs |w| >= 1 and h >= 3, got |w|={} h={h}", w.len())));
    }
    if w.contains(&0) {
        return Err(Error::InvalidSymbol(0));
    }
    let d = w.len();
    let sigma = w.iter().copied().max().unwrap_or(1).max(2);
    let rev: Vec<Symbol> = w.iter().rev().copied().collect();
    let mut core = Vec::with_capacity((h + 1) * d);
    for block in 0..=h {
        core.extend_from_slice(if block % 2 == 0 { &rev } else { w });
    }
    let m1 = (pad + d) as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..10_000 {
        let mut s: Vec<Symbol> = (0..pad).map(|_| rng.gen_range(1..=sigma)).collect();
        s.extend_from_slice(&core);
        s.extend((0..pad).map(|_| rng.gen_range(1..=sigma)));
        let last = m1 + (h as u64 - 1) * d as u64;
        let clear = |m: u64| m == 0 || m >= s.len() as u64 || oracle::naive_arm(&s, m as usize).unwrap_or(0) < d;
        if clear(m1.wrapping_sub(d as u64)) && clear(last + d as u64) {
            return Ok(GenRun { symbols: s, m1, d: d as u64, h: h as u64 });
        }
    }
    Err(Error::Config("could not sample palindrome-free padding around the run".into()))
}

/// Length of the lower-bound instance for `m` payload pairs and budget `e_r`.
pub fn lower_bound_len(m: usize, e_r: usize) -> usize {
    2 * m * (2 * e_r + 1) + 4 * e_r
}

/// `[2e_r] a_1 [2e_r] a_2 ... a_m [2e_r] [2e_r]^R a_{m+1} [2e_r]^R ... a_{2m} [2e_r]^R`
/// where `[2e_r]` is the separator `1, 2, ..., 2e_r`. Payload value `a`
/// becomes symbol `2e_r + a`, disjoint from the separators.
pub fn gen_lower_bound(m: usize, e_r: usize, assignments: &[Symbol]) -> Result<Vec<Symbol>> {
    if e_r == 0 || m == 0 {
        return Err(Error::Config("lower-bound instance needs m >= 1 and e_r >= 1".into()));
    }
    if assignments.len() != 2 * m {
        return Err(Error::Config(format!(
            "expected {} assignments for m = {m}, got {}",
            2 * m,
            assignments.len()
        )));
    }
    if assignments.contains(&0) {
        return Err(Error::InvalidSymbol(0));
    }
    let sep: Vec<Symbol> = (1..=2 * e_r as Symbol).collect();
    let sep_rev: Vec<Symbol> = sep.iter().rev().copied().collect();
    let payload = |a: Symbol| 2 * e_r as Symbol + a;
    let mut s = Vec::with_capacity(lower_bound_len(m, e_r));
    for &a in &assignments[..m] {
        s.extend_from_slice(&sep);
        s.push(payload(a));
    }
    s.extend_from_slice(&sep);
    s.extend_from_slice(&sep_rev);
    for &a in &assignments[m..] {
        s.push(payload(a));
        s.extend_from_slice(&sep_rev);
    }
    debug_assert_eq!(s.len(), lower_bound_len(m, e_r));
    Ok(s)
}

/// `a_j = a_{2m+1-j}` with the first half `1, 2, ..., m`.
pub fn mirrored_assignments(m: usize) -> Vec<Symbol> {
    let half: Vec<Symbol> = (1..=m as Symbol).collect();
    half.iter().chain(half.iter().rev()).copied().collect()
}

/// Mirrored assignments with the pair `(a_j, a_{2m+1-j})` made unequal.
pub fn broken_assignments(m: usize, j: usize) -> Result<Vec<Symbol>> {
    if j == 0 || j > m {
        return Err(Error::Config(format!("mirror break position {j} outside [1, {m}]")));
    }
    let mut a = mirrored_assignments(m);
    a[2 * m - j] = m as Symbol + 1;
    Ok(a)
}
