//! Karp-Rabin forward/reverse fingerprints over a prime field.
//!
//! For a string `s` of length `l` the forward fingerprint is
//! `sum s[i] * r^i mod p` and the reverse fingerprint is
//! `sum s[i] * r^(l-i+1) mod p` (1-based `i`). The reverse fingerprint of `s`
//! equals the forward fingerprint of `s` reversed, which is what makes O(1)
//! palindrome tests possible.
//!
//! Fingerprints carry their length so that concatenation and splitting can be
//! done without side information.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Symbol;

/// The Mersenne prime 2^61 - 1.
pub const MERSENNE61: u64 = (1u64 << 61) - 1;

/// Largest stream length for which the strict `[n^4, n^5]` prime range fits
/// in 64 bits.
pub const STRICT_MAX_N: u64 = 1 << 12;

/// How the prime modulus of a context was chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PrimePolicy {
    /// Fixed modulus 2^61 - 1, random base.
    Mersenne61,
    /// Random prime drawn from `[n^4, n^5]`, random base.
    Strict,
    /// Caller-supplied prime and base (tests, reproductions).
    Explicit,
}

/// Immutable fingerprinting parameters: prime modulus `p`, base `r` and its
/// inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FpContext {
    p: u64,
    r: u64,
    r_inv: u64,
    policy: PrimePolicy,
}

/// Fingerprint value together with the length of the string it covers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Fp {
    pub value: u64,
    pub len: u64,
}

impl Fp {
    pub const EMPTY: Fp = Fp { value: 0, len: 0 };

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

/// Running prefix fingerprints `F^F(1,i)` and `F^R(1,i)`.
///
/// `r_pow` caches `r^i` so extension costs two multiplications.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MasterPair {
    pub fwd: Fp,
    pub rev: Fp,
    r_pow: u64,
}

impl MasterPair {
    pub fn new() -> Self {
        MasterPair { fwd: Fp::EMPTY, rev: Fp::EMPTY, r_pow: 1 }
    }

    /// Current prefix length.
    pub fn len(&self) -> u64 {
        self.fwd.len
    }

    pub fn is_empty(&self) -> bool {
        self.fwd.len == 0
    }

    /// `r^i` for the current prefix length `i`.
    pub fn r_pow(&self) -> u64 {
        self.r_pow
    }

    /// Extends by one symbol. `fwd_sym` feeds the forward master and
    /// `rev_sym` the reverse master; they differ only in complement mode.
    pub fn extend_pair(&mut self, fwd_sym: Symbol, rev_sym: Symbol, ctx: &FpContext) -> Result<()> {
        let f = ctx.symbol(fwd_sym)?;
        let b = ctx.symbol(rev_sym)?;
        self.r_pow = ctx.mul(self.r_pow, ctx.r);
        self.fwd.value = ctx.add(self.fwd.value, ctx.mul(f, self.r_pow));
        self.fwd.len += 1;
        self.rev.value = ctx.mul(ctx.add(self.rev.value, b), ctx.r);
        self.rev.len += 1;
        Ok(())
    }

    pub fn extend(&mut self, sym: Symbol, ctx: &FpContext) -> Result<()> {
        self.extend_pair(sym, sym, ctx)
    }
}

impl Default for MasterPair {
    fn default() -> Self {
        Self::new()
    }
}

/// Returns the masters at prefix length `i + 1`.
pub fn extend_master(mp: MasterPair, sym: Symbol, ctx: &FpContext) -> Result<MasterPair> {
    let mut next = mp;
    next.extend(sym, ctx)?;
    Ok(next)
}

impl FpContext {
    /// Default context: modulus 2^61 - 1 and a base drawn from `[1, p-1]` by a
    /// generator seeded with `seed`. The stream length only matters for the
    /// strict policy.
    pub fn new(seed: u64, _n_hint: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = rng.gen_range(1..MERSENNE61);
        Self::build(MERSENNE61, r, PrimePolicy::Mersenne61)
    }

    /// Samples a random prime in `[n^4, n^5]` and a random base.
    pub fn strict(seed: u64, n_hint: u64) -> Result<Self> {
        if n_hint > STRICT_MAX_N {
            return Err(Error::Config(format!(
                "strict prime policy supports n <= {STRICT_MAX_N}, got {n_hint}"
            )));
        }
        let n = n_hint.max(2);
        let lo = n.pow(4);
        let hi = n.pow(5);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = loop {
            let cand = rng.gen_range(lo..=hi) | 1;
            if cand <= hi && is_prime(cand) {
                break cand;
            }
        };
        let r = rng.gen_range(1..p);
        Ok(Self::build(p, r, PrimePolicy::Strict))
    }

    /// Context with caller-chosen prime and base.
    pub fn from_parts(p: u64, r: u64) -> Result<Self> {
        if !is_prime(p) || p > MERSENNE61 {
            return Err(Error::Config(format!("modulus {p} is not a prime below 2^61")));
        }
        if r == 0 || r >= p {
            return Err(Error::Config(format!("base {r} outside [1, {}]", p - 1)));
        }
        Ok(Self::build(p, r, PrimePolicy::Explicit))
    }

    fn build(p: u64, r: u64, policy: PrimePolicy) -> Self {
        let mut ctx = FpContext { p, r, r_inv: 0, policy };
        ctx.r_inv = ctx.pow(r, p - 2);
        ctx
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn r_inv(&self) -> u64 {
        self.r_inv
    }

    pub fn policy(&self) -> PrimePolicy {
        self.policy
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        let x = a as u128 * b as u128;
        if self.p == MERSENNE61 {
            let lo = (x as u64) & MERSENNE61;
            let hi = (x >> 61) as u64;
            let s = lo + hi;
            if s >= MERSENNE61 {
                s - MERSENNE61
            } else {
                s
            }
        } else {
            (x % self.p as u128) as u64
        }
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.p;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// `r^k`.
    pub fn r_pow(&self, k: u64) -> u64 {
        self.pow(self.r, k)
    }

    /// `r^(-k)`.
    pub fn r_inv_pow(&self, k: u64) -> u64 {
        self.pow(self.r_inv, k)
    }

    #[inline]
    pub(crate) fn symbol(&self, sym: Symbol) -> Result<u64> {
        if sym == 0 || sym as u64 >= self.p {
            return Err(Error::InvalidSymbol(sym as u64));
        }
        Ok(sym as u64)
    }
}

/// Builds the default context; see [`FpContext::new`].
pub fn new_context(seed: u64, n_hint: u64) -> FpContext {
    FpContext::new(seed, n_hint)
}

/// `(sum s[i] * r^i) mod p`.
pub fn fp_forward(s: &[Symbol], ctx: &FpContext) -> Result<Fp> {
    let mut value = 0;
    let mut rp = 1;
    for &sym in s {
        let v = ctx.symbol(sym)?;
        rp = ctx.mul(rp, ctx.r);
        value = ctx.add(value, ctx.mul(v, rp));
    }
    Ok(Fp { value, len: s.len() as u64 })
}

/// `(sum s[i] * r^(l-i+1)) mod p`.
pub fn fp_reverse(s: &[Symbol], ctx: &FpContext) -> Result<Fp> {
    let mut value = 0;
    for &sym in s {
        let v = ctx.symbol(sym)?;
        value = ctx.mul(ctx.add(value, v), ctx.r);
    }
    Ok(Fp { value, len: s.len() as u64 })
}

/// Forward fingerprint of `S[i, j]` from the prefix fingerprints of
/// `S[1, j]` and `S[1, i-1]`.
pub fn sub_forward(master_j: Fp, master_i1: Fp, ctx: &FpContext) -> Result<Fp> {
    if master_i1.len > master_j.len {
        return Err(Error::IndexOrder(format!(
            "substring start {} exceeds end {} + 1",
            master_i1.len + 1,
            master_j.len
        )));
    }
    let diff = ctx.sub(master_j.value, master_i1.value);
    Ok(Fp { value: ctx.mul(diff, ctx.r_inv_pow(master_i1.len)), len: master_j.len - master_i1.len })
}

/// Reverse fingerprint of `S[i, j]` from the prefix fingerprints of
/// `S[1, j]` and `S[1, i-1]`.
pub fn sub_reverse(master_j: Fp, master_i1: Fp, ctx: &FpContext) -> Result<Fp> {
    if master_i1.len > master_j.len {
        return Err(Error::IndexOrder(format!(
            "substring start {} exceeds end {} + 1",
            master_i1.len + 1,
            master_j.len
        )));
    }
    let len = master_j.len - master_i1.len;
    let scaled = ctx.mul(master_i1.value, ctx.r_pow(len));
    Ok(Fp { value: ctx.sub(master_j.value, scaled), len })
}

/// Forward fingerprint of `a ∘ b`.
pub fn concat_forward(left: Fp, right: Fp, ctx: &FpContext) -> Fp {
    Fp {
        value: ctx.add(left.value, ctx.mul(ctx.r_pow(left.len), right.value)),
        len: left.len + right.len,
    }
}

/// Reverse fingerprint of `a ∘ b`.
pub fn concat_reverse(left: Fp, right: Fp, ctx: &FpContext) -> Fp {
    Fp {
        value: ctx.add(ctx.mul(ctx.r_pow(right.len), left.value), right.value),
        len: left.len + right.len,
    }
}

fn underflow(whole: Fp, part: Fp) -> Result<()> {
    if part.len > whole.len {
        Err(Error::LengthUnderflow { whole: whole.len, part: part.len })
    } else {
        Ok(())
    }
}

/// Given forward fingerprints of `a ∘ b` and `a`, returns that of `b`.
pub fn split_right(whole: Fp, left: Fp, ctx: &FpContext) -> Result<Fp> {
    underflow(whole, left)?;
    let diff = ctx.sub(whole.value, left.value);
    Ok(Fp { value: ctx.mul(ctx.r_inv_pow(left.len), diff), len: whole.len - left.len })
}

/// Given forward fingerprints of `a ∘ b` and `b`, returns that of `a`.
pub fn split_left(whole: Fp, right: Fp, ctx: &FpContext) -> Result<Fp> {
    underflow(whole, right)?;
    let left_len = whole.len - right.len;
    let scaled = ctx.mul(ctx.r_pow(left_len), right.value);
    Ok(Fp { value: ctx.sub(whole.value, scaled), len: left_len })
}

/// Given reverse fingerprints of `a ∘ b` and `a`, returns that of `b`.
pub fn split_right_reverse(whole: Fp, left: Fp, ctx: &FpContext) -> Result<Fp> {
    underflow(whole, left)?;
    let right_len = whole.len - left.len;
    let scaled = ctx.mul(ctx.r_pow(right_len), left.value);
    Ok(Fp { value: ctx.sub(whole.value, scaled), len: right_len })
}

/// Given reverse fingerprints of `a ∘ b` and `b`, returns that of `a`.
pub fn split_left_reverse(whole: Fp, right: Fp, ctx: &FpContext) -> Result<Fp> {
    underflow(whole, right)?;
    let diff = ctx.sub(whole.value, right.value);
    Ok(Fp { value: ctx.mul(ctx.r_inv_pow(right.len), diff), len: whole.len - right.len })
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mulm = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powm = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulm(acc, b);
            }
            b = mulm(b, b);
            e >>= 1;
        }
        acc
    };
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powm(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulm(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
