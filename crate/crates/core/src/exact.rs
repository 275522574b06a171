//! Two-pass exact search for the longest palindromes in `O(sqrt(n))` registers.
//!
//! Pass 1 runs the additive scan with spacing `s = floor(q/2)` together with
//! the short-longest scan. If the longest arm is below `q` it is already
//! exact and pass 2 slides one fingerprint pair of that size. Otherwise the
//! true arm of each surviving candidate lies in `[est, est + s)`, and pass 2
//! buffers the `s` symbols left of `m - est` to find the first mismatch.

use serde::{Deserialize, Serialize};

use crate::approx_sqrt::{self, ApproxSqrt, Entry, SmallLmax, SmallLmaxScan, SqrtConfig};
use crate::error::{Error, Result};
use crate::fingerprint::FpContext;
use crate::meter::{Category, Meter, SpaceReport};
use crate::runs;
use crate::stream::{ComplementMap, SymbolSource, Window};
use crate::Symbol;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactResult {
    pub lmax: u64,
    /// All midpoints with arm `lmax`, ascending. Empty when `lmax = 0`.
    pub midpoints: Vec<u64>,
    /// Candidates whose whole uncertainty window matched.
    pub collisions: Vec<u64>,
    /// Most uncertain intervals buffered at once during pass 2.
    pub max_active: usize,
    pub large_case: bool,
    pub space: SpaceReport,
}

/// A pass-2 candidate: `l(m)` is known to lie in `[est, est + s)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UncertainInterval {
    pub m: u64,
    pub est: u64,
    /// `S[start, m - est]`, clipped at index 1.
    buf: Vec<Symbol>,
    start: u64,
    pub resolved: Option<u64>,
    pub collision: bool,
}

impl UncertainInterval {
    fn new(m: u64, est: u64, s: u64) -> Self {
        let start = (m + 1).saturating_sub(est + s).max(1);
        UncertainInterval { m, est, buf: Vec::new(), start, resolved: None, collision: false }
    }

    fn end(&self) -> u64 {
        self.m - self.est
    }
}

fn pass1_eps(n: u64) -> f64 {
    approx_sqrt::min_eps(n).clamp(0.5, 1.0)
}

/// Exact longest arm and all midpoints achieving it.
pub fn run(src: &SymbolSource, ctx: FpContext, complement: Option<ComplementMap>) -> Result<ExactResult> {
    if !src.replayable() {
        return Err(Error::NotReplayable);
    }
    let n = src.len().ok_or(Error::NotReplayable)?;
    if n < 2 {
        return Ok(ExactResult {
            lmax: 0,
            midpoints: Vec::new(),
            collisions: Vec::new(),
            max_active: 0,
            large_case: false,
            space: SpaceReport::default(),
        });
    }
    let cfg = SqrtConfig::new(n, pass1_eps(n)).with_complement(complement.clone());
    let mut approx = ApproxSqrt::new(&cfg, ctx)?;
    let mut small = SmallLmaxScan::new(n, ctx, complement.clone())?;
    for sym in src.symbols()? {
        let sym = sym?;
        approx.step(sym)?;
        small.step(sym)?;
    }
    let s = approx.params().s;
    let fin = approx.finish()?;
    match small.finish()? {
        SmallLmax::Exact { lmax, .. } => {
            let midpoints = small_case_pass2(src, lmax, ctx, complement.as_ref())?;
            Ok(ExactResult {
                lmax,
                midpoints,
                collisions: Vec::new(),
                max_active: 0,
                large_case: false,
                space: fin.space,
            })
        }
        SmallLmax::AtLeastSqrt => {
            let cands = preprocess(&fin.entries, s);
            large_case_pass2(src, cands, s, complement.as_ref(), fin.space)
        }
    }
}

/// Convenience wrapper over in-memory symbols.
pub fn run_symbols(s: &[Symbol], ctx: FpContext) -> Result<ExactResult> {
    run(&SymbolSource::from_symbols(s.to_vec()), ctx, None)
}

fn fmap(comp: Option<&ComplementMap>, sym: Symbol) -> Result<Symbol> {
    match comp {
        Some(c) => c.map(sym),
        None => Ok(sym),
    }
}

/// All midpoints whose arm equals `lmax`, found with one sliding pair of
/// size `lmax` centred at `m = i - lmax`.
pub fn small_case_pass2(
    src: &SymbolSource,
    lmax: u64,
    ctx: FpContext,
    comp: Option<&ComplementMap>,
) -> Result<Vec<u64>> {
    if lmax == 0 {
        return Ok(Vec::new());
    }
    let (r, r_inv, rl) = (ctx.r(), ctx.r_inv(), ctx.r_pow(lmax));
    let mut window = Window::new(2 * lmax as usize);
    let (mut rev, mut fwd) = (0u64, 0u64);
    let mut out = Vec::new();
    let mut i = 0u64;
    for sym in src.symbols()? {
        let sym = sym?;
        i += 1;
        let at = |k: i64| -> Result<u64> {
            Ok(if k < 1 {
                0
            } else if k as u64 == i {
                sym as u64
            } else {
                window.get(k as u64)? as u64
            })
        };
        let m = i as i64 - lmax as i64;
        let (enter_left, leave_left) = (at(m)?, at(m - lmax as i64)?);
        let leave_right = if m >= 1 { fmap(comp, at(m)? as Symbol)? as u64 } else { 0 };
        let enter_right = fmap(comp, sym)? as u64;
        rev = ctx.mul(ctx.add(ctx.sub(rev, ctx.mul(leave_left, rl)), enter_left), r);
        fwd = ctx.add(ctx.mul(ctx.sub(fwd, ctx.mul(leave_right, r)), r_inv), ctx.mul(enter_right, rl));
        window.push(sym);
        if m >= lmax as i64 && rev == fwd {
            out.push(m as u64);
        }
    }
    Ok(out)
}

/// Reduces the pass-1 list to explicit candidates that may be longest:
/// runs contribute only their middle midpoints, and anything with
/// `est <= max_est - s` is dropped.
pub fn preprocess(entries: &[Entry], s: u64) -> Vec<(u64, u64)> {
    let mut explicit: Vec<(u64, u64)> = Vec::new();
    let mut cands: Vec<(u64, u64)> = Vec::new();
    for e in entries {
        match e {
            Entry::S(e) => {
                explicit.push((e.m, e.est));
                cands.push((e.m, e.est));
            }
            Entry::Nf(r) => explicit.push((r.m1, r.est1)),
            Entry::F(f) => {
                let (lo, hi) = runs::middle_midpoints(&f.run);
                explicit.push((f.run.m1, f.run.est1));
                explicit.push((f.run.last(), f.est_last));
                cands.push((lo, f.est_mid_floor));
                if hi != lo {
                    cands.push((hi, f.est_mid_ceil));
                }
            }
        }
    }
    explicit.extend(cands.iter().copied());
    let max_est = explicit.iter().map(|&(_, e)| e).max().unwrap_or(0);
    cands.retain(|&(_, est)| est + s > max_est);
    cands
}

fn large_case_pass2(
    src: &SymbolSource,
    cands: Vec<(u64, u64)>,
    s: u64,
    comp: Option<&ComplementMap>,
    pass1_space: SpaceReport,
) -> Result<ExactResult> {
    let mut ivs: Vec<UncertainInterval> = cands.iter().map(|&(m, est)| UncertainInterval::new(m, est, s)).collect();
    ivs.sort_by_key(|iv| (iv.start, iv.m));
    let mut meter = Meter::new();
    let mut next = 0usize;
    let mut active: Vec<usize> = Vec::new();
    let mut max_active = 0usize;
    let mut i = 0u64;
    for sym in src.symbols()? {
        let sym = sym?;
        i += 1;
        while next < ivs.len() && ivs[next].start <= i {
            active.push(next);
            meter.account(Category::Scalars, 3);
            next += 1;
        }
        max_active = max_active.max(active.len());
        let fsym = fmap(comp, sym)?;
        active.retain(|&k| {
            let iv = &mut ivs[k];
            if i <= iv.end() {
                iv.buf.push(sym);
                meter.account(Category::UncertainBuffers, 1);
            }
            let (lo, hi) = (iv.m + iv.est, iv.m + iv.est + s);
            if i > lo && i <= hi {
                let left = 2 * iv.m + 1;
                let mismatch = if left <= i {
                    true
                } else {
                    let idx = left - i;
                    idx < iv.start || iv.buf[(idx - iv.start) as usize] != fsym
                };
                if mismatch {
                    iv.resolved = Some(i - iv.m - 1);
                } else if i == hi {
                    iv.resolved = Some(iv.est + s);
                    iv.collision = true;
                }
            }
            if iv.resolved.is_some() {
                meter.account(Category::UncertainBuffers, -(iv.buf.len() as i64));
                meter.account(Category::Scalars, -3);
                iv.buf = Vec::new();
                false
            } else {
                true
            }
        });
        meter.tick(i);
    }
    let n = i;
    for iv in ivs.iter_mut() {
        if iv.resolved.is_none() {
            iv.resolved = Some(n - iv.m);
        }
    }
    let lmax = ivs.iter().filter_map(|iv| iv.resolved).max().unwrap_or(0);
    let mut midpoints: Vec<u64> = ivs.iter().filter(|iv| iv.resolved == Some(lmax)).map(|iv| iv.m).collect();
    midpoints.sort_unstable();
    midpoints.dedup();
    let mut collisions: Vec<u64> = ivs.iter().filter(|iv| iv.collision).map(|iv| iv.m).collect();
    collisions.sort_unstable();
    let mut space = meter.report();
    space.peak_registers = space.peak_registers.max(pass1_space.peak_registers);
    Ok(ExactResult { lmax, midpoints, collisions, max_active, large_case: true, space })
}
