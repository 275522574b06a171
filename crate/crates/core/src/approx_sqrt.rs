//! One-pass additive-error palindrome scan in `O(sqrt(n)/eps)` registers.
//!
//! With `q = floor(sqrt(n))` and spacing `s = max(1, floor(eps * q))`, every
//! midpoint `m` gets an estimate `est` with `l(m) - s < est <= l(m)`.
//!
//! Midpoint `m` is classified at iteration `i = m + q` by comparing
//! fingerprint pairs `F^R(m-j+1, m)` and `F^F(m+1, m+j)` for
//! `j in {s, 2s, ..., q}`. Short midpoints are reported immediately. Long
//! ones (`l(m) >= q`) are stored and their estimate is raised later by
//! checking them against checkpoints `c = k s`, which hold `F^R(1, c)`.
//! In compressed mode equally spaced long midpoints are kept as runs.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fingerprint::{Fp, FpContext, MasterPair};
use crate::meter::{Category, Meter, SpaceReport, REG_RF, REG_RNF, REG_RS, REG_SQRT_CHECKPOINT};
use crate::runs::{self, RfEntry, RnfEntry, RsEntry};
use crate::stream::{ComplementMap, SymbolSource, Window};
use crate::{isqrt, Symbol};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Simple,
    #[default]
    Compressed,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReportFilter {
    #[default]
    All,
    Threshold(u64),
    LongestOnly,
}

#[derive(Clone, Debug)]
pub struct SqrtConfig {
    pub n: u64,
    pub eps: f64,
    pub mode: Mode,
    pub filter: ReportFilter,
    pub complement: Option<ComplementMap>,
}

impl SqrtConfig {
    pub fn new(n: u64, eps: f64) -> Self {
        SqrtConfig { n, eps, mode: Mode::Compressed, filter: ReportFilter::All, complement: None }
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_complement(mut self, complement: Option<ComplementMap>) -> Self {
        self.complement = complement;
        self
    }
}

/// Derived sizes: `q`, the spacing `s`, and the pair sizes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Params {
    pub q: u64,
    pub s: u64,
    pub sizes: Vec<u64>,
}

/// Smallest admissible epsilon for a stream of length `n`.
pub fn min_eps(n: u64) -> f64 {
    1.0 / (n.max(1) as f64).sqrt()
}

pub fn params(n: u64, eps: f64) -> Result<Params> {
    if n == 0 {
        return Err(Error::Config("stream length must be at least 1".into()));
    }
    let lo = min_eps(n);
    if !(eps.is_finite() && eps >= lo * (1.0 - 1e-12) && eps <= 1.0 + 1e-12) {
        return Err(Error::EpsOutOfRange { eps, lo, hi: 1.0 });
    }
    let q = isqrt(n);
    let s = ((eps * q as f64 + 1e-9).floor() as u64).clamp(1, q);
    let mut sizes: Vec<u64> = (1..).map(|k| k * s).take_while(|&j| j < q).collect();
    sizes.push(q);
    Ok(Params { q, s, sizes })
}

/// An estimate for one midpoint: `lower <= l(m) < upper_exclusive`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Report {
    pub m: u64,
    pub est: u64,
    pub lower: u64,
    pub upper_exclusive: u64,
}

impl Report {
    pub fn new(m: u64, est: u64, s: u64) -> Self {
        Report { m, est, lower: est, upper_exclusive: est + s }
    }
}

/// Candidate list element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Entry {
    S(RsEntry),
    Nf(RnfEntry),
    F(RfEntry),
}

impl Entry {
    pub fn first(&self) -> u64 {
        match self {
            Entry::S(e) => e.m,
            Entry::Nf(r) => r.m1,
            Entry::F(f) => f.run.m1,
        }
    }

    pub fn last(&self) -> u64 {
        match self {
            Entry::S(e) => e.m,
            Entry::Nf(r) => r.last(),
            Entry::F(f) => f.run.last(),
        }
    }

    fn registers(&self) -> i64 {
        match self {
            Entry::S(_) => REG_RS,
            Entry::Nf(_) => REG_RNF,
            Entry::F(_) => REG_RF,
        }
    }

    fn is_run(&self) -> bool {
        !matches!(self, Entry::S(_))
    }
}

impl std::fmt::Display for Entry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Entry::S(e) => e.fmt(f),
            Entry::Nf(r) => r.fmt(f),
            Entry::F(r) => r.fmt(f),
        }
    }
}

/// Streaming state.
#[derive(Clone, Debug)]
pub struct ApproxSqrt {
    n: u64,
    mode: Mode,
    q: u64,
    s: u64,
    sizes: Vec<u64>,
    size_pows: Vec<u64>,
    comp: Option<ComplementMap>,
    ctx: FpContext,
    i: u64,
    masters: MasterPair,
    delayed: MasterPair,
    window: Window,
    /// `(F^R(m-j+1, m), F^F(m+1, m+j))` per pair size, for `m = i - q`.
    pairs: Vec<(u64, u64)>,
    /// `F^R(1, k s)` for `k = 0, 1, ...`.
    checkpoints: Vec<u64>,
    list: Vec<Entry>,
    /// `(due iteration, midpoint, arm to verify)`.
    queue: BinaryHeap<Reverse<(u64, u64, u64)>>,
    meter: Meter,
    entry_regs: i64,
}

/// Everything `finish` produces.
#[derive(Clone, Debug)]
pub struct SqrtFinish {
    /// Long and tail midpoints; short ones were returned by `step`.
    pub reports: Vec<Report>,
    pub entries: Vec<Entry>,
    pub space: SpaceReport,
    pub params: Params,
}

const REG_MASTERS: i64 = 3;
const REG_QUEUE_ITEM: i64 = 3;

impl ApproxSqrt {
    pub fn new(cfg: &SqrtConfig, ctx: FpContext) -> Result<Self> {
        Self::with_meter(cfg, ctx, Meter::new())
    }

    pub fn with_meter(cfg: &SqrtConfig, ctx: FpContext, meter: Meter) -> Result<Self> {
        let Params { q, s, sizes } = params(cfg.n, cfg.eps)?;
        let size_pows = sizes.iter().map(|&j| ctx.r_pow(j)).collect();
        let mut st = ApproxSqrt {
            n: cfg.n,
            mode: cfg.mode,
            q,
            s,
            pairs: vec![(0, 0); sizes.len()],
            sizes,
            size_pows,
            comp: cfg.complement.clone(),
            ctx,
            i: 0,
            masters: MasterPair::new(),
            delayed: MasterPair::new(),
            window: Window::new(2 * q as usize),
            checkpoints: vec![0],
            list: Vec::new(),
            queue: BinaryHeap::new(),
            meter,
            entry_regs: 0,
        };
        let pairs = 2 * st.pairs.len() as i64;
        st.meter.account(Category::Pairs, pairs);
        st.meter.account(Category::Checkpoints, REG_SQRT_CHECKPOINT);
        st.meter.account(Category::Scalars, 2 * REG_MASTERS + 3);
        Ok(st)
    }

    pub fn params(&self) -> Params {
        Params { q: self.q, s: self.s, sizes: self.sizes.clone() }
    }

    pub fn iteration(&self) -> u64 {
        self.i
    }

    pub fn entries(&self) -> &[Entry] {
        &self.list
    }

    pub fn meter(&self) -> &Meter {
        &self.meter
    }

    pub fn context(&self) -> &FpContext {
        &self.ctx
    }

    fn fwd_sym(&self, sym: Symbol) -> Symbol {
        match &self.comp {
            Some(c) => c.get(sym).unwrap_or(0),
            None => sym,
        }
    }

    /// `S[k]` for the pair slide, before `new` (= `S[i]`) enters the window.
    fn at(&self, k: i64, new: Symbol) -> Symbol {
        if k < 1 {
            0
        } else if k as u64 == self.i {
            new
        } else {
            self.window.get(k as u64).expect("pair slide stays inside the window")
        }
    }

    fn push_entry(&mut self, e: Entry) {
        self.entry_regs += e.registers();
        self.meter.account(Category::Entries, e.registers());
        self.list.push(e);
    }

    fn pop_entry(&mut self) -> Option<Entry> {
        let e = self.list.pop()?;
        self.entry_regs -= e.registers();
        self.meter.account(Category::Entries, -e.registers());
        Some(e)
    }

    /// Consumes `S[i]`; returns reports for short midpoints classified now.
    pub fn step(&mut self, sym: Symbol) -> Result<Vec<Report>> {
        if self.i >= self.n {
            return Err(Error::StreamOverrun { declared: self.n });
        }
        let f = match &self.comp {
            Some(c) => c.map(sym)?,
            None => sym,
        };
        self.masters.extend_pair(f, sym, &self.ctx)?;
        self.i += 1;
        let i = self.i;
        if i.is_multiple_of(self.s) {
            self.checkpoints.push(self.masters.rev.value);
            self.meter.account(Category::Checkpoints, REG_SQRT_CHECKPOINT);
        }
        self.slide_pairs(sym);
        if self.window.push(sym).is_none() {
            self.meter.account(Category::Window, 1);
        }
        let mut out = Vec::new();
        if i > self.q {
            let m = i - self.q;
            let sm = self.window.get(m)?;
            self.delayed.extend_pair(self.fwd_sym(sm), sm, &self.ctx)?;
            if m < self.n {
                self.classify(m, &mut out)?;
            }
        }
        self.run_due()?;
        self.meter.tick(i);
        Ok(out)
    }

    fn slide_pairs(&mut self, new: Symbol) {
        let ctx = self.ctx;
        let (r, r_inv) = (ctx.r(), ctx.r_inv());
        let m = self.i as i64 - self.q as i64;
        let enter_left = self.at(m, new) as u64;
        let leave_right = self.fwd_sym(self.at(m, new)) as u64;
        for k in 0..self.sizes.len() {
            let j = self.sizes[k] as i64;
            let rj = self.size_pows[k];
            let leave_left = self.at(m - j, new) as u64;
            let enter_right = self.fwd_sym(self.at(m + j, new)) as u64;
            let (rev, fwd) = self.pairs[k];
            let rev = ctx.mul(ctx.add(ctx.sub(rev, ctx.mul(leave_left, rj)), enter_left), r);
            let fwd = ctx.add(
                ctx.mul(ctx.sub(fwd, ctx.mul(leave_right, r)), r_inv),
                ctx.mul(enter_right, rj),
            );
            self.pairs[k] = (rev, fwd);
        }
    }

    fn classify(&mut self, m: u64, out: &mut Vec<Report>) -> Result<()> {
        let mut est = 0;
        for (k, &j) in self.sizes.iter().enumerate() {
            if j > m || self.pairs[k].0 != self.pairs[k].1 {
                break;
            }
            est = j;
        }
        if est == self.q {
            self.insert_long(m)
        } else {
            out.push(Report::new(m, est, self.s));
            if let Some(Entry::Nf(run)) = self.list.last() {
                if run.next() == m {
                    self.finalize_last()?;
                }
            }
            Ok(())
        }
    }

    /// Largest `v <= q` with `v = m (mod s)`; a valid lower bound for a long midpoint.
    fn base_arm(&self, m: u64) -> u64 {
        let (q, s) = (self.q, self.s);
        q - (q % s + s - m % s) % s
    }

    fn insert_long(&mut self, m: u64) -> Result<()> {
        let a0 = self.base_arm(m);
        let entry = RsEntry { m, est: self.q, fwd: self.delayed.fwd, rev: self.delayed.rev };
        if self.mode == Mode::Compressed {
            if let Some(Entry::Nf(run)) = self.list.last_mut() {
                if runs::try_append(run, m) {
                    return Ok(());
                }
                self.finalize_last()?;
            }
            let k = self.list.len();
            if k >= 2 {
                if let (Entry::S(e1), Entry::S(e2)) = (self.list[k - 2], self.list[k - 1]) {
                    let d = e2.m - e1.m;
                    if m - e2.m == d && 2 * d <= self.q {
                        let run = runs::form_run_from(&e1, &e2, m, &self.ctx)?;
                        self.pop_entry();
                        self.pop_entry();
                        self.push_entry(Entry::Nf(run));
                        return Ok(());
                    }
                }
            }
        }
        self.push_entry(Entry::S(entry));
        self.schedule(m, a0);
        Ok(())
    }

    /// Queues the check of arm `v + s` for `m`, which currently has `v` verified.
    fn schedule(&mut self, m: u64, v: u64) {
        let next = v + self.s;
        let due = m + next;
        if next <= m && due > self.i && due <= self.n {
            self.queue.push(Reverse((due, m, next)));
            self.meter.account(Category::Scalars, REG_QUEUE_ITEM);
        }
    }

    /// Is `S[m-v+1, m]` the (complement) reverse of `S[m+1, m+v]`, given
    /// `F^F(1, m+v)` and the prefix fingerprints at `m`?
    fn check(&self, m: u64, v: u64, fwd_end: u64, fwd: Fp, rev: Fp) -> bool {
        let ctx = &self.ctx;
        let c = m - v;
        let rc = self.checkpoints[(c / self.s) as usize];
        let left = ctx.mul(ctx.r_pow(m), ctx.sub(rev.value, ctx.mul(ctx.r_pow(v), rc)));
        left == ctx.sub(fwd_end, fwd.value)
    }

    fn locate(&self, m: u64) -> Option<usize> {
        let k = self.list.partition_point(|e| e.first() <= m);
        (k > 0).then(|| k - 1)
    }

    /// Prefix fingerprints of an explicitly stored midpoint.
    fn explicit(&self, m: u64) -> Option<(usize, Fp, Fp)> {
        let k = self.locate(m)?;
        let run_prefix = |run: &RnfEntry, j: u64| runs::prefix_at(run, j, &self.ctx).ok();
        let (fwd, rev) = match &self.list[k] {
            Entry::S(e) if e.m == m => (e.fwd, e.rev),
            Entry::Nf(r) if r.m1 == m => (r.fwd1, r.rev1),
            Entry::F(f) => {
                let run = &f.run;
                if m == run.m1 {
                    (run.fwd1, run.rev1)
                } else {
                    let (lo, hi) = runs::middle_indices(run.h);
                    let j = [lo, hi, run.h].into_iter().find(|&j| run.m1 + (j - 1) * run.d == m)?;
                    run_prefix(run, j)?
                }
            }
            _ => return None,
        };
        Some((k, fwd, rev))
    }

    fn raise(&mut self, k: usize, m: u64, est: u64) {
        match &mut self.list[k] {
            Entry::S(e) => e.est = e.est.max(est),
            Entry::Nf(r) => r.est1 = r.est1.max(est),
            Entry::F(f) => {
                let run = f.run;
                let (lo, hi) = runs::middle_indices(run.h);
                let at = |j: u64| run.m1 + (j - 1) * run.d;
                if m == run.m1 {
                    f.run.est1 = f.run.est1.max(est);
                }
                if m == at(lo) {
                    f.est_mid_floor = f.est_mid_floor.max(est);
                }
                if m == at(hi) {
                    f.est_mid_ceil = f.est_mid_ceil.max(est);
                }
                if m == at(run.h) {
                    f.est_last = f.est_last.max(est);
                }
            }
        }
    }

    fn run_due(&mut self) -> Result<()> {
        while let Some(&Reverse((due, m, v))) = self.queue.peek() {
            if due > self.i {
                break;
            }
            self.queue.pop();
            self.meter.account(Category::Scalars, -REG_QUEUE_ITEM);
            if due < self.i {
                continue;
            }
            let Some((k, fwd, rev)) = self.explicit(m) else { continue };
            if self.check(m, v, self.masters.fwd.value, fwd, rev) {
                self.raise(k, m, v);
                self.schedule(m, v);
            }
        }
        Ok(())
    }

    /// Largest verified aligned arm for `m` using only checks that end inside
    /// the window, and whether further checks should be queued.
    fn scan_estimate(&self, m: u64, fwd: Fp, rev: Fp) -> u64 {
        let (i, s) = (self.i, self.s);
        let a0 = self.base_arm(m);
        let lim = (i - m).min(m);
        if lim < a0 + s {
            return a0;
        }
        let ctx = &self.ctx;
        let mut v = lim - (lim % s + s - m % s) % s;
        let mut f_end = self.masters.fwd.value;
        let mut r_end = self.masters.r_pow();
        let mut j = i;
        while v > a0 {
            while j > m + v {
                let Ok(sym) = self.window.get(j) else { return a0 };
                f_end = ctx.sub(f_end, ctx.mul(self.fwd_sym(sym) as u64, r_end));
                r_end = ctx.mul(r_end, ctx.r_inv());
                j -= 1;
            }
            if self.check(m, v, f_end, fwd, rev) {
                return v;
            }
            v -= s;
        }
        a0
    }

    /// Closes the trailing open run and makes its middle and last midpoints
    /// explicit.
    fn finalize_last(&mut self) -> Result<()> {
        let Some(Entry::Nf(run)) = self.list.last().copied() else { return Ok(()) };
        let (lo, hi) = runs::middle_indices(run.h);
        let mut ests = [0u64; 3];
        let mut raw = [0u64; 3];
        let mut mids = [0u64; 3];
        for (t, j) in [lo, hi, run.h].into_iter().enumerate() {
            let m = runs::midpoint_at(&run, j)?;
            let (fwd, rev) = runs::prefix_at(&run, j, &self.ctx)?;
            raw[t] = self.scan_estimate(m, fwd, rev);
            ests[t] = raw[t].max(self.q);
            mids[t] = m;
        }
        self.pop_entry();
        self.push_entry(Entry::F(runs::finalize_run(run, ests[0], ests[1], ests[2])));
        for t in 0..3 {
            if t == 1 && mids[1] == mids[0] {
                continue;
            }
            self.schedule(mids[t], raw[t]);
        }
        Ok(())
    }

    /// Arm of a tail midpoint `m > n - q`, computed from the window.
    fn tail_arm(&self, m: u64) -> u64 {
        let mut k = 0;
        while k < m && m + k < self.i {
            let (Ok(l), Ok(r)) = (self.window.get(m - k), self.window.get(m + k + 1)) else { break };
            if l != self.fwd_sym(r) {
                break;
            }
            k += 1;
        }
        k
    }

    /// Largest pair size not above `arm`, or 0.
    fn quantize(&self, arm: u64) -> u64 {
        self.sizes.iter().copied().take_while(|&j| j <= arm).last().unwrap_or(0)
    }

    pub fn finish(mut self) -> Result<SqrtFinish> {
        if self.i < self.n {
            return Err(Error::IncompleteStream { declared: self.n, consumed: self.i });
        }
        self.finalize_last()?;
        let mut reports = Vec::new();
        for e in &self.list {
            match e {
                Entry::S(e) => reports.push(Report::new(e.m, e.est, self.s)),
                Entry::F(f) => {
                    for j in 1..=f.run.h {
                        let m = runs::midpoint_at(&f.run, j)?;
                        reports.push(Report::new(m, runs::estimate_at(f, j)?, self.s));
                    }
                }
                Entry::Nf(_) => return Err(Error::Structure("open run left after finalization".into())),
            }
        }
        let tail_start = (self.n + 1).saturating_sub(self.q).max(1);
        for m in tail_start..self.n {
            reports.push(Report::new(m, self.quantize(self.tail_arm(m)), self.s));
        }
        reports.sort();
        Ok(SqrtFinish { reports, entries: self.list.clone(), space: self.meter.report(), params: self.params() })
    }

    /// Density check on the candidate list: every span of `q` consecutive
    /// indices starts at most two explicit entries and at most two runs.
    pub fn density_ok(&self) -> bool {
        density_ok(&self.list, self.q)
    }

    /// One line per candidate list element.
    pub fn dump_state(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# i={} entries={} queued={}", self.i, self.list.len(), self.queue.len());
        for e in &self.list {
            let _ = writeln!(out, "{e}");
        }
        out
    }
}

pub fn density_ok(list: &[Entry], q: u64) -> bool {
    for (k, e) in list.iter().enumerate() {
        let end = e.first() + q;
        let span = list[k..].iter().take_while(|x| x.first() < end);
        let (mut singles, mut runs) = (0, 0);
        for x in span {
            if x.is_run() {
                runs += 1;
            } else {
                singles += 1;
            }
        }
        if singles > 2 || runs > 2 {
            return false;
        }
    }
    true
}

/// Keeps reports whose midpoint may have arm at least `t`: all `l(m) >= t`
/// survive and none with `l(m) <= t - s`.
pub fn threshold_filter(reports: &[Report], t: u64) -> Vec<Report> {
    reports.iter().copied().filter(|r| r.upper_exclusive > t).collect()
}

pub fn apply_filter(reports: &[Report], filter: ReportFilter) -> Vec<Report> {
    match filter {
        ReportFilter::All => reports.to_vec(),
        ReportFilter::Threshold(t) => threshold_filter(reports, t),
        ReportFilter::LongestOnly => {
            let t = reports.iter().map(|r| r.est).max().unwrap_or(0);
            reports.iter().copied().filter(|r| r.est == t).collect()
        }
    }
}

/// Full result of a pass: every midpoint `1..n-1` in order.
#[derive(Clone, Debug)]
pub struct SqrtRun {
    pub reports: Vec<Report>,
    pub entries: Vec<Entry>,
    pub space: SpaceReport,
    pub params: Params,
}

/// Runs a whole stream through [`ApproxSqrt`]; `inspect` sees the state after
/// every symbol.
pub fn run_with<F>(src: &SymbolSource, cfg: &SqrtConfig, ctx: FpContext, meter: Meter, mut inspect: F) -> Result<SqrtRun>
where
    F: FnMut(&ApproxSqrt),
{
    let mut st = ApproxSqrt::with_meter(cfg, ctx, meter)?;
    let mut reports = Vec::new();
    for sym in src.symbols()? {
        reports.extend(st.step(sym?)?);
        inspect(&st);
    }
    let fin = st.finish()?;
    reports.extend(fin.reports);
    reports.sort();
    Ok(SqrtRun {
        reports: apply_filter(&reports, cfg.filter),
        entries: fin.entries,
        space: fin.space,
        params: fin.params,
    })
}

pub fn run(src: &SymbolSource, cfg: &SqrtConfig, ctx: FpContext) -> Result<SqrtRun> {
    run_with(src, cfg, ctx, Meter::new(), |_| {})
}

pub fn run_symbols(s: &[Symbol], cfg: &SqrtConfig, ctx: FpContext) -> Result<SqrtRun> {
    run(&SymbolSource::from_symbols(s.to_vec()), cfg, ctx)
}

/// Outcome of the exact scan for short longest palindromes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SmallLmax {
    /// `lmax < q`: its exact value, the first midpoint achieving it and the
    /// palindrome text.
    Exact { lmax: u64, midpoint: Option<u64>, text: Vec<Symbol> },
    /// Some midpoint has arm at least `q`.
    AtLeastSqrt,
}

/// One-pass exact scan that succeeds when the longest arm is below `q`.
///
/// A single sliding pair of size `best + 1` is tested at every midpoint and
/// grown while it matches.
#[derive(Clone, Debug)]
pub struct SmallLmaxScan {
    n: u64,
    q: u64,
    comp: Option<ComplementMap>,
    ctx: FpContext,
    i: u64,
    window: Window,
    k: u64,
    rk: u64,
    rev: u64,
    fwd: u64,
    best: u64,
    best_mid: Option<u64>,
    text: Vec<Symbol>,
    at_least: bool,
}

impl SmallLmaxScan {
    pub fn new(n: u64, ctx: FpContext, complement: Option<ComplementMap>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("stream length must be at least 1".into()));
        }
        let q = isqrt(n);
        Ok(SmallLmaxScan {
            n,
            q,
            comp: complement,
            rk: ctx.r(),
            ctx,
            i: 0,
            window: Window::new(2 * q as usize),
            k: 1,
            rev: 0,
            fwd: 0,
            best: 0,
            best_mid: None,
            text: Vec::new(),
            at_least: false,
        })
    }

    fn f(&self, sym: Symbol) -> Symbol {
        match &self.comp {
            Some(c) => c.get(sym).unwrap_or(0),
            None => sym,
        }
    }

    fn at(&self, k: i64, new: Symbol) -> u64 {
        if k < 1 {
            0
        } else if k as u64 == self.i {
            new as u64
        } else {
            self.window.get(k as u64).expect("scan stays inside the window") as u64
        }
    }

    pub fn step(&mut self, sym: Symbol) -> Result<()> {
        if self.i >= self.n {
            return Err(Error::StreamOverrun { declared: self.n });
        }
        if let Some(c) = &self.comp {
            c.map(sym)?;
        }
        self.ctx.symbol(sym)?;
        self.i += 1;
        let ctx = self.ctx;
        let m = self.i as i64 - self.q as i64;
        let k = self.k as i64;
        let enter_left = self.at(m, sym);
        let leave_right = self.f(self.at(m, sym) as Symbol) as u64;
        let leave_left = self.at(m - k, sym);
        let enter_right = self.f(self.at(m + k, sym) as Symbol) as u64;
        self.rev = ctx.mul(ctx.add(ctx.sub(self.rev, ctx.mul(leave_left, self.rk)), enter_left), ctx.r());
        self.fwd = ctx.add(
            ctx.mul(ctx.sub(self.fwd, ctx.mul(leave_right, ctx.r())), ctx.r_inv()),
            ctx.mul(enter_right, self.rk),
        );
        self.window.push(sym);
        if m >= 1 && (m as u64) < self.n && !self.at_least {
            self.grow(m as u64);
        }
        Ok(())
    }

    fn grow(&mut self, m: u64) {
        let ctx = self.ctx;
        while self.k <= m && self.rev == self.fwd {
            self.best = self.k;
            self.best_mid = Some(m);
            self.text = ((m - self.k + 1)..=(m + self.k)).map(|x| self.window.get(x).expect("in window")).collect();
            if self.k == self.q {
                self.at_least = true;
                return;
            }
            let k = self.k;
            self.rk = ctx.mul(self.rk, ctx.r());
            let left = if m > k { self.window.get(m - k).expect("in window") as u64 } else { 0 };
            let right = self.f(self.window.get(m + k + 1).expect("in window")) as u64;
            self.rev = ctx.add(self.rev, ctx.mul(left, self.rk));
            self.fwd = ctx.add(self.fwd, ctx.mul(right, self.rk));
            self.k += 1;
        }
    }

    pub fn finish(self) -> Result<SmallLmax> {
        if self.i < self.n {
            return Err(Error::IncompleteStream { declared: self.n, consumed: self.i });
        }
        if self.at_least {
            return Ok(SmallLmax::AtLeastSqrt);
        }
        let (mut best, mut mid, mut text) = (self.best, self.best_mid, self.text.clone());
        let tail_start = (self.n + 1).saturating_sub(self.q).max(1);
        for m in tail_start..self.n {
            let mut a = 0;
            while a < m && m + a < self.n {
                let (l, r) = (self.window.get(m - a)?, self.window.get(m + a + 1)?);
                if l != self.f(r) {
                    break;
                }
                a += 1;
            }
            if a > best {
                best = a;
                mid = Some(m);
                text = ((m - a + 1)..=(m + a)).map(|x| self.window.get(x)).collect::<Result<_>>()?;
            }
        }
        if best == 0 && self.n >= 2 {
            mid = Some(1);
        }
        Ok(SmallLmax::Exact { lmax: best, midpoint: mid, text })
    }
}

/// Runs [`SmallLmaxScan`] over a whole source.
pub fn small_lmax_scan(src: &SymbolSource, ctx: FpContext, complement: Option<ComplementMap>) -> Result<SmallLmax> {
    let n = src.len().ok_or(Error::NotReplayable)?;
    let mut scan = SmallLmaxScan::new(n, ctx, complement)?;
    for sym in src.symbols()? {
        scan.step(sym?)?;
    }
    scan.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{gen_random, gen_unary};
    use crate::oracle::{all_arms, longest_set};

    fn ctx() -> FpContext {
        FpContext::new(11, 0)
    }

    fn check_bounds(s: &[Symbol], eps: f64, mode: Mode) -> SqrtRun {
        let n = s.len() as u64;
        let out = run_symbols(s, &SqrtConfig::new(n, eps).with_mode(mode), ctx()).unwrap();
        let prof = all_arms(s);
        assert_eq!(out.reports.len(), s.len() - 1);
        for (k, r) in out.reports.iter().enumerate() {
            let arm = prof.arm(r.m as usize) as u64;
            assert_eq!(r.m, k as u64 + 1);
            assert!(r.est <= arm && arm < r.upper_exclusive, "m={} est={} arm={arm} s={}", r.m, r.est, out.params.s);
        }
        out
    }

    #[test]
    fn parameter_examples() {
        assert_eq!(params(100, 0.5).unwrap(), Params { q: 10, s: 5, sizes: vec![5, 10] });
        assert_eq!(params(100, 1.0).unwrap().sizes, vec![10]);
        assert!(matches!(params(100, 0.001), Err(Error::EpsOutOfRange { .. })));
        assert!(params(100, 1.5).is_err());
        assert_eq!(params(1, 1.0).unwrap().q, 1);
    }

    #[test]
    fn abba_with_spacing_one() {
        let mut s = crate::stream::symbols_from_str("abba");
        s.extend(gen_random(12, 26, 5).unwrap().iter().map(|x| x + 200));
        let out = check_bounds(&s, 0.25, Mode::Compressed);
        assert_eq!(out.params.s, 1);
        assert_eq!(out.reports[1].est, 2);
    }

    #[test]
    fn unary_compresses_to_one_run() {
        let s = gen_unary(64, 1);
        let out = check_bounds(&s, 0.5, Mode::Compressed);
        assert_eq!(out.entries.len(), 1);
        let r32 = out.reports[31];
        assert!(r32.est > 28 && r32.est <= 32);
        let simple = check_bounds(&s, 0.5, Mode::Simple);
        assert!(simple.entries.len() > 40);
    }

    #[test]
    fn random_strings_respect_bounds() {
        for seed in 0..60 {
            for &(n, sigma) in &[(64usize, 2u32), (100, 2), (256, 3), (37, 2)] {
                let s = gen_random(n, sigma, seed).unwrap();
                for eps in [1.0, 0.5, 0.25] {
                    if eps < min_eps(n as u64) {
                        continue;
                    }
                    let a = check_bounds(&s, eps, Mode::Compressed);
                    let b = check_bounds(&s, eps, Mode::Simple);
                    assert_eq!(a.reports, b.reports);
                }
            }
        }
    }

    #[test]
    fn tiny_streams() {
        for n in 1..=6usize {
            for mask in 0u32..(1 << n) {
                let s: Vec<Symbol> = (0..n).map(|k| 1 + ((mask >> k) & 1)).collect();
                let lo = min_eps(n as u64);
                for eps in [lo, 0.5_f64.max(lo), 1.0] {
                    check_bounds(&s, eps, Mode::Compressed);
                }
            }
        }
    }

    #[test]
    fn incomplete_and_overrun() {
        let mut st = ApproxSqrt::new(&SqrtConfig::new(3, 1.0), ctx()).unwrap();
        st.step(1).unwrap();
        assert!(matches!(st.clone().finish(), Err(Error::IncompleteStream { .. })));
        st.step(1).unwrap();
        st.step(1).unwrap();
        assert!(matches!(st.step(1), Err(Error::StreamOverrun { .. })));
    }

    #[test]
    fn threshold_edges() {
        let s = gen_random(200, 2, 1).unwrap();
        let out = run_symbols(&s, &SqrtConfig::new(200, 0.5), ctx()).unwrap();
        assert_eq!(threshold_filter(&out.reports, 0), out.reports);
        assert!(threshold_filter(&out.reports, 201).is_empty());
    }

    #[test]
    fn small_lmax_examples() {
        let mut s = crate::stream::symbols_from_str("abba");
        s.extend((0..60).map(|k| 300 + k));
        let src = SymbolSource::from_symbols(s.clone());
        match small_lmax_scan(&src, ctx(), None).unwrap() {
            SmallLmax::Exact { lmax, midpoint, text } => {
                assert_eq!((lmax, midpoint), (2, Some(2)));
                assert_eq!(text, crate::stream::symbols_from_str("abba"));
            }
            other => panic!("{other:?}"),
        }
        let unary = SymbolSource::from_symbols(gen_unary(64, 1));
        assert_eq!(small_lmax_scan(&unary, ctx(), None).unwrap(), SmallLmax::AtLeastSqrt);
        for seed in 0..200 {
            let s = gen_random(150, 2, seed).unwrap();
            let (lmax, mids) = longest_set(&s);
            let got = small_lmax_scan(&SymbolSource::from_symbols(s), ctx(), None).unwrap();
            if lmax < 12 {
                assert_eq!(got, match got.clone() {
                    SmallLmax::Exact { text, .. } => SmallLmax::Exact { lmax: lmax as u64, midpoint: Some(mids[0] as u64), text },
                    _ => panic!("expected exact for seed {seed}"),
                });
            } else {
                assert_eq!(got, SmallLmax::AtLeastSqrt);
            }
        }
    }
}
