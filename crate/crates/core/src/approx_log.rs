//! One-pass `(1 + eps)`-approximation of the longest palindrome in
//! `O(log n / (eps log(1 + eps)))` registers. Needs no stream length.
//!
//! Checkpoints live on levels `k >= k0`: level `k` places one every
//! `floor(delta (1+delta)^(k-2))` indices and forgets it once it is more than
//! `2 (1+delta)^k` behind, where `delta = sqrt(1+eps) - 1`. At iteration `i`
//! every live checkpoint `c` with `i - c` even tests whether `S[c+1, i]` is
//! a palindrome, which certifies arm `(i-c)/2` at midpoint `(i+c)/2`.
//!
//! Certified midpoints wait in the list of the checkpoint they were last
//! certified against until the next lower checkpoint is due.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fingerprint::{FpContext, MasterPair};
use crate::meter::{Category, Meter, SpaceReport, REG_LOG_CHECKPOINT};
use crate::stream::{ComplementMap, SymbolSource};
use crate::Symbol;

const FLOAT_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogParams {
    pub eps: f64,
    pub delta: f64,
    pub k0: u32,
}

impl LogParams {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps.is_finite() && eps > 0.0 && eps <= 1.0) {
            return Err(Error::EpsOutOfRange { eps, lo: 0.0, hi: 1.0 });
        }
        let delta = (1.0 + eps).sqrt() - 1.0;
        let k0 = ((1.0 / delta).ln() / (1.0 + delta).ln() - FLOAT_SLACK).ceil().max(1.0) as u32;
        Ok(LogParams { eps, delta, k0 })
    }

    /// `floor(delta (1+delta)^(k-2))`; zero means the level is skipped.
    pub fn spacing(&self, k: u32) -> u64 {
        (self.delta * (1.0 + self.delta).powi(k as i32 - 2) + FLOAT_SLACK).floor() as u64
    }

    /// `2 (1+delta)^k`.
    pub fn horizon(&self, k: u32) -> f64 {
        2.0 * (1.0 + self.delta).powi(k as i32)
    }
}

/// Upper bound on live `(checkpoint, level)` pairs for a stream of length `n`.
pub fn checkpoint_bound(n: u64, eps: f64) -> f64 {
    (2.0 * (n.max(2) as f64).ln() / (1.0 + eps).ln() + 1.0) * (24.0 / eps + 1.0)
}

/// A list element: one midpoint, or `h` midpoints spaced `d` apart.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LogEntry {
    Single(u64),
    Run { m1: u64, d: u64, h: u64 },
}

impl LogEntry {
    fn registers(&self) -> i64 {
        match self {
            LogEntry::Single(_) => 1,
            LogEntry::Run { .. } => 3,
        }
    }

    fn first(&self) -> u64 {
        match *self {
            LogEntry::Single(m) => m,
            LogEntry::Run { m1, .. } => m1,
        }
    }
}

#[derive(Clone, Debug)]
struct Checkpoint {
    c: u64,
    fwd: u64,
    rev: u64,
    rpow: u64,
    levels: u32,
    permanent: bool,
    list: VecDeque<LogEntry>,
}

impl Checkpoint {
    fn list_registers(&self) -> i64 {
        self.list.iter().map(LogEntry::registers).sum()
    }
}

#[derive(Clone, Debug)]
struct Level {
    spacing: u64,
    horizon: f64,
    live: VecDeque<u64>,
}

/// Appends `m` to a midpoint list, extending or forming a run when the
/// spacing allows.
fn push_midpoint(list: &mut VecDeque<LogEntry>, m: u64) {
    if let Some(LogEntry::Run { m1, d, h }) = list.back_mut() {
        if *m1 + *h * *d == m {
            *h += 1;
            return;
        }
    }
    let k = list.len();
    if k >= 2 {
        if let (LogEntry::Single(a), LogEntry::Single(b)) = (list[k - 2], list[k - 1]) {
            if b > a && m > b && m - b == b - a {
                list.pop_back();
                list.pop_back();
                list.push_back(LogEntry::Run { m1: a, d: b - a, h: 3 });
                return;
            }
        }
    }
    list.push_back(LogEntry::Single(m));
}

fn push_entry(list: &mut VecDeque<LogEntry>, e: LogEntry) {
    match e {
        LogEntry::Single(m) => push_midpoint(list, m),
        LogEntry::Run { m1, d, h } => {
            if let Some(LogEntry::Run { m1: a, d: da, h: ha }) = list.back_mut() {
                if *da == d && *a + *ha * *da == m1 {
                    *ha += h;
                    return;
                }
            }
            list.push_back(e);
        }
    }
}

/// Removes the head midpoint of a list.
fn pop_head(list: &mut VecDeque<LogEntry>) {
    match list.pop_front() {
        Some(LogEntry::Run { m1, d, h }) if h > 3 => list.push_front(LogEntry::Run { m1: m1 + d, d, h: h - 1 }),
        Some(LogEntry::Run { m1, d, .. }) => {
            list.push_front(LogEntry::Single(m1 + 2 * d));
            list.push_front(LogEntry::Single(m1 + d));
        }
        _ => {}
    }
}

/// Shape statistics of the lists.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ListStats {
    pub max_singles: usize,
    pub max_runs: usize,
    /// Iterations at which some list held more than two singles or more
    /// than one run.
    pub violations: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogResult {
    pub midpoint: Option<u64>,
    pub est: u64,
    pub n: u64,
    /// Most `(checkpoint, level)` pairs alive at once.
    pub max_checkpoints: usize,
    pub lists: ListStats,
    pub space: SpaceReport,
}

#[derive(Clone, Debug)]
pub struct ApproxLog {
    params: LogParams,
    comp: Option<ComplementMap>,
    ctx: FpContext,
    i: u64,
    masters: MasterPair,
    /// Ascending by index.
    ckpts: Vec<Checkpoint>,
    levels: Vec<Level>,
    next_k: u32,
    best: Option<u64>,
    best_est: u64,
    max_pairs: usize,
    live_pairs: usize,
    stats: ListStats,
    meter: Meter,
    list_regs: i64,
}

impl ApproxLog {
    pub fn new(eps: f64, ctx: FpContext, complement: Option<ComplementMap>) -> Result<Self> {
        Self::with_meter(eps, ctx, complement, Meter::new())
    }

    pub fn with_meter(eps: f64, ctx: FpContext, complement: Option<ComplementMap>, mut meter: Meter) -> Result<Self> {
        let params = LogParams::new(eps)?;
        let origin = Checkpoint { c: 0, fwd: 0, rev: 0, rpow: 1, levels: 0, permanent: true, list: VecDeque::new() };
        meter.account(Category::Checkpoints, REG_LOG_CHECKPOINT);
        meter.account(Category::Scalars, 3 + 2);
        Ok(ApproxLog {
            params,
            comp: complement,
            ctx,
            i: 0,
            masters: MasterPair::new(),
            ckpts: vec![origin],
            levels: Vec::new(),
            next_k: params.k0,
            best: None,
            best_est: 0,
            max_pairs: 0,
            live_pairs: 0,
            stats: ListStats::default(),
            meter,
            list_regs: 0,
        })
    }

    pub fn params(&self) -> LogParams {
        self.params
    }

    /// Live `(checkpoint, level)` pairs.
    pub fn live_checkpoints(&self) -> usize {
        self.live_pairs
    }

    pub fn best(&self) -> (Option<u64>, u64) {
        (self.best, self.best_est)
    }

    /// `(spacing, horizon, live indices)` per level, for inspection.
    pub fn level_snapshot(&self) -> Vec<(u64, f64, Vec<u64>)> {
        self.levels.iter().map(|l| (l.spacing, l.horizon, l.live.iter().copied().collect())).collect()
    }

    pub fn iteration(&self) -> u64 {
        self.i
    }

    /// `(checkpoint index, list)` for every live checkpoint, ascending.
    pub fn lists(&self) -> Vec<(u64, Vec<LogEntry>)> {
        self.ckpts.iter().map(|c| (c.c, c.list.iter().copied().collect())).collect()
    }

    /// One line per live checkpoint.
    pub fn dump_state(&self) -> String {
        let mut out = String::new();
        for ck in &self.ckpts {
            let items: Vec<String> = ck
                .list
                .iter()
                .map(|e| match e {
                    LogEntry::Single(m) => m.to_string(),
                    LogEntry::Run { m1, d, h } => format!("{m1}+{d}x{h}"),
                })
                .collect();
            out.push_str(&format!("i={} c={} levels={} list=[{}]\n", self.i, ck.c, ck.levels, items.join(" ")));
        }
        out
    }

    fn add_levels(&mut self) {
        loop {
            let sp = self.params.spacing(self.next_k);
            if sp > self.i {
                break;
            }
            if sp > 0 {
                self.levels.push(Level { spacing: sp, horizon: self.params.horizon(self.next_k), live: VecDeque::new() });
            }
            self.next_k += 1;
        }
    }

    fn sync_list_meter(&mut self) {
        let regs: i64 = self.ckpts.iter().map(Checkpoint::list_registers).sum();
        self.meter.account(Category::Entries, regs - self.list_regs);
        self.list_regs = regs;
    }

    pub fn step(&mut self, sym: Symbol) -> Result<()> {
        let f = match &self.comp {
            Some(c) => c.map(sym)?,
            None => sym,
        };
        self.masters.extend_pair(f, sym, &self.ctx)?;
        self.i += 1;
        let i = self.i;
        self.add_levels();
        self.place_checkpoints();
        self.expire();
        self.check_all();
        self.max_pairs = self.max_pairs.max(self.live_pairs);
        self.record_list_stats();
        self.sync_list_meter();
        self.meter.tick(i);
        Ok(())
    }

    fn place_checkpoints(&mut self) {
        let i = self.i;
        for lv in 0..self.levels.len() {
            if !i.is_multiple_of(self.levels[lv].spacing) {
                continue;
            }
            self.levels[lv].live.push_back(i);
            self.live_pairs += 1;
            self.meter.account(Category::Checkpoints, 1);
            if self.ckpts.last().map(|c| c.c) != Some(i) {
                self.ckpts.push(Checkpoint {
                    c: i,
                    fwd: self.masters.fwd.value,
                    rev: self.masters.rev.value,
                    rpow: self.masters.r_pow(),
                    levels: 0,
                    permanent: false,
                    list: VecDeque::new(),
                });
                self.meter.account(Category::Checkpoints, REG_LOG_CHECKPOINT);
            }
            self.ckpts.last_mut().expect("just pushed").levels += 1;
        }
    }

    fn expire(&mut self) {
        let i = self.i;
        for lv in 0..self.levels.len() {
            loop {
                let Some(&c) = self.levels[lv].live.front() else { break };
                if ((i - c) as f64) <= self.levels[lv].horizon + FLOAT_SLACK {
                    break;
                }
                self.levels[lv].live.pop_front();
                self.live_pairs -= 1;
                self.meter.account(Category::Checkpoints, -1);
                let k = self.ckpts.partition_point(|x| x.c < c);
                let ck = &mut self.ckpts[k];
                ck.levels -= 1;
                if ck.levels == 0 && !ck.permanent {
                    let gone = self.ckpts.remove(k);
                    self.meter.account(Category::Checkpoints, -REG_LOG_CHECKPOINT);
                    if let Some(succ) = self.ckpts.get_mut(k) {
                        let mut merged = gone.list;
                        for e in succ.list.drain(..) {
                            push_entry(&mut merged, e);
                        }
                        succ.list = merged;
                    }
                }
            }
        }
    }

    /// Is `S[c+1, i]` a palindrome: `F^F(c+1, i) = F^R(c+1, i)` rescaled by `r^c`.
    fn is_palindrome_since(&self, k: usize) -> bool {
        let ctx = &self.ctx;
        let ck = &self.ckpts[k];
        let lhs = ctx.sub(self.masters.fwd.value, ck.fwd);
        let rhs = ctx.sub(ctx.mul(ck.rpow, self.masters.rev.value), ctx.mul(self.masters.r_pow(), ck.rev));
        lhs == rhs
    }

    fn check_all(&mut self) {
        let i = self.i;
        for k in 0..self.ckpts.len() {
            let c = self.ckpts[k].c;
            if c >= i || !(i - c).is_multiple_of(2) {
                continue;
            }
            let m = (i + c) / 2;
            let ok = self.is_palindrome_since(k);
            if let Some(succ) = self.ckpts.get_mut(k + 1) {
                while let Some(head) = succ.list.front().map(LogEntry::first) {
                    if 2 * head < i + c {
                        pop_head(&mut succ.list);
                    } else {
                        if head == m {
                            pop_head(&mut succ.list);
                        }
                        break;
                    }
                }
            }
            if ok {
                push_midpoint(&mut self.ckpts[k].list, m);
                if m - c > self.best_est {
                    self.best_est = m - c;
                    self.best = Some(m);
                }
            }
        }
    }

    fn record_list_stats(&mut self) {
        let mut bad = false;
        for ck in &self.ckpts {
            let runs = ck.list.iter().filter(|e| matches!(e, LogEntry::Run { .. })).count();
            let singles = ck.list.len() - runs;
            self.stats.max_singles = self.stats.max_singles.max(singles);
            self.stats.max_runs = self.stats.max_runs.max(runs);
            bad |= singles > 2 || runs > 1;
        }
        if bad {
            self.stats.violations += 1;
        }
    }

    pub fn finish(self) -> LogResult {
        LogResult {
            midpoint: self.best,
            est: self.best_est,
            n: self.i,
            max_checkpoints: self.max_pairs,
            lists: self.stats,
            space: self.meter.report(),
        }
    }
}

pub fn run(src: &SymbolSource, eps: f64, ctx: FpContext, complement: Option<ComplementMap>) -> Result<LogResult> {
    run_with_meter(src, eps, ctx, complement, Meter::new())
}

pub fn run_with_meter(
    src: &SymbolSource,
    eps: f64,
    ctx: FpContext,
    complement: Option<ComplementMap>,
    meter: Meter,
) -> Result<LogResult> {
    let mut st = ApproxLog::with_meter(eps, ctx, complement, meter)?;
    for sym in src.symbols()? {
        st.step(sym?)?;
    }
    Ok(st.finish())
}

pub fn run_symbols(s: &[Symbol], eps: f64, ctx: FpContext) -> Result<LogResult> {
    run(&SymbolSource::from_symbols(s.to_vec()), eps, ctx, None)
}
