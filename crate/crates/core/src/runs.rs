//! Compressed storage for runs of long palindromes.
//!
//! Midpoints `m_1 < m_2 < ... < m_h` with a common gap `d` and `w = S[m_1+1, m_2]`
//! satisfy `S[m_1+1, m_h] = w w^R w w^R ...`. An open run keeps the first
//! midpoint explicitly plus the fingerprints of `w`; everything else is
//! recovered by concatenation.
//!
//! In complement mode the forward fingerprints are taken over `f(S)` and the
//! reverse ones over `S`. The block after `w` is then `f(w)^R`, whose
//! forward and reverse fingerprints are the reverse and forward
//! fingerprints of `w` respectively, so decompression is the same in both
//! modes: odd blocks contribute `(fwdw, revw)`, even blocks `(revw, fwdw)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fingerprint::{
    concat_forward, concat_reverse, split_right, split_right_reverse, Fp, FpContext,
};
use crate::Symbol;

/// One explicitly stored palindrome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RsEntry {
    pub m: u64,
    pub est: u64,
    /// `F^F(1, m)`.
    pub fwd: Fp,
    /// `F^R(1, m)`.
    pub rev: Fp,
}

/// An open run: `h >= 3` equally spaced midpoints.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RnfEntry {
    pub m1: u64,
    pub d: u64,
    pub h: u64,
    pub est1: u64,
    pub fwd1: Fp,
    pub rev1: Fp,
    /// Forward fingerprint of `S[m1+1, m1+d]`.
    pub fwdw: Fp,
    /// Reverse fingerprint of `S[m1+1, m1+d]`.
    pub revw: Fp,
}

/// A closed run with estimates for its middle and last midpoints.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RfEntry {
    pub run: RnfEntry,
    pub est_mid_floor: u64,
    pub est_mid_ceil: u64,
    pub est_last: u64,
}

/// Position `j` (1-based) of the two central midpoints of a run of `h`.
pub fn middle_indices(h: u64) -> (u64, u64) {
    (h.div_ceil(2), (2 + h) / 2)
}

impl RnfEntry {
    pub fn last(&self) -> u64 {
        self.m1 + (self.h - 1) * self.d
    }

    /// Next midpoint that would extend the run.
    pub fn next(&self) -> u64 {
        self.m1 + self.h * self.d
    }

    pub fn midpoints(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.h).map(move |k| self.m1 + k * self.d)
    }
}

/// Extends the run when `m` is its next midpoint.
pub fn try_append(run: &mut RnfEntry, m: u64) -> bool {
    if m == run.next() {
        run.h += 1;
        true
    } else {
        false
    }
}

/// Builds a run from its first two explicit entries and the third midpoint.
pub fn form_run_from(e1: &RsEntry, e2: &RsEntry, m3: u64, ctx: &FpContext) -> Result<RnfEntry> {
    if e2.m <= e1.m || m3 <= e2.m || m3 - e2.m != e2.m - e1.m {
        return Err(Error::Structure(format!(
            "midpoints {}, {}, {} are not equally spaced",
            e1.m, e2.m, m3
        )));
    }
    Ok(RnfEntry {
        m1: e1.m,
        d: e2.m - e1.m,
        h: 3,
        est1: e1.est,
        fwd1: e1.fwd,
        rev1: e1.rev,
        fwdw: split_right(e2.fwd, e1.fwd, ctx)?,
        revw: split_right_reverse(e2.rev, e1.rev, ctx)?,
    })
}

pub fn form_run(e1: &RsEntry, e2: &RsEntry, e3: &RsEntry, ctx: &FpContext) -> Result<RnfEntry> {
    form_run_from(e1, e2, e3.m, ctx)
}

pub fn finalize_run(run: RnfEntry, est_mid_floor: u64, est_mid_ceil: u64, est_last: u64) -> RfEntry {
    RfEntry { run, est_mid_floor, est_mid_ceil, est_last }
}

fn check_index(h: u64, j: u64) -> Result<()> {
    if j == 0 || j > h {
        return Err(Error::IndexOrder(format!("run index {j} outside [1, {h}]")));
    }
    Ok(())
}

/// `m_j = m_1 + (j - 1) d`.
pub fn midpoint_at(run: &RnfEntry, j: u64) -> Result<u64> {
    check_index(run.h, j)?;
    Ok(run.m1 + (j - 1) * run.d)
}

/// Estimate for the `j`-th midpoint of a closed run. The central indices
/// return their stored values; the rest grow by `d` per step away from the
/// nearer end.
pub fn estimate_at(rf: &RfEntry, j: u64) -> Result<u64> {
    let RnfEntry { h, d, est1, .. } = rf.run;
    check_index(h, j)?;
    let (lo, hi) = middle_indices(h);
    Ok(if j == lo {
        rf.est_mid_floor
    } else if j == hi {
        rf.est_mid_ceil
    } else if 2 * j < h + 1 {
        est1 + (j - 1) * d
    } else {
        rf.est_last + (h - j) * d
    })
}

/// Estimate for an open run; defined only in its first half.
pub fn estimate_open(run: &RnfEntry, j: u64) -> Result<u64> {
    check_index(run.h, j)?;
    if 2 * j > run.h {
        return Err(Error::Structure(format!("estimate for index {j} of an open run of {} is unknown", run.h)));
    }
    Ok(run.est1 + (j - 1) * run.d)
}

/// `(F^F(1, m_j), F^R(1, m_j))` by alternating concatenation.
pub fn prefix_at(run: &RnfEntry, j: u64, ctx: &FpContext) -> Result<(Fp, Fp)> {
    check_index(run.h, j)?;
    let (mut fwd, mut rev) = (run.fwd1, run.rev1);
    for block in 1..j {
        let (bf, br) = if block % 2 == 1 { (run.fwdw, run.revw) } else { (run.revw, run.fwdw) };
        fwd = concat_forward(fwd, bf, ctx);
        rev = concat_reverse(rev, br, ctx);
    }
    Ok((fwd, rev))
}

/// Expands a closed run into explicit entries.
pub fn decompress(rf: &RfEntry, ctx: &FpContext) -> Vec<RsEntry> {
    let run = &rf.run;
    let (mut fwd, mut rev) = (run.fwd1, run.rev1);
    let mut out = Vec::with_capacity(run.h as usize);
    for j in 1..=run.h {
        if j > 1 {
            let (bf, br) = if j % 2 == 0 { (run.fwdw, run.revw) } else { (run.revw, run.fwdw) };
            fwd = concat_forward(fwd, bf, ctx);
            rev = concat_reverse(rev, br, ctx);
        }
        out.push(RsEntry {
            m: run.m1 + (j - 1) * run.d,
            est: estimate_at(rf, j).expect("index in range"),
            fwd,
            rev,
        });
    }
    out
}

/// The one or two central midpoints.
pub fn middle_midpoints(run: &RnfEntry) -> (u64, u64) {
    let (lo, hi) = middle_indices(run.h);
    (run.m1 + (lo - 1) * run.d, run.m1 + (hi - 1) * run.d)
}

/// Checks on the raw text that the run's midpoints are equally spaced long
/// palindromes and `S[m1+1, m_h]` follows the `w w^R` pattern.
pub fn run_structure_check(s: &[Symbol], run: &RnfEntry, lstar: u64) -> bool {
    run_structure_check_by(s, run, lstar, |x| x)
}

/// As [`run_structure_check`] under a complement map `f`: blocks alternate
/// between `w` and `f(w)^R`.
pub fn run_structure_check_by<F>(s: &[Symbol], run: &RnfEntry, lstar: u64, f: F) -> bool
where
    F: Fn(Symbol) -> Symbol,
{
    let n = s.len() as u64;
    if run.h < 3 || run.d == 0 || run.last() > n || 2 * run.d > lstar.max(1) {
        return false;
    }
    let d = run.d as usize;
    let base = run.m1 as usize;
    let w = &s[base..base + d];
    for block in 0..(run.h - 1) as usize {
        let start = base + block * d;
        let seg = &s[start..start + d];
        let ok = if block % 2 == 0 {
            seg == w
        } else {
            seg.iter().zip(w.iter().rev()).all(|(&a, &b)| a == f(b))
        };
        if !ok {
            return false;
        }
    }
    run.midpoints().all(|m| {
        let m = m as usize;
        (1..=lstar as usize).all(|k| k <= m && m + k <= s.len() && s[m - k] == f(s[m + k - 1]))
    })
}

impl fmt::Display for RsEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RS m={} est={}", self.m, self.est)
    }
}

impl fmt::Display for RnfEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RNF m1={} d={} h={} est1={}", self.m1, self.d, self.h, self.est1)
    }
}

impl fmt::Display for RfEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = &self.run;
        write!(
            f,
            "RF m1={} d={} h={} est1={} mid=({}, {}) last={}",
            r.m1, r.d, r.h, r.est1, self.est_mid_floor, self.est_mid_ceil, self.est_last
        )
    }
}
