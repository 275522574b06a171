//! Word-model space accounting.
//!
//! Every stored index, length, symbol or fingerprint value costs one
//! register. Composite records are charged by the fixed rule below:
//!
//! | record                         | registers |
//! |--------------------------------|-----------|
//! | fingerprint / index / symbol   | 1         |
//! | explicit palindrome entry      | 4         |
//! | open run entry                 | 8         |
//! | finalized run entry            | 11        |
//! | checkpoint (additive scan)     | 2         |
//! | checkpoint (logarithmic scan)  | 3 + list  |
//!
//! The meter is intrusive: algorithms call [`Meter::account`] whenever they
//! allocate or free one of these records.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

pub const REG_RS: i64 = 4;
pub const REG_RNF: i64 = 8;
pub const REG_RF: i64 = 11;
pub const REG_SQRT_CHECKPOINT: i64 = 2;
pub const REG_LOG_CHECKPOINT: i64 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Window,
    Checkpoints,
    Pairs,
    Entries,
    UncertainBuffers,
    Scalars,
}

impl Category {
    pub const ALL: [Category; 6] = [
        Category::Window,
        Category::Checkpoints,
        Category::Pairs,
        Category::Entries,
        Category::UncertainBuffers,
        Category::Scalars,
    ];

    fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Category::Window => "window",
            Category::Checkpoints => "checkpoints",
            Category::Pairs => "pairs",
            Category::Entries => "entries",
            Category::UncertainBuffers => "uncertain_buffers",
            Category::Scalars => "scalars",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Category::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::UnknownCategory(s.to_string()))
    }
}

/// Peak register usage, per category and in total.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceReport {
    pub peak_registers: u64,
    pub window: u64,
    pub checkpoints: u64,
    pub pairs: u64,
    pub entries: u64,
    pub uncertain_buffers: u64,
    pub scalars: u64,
    /// `(iteration, total registers)` sampled every `stride` iterations.
    pub samples: Vec<(u64, u64)>,
}

impl SpaceReport {
    pub fn category_peak(&self, cat: Category) -> u64 {
        match cat {
            Category::Window => self.window,
            Category::Checkpoints => self.checkpoints,
            Category::Pairs => self.pairs,
            Category::Entries => self.entries,
            Category::UncertainBuffers => self.uncertain_buffers,
            Category::Scalars => self.scalars,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Meter {
    current: [i64; 6],
    peaks: [i64; 6],
    total: i64,
    peak_total: i64,
    stride: u64,
    samples: Vec<(u64, u64)>,
}

impl Meter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records a `(iteration, total)` sample every `stride` iterations; 0
    /// disables sampling.
    pub fn with_stride(stride: u64) -> Self {
        Meter { stride, ..Self::default() }
    }

    pub fn account(&mut self, cat: Category, delta: i64) {
        let k = cat.index();
        self.current[k] += delta;
        debug_assert!(self.current[k] >= 0, "negative register count in {cat}");
        self.total += delta;
        if self.current[k] > self.peaks[k] {
            self.peaks[k] = self.current[k];
        }
        if self.total > self.peak_total {
            self.peak_total = self.total;
        }
    }

    /// String-keyed variant used by external drivers.
    pub fn account_named(&mut self, cat: &str, delta: i64) -> Result<(), Error> {
        let cat = cat.parse()?;
        self.account(cat, delta);
        Ok(())
    }

    pub fn current(&self, cat: Category) -> u64 {
        self.current[cat.index()].max(0) as u64
    }

    pub fn total(&self) -> u64 {
        self.total.max(0) as u64
    }

    pub fn peak_total(&self) -> u64 {
        self.peak_total.max(0) as u64
    }

    /// Called once per stream iteration by the algorithms.
    pub fn tick(&mut self, iteration: u64) {
        if self.stride > 0 && iteration.is_multiple_of(self.stride) {
            self.samples.push((iteration, self.total()));
        }
    }

    pub fn report(&self) -> SpaceReport {
        let p = |c: Category| self.peaks[c.index()].max(0) as u64;
        SpaceReport {
            peak_registers: self.peak_total(),
            window: p(Category::Window),
            checkpoints: p(Category::Checkpoints),
            pairs: p(Category::Pairs),
            entries: p(Category::Entries),
            uncertain_buffers: p(Category::UncertainBuffers),
            scalars: p(Category::Scalars),
            samples: self.samples.clone(),
        }
    }
}
