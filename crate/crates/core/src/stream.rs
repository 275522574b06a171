//! Symbol sources, the sliding window, and the parity/complement transforms.
//!
//! Input bytes become symbols by `b + 1` so that every symbol is positive.
//! FASTA input skips `>` header lines, drops whitespace and upper-cases the
//! sequence.

use std::collections::VecDeque;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Symbol;

pub fn byte_symbol(b: u8) -> Symbol {
    b as Symbol + 1
}

/// Inverse of [`byte_symbol`] for symbols in `1..=256`.
pub fn symbol_byte(sym: Symbol) -> Option<u8> {
    (1..=256).contains(&sym).then(|| (sym - 1) as u8)
}

pub fn symbols_from_str(s: &str) -> Vec<Symbol> {
    s.bytes().map(byte_symbol).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    Raw,
    Fasta,
}

#[derive(Clone)]
enum Origin {
    Memory(Arc<Vec<Symbol>>),
    File { path: PathBuf, format: InputFormat },
    Reader(Arc<std::sync::Mutex<Option<Box<dyn Read + Send>>>>),
}

/// A stream of symbols with a known length (unless it is a one-shot reader).
#[derive(Clone, Debug)]
pub struct SymbolSource {
    origin: Origin,
    len: Option<u64>,
    doubled: bool,
    /// Keeps a spooled temporary file alive as long as the source.
    _spool: Option<Arc<tempfile::TempPath>>,
}

impl std::fmt::Debug for Origin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Origin::Memory(v) => write!(f, "Memory({} symbols)", v.len()),
            Origin::File { path, format } => write!(f, "File({}, {format:?})", path.display()),
            Origin::Reader(_) => f.write_str("Reader"),
        }
    }
}

impl SymbolSource {
    pub fn from_symbols(symbols: Vec<Symbol>) -> Self {
        let len = symbols.len() as u64;
        SymbolSource {
            origin: Origin::Memory(Arc::new(symbols)),
            len: Some(len),
            doubled: false,
            _spool: None,
        }
    }

    pub fn from_bytes(bytes: &[u8]) -> Self {
        Self::from_symbols(bytes.iter().copied().map(byte_symbol).collect())
    }

    /// Opens a file; the length is taken from metadata (raw) or from a
    /// counting pass (FASTA).
    pub fn open(path: impl AsRef<Path>, format: InputFormat) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let len = match format {
            InputFormat::Raw => std::fs::metadata(&path).map_err(|e| Error::io(&path, e))?.len(),
            InputFormat::Fasta => {
                let mut n = 0u64;
                for sym in FastaSymbols::new(open_buffered(&path)?, path.clone()) {
                    sym?;
                    n += 1;
                }
                n
            }
        };
        Ok(SymbolSource {
            origin: Origin::File { path, format },
            len: Some(len),
            doubled: false,
            _spool: None,
        })
    }

    /// Copies a one-shot reader into a temporary file so it can be measured
    /// and replayed.
    pub fn spool<R: Read>(mut reader: R, format: InputFormat) -> Result<Self> {
        let mut tmp = tempfile::NamedTempFile::new().map_err(|e| Error::io("<spool>", e))?;
        std::io::copy(&mut reader, &mut tmp).map_err(|e| Error::io("<spool>", e))?;
        tmp.flush().map_err(|e| Error::io("<spool>", e))?;
        let path = tmp.into_temp_path();
        let mut src = Self::open(&path, format)?;
        src._spool = Some(Arc::new(path));
        Ok(src)
    }

    /// Wraps a reader that can be consumed exactly once. Raw bytes only;
    /// length is unknown.
    pub fn one_shot<R: Read + Send + 'static>(reader: R) -> Self {
        SymbolSource {
            origin: Origin::Reader(Arc::new(std::sync::Mutex::new(Some(Box::new(reader))))),
            len: None,
            doubled: false,
            _spool: None,
        }
    }

    /// Stream length in symbols (after doubling, if applied).
    pub fn len(&self) -> Option<u64> {
        self.len.map(|n| if self.doubled { 2 * n } else { n })
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    pub fn replayable(&self) -> bool {
        !matches!(self.origin, Origin::Reader(_))
    }

    pub fn is_doubled(&self) -> bool {
        self.doubled
    }

    /// Starts a pass over the stream. A one-shot source fails on the second
    /// call.
    pub fn symbols(&self) -> Result<Box<dyn Iterator<Item = Result<Symbol>> + Send>> {
        let base: Box<dyn Iterator<Item = Result<Symbol>> + Send> = match &self.origin {
            Origin::Memory(v) => {
                let v = Arc::clone(v);
                Box::new((0..v.len()).map(move |k| Ok(v[k])))
            }
            Origin::File { path, format: InputFormat::Raw } => {
                Box::new(RawSymbols::new(open_buffered(path)?, path.clone()))
            }
            Origin::File { path, format: InputFormat::Fasta } => {
                Box::new(FastaSymbols::new(open_buffered(path)?, path.clone()))
            }
            Origin::Reader(slot) => {
                let reader = slot.lock().expect("reader lock").take().ok_or(Error::NotReplayable)?;
                Box::new(RawSymbols::new(BufReader::new(reader), PathBuf::from("<stdin>")))
            }
        };
        if self.doubled {
            Ok(Box::new(base.flat_map(|r| {
                let pair = match r {
                    Ok(s) => [Some(Ok(s)), Some(Ok(s))],
                    Err(e) => [Some(Err(e)), None],
                };
                pair.into_iter().flatten()
            })))
        } else {
            Ok(base)
        }
    }

    /// Reads the whole stream into memory (oracle and verification use).
    pub fn collect(&self) -> Result<Vec<Symbol>> {
        self.symbols()?.collect()
    }
}

fn open_buffered(path: &Path) -> Result<BufReader<File>> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(BufReader::with_capacity(1 << 16, f))
}

struct RawSymbols<R> {
    bytes: std::io::Bytes<R>,
    path: PathBuf,
}

impl<R: Read> RawSymbols<R> {
    fn new(r: R, path: PathBuf) -> Self {
        RawSymbols { bytes: r.bytes(), path }
    }
}

impl<R: Read> Iterator for RawSymbols<R> {
    type Item = Result<Symbol>;

    fn next(&mut self) -> Option<Self::Item> {
        self.bytes.next().map(|b| b.map(byte_symbol).map_err(|e| Error::io(&self.path, e)))
    }
}

struct FastaSymbols<R> {
    reader: R,
    path: PathBuf,
    line: Vec<u8>,
    pos: usize,
}

impl<R: BufRead> FastaSymbols<R> {
    fn new(reader: R, path: PathBuf) -> Self {
        FastaSymbols { reader, path, line: Vec::new(), pos: 0 }
    }
}

impl<R: BufRead> Iterator for FastaSymbols<R> {
    type Item = Result<Symbol>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            while self.pos < self.line.len() {
                let b = self.line[self.pos];
                self.pos += 1;
                if !b.is_ascii_whitespace() {
                    return Some(Ok(byte_symbol(b.to_ascii_uppercase())));
                }
            }
            self.line.clear();
            self.pos = 0;
            match self.reader.read_until(b'\n', &mut self.line) {
                Ok(0) => return None,
                Ok(_) => {
                    if self.line.first() == Some(&b'>') || self.line.first() == Some(&b';') {
                        self.line.clear();
                    }
                }
                Err(e) => return Some(Err(Error::io(&self.path, e))),
            }
        }
    }
}

/// `S[1]S[1]S[2]S[2]...S[n]S[n]`, generated lazily.
pub fn double_transform(src: &SymbolSource) -> SymbolSource {
    let mut out = src.clone();
    out.doubled = true;
    out
}

/// In-memory doubling, for tests and the oracle.
pub fn double_symbols(s: &[Symbol]) -> Vec<Symbol> {
    s.iter().flat_map(|&x| [x, x]).collect()
}

/// Maps an even-parity report on the doubled stream back to the original.
///
/// Odd doubled midpoints `2c - 1` sit between the two copies of character
/// `c` and describe odd palindromes of full length `arm`. Even doubled
/// midpoints `2c` sit between characters and describe even palindromes; they
/// are returned as `None` here (see [`demux_doubled_report`]).
pub fn map_doubled_report(midpoint_doubled: u64, arm_doubled: u64) -> Option<(u64, u64)> {
    (midpoint_doubled % 2 == 1).then(|| (midpoint_doubled.div_ceil(2), arm_doubled))
}

/// A doubled-stream report split by parity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Demuxed {
    /// Centre character index and full odd length.
    Odd { center: u64, full_len: u64 },
    /// Original even midpoint and arm length.
    Even { midpoint: u64, arm: u64 },
}

pub fn demux_doubled_report(midpoint_doubled: u64, arm_doubled: u64) -> Demuxed {
    match map_doubled_report(midpoint_doubled, arm_doubled) {
        Some((center, full_len)) => Demuxed::Odd { center, full_len },
        None => Demuxed::Even { midpoint: midpoint_doubled / 2, arm: arm_doubled / 2 },
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    #[default]
    Even,
    Odd,
    Both,
}

/// Involutive symbol map `f` for complementary palindromes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplementMap {
    table: Vec<Option<Symbol>>,
}

impl ComplementMap {
    /// Builds a map from symbol pairs; each pair is inserted in both
    /// directions and conflicts are rejected.
    pub fn from_pairs(pairs: &[(Symbol, Symbol)]) -> Result<Self> {
        let max = pairs.iter().flat_map(|&(a, b)| [a, b]).max().unwrap_or(0) as usize;
        let mut table = vec![None; max + 1];
        for &(a, b) in pairs {
            for (x, y) in [(a, b), (b, a)] {
                match table[x as usize] {
                    Some(prev) if prev != y => {
                        return Err(Error::Config(format!(
                            "complement map is not an involution: {} maps to both {} and {}",
                            show(x),
                            show(prev),
                            show(y)
                        )))
                    }
                    _ => table[x as usize] = Some(y),
                }
            }
        }
        let map = ComplementMap { table };
        map.validate()?;
        Ok(map)
    }

    /// DNA preset: A<->T, C<->G, in both upper and lower case.
    pub fn dna() -> Self {
        let pairs: Vec<(Symbol, Symbol)> = [(b'A', b'T'), (b'C', b'G'), (b'a', b't'), (b'c', b'g')]
            .iter()
            .map(|&(a, b)| (byte_symbol(a), byte_symbol(b)))
            .collect();
        Self::from_pairs(&pairs).expect("dna preset is an involution")
    }

    /// Two-column text: each non-empty, non-`#` line holds two single-byte
    /// symbols separated by whitespace.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split_whitespace().collect();
            match cols.as_slice() {
                [a, b] if a.len() == 1 && b.len() == 1 => {
                    pairs.push((byte_symbol(a.as_bytes()[0]), byte_symbol(b.as_bytes()[0])))
                }
                _ => {
                    return Err(Error::Config(format!(
                        "complement map line {}: expected two single-character columns",
                        k + 1
                    )))
                }
            }
        }
        Self::from_pairs(&pairs)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn get(&self, sym: Symbol) -> Option<Symbol> {
        self.table.get(sym as usize).copied().flatten()
    }

    pub fn map(&self, sym: Symbol) -> Result<Symbol> {
        self.get(sym).ok_or_else(|| Error::unmapped(sym))
    }

    fn validate(&self) -> Result<()> {
        for (x, y) in self.table.iter().enumerate() {
            if let Some(y) = *y {
                if self.get(y) != Some(x as Symbol) {
                    return Err(Error::Config(format!("complement of {} is not mapped back", show(y))));
                }
            }
        }
        Ok(())
    }

    pub fn domain(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.table.iter().enumerate().filter(|(_, y)| y.is_some()).map(|(x, _)| x as Symbol)
    }
}

fn show(sym: Symbol) -> String {
    match symbol_byte(sym) {
        Some(b) if b.is_ascii_graphic() => format!("'{}'", b as char),
        _ => sym.to_string(),
    }
}

/// Parity and complement settings applied to a stream.
#[derive(Clone, Debug, Default)]
pub struct TransformConfig {
    pub parity: Parity,
    pub complement: Option<ComplementMap>,
}

/// Symbol fed to forward fingerprints: `f(sym)` in complement mode.
pub fn apply_complement(sym: Symbol, cfg: &TransformConfig) -> Result<Symbol> {
    match &cfg.complement {
        Some(map) => map.map(sym),
        None => Ok(sym),
    }
}

/// Ring buffer holding the most recent `capacity` symbols with 1-based
/// absolute addressing.
#[derive(Clone, Debug)]
pub struct Window {
    buf: VecDeque<Symbol>,
    capacity: usize,
    /// Number of symbols pushed so far.
    pushed: u64,
}

impl Window {
    pub fn new(capacity: usize) -> Self {
        Window { buf: VecDeque::with_capacity(capacity), capacity, pushed: 0 }
    }

    /// Window sized `2 * floor(sqrt(n))`.
    pub fn for_stream(n: u64) -> Self {
        Self::new(2 * crate::isqrt(n) as usize)
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.buf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buf.is_empty()
    }

    /// Index of the newest symbol (0 before any push).
    pub fn end(&self) -> u64 {
        self.pushed
    }

    /// Index of the oldest retained symbol.
    pub fn abs_start(&self) -> u64 {
        self.pushed - self.buf.len() as u64 + 1
    }

    pub fn push(&mut self, sym: Symbol) -> Option<Symbol> {
        self.pushed += 1;
        if self.capacity == 0 {
            return Some(sym);
        }
        let evicted = if self.buf.len() == self.capacity { self.buf.pop_front() } else { None };
        self.buf.push_back(sym);
        evicted
    }

    /// `S[k]` if still retained.
    pub fn get(&self, k: u64) -> Result<Symbol> {
        if k == 0 || k > self.pushed || k < self.abs_start() {
            return Err(Error::OutOfWindow { index: k, lo: self.abs_start(), hi: self.pushed });
        }
        Ok(self.buf[(k - self.abs_start()) as usize])
    }

    pub fn contains(&self, k: u64) -> bool {
        k >= 1 && k <= self.pushed && k >= self.abs_start()
    }

    pub fn iter(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.buf.iter().copied()
    }
}

/// Pushes `sym`, returning the evicted symbol once the window is full.
pub fn window_push(w: &mut Window, sym: Symbol) -> Option<Symbol> {
    w.push(sym)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    #[test]
    fn doubling() {
        let src = SymbolSource::from_bytes(b"ab");
        let d = double_transform(&src);
        assert_eq!(d.collect().unwrap(), symbols_from_str("aabb"));
        assert_eq!(d.len(), Some(4));
        let one = double_transform(&SymbolSource::from_bytes(b"a"));
        let prof = oracle::all_arms(&one.collect().unwrap());
        assert_eq!(prof.arms, vec![1]);
    }

    #[test]
    fn racecar_maps_back() {
        let t = double_symbols(&symbols_from_str("racecar"));
        assert_eq!(t, symbols_from_str("rraacceeccaarr"));
        let prof = oracle::all_arms(&t);
        assert_eq!(prof.arm(7), 7);
        assert_eq!(map_doubled_report(7, 7), Some((4, 7)));
        assert_eq!(map_doubled_report(2, 2), None);
        assert_eq!(map_doubled_report(1, 1), Some((1, 1)));
        assert_eq!(demux_doubled_report(2, 2), Demuxed::Even { midpoint: 1, arm: 1 });
    }

    #[test]
    fn dna_complement() {
        let cfg = TransformConfig { parity: Parity::Even, complement: Some(ComplementMap::dna()) };
        let a = byte_symbol(b'A');
        assert_eq!(apply_complement(a, &cfg).unwrap(), byte_symbol(b'T'));
        let map = cfg.complement.as_ref().unwrap();
        for x in map.domain() {
            assert_eq!(map.map(map.map(x).unwrap()).unwrap(), x);
        }
        let err = apply_complement(byte_symbol(b'N'), &cfg).unwrap_err();
        assert!(err.to_string().contains("'N'"), "{err}");
    }

    #[test]
    fn custom_complement_file() {
        let map = ComplementMap::parse("# pairs\nx y\nz z\n").unwrap();
        assert_eq!(map.map(byte_symbol(b'y')).unwrap(), byte_symbol(b'x'));
        assert_eq!(map.map(byte_symbol(b'z')).unwrap(), byte_symbol(b'z'));
        assert!(ComplementMap::parse("x y\nx z\n").is_err());
        assert!(ComplementMap::parse("xy\n").is_err());
    }

    #[test]
    fn window_eviction_and_range() {
        let mut w = Window::new(4);
        let evicted: Vec<_> = (1..=5).map(|s| w.push(s)).collect();
        assert_eq!(evicted, vec![None, None, None, None, Some(1)]);
        assert_eq!(w.get(2).unwrap(), 2);
        assert_eq!(w.get(5).unwrap(), 5);
        assert!(matches!(w.get(1), Err(Error::OutOfWindow { .. })));
        assert!(w.get(6).is_err());
    }

    #[test]
    fn fasta_parsing_and_spool() {
        let text = b">chr1 test\nacgT\nNN\n>chr2\nGG\n";
        let src = SymbolSource::spool(&text[..], InputFormat::Fasta).unwrap();
        assert_eq!(src.len(), Some(8));
        assert_eq!(src.collect().unwrap(), symbols_from_str("ACGTNNGG"));
        // Spooled sources replay.
        assert_eq!(src.collect().unwrap().len(), 8);
        let raw = SymbolSource::spool(&b"abba"[..], InputFormat::Raw).unwrap();
        assert_eq!(raw.len(), Some(4));
        assert!(raw.replayable());
    }

    #[test]
    fn one_shot_reader_consumed_once() {
        let src = SymbolSource::one_shot(std::io::Cursor::new(b"abc".to_vec()));
        assert!(!src.replayable());
        assert_eq!(src.collect().unwrap().len(), 3);
        assert!(matches!(src.symbols(), Err(Error::NotReplayable)));
    }
}
