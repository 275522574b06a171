use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "palstream", version, about = "Streaming palindrome detection in sublinear space")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Estimate the arm of every midpoint in one pass, within eps*sqrt(n).
    Scan(ScanArgs),
    /// Exact longest palindrome and all of its midpoints, in two passes.
    Longest(LongestArgs),
    /// (1+eps)-approximate longest palindrome in one pass over an unbounded stream.
    ApproxLongest(ApproxLongestArgs),
    /// Exact arms of every midpoint, computed in memory.
    Oracle(OracleArgs),
    /// Write a generated stream as raw bytes.
    Gen(GenArgs),
    /// Time and meter the algorithms on generated streams or a corpus, as CSV.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Jsonl,
    Tsv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ParityArg {
    Even,
    Odd,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InputFormatArg {
    Raw,
    Fasta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Compressed,
    Simple,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Input file, or `-` for standard input.
    #[arg(default_value = "-")]
    pub input: String,
    #[arg(long, value_enum, default_value = "raw")]
    pub input_format: InputFormatArg,
    #[arg(long, value_enum, default_value = "even")]
    pub parity: ParityArg,
    /// Complementary palindromes: `dna` or a file of symbol pairs.
    #[arg(long)]
    pub complement: Option<String>,
    #[arg(long, value_enum, default_value = "jsonl")]
    pub format: Format,
    /// Fingerprint seed; falls back to PALSTREAM_SEED, then 0.
    #[arg(long, env = "PALSTREAM_SEED")]
    pub seed: Option<u64>,
}

#[derive(Args, Debug, Clone)]
pub struct Metering {
    /// Append a space report to the output.
    #[arg(long)]
    pub meter: bool,
    /// Sample the register count every K iterations.
    #[arg(long, value_name = "K", default_value_t = 0)]
    pub meter_stride: u64,
}

#[derive(Args, Debug, Clone)]
pub struct Verify {
    /// Re-check every output line against the in-memory oracle.
    #[arg(long)]
    pub verify: bool,
    /// Largest input, in symbols, that `--verify` will load into memory.
    #[arg(long, default_value_t = 1 << 22)]
    pub verify_limit: u64,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[command(flatten)]
    pub common: Common,
    /// Additive error as a fraction of sqrt(n); defaults to 0.5 or 1/sqrt(n), whichever is larger.
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, value_enum, default_value = "compressed")]
    pub mode: ModeArg,
    /// Drop lines whose estimate is below this arm.
    #[arg(long, default_value_t = 0)]
    pub min_arm: u64,
    /// Keep only midpoints whose arm may reach this length.
    #[arg(long)]
    pub threshold: Option<u64>,
    #[command(flatten)]
    pub metering: Metering,
    #[command(flatten)]
    pub verify: Verify,
    /// Print the candidate list to stderr every s iterations.
    #[arg(long)]
    pub dump_state: bool,
}

#[derive(Args, Debug)]
pub struct LongestArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub metering: Metering,
    #[command(flatten)]
    pub verify: Verify,
}

#[derive(Args, Debug)]
pub struct ApproxLongestArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 0.5)]
    pub eps: f64,
    #[command(flatten)]
    pub metering: Metering,
    #[command(flatten)]
    pub verify: Verify,
    /// Print the checkpoint lists to stderr every K iterations.
    #[arg(long, value_name = "K")]
    pub dump_state: Option<u64>,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 0)]
    pub min_arm: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Random,
    Unary,
    Run,
    LowerBound,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long, value_enum, default_value = "random")]
    pub kind: GenKind,
    /// Stream length (random, unary).
    #[arg(long, default_value_t = 1024)]
    pub n: usize,
    /// Alphabet size (random).
    #[arg(long, default_value_t = 4)]
    pub sigma: u32,
    #[arg(long, env = "PALSTREAM_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Run block, as a string (run).
    #[arg(long, default_value = "abc")]
    pub w: String,
    /// Number of midpoints in the run (run).
    #[arg(long, default_value_t = 8)]
    pub h: usize,
    /// Random padding on each side (run).
    #[arg(long, default_value_t = 16)]
    pub pad: usize,
    /// Payload pairs (lower-bound).
    #[arg(long, default_value_t = 3)]
    pub m: usize,
    /// Separator half-length (lower-bound).
    #[arg(long, default_value_t = 2)]
    pub e_r: usize,
    /// Break the mirror at this payload position (lower-bound).
    #[arg(long)]
    pub broken: Option<usize>,
    /// Output file; standard output by default.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Sqrt,
    Log,
    Exact,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Directory of raw input files; replaces the generator.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "random")]
    pub gen: GenKind,
    #[arg(long, value_delimiter = ',', default_value = "1024,2048,4096")]
    pub sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1,0.5")]
    pub eps: Vec<f64>,
    #[arg(long, default_value_t = 4)]
    pub sigma: u32,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "sqrt,log,exact")]
    pub algos: Vec<Algo>,
    #[arg(long, env = "PALSTREAM_SEED", default_value_t = 0)]
    pub seed: u64,
}
