use std::fmt;
use std::io::Write;

use palstream::meter::SpaceReport;
use serde::{Deserialize, Serialize};

use crate::args::Format;

/// One midpoint estimate. For odd parity `midpoint` is the centre character
/// and the arm fields bound the full length instead of the arm.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportLine {
    pub algo: String,
    pub midpoint: Option<u64>,
    pub arm_estimate: u64,
    pub arm_lower: u64,
    pub arm_upper_exclusive: u64,
    /// Known only when the arm is exact.
    pub full_length: Option<u64>,
    pub parity: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

impl ReportLine {
    const TSV_HEADER: &'static str =
        "algo\tmidpoint\tarm_estimate\tarm_lower\tarm_upper_exclusive\tfull_length\tparity\tflags";

    fn tsv(&self) -> String {
        let opt = |v: Option<u64>| v.map_or_else(String::new, |x| x.to_string());
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.algo,
            opt(self.midpoint),
            self.arm_estimate,
            self.arm_lower,
            self.arm_upper_exclusive,
            opt(self.full_length),
            self.parity,
            self.flags.join(",")
        )
    }
}

/// Result of `longest`: the longest full length and everywhere it occurs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LongestLine {
    pub algo: String,
    pub parity: String,
    /// Arm of the longest even palindrome; half the full length otherwise.
    pub arm: u64,
    pub full_length: u64,
    /// Even midpoints achieving the longest length.
    pub midpoints: Vec<u64>,
    /// Centres of odd palindromes achieving the longest length.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub odd_centers: Vec<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

impl LongestLine {
    const TSV_HEADER: &'static str = "algo\tparity\tarm\tfull_length\tmidpoints\todd_centers\tflags";

    fn tsv(&self) -> String {
        let list = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.algo,
            self.parity,
            self.arm,
            self.full_length,
            list(&self.midpoints),
            list(&self.odd_centers),
            self.flags.join(",")
        )
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input(String),
    Verify(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verify(_) | CliError::Internal(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Input(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Verify(m) => write!(f, "verification failed: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<palstream::Error> for CliError {
    fn from(e: palstream::Error) -> Self {
        use palstream::Error as E;
        match e {
            E::EpsOutOfRange { .. } | E::Config(_) | E::UnknownCategory(_) => CliError::Usage(e.to_string()),
            E::InvalidSymbol(_)
            | E::UnmappedSymbol(_)
            | E::StreamOverrun { .. }
            | E::IncompleteStream { .. }
            | E::NotReplayable
            | E::Io { .. } => CliError::Input(e.to_string()),
            E::IndexOrder(_) | E::LengthUnderflow { .. } | E::OutOfWindow { .. } | E::Structure(_) => {
                CliError::Internal(e.to_string())
            }
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Writes result lines in the selected format.
pub struct Sink<W: Write> {
    out: W,
    format: Format,
    header_done: bool,
}

impl<W: Write> Sink<W> {
    pub fn new(out: W, format: Format) -> Self {
        Sink { out, format, header_done: false }
    }

    fn header(&mut self, h: &str) -> std::io::Result<()> {
        if self.format == Format::Tsv && !self.header_done {
            writeln!(self.out, "{h}")?;
        }
        self.header_done = true;
        Ok(())
    }

    pub fn report(&mut self, line: &ReportLine) -> CliResult<()> {
        self.header(ReportLine::TSV_HEADER)?;
        match self.format {
            Format::Jsonl => writeln!(self.out, "{}", json(line)?)?,
            Format::Tsv => writeln!(self.out, "{}", line.tsv())?,
        }
        Ok(())
    }

    pub fn longest(&mut self, line: &LongestLine) -> CliResult<()> {
        self.header(LongestLine::TSV_HEADER)?;
        match self.format {
            Format::Jsonl => writeln!(self.out, "{}", json(line)?)?,
            Format::Tsv => writeln!(self.out, "{}", line.tsv())?,
        }
        Ok(())
    }

    /// JSONL gets a `{"meter": ...}` line; TSV a `# meter` comment.
    pub fn meter(&mut self, space: &SpaceReport) -> CliResult<()> {
        let body = json(space)?;
        match self.format {
            Format::Jsonl => writeln!(self.out, "{{\"meter\":{body}}}")?,
            Format::Tsv => writeln!(self.out, "# meter {body}")?,
        }
        Ok(())
    }

    pub fn finish(mut self) -> CliResult<()> {
        self.out.flush()?;
        Ok(())
    }
}

fn json<T: Serialize>(v: &T) -> CliResult<String> {
    serde_json::to_string(v).map_err(|e| CliError::Internal(e.to_string()))
}
