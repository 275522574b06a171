use std::path::PathBuf;

use crate::Symbol;

/// Errors produced by the streaming palindrome algorithms and their plumbing.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid symbol {0}: symbols must be positive integers")]
    InvalidSymbol(u64),

    #[error("index order violated: {0}")]
    IndexOrder(String),

    #[error("length underflow: cannot remove {part} symbols from a fingerprint of length {whole}")]
    LengthUnderflow { whole: u64, part: u64 },

    #[error("index {index} is outside the retained range [{lo}, {hi}]")]
    OutOfWindow { index: u64, lo: u64, hi: u64 },

    #[error("epsilon {eps} outside the admissible range [{lo}, {hi}]")]
    EpsOutOfRange { eps: f64, lo: f64, hi: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("no complement defined for symbol {0}")]
    UnmappedSymbol(String),

    #[error("stream overrun: declared length {declared}, got more symbols")]
    StreamOverrun { declared: u64 },

    #[error("stream incomplete: declared length {declared}, consumed {consumed}")]
    IncompleteStream { declared: u64, consumed: u64 },

    #[error("source cannot be replayed; a second pass needs a file or in-memory input")]
    NotReplayable,

    #[error("structural error: {0}")]
    Structure(String),

    #[error("unknown meter category `{0}`")]
    UnknownCategory(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn unmapped(sym: Symbol) -> Self {
        let shown = if (1..=256).contains(&sym) {
            let b = (sym - 1) as u8;
            if b.is_ascii_graphic() {
                format!("'{}'", b as char)
            } else {
                format!("byte 0x{b:02x}")
            }
        } else {
            sym.to_string()
        };
        Error::UnmappedSymbol(shown)
    }
}
