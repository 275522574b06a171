//! Streaming palindrome detection in sublinear space.
//!
//! Three streaming algorithms share one fingerprint layer:
//!
//! - [`approx_sqrt`]: one pass, `O(sqrt(n)/eps)` registers, reports every
//!   midpoint with an arm estimate within an additive `eps * sqrt(n)`.
//! - [`exact`]: two passes, `O(sqrt(n))` registers, exact length and all
//!   midpoints of the longest palindromes.
//! - [`approx_log`]: one pass, `O(log n / (eps log(1+eps)))` registers, one
//!   palindrome whose length is within a factor `1 + eps` of the longest.
//!
//! Coordinates are 1-based. A midpoint `m` is the last character of the left
//! arm; an even palindrome with arm `l` occupies `S[m-l+1, m+l]`. Odd
//! palindromes are handled by running on the doubled stream (see
//! [`stream`]).

pub mod approx_log;
pub mod approx_sqrt;
pub mod error;
pub mod exact;
pub mod fingerprint;
pub mod gen;
pub mod meter;
pub mod oracle;
pub mod runs;
pub mod stream;

pub use error::{Error, Result};

/// A stream symbol. Always positive; byte `b` is encoded as `b + 1`.
pub type Symbol = u32;

/// `floor(sqrt(n))` computed exactly.
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u64;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}
