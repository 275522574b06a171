//! Exact in-memory ground truth for palindrome arm lengths.
//!
//! Linear space on purpose: everything here is a reference for checking the
//! streaming algorithms, never a streaming algorithm itself.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Symbol;

/// Even-parity arm lengths for every midpoint `m = 1..n-1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArmProfile {
    pub n: usize,
    /// `arms[m - 1]` is the arm length at midpoint `m`.
    pub arms: Vec<usize>,
}

impl ArmProfile {
    /// Arm at 1-based midpoint `m`; zero outside `1..n-1`.
    pub fn arm(&self, m: usize) -> usize {
        if m == 0 || m >= self.n {
            0
        } else {
            self.arms[m - 1]
        }
    }

    pub fn max_arm(&self) -> usize {
        self.arms.iter().copied().max().unwrap_or(0)
    }

    /// `(midpoint, arm)` pairs in ascending midpoint order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.arms.iter().enumerate().map(|(k, &a)| (k + 1, a))
    }
}

/// Manacher's algorithm restricted to even centres, generalised to a symbol
/// relation `matches(left, right)`. The relation must be symmetric under an
/// involution (plain equality or a complement map) for the mirror step to be
/// valid.
pub fn all_arms_by<F>(s: &[Symbol], matches: F) -> ArmProfile
where
    F: Fn(Symbol, Symbol) -> bool,
{
    let n = s.len();
    // d2[i]: arm of the centre between s[i-1] and s[i] (0-based).
    let mut d2 = vec![0usize; n];
    let (mut l, mut r) = (0usize, 0usize);
    let mut have_box = false;
    for i in 0..n {
        let mut k = if have_box && i <= r { d2[l + r - i + 1].min(r - i + 1) } else { 0 };
        while i + k < n && i > k && matches(s[i - k - 1], s[i + k]) {
            k += 1;
        }
        d2[i] = k;
        if k > 0 && (!have_box || i + k - 1 > r) {
            l = i - k;
            r = i + k - 1;
            have_box = true;
        }
    }
    ArmProfile { n, arms: if n > 1 { d2[1..].to_vec() } else { Vec::new() } }
}

/// Exact even-parity arm profile in `O(n)`.
pub fn all_arms(s: &[Symbol]) -> ArmProfile {
    all_arms_by(s, |a, b| a == b)
}

/// Quadratic verifier: direct expansion around midpoint `m`.
pub fn naive_arm(s: &[Symbol], m: usize) -> Result<usize> {
    naive_arm_by(s, m, |a, b| a == b)
}

pub fn naive_arm_by<F>(s: &[Symbol], m: usize, matches: F) -> Result<usize>
where
    F: Fn(Symbol, Symbol) -> bool,
{
    let n = s.len();
    if m == 0 || m >= n {
        return Err(Error::IndexOrder(format!("midpoint {m} outside [1, {}]", n.saturating_sub(1))));
    }
    let mut k = 0;
    // 1-based S[m-k] is s[m-k-1]; S[m+k+1] is s[m+k].
    while k < m && m + k < n && matches(s[m - k - 1], s[m + k]) {
        k += 1;
    }
    Ok(k)
}

/// Largest arm and every midpoint achieving it, ascending.
pub fn longest_set(s: &[Symbol]) -> (usize, Vec<usize>) {
    let prof = all_arms(s);
    let lmax = prof.max_arm();
    let mids = prof.iter().filter(|&(_, a)| a == lmax).map(|(m, _)| m).collect();
    (lmax, mids)
}

/// Odd palindromes by direct expansion: for every 1-based centre `c`, the
/// full length `2a + 1` where `a` is the largest radius with
/// `S[c-i] = S[c+i]` for all `i <= a`.
pub fn naive_odd_lengths(s: &[Symbol]) -> Vec<(usize, usize)> {
    naive_odd_lengths_by(s, |a, b| a == b)
}

pub fn naive_odd_lengths_by<F>(s: &[Symbol], matches: F) -> Vec<(usize, usize)>
where
    F: Fn(Symbol, Symbol) -> bool,
{
    let n = s.len();
    (0..n)
        .map(|c| {
            let mut a = 0;
            while a < c && c + a + 1 < n && matches(s[c - a - 1], s[c + a + 1]) {
                a += 1;
            }
            (c + 1, 2 * a + 1)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn syms(s: &str) -> Vec<Symbol> {
        s.bytes().map(|b| b as Symbol + 1).collect()
    }

    #[test]
    fn small_profiles() {
        assert_eq!(all_arms(&syms("abba")).arms, vec![0, 2, 0]);
        assert_eq!(all_arms(&syms("aaaaaa")).arms, vec![1, 2, 3, 2, 1]);
        assert_eq!(all_arms(&syms("ab")).arms, vec![0]);
        assert!(all_arms(&syms("a")).arms.is_empty());
    }

    #[test]
    fn naive_expansion() {
        let s = syms("abba");
        assert_eq!(naive_arm(&s, 2).unwrap(), 2);
        assert_eq!(naive_arm(&s, 1).unwrap(), 0);
        assert!(naive_arm(&s, 4).is_err());
        assert!(naive_arm(&s, 0).is_err());
    }

    #[test]
    fn longest_sets() {
        assert_eq!(longest_set(&syms("abba")), (2, vec![2]));
        assert_eq!(longest_set(&syms("aaaaaa")), (3, vec![3]));
        // "abab": no two equal neighbours.
        assert_eq!(longest_set(&syms("abab")), (0, vec![1, 2, 3]));
    }

    #[test]
    fn exhaustive_binary_agrees_with_naive() {
        for n in 1..=10usize {
            for mask in 0u32..(1 << n) {
                let s: Vec<Symbol> = (0..n).map(|k| 1 + ((mask >> k) & 1)).collect();
                let prof = all_arms(&s);
                for m in 1..n {
                    let a = naive_arm(&s, m).unwrap();
                    assert_eq!(prof.arm(m), a, "s={s:?} m={m}");
                    assert!(a <= m.min(n - m));
                }
            }
        }
    }

    #[test]
    fn odd_lengths() {
        let s = syms("racecar");
        let odd = naive_odd_lengths(&s);
        assert_eq!(odd[3], (4, 7));
        assert_eq!(odd[0], (1, 1));
    }

    #[test]
    fn complement_relation() {
        // A<->T, C<->G: "ACGT" is its own reverse complement.
        let comp = |x: Symbol| match (x - 1) as u8 {
            b'A' => b'T' as Symbol + 1,
            b'T' => b'A' as Symbol + 1,
            b'C' => b'G' as Symbol + 1,
            _ => b'C' as Symbol + 1,
        };
        let s = syms("ACGT");
        let prof = all_arms_by(&s, |l, r| l == comp(r));
        assert_eq!(prof.arm(2), 2);
        for m in 1..4 {
            assert_eq!(prof.arm(m), naive_arm_by(&s, m, |l, r| l == comp(r)).unwrap());
        }
    }
}
