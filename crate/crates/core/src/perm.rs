//! Permutations as point sets in `[n] x [n]`, their records and patterns.
//!
//! All positions and values are 1-based, matching the usual one-line
//! notation: `Permutation::parse("2413")` has `value(1) == 2`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A bijection of `[n]`, stored as its one-line value sequence.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Permutation {
    values: Vec<u32>,
}

impl Permutation {
    /// Validates that `values` is a bijection of `1..=n` with `n >= 1`.
    pub fn new(values: Vec<u32>) -> Result<Self> {
        let n = values.len();
        if n == 0 {
            return Err(Error::InvalidPermutation("empty sequence".into()));
        }
        let mut seen = vec![false; n + 1];
        for &v in &values {
            let v = v as usize;
            if v == 0 || v > n {
                return Err(Error::InvalidPermutation(format!(
                    "value {v} outside 1..={n}"
                )));
            }
            if seen[v] {
                return Err(Error::InvalidPermutation(format!("value {v} repeated")));
            }
            seen[v] = true;
        }
        Ok(Self { values })
    }

    pub(crate) fn from_values_unchecked(values: Vec<u32>) -> Self {
        debug_assert!(Self::new(values.clone()).is_ok());
        Self { values }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_values_unchecked((1..=n as u32).collect())
    }

    /// The decreasing permutation `n ... 2 1`.
    pub fn decreasing(n: usize) -> Self {
        Self::from_values_unchecked((1..=n as u32).rev().collect())
    }

    /// Parses either whitespace/comma separated values (`"2 4 1 3"`) or,
    /// when every value is a single digit, the compact form (`"2413"`).
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let s = s.trim_start_matches('[').trim_end_matches(']');
        let tokens: Vec<&str> = s
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .collect();
        let values: Vec<u32> = if tokens.len() == 1 && tokens[0].len() > 1 {
            tokens[0]
                .chars()
                .map(|c| {
                    c.to_digit(10)
                        .ok_or_else(|| Error::Parse(format!("bad digit {c:?}")))
                })
                .collect::<Result<_>>()?
        } else {
            tokens
                .iter()
                .map(|t| {
                    t.parse::<u32>()
                        .map_err(|e| Error::Parse(format!("{t:?}: {e}")))
                })
                .collect::<Result<_>>()?
        };
        Self::new(values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; permutations have size at least one.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `σ(i)` for a 1-based position `i`.
    #[inline]
    pub fn value(&self, i: usize) -> usize {
        self.values[i - 1] as usize
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn into_values(self) -> Vec<u32> {
        self.values
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u32; self.len()];
        for (i, &v) in self.values.iter().enumerate() {
            inv[v as usize - 1] = i as u32 + 1;
        }
        Self::from_values_unchecked(inv)
    }

    /// Position of value `v` (1-based), i.e. `σ⁻¹(v)`.
    pub fn position_of(&self, v: usize) -> usize {
        self.values
            .iter()
            .position(|&x| x as usize == v)
            .map(|p| p + 1)
            .unwrap_or(0)
    }

    /// Mirror image `x ↦ n+1-x`.
    pub fn reverse(&self) -> Self {
        let mut values = self.values.clone();
        values.reverse();
        Self::from_values_unchecked(values)
    }

    /// Mirror image `y ↦ n+1-y`.
    pub fn complement(&self) -> Self {
        let n = self.len() as u32 + 1;
        Self::from_values_unchecked(self.values.iter().map(|&v| n - v).collect())
    }

    pub fn is_increasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] < w[1])
    }

    pub fn is_decreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] > w[1])
    }

    pub fn is_monotone(&self) -> bool {
        self.is_increasing() || self.is_decreasing()
    }

    /// `pat_I(σ)` for a set of 1-based indices; duplicates are ignored and
    /// the indices are taken in increasing order.
    pub fn pattern_at(&self, indices: &[usize]) -> Result<Self> {
        let mut idx = indices.to_vec();
        idx.sort_unstable();
        idx.dedup();
        if idx.is_empty() {
            return Err(Error::InvalidArgument("empty index set".into()));
        }
        for &i in &idx {
            if i == 0 || i > self.len() {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    size: self.len(),
                });
            }
        }
        let vals: Vec<u32> = idx.iter().map(|&i| self.values[i - 1]).collect();
        Ok(standardize(&vals))
    }

    /// Consecutive pattern on the closed interval `[a, b]` (1-based).
    pub fn window(&self, a: usize, b: usize) -> Self {
        standardize(&self.values[a - 1..b])
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation({self})")
    }
}

impl fmt::Display for Permutation {
    /// One-line notation, values separated by single spaces.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.values.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl FromStr for Permutation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl TryFrom<Vec<u32>> for Permutation {
    type Error = Error;
    fn try_from(values: Vec<u32>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<Permutation> for Vec<u32> {
    fn from(p: Permutation) -> Self {
        p.values
    }
}

/// `std(x_1 ... x_k)`: the permutation in the same relative order as a
/// sequence of distinct keys.
pub fn standardize<T: Ord>(xs: &[T]) -> Permutation {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].cmp(&xs[b]));
    let mut values = vec![0u32; xs.len()];
    for (rank, &i) in order.iter().enumerate() {
        values[i] = rank as u32 + 1;
    }
    Permutation::from_values_unchecked(values)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RecordKind {
    LrMax,
    LrMin,
    RlMax,
    RlMin,
}

impl RecordKind {
    pub const ALL: [RecordKind; 4] = [
        RecordKind::LrMax,
        RecordKind::LrMin,
        RecordKind::RlMax,
        RecordKind::RlMin,
    ];

    fn bit(self) -> u8 {
        match self {
            RecordKind::LrMax => 1,
            RecordKind::LrMin => 2,
            RecordKind::RlMax => 4,
            RecordKind::RlMin => 8,
        }
    }
}

/// The four record sets of a permutation, one flag byte per position.
#[derive(Clone, PartialEq, Eq)]
pub struct RecordSets {
    flags: Vec<u8>,
}

impl RecordSets {
    pub fn len(&self) -> usize {
        self.flags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flags.is_empty()
    }

    #[inline]
    pub fn contains(&self, kind: RecordKind, i: usize) -> bool {
        self.flags[i - 1] & kind.bit() != 0
    }

    /// True when position `i` is a record of any kind.
    #[inline]
    pub fn is_record(&self, i: usize) -> bool {
        self.flags[i - 1] != 0
    }

    pub fn positions(&self, kind: RecordKind) -> Vec<usize> {
        (1..=self.len())
            .filter(|&i| self.contains(kind, i))
            .collect()
    }

    pub fn lrmax(&self) -> Vec<usize> {
        self.positions(RecordKind::LrMax)
    }
    pub fn lrmin(&self) -> Vec<usize> {
        self.positions(RecordKind::LrMin)
    }
    pub fn rlmax(&self) -> Vec<usize> {
        self.positions(RecordKind::RlMax)
    }
    pub fn rlmin(&self) -> Vec<usize> {
        self.positions(RecordKind::RlMin)
    }

    /// Positions that are not records of any kind.
    pub fn internal_points(&self) -> Vec<usize> {
        (1..=self.len()).filter(|&i| !self.is_record(i)).collect()
    }
}

impl fmt::Debug for RecordSets {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RecordSets")
            .field("lrmax", &self.lrmax())
            .field("lrmin", &self.lrmin())
            .field("rlmax", &self.rlmax())
            .field("rlmin", &self.rlmin())
            .finish()
    }
}

/// Left-to-right and right-to-left maxima and minima in two linear passes.
pub fn records(p: &Permutation) -> RecordSets {
    let v = p.values();
    let n = v.len();
    let mut flags = vec![0u8; n];
    let (mut hi, mut lo) = (0u32, u32::MAX);
    for (k, &x) in v.iter().enumerate() {
        if x > hi {
            hi = x;
            flags[k] |= RecordKind::LrMax.bit();
        }
        if x < lo {
            lo = x;
            flags[k] |= RecordKind::LrMin.bit();
        }
    }
    let (mut hi, mut lo) = (0u32, u32::MAX);
    for (k, &x) in v.iter().enumerate().rev() {
        if x > hi {
            hi = x;
            flags[k] |= RecordKind::RlMax.bit();
        }
        if x < lo {
            lo = x;
            flags[k] |= RecordKind::RlMin.bit();
        }
    }
    RecordSets { flags }
}

/// Every point is a record.
pub fn is_square(p: &Permutation) -> bool {
    let r = records(p);
    r.flags.iter().all(|&f| f != 0)
}
