//! Label alphabets and the `ct` / `pos` tables of a label sequence.

use std::fmt;
use std::marker::PhantomData;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A two-letter alphabet. The primary letter (`D` or `L`) is the one forced
/// at both ends of a good sequence.
pub trait Label: Copy + Eq + fmt::Debug + Send + Sync + 'static {
    const PRIMARY: Self;
    const SECONDARY: Self;

    fn to_char(self) -> char;
    fn from_char(c: char) -> Option<Self>;

    fn is_primary(self) -> bool {
        self == Self::PRIMARY
    }

    fn from_primary(primary: bool) -> Self {
        if primary {
            Self::PRIMARY
        } else {
            Self::SECONDARY
        }
    }
}

/// Column labels: `U`p (a maximum) or `D`own (a minimum).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum XLabel {
    U,
    D,
}

/// Row labels: `L`eft or `R`ight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum YLabel {
    L,
    R,
}

impl Label for XLabel {
    const PRIMARY: Self = XLabel::D;
    const SECONDARY: Self = XLabel::U;

    fn to_char(self) -> char {
        match self {
            XLabel::U => 'U',
            XLabel::D => 'D',
        }
    }

    fn from_char(c: char) -> Option<Self> {
        match c {
            'U' => Some(XLabel::U),
            'D' => Some(XLabel::D),
            _ => None,
        }
    }
}

impl Label for YLabel {
    const PRIMARY: Self = YLabel::L;
    const SECONDARY: Self = YLabel::R;

    fn to_char(self) -> char {
        match self {
            YLabel::L => 'L',
            YLabel::R => 'R',
        }
    }

    fn from_char(c: char) -> Option<Self> {
        match c {
            'L' => Some(YLabel::L),
            'R' => Some(YLabel::R),
            _ => None,
        }
    }
}

pub fn parse_labels<L: Label>(s: &str) -> Result<Vec<L>> {
    s.trim()
        .chars()
        .map(|c| {
            L::from_char(c).ok_or_else(|| {
                Error::Parse(format!(
                    "unexpected label {c:?}, expected {} or {}",
                    L::PRIMARY.to_char(),
                    L::SECONDARY.to_char()
                ))
            })
        })
        .collect()
}

pub fn labels_to_string<L: Label>(labels: &[L]) -> String {
    labels.iter().map(|l| l.to_char()).collect()
}

/// Prefix counts and position tables for both letters of a sequence.
///
/// Indices are 1-based. `ct(l, 0) = 0`, `pos(l, 0) = 0`, and `pos(l, i) = n`
/// once `i` exceeds the number of `l`s.
#[derive(Clone)]
pub struct LabelStats<L: Label> {
    n: usize,
    ct_primary: Vec<u32>,
    pos_primary: Vec<u32>,
    pos_secondary: Vec<u32>,
    _label: PhantomData<L>,
}

impl<L: Label> LabelStats<L> {
    pub fn new(labels: &[L]) -> Self {
        let n = labels.len();
        let mut ct_primary = Vec::with_capacity(n + 1);
        let mut pos_primary = Vec::new();
        let mut pos_secondary = Vec::new();
        ct_primary.push(0);
        let mut c = 0u32;
        for (k, &l) in labels.iter().enumerate() {
            if l.is_primary() {
                c += 1;
                pos_primary.push(k as u32 + 1);
            } else {
                pos_secondary.push(k as u32 + 1);
            }
            ct_primary.push(c);
        }
        Self {
            n,
            ct_primary,
            pos_primary,
            pos_secondary,
            _label: PhantomData,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of `l`s among the first `i` entries.
    #[inline]
    pub fn ct(&self, l: L, i: usize) -> usize {
        let c = self.ct_primary[i] as usize;
        if l.is_primary() {
            c
        } else {
            i - c
        }
    }

    /// Total number of `l`s, i.e. `ct(l, n)`.
    #[inline]
    pub fn count(&self, l: L) -> usize {
        self.ct(l, self.n)
    }

    fn table(&self, l: L) -> &[u32] {
        if l.is_primary() {
            &self.pos_primary
        } else {
            &self.pos_secondary
        }
    }

    /// Index of the `i`-th `l`; 0 for `i = 0`, `n` past the last one.
    #[inline]
    pub fn pos(&self, l: L, i: usize) -> usize {
        if i == 0 {
            return 0;
        }
        match self.table(l).get(i - 1) {
            Some(&p) => p as usize,
            None => self.n,
        }
    }

    /// [`pos`](Self::pos) extended to signed arguments, with `pos(l, i) = 0`
    /// for `i <= 0`.
    #[inline]
    pub fn pos_signed(&self, l: L, i: i64) -> usize {
        if i <= 0 {
            0
        } else {
            self.pos(l, i as usize)
        }
    }

    /// The `pos` table proper, `pos(l, 1..=count(l))`.
    pub fn positions(&self, l: L) -> &[u32] {
        self.table(l)
    }

    /// `e(i) = pos_S(i) - 2i` for `i <= count(S)` and
    /// `s(i) = pos_P(i) - 2i + e(i)` for `i <= min(count(P), count(S))`,
    /// with `S` the secondary and `P` the primary letter; index 0 holds `i = 1`.
    pub fn offsets(&self) -> (Vec<i64>, Vec<i64>) {
        let e: Vec<i64> = self
            .pos_secondary
            .iter()
            .enumerate()
            .map(|(k, &p)| p as i64 - 2 * (k as i64 + 1))
            .collect();
        let m = self.pos_primary.len().min(self.pos_secondary.len());
        let s = (0..m)
            .map(|k| self.pos_primary[k] as i64 - 2 * (k as i64 + 1) + e[k])
            .collect();
        (e, s)
    }
}

impl<L: Label> fmt::Debug for LabelStats<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LabelStats")
            .field("n", &self.n)
            .field("primary", &L::PRIMARY.to_char())
            .field("count_primary", &self.pos_primary.len())
            .finish()
    }
}
