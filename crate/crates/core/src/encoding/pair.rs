//! Anchored pairs of label sequences and the projection of a square
//! permutation onto one.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::labels::{labels_to_string, parse_labels, Label, LabelStats, XLabel, YLabel};
use super::petrov::{petrov_check, satisfies_petrov, PetrovReport};
use crate::error::{Error, Result};
use crate::perm::{records, Permutation, RecordKind};

/// `(X, Y, z0)` with `X ∈ {U,D}^n`, `Y ∈ {L,R}^n` and `z0 ∈ [n]`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PairRepr", into = "PairRepr")]
pub struct AnchoredPair {
    x: Vec<XLabel>,
    y: Vec<YLabel>,
    z0: usize,
}

#[derive(Serialize, Deserialize)]
struct PairRepr {
    x: String,
    y: String,
    z0: usize,
}

impl TryFrom<PairRepr> for AnchoredPair {
    type Error = Error;
    fn try_from(r: PairRepr) -> Result<Self> {
        AnchoredPair::new(parse_labels(&r.x)?, parse_labels(&r.y)?, r.z0)
    }
}

impl From<AnchoredPair> for PairRepr {
    fn from(p: AnchoredPair) -> Self {
        PairRepr {
            x: labels_to_string(&p.x),
            y: labels_to_string(&p.y),
            z0: p.z0,
        }
    }
}

impl AnchoredPair {
    pub fn new(x: Vec<XLabel>, y: Vec<YLabel>, z0: usize) -> Result<Self> {
        if x.is_empty() || x.len() != y.len() {
            return Err(Error::InvalidPair(format!(
                "sequence lengths {} and {} must be equal and positive",
                x.len(),
                y.len()
            )));
        }
        if z0 == 0 || z0 > x.len() {
            return Err(Error::InvalidPair(format!(
                "z0 = {z0} outside 1..={}",
                x.len()
            )));
        }
        Ok(Self { x, y, z0 })
    }

    /// Builds a pair from strings such as `("DUDD", "LLRL", 3)`.
    pub fn from_strs(x: &str, y: &str, z0: usize) -> Result<Self> {
        Self::new(parse_labels(x)?, parse_labels(y)?, z0)
    }

    /// Parses the three-line text form: X, Y, then z0.
    pub fn parse(text: &str) -> Result<Self> {
        let lines: Vec<&str> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .collect();
        if lines.len() != 3 {
            return Err(Error::Parse(format!(
                "expected 3 non-empty lines, found {}",
                lines.len()
            )));
        }
        let z0 = lines[2]
            .parse::<usize>()
            .map_err(|e| Error::Parse(format!("z0: {e}")))?;
        Self::from_strs(lines[0], lines[1], z0)
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &[XLabel] {
        &self.x
    }

    pub fn y(&self) -> &[YLabel] {
        &self.y
    }

    pub fn z0(&self) -> usize {
        self.z0
    }

    /// `X_i`, 1-based.
    pub fn x_at(&self, i: usize) -> XLabel {
        self.x[i - 1]
    }

    /// `Y_v`, 1-based.
    pub fn y_at(&self, v: usize) -> YLabel {
        self.y[v - 1]
    }

    pub fn x_stats(&self) -> LabelStats<XLabel> {
        LabelStats::new(&self.x)
    }

    pub fn y_stats(&self) -> LabelStats<YLabel> {
        LabelStats::new(&self.y)
    }

    /// `X_1 = X_n = X_{z0} = D` and `Y_1 = Y_n = L`.
    pub fn is_good(&self) -> bool {
        let n = self.n();
        self.x_at(1) == XLabel::D
            && self.x_at(n) == XLabel::D
            && self.x_at(self.z0) == XLabel::D
            && self.y_at(1) == YLabel::L
            && self.y_at(n) == YLabel::L
    }

    /// Three-line text form.
    pub fn to_text(&self) -> String {
        format!(
            "{}\n{}\n{}\n",
            labels_to_string(&self.x),
            labels_to_string(&self.y),
            self.z0
        )
    }

    /// Petrov report over all four letters.
    pub fn petrov_report(&self) -> PetrovReport {
        let n = self.n();
        petrov_check(&self.x_stats(), n).merge(petrov_check(&self.y_stats(), n))
    }

    pub fn satisfies_petrov(&self) -> bool {
        let n = self.n();
        satisfies_petrov(&self.x_stats(), n) && satisfies_petrov(&self.y_stats(), n)
    }

    /// Membership in the regular set: good, Petrov on all four letters and
    /// `n^.9 <= z0 <= n - n^.9`.
    pub fn is_regular(&self) -> Result<bool> {
        if !self.is_good() {
            return Err(Error::NotGood);
        }
        Ok(margin_holds(self.n(), self.z0) && self.satisfies_petrov())
    }
}

impl fmt::Debug for AnchoredPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n() <= 64 {
            write!(
                f,
                "AnchoredPair({}, {}, {})",
                labels_to_string(&self.x),
                labels_to_string(&self.y),
                self.z0
            )
        } else {
            write!(f, "AnchoredPair(n = {}, z0 = {})", self.n(), self.z0)
        }
    }
}

/// `n^.9 <= z0 <= n - n^.9`.
pub fn margin_holds(n: usize, z0: usize) -> bool {
    let m = (n as f64).powf(0.9);
    let z = z0 as f64;
    m <= z && z <= n as f64 - m
}

/// The integers `z0` satisfying [`margin_holds`], as an inclusive range.
pub fn margin_range(n: usize) -> Option<(usize, usize)> {
    let m = (n as f64).powf(0.9);
    let lo = m.ceil().max(1.0) as usize;
    let hi = (n as f64 - m).floor();
    if hi < lo as f64 {
        return None;
    }
    Some((lo, hi as usize))
}

/// The projection `φ` of a square permutation.
pub fn project(p: &Permutation) -> Result<AnchoredPair> {
    let n = p.len();
    let r = records(p);
    let mut x = Vec::with_capacity(n);
    let mut y = vec![YLabel::R; n];
    for i in 1..=n {
        if !r.is_record(i) {
            return Err(Error::NotSquare);
        }
        let minimum = r.contains(RecordKind::LrMin, i) || r.contains(RecordKind::RlMin, i);
        x.push(XLabel::from_primary(minimum));
        if r.contains(RecordKind::LrMin, i) || r.contains(RecordKind::LrMax, i) {
            y[p.value(i) - 1] = YLabel::L;
        }
    }
    AnchoredPair::new(x, y, p.position_of(1))
}
