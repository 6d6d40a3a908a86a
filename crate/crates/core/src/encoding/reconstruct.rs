//! The reconstruction map `ρ`: matching labels of `X` with labels of `Y`
//! into four monotone point families.

use serde::Serialize;

use super::labels::{LabelStats, XLabel, YLabel};
use super::pair::{project, AnchoredPair};
use crate::error::{Error, Result};
use crate::perm::{is_square, records, Permutation, RecordKind};

use XLabel::{D, U};
use YLabel::{L, R};

/// The anchors `(z1, z2, z3)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Anchors {
    pub z1: usize,
    pub z2: usize,
    pub z3: usize,
}

/// The four families `Λ1..Λ4` as `(x, y)` points, 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LambdaFamilies {
    pub lambda1: Vec<(u32, u32)>,
    pub lambda2: Vec<(u32, u32)>,
    pub lambda3: Vec<(u32, u32)>,
    pub lambda4: Vec<(u32, u32)>,
    pub anchors: Anchors,
}

impl LambdaFamilies {
    pub fn len(&self) -> usize {
        self.lambda1.len() + self.lambda2.len() + self.lambda3.len() + self.lambda4.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn families(&self) -> [&[(u32, u32)]; 4] {
        [&self.lambda1, &self.lambda2, &self.lambda3, &self.lambda4]
    }
}

fn anchors_from(xs: &LabelStats<XLabel>, ys: &LabelStats<YLabel>, z0: usize) -> Anchors {
    let cd = xs.ct(D, z0) as i64;
    Anchors {
        z1: ys.pos_signed(L, cd),
        z2: xs.pos_signed(U, ys.count(L) as i64 - cd),
        z3: ys.pos_signed(R, xs.count(D) as i64 - cd),
    }
}

/// `z1 = pos_L(ct_D(z0))`, `z2 = pos_U(ct_L(n) - ct_D(z0))`,
/// `z3 = pos_R(ct_D(n) - ct_D(z0))`. Nonpositive `pos` arguments give 0.
pub fn anchors(pair: &AnchoredPair) -> Anchors {
    anchors_from(&pair.x_stats(), &pair.y_stats(), pair.z0())
}

/// Assembles `Λ1..Λ4` by the index formulas, without validation.
pub fn lambdas_unchecked(pair: &AnchoredPair) -> LambdaFamilies {
    let xs = pair.x_stats();
    let ys = pair.y_stats();
    lambdas_from(&xs, &ys, pair.n(), pair.z0())
}

pub(crate) fn lambdas_from(
    xs: &LabelStats<XLabel>,
    ys: &LabelStats<YLabel>,
    n: usize,
    z0: usize,
) -> LambdaFamilies {
    let anchors = anchors_from(xs, ys, z0);
    let cd = xs.ct(D, z0);
    let cu2 = xs.ct(U, anchors.z2.min(n));
    let pt = |a: usize, b: usize| (a as u32, b as u32);

    let lambda1 = (1..=cd)
        .map(|i| pt(xs.pos(D, i), ys.pos(L, cd + 1 - i)))
        .collect();
    let lambda2 = (1..=cu2)
        .map(|i| pt(xs.pos(U, i), ys.pos(L, cd + i)))
        .collect();
    let lambda3 = (cd + 1..=xs.count(D))
        .map(|i| pt(xs.pos(D, i), ys.pos(R, i - cd)))
        .collect();
    let lambda4 = (cu2 + 1..=xs.count(U))
        .map(|i| {
            pt(
                xs.pos(U, i),
                ys.pos_signed(R, n as i64 - cd as i64 + 1 - i as i64),
            )
        })
        .collect();
    LambdaFamilies {
        lambda1,
        lambda2,
        lambda3,
        lambda4,
        anchors,
    }
}

/// Checks that every column and every row is used exactly once.
pub fn check_matching(fam: &LambdaFamilies, n: usize) -> Result<()> {
    if fam.len() != n {
        return Err(Error::Matching(format!(
            "families hold {} points for size {n}",
            fam.len()
        )));
    }
    let mut col = vec![false; n + 1];
    let mut row = vec![false; n + 1];
    for (k, family) in fam.families().iter().enumerate() {
        for &(x, y) in family.iter() {
            let (x, y) = (x as usize, y as usize);
            if x == 0 || y == 0 || x > n || y > n {
                return Err(Error::Matching(format!(
                    "point ({x}, {y}) of family {} outside the grid",
                    k + 1
                )));
            }
            if col[x] {
                return Err(Error::Matching(format!(
                    "column {x} used twice (family {})",
                    k + 1
                )));
            }
            if row[y] {
                return Err(Error::Matching(format!(
                    "row {y} used twice (family {})",
                    k + 1
                )));
            }
            col[x] = true;
            row[y] = true;
        }
    }
    Ok(())
}

/// `Λ1..Λ4`, failing when some label is unused or used twice.
pub fn build_lambdas(pair: &AnchoredPair) -> Result<LambdaFamilies> {
    if !pair.is_good() {
        return Err(Error::NotGood);
    }
    let fam = lambdas_unchecked(pair);
    check_matching(&fam, pair.n())?;
    Ok(fam)
}

pub(crate) fn assemble(fam: &LambdaFamilies, n: usize) -> Permutation {
    let mut values = vec![0u32; n];
    for family in fam.families() {
        for &(x, y) in family {
            values[x as usize - 1] = y;
        }
    }
    Permutation::from_values_unchecked(values)
}

/// The map `ρ`: the permutation whose point set is `Λ1 ∪ Λ2 ∪ Λ3 ∪ Λ4`.
pub fn reconstruct(pair: &AnchoredPair) -> Result<Permutation> {
    let fam = build_lambdas(pair)?;
    Ok(assemble(&fam, pair.n()))
}

/// [`reconstruct`], then require a square result that projects back to
/// `pair`.
pub fn reconstruct_validated(pair: &AnchoredPair) -> Result<Permutation> {
    let p = reconstruct(pair)?;
    if !is_square(&p) {
        return Err(Error::Matching("reconstruction is not square".into()));
    }
    if project(&p)? != *pair {
        return Err(Error::Matching(
            "reconstruction does not project back".into(),
        ));
    }
    Ok(p)
}

/// Compares the record sets of `ρ(pair)` with the families:
/// `LRm = Λ1`, `LRM = Λ2 ∪ {(1,z1)}`, `RLm = Λ3 ∪ {(z0,1)}`,
/// `RLM = Λ4 ∪ {(z2,n),(n,z3)}`.
pub fn record_structure_matches(p: &Permutation, fam: &LambdaFamilies, z0: usize) -> bool {
    let n = p.len();
    let r = records(p);
    let a = fam.anchors;
    let cols = |pts: &[(u32, u32)], extra: &[(usize, usize)]| {
        let mut v: Vec<usize> = pts.iter().map(|&(x, _)| x as usize).collect();
        for &(x, y) in extra {
            if x == 0 || x > n || p.value(x) != y {
                return None;
            }
            v.push(x);
        }
        v.sort_unstable();
        v.dedup();
        Some(v)
    };
    let want = [
        (RecordKind::LrMin, cols(&fam.lambda1, &[])),
        (RecordKind::LrMax, cols(&fam.lambda2, &[(1, a.z1)])),
        (RecordKind::RlMin, cols(&fam.lambda3, &[(z0, 1)])),
        (
            RecordKind::RlMax,
            cols(&fam.lambda4, &[(a.z2, n), (n, a.z3)]),
        ),
    ];
    want.into_iter()
        .all(|(kind, cols)| cols.is_some_and(|c| c == r.positions(kind)))
}

/// Largest deviations of a reconstruction from its diagonal bands, anchor
/// relations and `s(i)` offsets, with the bounds `10 n^.6` and `10 n^.4`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BandReport {
    /// `|s+t-z0|`, `|t-s-z0|`, `|s-t-z0|`, `|2n-s-t-z0|` over `Λ1..Λ4`.
    pub lambda: [i64; 4],
    /// `|z1-z0|`, `|z2-z3|`, `|n-z0-z2|`.
    pub anchors: [i64; 3],
    /// `max |s(i)|` of `X`.
    pub s_max: i64,
    pub bound_06: f64,
    pub bound_04: f64,
}

impl BandReport {
    pub fn holds(&self) -> bool {
        self.lambda
            .iter()
            .chain(&self.anchors)
            .all(|&d| (d as f64) < self.bound_06)
            && (self.s_max as f64) < self.bound_04
    }

    /// Number of the eight quantities at or above their bound.
    pub fn violations(&self) -> usize {
        self.lambda
            .iter()
            .chain(&self.anchors)
            .filter(|&&d| d as f64 >= self.bound_06)
            .count()
            + usize::from(self.s_max as f64 >= self.bound_04)
    }
}

/// Band deviations of `ρ(pair)`.
pub fn band_report(pair: &AnchoredPair) -> Result<BandReport> {
    let fam = build_lambdas(pair)?;
    let (n, z0) = (pair.n() as i64, pair.z0() as i64);
    let dev = |pts: &[(u32, u32)], f: &dyn Fn(i64, i64) -> i64| {
        pts.iter()
            .map(|&(s, t)| f(s as i64, t as i64).abs())
            .max()
            .unwrap_or(0)
    };
    let a = fam.anchors;
    let (z1, z2, z3) = (a.z1 as i64, a.z2 as i64, a.z3 as i64);
    let (_, s) = pair.x_stats().offsets();
    let nf = pair.n() as f64;
    Ok(BandReport {
        lambda: [
            dev(&fam.lambda1, &|s, t| s + t - z0),
            dev(&fam.lambda2, &|s, t| t - s - z0),
            dev(&fam.lambda3, &|s, t| s - t - z0),
            dev(&fam.lambda4, &|s, t| 2 * n - s - t - z0),
        ],
        anchors: [(z1 - z0).abs(), (z2 - z3).abs(), (n - z0 - z2).abs()],
        s_max: s.iter().map(|v| v.abs()).max().unwrap_or(0),
        bound_06: 10.0 * nf.powf(0.6),
        bound_04: 10.0 * nf.powf(0.4),
    })
}
