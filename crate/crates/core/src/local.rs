//! Local (rooted window) statistics of square permutations.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::encoding::{project, XLabel};
use crate::error::{Error, Result};
use crate::perm::{records, Permutation, RecordKind, RecordSets};

/// A finite rooted permutation. The root is 1-based.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct RootedPattern {
    pub pattern: Permutation,
    pub root: usize,
}

impl RootedPattern {
    pub fn new(pattern: Permutation, root: usize) -> Result<Self> {
        if root == 0 || root > pattern.len() {
            return Err(Error::IndexOutOfRange {
                index: root,
                size: pattern.len(),
            });
        }
        Ok(Self { pattern, root })
    }

    /// Whether the window has full width `2h+1` centred on the root.
    pub fn is_full(&self, h: usize) -> bool {
        self.pattern.len() == 2 * h + 1 && self.root == h + 1
    }

    /// The radius-`h` restriction around the root.
    pub fn restrict(&self, h: usize) -> RootedPattern {
        restrict(&self.pattern, self.root, h)
    }
}

impl fmt::Debug for RootedPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, root {})", compact(&self.pattern), self.root)
    }
}

fn compact(p: &Permutation) -> String {
    if p.len() < 10 {
        p.values().iter().map(|v| v.to_string()).collect()
    } else {
        p.to_string()
    }
}

/// `r_h(p, i)`: the pattern of `p` on `[max(1, i-h), min(n, i+h)]` rooted at
/// `i - a + 1`.
pub fn restrict(p: &Permutation, i: usize, h: usize) -> RootedPattern {
    let n = p.len();
    assert!((1..=n).contains(&i), "root {i} outside 1..={n}");
    let a = i.saturating_sub(h).max(1);
    let b = (i + h).min(n);
    RootedPattern {
        pattern: p.window(a, b),
        root: i - a + 1,
    }
}

/// `2^{-sup{h : r_h(r1) = r_h(r2)}}`, and 0 when the two agree at every radius.
pub fn local_distance(r1: &RootedPattern, r2: &RootedPattern) -> f64 {
    let reach = |r: &RootedPattern| (r.root - 1).max(r.pattern.len() - r.root);
    let top = reach(r1).max(reach(r2));
    let mut agree = 0;
    for h in 0..=top {
        if r1.restrict(h) != r2.restrict(h) {
            return 2f64.powi(-(agree as i32));
        }
        agree = h;
    }
    0.0
}

/// Case index `j` of the window classifier; `Diamond` covers everything
/// not in cases 1..4.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Case {
    One,
    Two,
    Three,
    Four,
    Diamond,
}

impl Case {
    pub const PROPER: [Case; 4] = [Case::One, Case::Two, Case::Three, Case::Four];

    pub fn index(self) -> Option<u8> {
        match self {
            Case::One => Some(1),
            Case::Two => Some(2),
            Case::Three => Some(3),
            Case::Four => Some(4),
            Case::Diamond => None,
        }
    }

    pub fn from_index(j: u8) -> Result<Self> {
        match j {
            1 => Ok(Case::One),
            2 => Ok(Case::Two),
            3 => Ok(Case::Three),
            4 => Ok(Case::Four),
            _ => Err(Error::InvalidArgument(format!("case {j} not in 1..=4"))),
        }
    }
}

/// `(j, D)` with `D ⊆ [1, 2h+1]` the window positions labelled `D`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct WindowLabels {
    pub case: Case,
    pub d: Vec<usize>,
}

/// A square permutation with its projection and records, for repeated
/// window queries.
pub struct LocalView<'a> {
    p: &'a Permutation,
    x: Vec<XLabel>,
    rec: RecordSets,
    z0: usize,
    z2: usize,
}

impl<'a> LocalView<'a> {
    pub fn new(p: &'a Permutation) -> Result<Self> {
        let pair = project(p)?;
        Ok(Self {
            p,
            x: pair.x().to_vec(),
            rec: records(p),
            z0: p.position_of(1),
            z2: p.position_of(p.len()),
        })
    }

    pub fn n(&self) -> usize {
        self.p.len()
    }

    pub fn z0(&self) -> usize {
        self.z0
    }

    pub fn z2(&self) -> usize {
        self.z2
    }

    pub fn case(&self, i: usize, h: usize) -> Case {
        let (n, z0, z2) = (self.n(), self.z0, self.z2);
        if z0 <= z2 && z0 + h <= i && i + h <= z2 {
            Case::One
        } else if h < i && i + h <= z0.min(z2) {
            Case::Two
        } else if z0.max(z2) + h <= i && i + h <= n {
            Case::Three
        } else if z2 <= z0 && z2 + h <= i && i + h <= z0 {
            Case::Four
        } else {
            Case::Diamond
        }
    }

    /// `φ_h(p, i)`. Window positions falling outside `[1, n]` are skipped.
    pub fn classify(&self, i: usize, h: usize) -> WindowLabels {
        let n = self.n();
        let d = (1..=2 * h + 1)
            .filter(|&x| {
                let k = (x + i) as i64 - h as i64 - 1;
                k >= 1 && k as usize <= n && self.x[k as usize - 1] == XLabel::D
            })
            .collect();
        WindowLabels {
            case: self.case(i, h),
            d,
        }
    }

    fn window_split(&self, i: usize, h: usize, upper: RecordKind, lower: RecordKind) -> bool {
        let mut min_upper = usize::MAX;
        let mut max_lower = 0;
        for j in i - h..=i + h {
            let v = self.p.value(j);
            if self.rec.contains(upper, j) {
                min_upper = min_upper.min(v);
            }
            if self.rec.contains(lower, j) {
                max_lower = max_lower.max(v);
            }
        }
        min_upper > max_lower
    }

    /// The event `S_h`: the smallest left-to-right maximum in the window lies
    /// above the largest right-to-left minimum. Requires
    /// `z0 < z2` and `z0 + h <= i <= z2 - h`.
    pub fn separating_line(&self, i: usize, h: usize) -> Result<bool> {
        if !(self.z0 < self.z2 && self.z0 + h <= i && i + h <= self.z2) {
            return Err(Error::InvalidArgument(format!(
                "root {i} not in [z0 + h, z2 - h] with z0 = {}, z2 = {}, h = {h}",
                self.z0, self.z2
            )));
        }
        Ok(self.window_split(i, h, RecordKind::LrMax, RecordKind::RlMin))
    }

    /// Mirror of [`LocalView::separating_line`] for `z2 < z0`: right-to-left
    /// maxima above left-to-right minima.
    pub fn separating_line_mirrored(&self, i: usize, h: usize) -> Result<bool> {
        if !(self.z2 < self.z0 && self.z2 + h <= i && i + h <= self.z0) {
            return Err(Error::InvalidArgument(format!(
                "root {i} not in [z2 + h, z0 - h] with z0 = {}, z2 = {}, h = {h}",
                self.z0, self.z2
            )));
        }
        Ok(self.window_split(i, h, RecordKind::RlMax, RecordKind::LrMin))
    }

    /// Whether `ψ_h(φ_h(p, i)) = r_h(p, i)` is guaranteed: case 2 or 3, or
    /// case 1 or 4 with a separating line.
    pub fn psi_phi_guaranteed(&self, i: usize, h: usize) -> bool {
        match self.case(i, h) {
            Case::Two | Case::Three => true,
            Case::One => self.z0 < self.z2 && self.separating_line(i, h).unwrap_or(false),
            Case::Four => self.z2 < self.z0 && self.separating_line_mirrored(i, h).unwrap_or(false),
            Case::Diamond => false,
        }
    }
}

/// `φ_h(p, i)` for a square `p`.
pub fn classify_phi(p: &Permutation, i: usize, h: usize) -> Result<WindowLabels> {
    if i == 0 || i > p.len() {
        return Err(Error::IndexOutOfRange {
            index: i,
            size: p.len(),
        });
    }
    Ok(LocalView::new(p)?.classify(i, h))
}

/// The event `S_h(p, i)`.
pub fn separating_line_exists(p: &Permutation, i: usize, h: usize) -> Result<bool> {
    LocalView::new(p)?.separating_line(i, h)
}

/// `ψ_h(j, D)`: positions in `D` carry the lowest values; case 1 makes
/// both parts increasing, case 2 makes `D` decreasing, case 3 makes the rest
/// decreasing and case 4 both.
pub fn build_psi(case: Case, d: &[usize], h: usize) -> Result<RootedPattern> {
    let size = 2 * h + 1;
    let mut in_d = vec![false; size + 1];
    for &x in d {
        if x == 0 || x > size {
            return Err(Error::IndexOutOfRange { index: x, size });
        }
        in_d[x] = true;
    }
    let (d_inc, u_inc) = match case {
        Case::One => (true, true),
        Case::Two => (false, true),
        Case::Three => (true, false),
        Case::Four => (false, false),
        Case::Diamond => {
            return Err(Error::InvalidArgument(
                "ψ is undefined on the ⋄ case".into(),
            ))
        }
    };
    let dpos: Vec<usize> = (1..=size).filter(|&x| in_d[x]).collect();
    let upos: Vec<usize> = (1..=size).filter(|&x| !in_d[x]).collect();
    let mut values = vec![0u32; size];
    let assign = |pos: &[usize], inc: bool, base: usize, values: &mut [u32]| {
        for (k, &x) in pos.iter().enumerate() {
            let rank = if inc { k } else { pos.len() - 1 - k };
            values[x - 1] = (base + rank + 1) as u32;
        }
    };
    assign(&dpos, d_inc, 0, &mut values);
    assign(&upos, u_inc, dpos.len(), &mut values);
    RootedPattern::new(Permutation::new(values)?, h + 1)
}

/// Membership in the six window families.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FamilyTag {
    pub a1: bool,
    pub a2: bool,
    pub a3: bool,
    pub a4: bool,
    pub a5: bool,
    pub a6: bool,
}

fn monotone(xs: &[u32], inc: bool) -> bool {
    xs.windows(2).all(|w| (w[0] < w[1]) == inc)
}

/// Whether some horizontal line splits `pi` into a lower part with
/// monotonicity `low_inc` and an upper part with `high_inc`.
fn splits(pi: &Permutation, low_inc: bool, high_inc: bool) -> bool {
    let v = pi.values();
    (0..=v.len() as u32).any(|k| {
        let low: Vec<u32> = v.iter().copied().filter(|&x| x <= k).collect();
        let high: Vec<u32> = v.iter().copied().filter(|&x| x > k).collect();
        monotone(&low, low_inc) && monotone(&high, high_inc)
    })
}

fn check_odd(pi: &Permutation) -> Result<()> {
    if pi.len().is_multiple_of(2) {
        return Err(Error::EvenSize(pi.len()));
    }
    if pi.len() < 3 {
        return Err(Error::InvalidArgument(
            "pattern size must be at least 3".into(),
        ));
    }
    Ok(())
}

/// Membership of `pi` (odd size at least 3) in `A1..A6`, from separating
/// lines in its diagram.
pub fn family_membership(pi: &Permutation) -> Result<FamilyTag> {
    check_odd(pi)?;
    let mono = pi.is_monotone();
    Ok(FamilyTag {
        a1: !mono && splits(pi, true, true),
        a2: splits(pi, false, true),
        a3: splits(pi, true, false),
        a4: !mono && splits(pi, false, false),
        a5: pi.is_increasing(),
        a6: pi.is_decreasing(),
    })
}

/// `e_ℓ(pi) = |{D : ψ_h(ℓ, D) = (pi, h+1)}|` by enumerating all `D`.
pub fn e_counts_brute(pi: &Permutation) -> Result<[u64; 4]> {
    check_odd(pi)?;
    let size = pi.len();
    if size > 20 {
        return Err(Error::PatternTooLong {
            pattern: size,
            size: 20,
        });
    }
    let h = (size - 1) / 2;
    let mut e = [0u64; 4];
    for mask in 0u32..1 << size {
        let d: Vec<usize> = (1..=size).filter(|&x| mask >> (x - 1) & 1 == 1).collect();
        for (k, case) in Case::PROPER.into_iter().enumerate() {
            if build_psi(case, &d, h)?.pattern == *pi {
                e[k] += 1;
            }
        }
    }
    Ok(e)
}

/// `e_ℓ(pi)` from family membership:
/// `e1 = 1_{A1} + (|pi|+1) 1_{A5}`, `e2 = 2·1_{A2}`, `e3 = 2·1_{A3}`,
/// `e4 = 1_{A4} + (|pi|+1) 1_{A6}`.
pub fn e_counts(pi: &Permutation) -> Result<[u64; 4]> {
    let t = family_membership(pi)?;
    let m = pi.len() as u64 + 1;
    let b = |x: bool| x as u64;
    Ok([
        b(t.a1) + m * b(t.a5),
        2 * b(t.a2),
        2 * b(t.a3),
        b(t.a4) + m * b(t.a6),
    ])
}

/// `p(pi) = 2^{-|pi|-2}(e1 + e2 + e3 + e4)`.
pub fn limit_p(pi: &Permutation) -> Result<Ratio<u64>> {
    let e = e_counts(pi)?;
    Ok(Ratio::new(e.iter().sum(), 1u64 << (pi.len() + 2)))
}

/// `pi^{*m}`: `pi` with a final point inserted just below its `m`-th row.
pub fn extend_below_row(pi: &Permutation, m: usize) -> Permutation {
    let mut v: Vec<u32> = pi
        .values()
        .iter()
        .map(|&x| if x as usize >= m { x + 1 } else { x })
        .collect();
    v.push(m as u32);
    Permutation::from_values_unchecked(v)
}

/// Limit frequency of consecutive occurrences of `pi` of any size at least 2:
/// [`limit_p`] for odd sizes, `Σ_m p(pi^{*m})` for even ones.
pub fn limit_consecutive(pi: &Permutation) -> Result<Ratio<u64>> {
    if pi.len() < 2 {
        return Err(Error::InvalidArgument(
            "pattern size must be at least 2".into(),
        ));
    }
    if pi.len() % 2 == 1 {
        return limit_p(pi);
    }
    (1..=pi.len() + 1).try_fold(Ratio::from_integer(0), |acc, m| {
        Ok(acc + limit_p(&extend_below_row(pi, m))?)
    })
}

/// Weights of the four cases at anchor fraction `u`:
/// `P(J(u, V) = j)` for `V` uniform.
pub fn case_weights(u: f64) -> [f64; 4] {
    let lo = u.min(1.0 - u);
    [
        if u < 0.5 { 1.0 - 2.0 * u } else { 0.0 },
        lo,
        lo,
        if u > 0.5 { 2.0 * u - 1.0 } else { 0.0 },
    ]
}

/// Quenched limit probability of the window `pi` given anchor fraction `u`:
/// `2^{-|pi|} Σ_ℓ e_ℓ(pi) P(J(u, V) = ℓ)`.
pub fn quenched_gamma(pi: &Permutation, u: f64) -> Result<f64> {
    let e = e_counts(pi)?;
    let w = case_weights(u);
    let s: f64 = e.iter().zip(w).map(|(&e, w)| e as f64 * w).sum();
    Ok(s / (1u64 << pi.len()) as f64)
}

/// The case map `J(u, v)`.
pub fn map_j(u: f64, v: f64) -> Case {
    if u < 0.5 && u <= v && v <= 1.0 - u {
        Case::One
    } else if v < u.min(1.0 - u) {
        Case::Two
    } else if v > u.max(1.0 - u) {
        Case::Three
    } else {
        Case::Four
    }
}

/// `r_h` of the limiting order of case `j`: a fair labelling of `[-h, h]`
/// fed through `ψ_h`.
pub fn sample_limit_window<R: Rng + ?Sized>(
    case: Case,
    h: usize,
    rng: &mut R,
) -> Result<RootedPattern> {
    let d: Vec<usize> = (1..=2 * h + 1).filter(|_| rng.random::<bool>()).collect();
    build_psi(case, &d, h)
}

/// Which roots to visit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Roots {
    All,
    Sample(u64),
}

/// Counts of rooted windows over the visited roots.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct WindowDistribution {
    pub h: usize,
    pub total: u64,
    pub counts: BTreeMap<RootedPattern, u64>,
}

impl WindowDistribution {
    pub fn frequency(&self, r: &RootedPattern) -> f64 {
        *self.counts.get(r).unwrap_or(&0) as f64 / self.total as f64
    }

    /// Number of full-width windows visited.
    pub fn interior_total(&self) -> u64 {
        self.counts
            .iter()
            .filter(|(r, _)| r.is_full(self.h))
            .map(|(_, c)| c)
            .sum()
    }

    /// Frequency of `pi` rooted at its centre among full-width windows.
    pub fn interior_frequency(&self, pi: &Permutation) -> f64 {
        let key = RootedPattern {
            pattern: pi.clone(),
            root: self.h + 1,
        };
        *self.counts.get(&key).unwrap_or(&0) as f64 / self.interior_total() as f64
    }

    pub fn merge(&mut self, other: WindowDistribution) {
        self.total += other.total;
        for (k, c) in other.counts {
            *self.counts.entry(k).or_default() += c;
        }
    }
}

const ROOT_CHUNK: usize = 1 << 14;

/// Empirical law of `r_h(p, i)` for a uniform root `i`: exact over all roots,
/// or over sampled roots.
pub fn empirical_window_distribution<R: Rng + ?Sized>(
    p: &Permutation,
    h: usize,
    roots: Roots,
    rng: &mut R,
) -> WindowDistribution {
    let n = p.len();
    let count_range = |lo: usize, hi: usize| {
        let mut d = WindowDistribution {
            h,
            ..Default::default()
        };
        for i in lo..hi {
            *d.counts.entry(restrict(p, i, h)).or_default() += 1;
            d.total += 1;
        }
        d
    };
    match roots {
        Roots::All => {
            let parts: Vec<WindowDistribution> = (0..n.div_ceil(ROOT_CHUNK))
                .into_par_iter()
                .map(|c| count_range(1 + c * ROOT_CHUNK, (1 + (c + 1) * ROOT_CHUNK).min(n + 1)))
                .collect();
            let mut out = WindowDistribution {
                h,
                ..Default::default()
            };
            for part in parts {
                out.merge(part);
            }
            out
        }
        Roots::Sample(m) => {
            let mut d = WindowDistribution {
                h,
                ..Default::default()
            };
            for _ in 0..m {
                let i = rng.random_range(1..=n);
                *d.counts.entry(restrict(p, i, h)).or_default() += 1;
                d.total += 1;
            }
            d
        }
    }
}

/// Keys `(pattern, h+1)` for every pattern of size `2h+1`, ordered.
pub fn full_windows(h: usize) -> Vec<RootedPattern> {
    let mut out = Vec::new();
    crate::enumeration::for_each_permutation(2 * h + 1, |p| {
        out.push(RootedPattern {
            pattern: p.clone(),
            root: h + 1,
        })
    });
    out.sort();
    out
}
