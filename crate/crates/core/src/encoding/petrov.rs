//! The six Petrov deviation conditions on a label sequence.
//!
//! Deviations are exact integers (or half-integers) and are compared
//! strictly against floating-point powers of `n`. The long-range conditions
//! are checked exactly by scanning distances in blocks: a block of distances
//! `[a, b]` is cleared at once when the largest oscillation over windows of
//! width `b` is already below the bound at `a`, and is bisected otherwise.

use std::collections::VecDeque;

use serde::Serialize;

use super::labels::{Label, LabelStats};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    /// Condition number, 1 to 6.
    pub condition: u8,
    pub label: char,
    pub i: usize,
    pub j: usize,
    pub deviation: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PetrovReport {
    pub passed: bool,
    /// At most one violation per condition and label.
    pub violations: Vec<Violation>,
}

impl PetrovReport {
    fn from_violations(violations: Vec<Violation>) -> Self {
        Self {
            passed: violations.is_empty(),
            violations,
        }
    }

    pub fn merge(mut self, other: PetrovReport) -> Self {
        self.violations.extend(other.violations);
        self.passed = self.violations.is_empty();
        self
    }
}

/// Largest `|w[i] - w[j]|` with `|i - j| <= width`, with the attaining pair.
fn max_oscillation(w: &[i64], width: usize) -> (i64, usize, usize) {
    let len = w.len();
    if len < 2 || width == 0 {
        return (0, 0, 0);
    }
    let mut hi: VecDeque<usize> = VecDeque::new();
    let mut lo: VecDeque<usize> = VecDeque::new();
    let mut best = (0i64, 0usize, 0usize);
    for r in 0..len {
        while hi.back().is_some_and(|&k| w[k] <= w[r]) {
            hi.pop_back();
        }
        hi.push_back(r);
        while lo.back().is_some_and(|&k| w[k] >= w[r]) {
            lo.pop_back();
        }
        lo.push_back(r);
        let left = r.saturating_sub(width);
        while hi.front().is_some_and(|&k| k < left) {
            hi.pop_front();
        }
        while lo.front().is_some_and(|&k| k < left) {
            lo.pop_front();
        }
        let (a, b) = (hi[0], lo[0]);
        let spread = w[a] - w[b];
        if spread > best.0 {
            best = (spread, a.max(b), a.min(b));
        }
    }
    best
}

/// Largest `|w[i + d] - w[i]|`, with the attaining `i`.
fn max_at_distance(w: &[i64], d: usize) -> (i64, usize) {
    let mut best = (-1i64, 0usize);
    for i in 0..w.len().saturating_sub(d) {
        let v = (w[i + d] - w[i]).abs();
        if v > best.0 {
            best = (v, i);
        }
    }
    best
}

struct Scan<'a> {
    walk: &'a [i64],
    /// deviation = scale * |Δwalk|
    scale: f64,
    /// long-range bound = coef * d^.6
    coef: f64,
    condition: u8,
    label: char,
}

impl Scan<'_> {
    fn near(&self, n: f64) -> Option<Violation> {
        let width = (n.powf(0.6).ceil() as usize).saturating_sub(1);
        let bound = n.powf(0.4);
        let (spread, i, j) = max_oscillation(self.walk, width);
        let dev = self.scale * spread as f64;
        (dev >= bound).then_some(Violation {
            condition: self.condition,
            label: self.label,
            i,
            j,
            deviation: dev,
            bound,
        })
    }

    fn far(&self, n: f64) -> Option<Violation> {
        let last = self.walk.len().saturating_sub(1);
        let mut a = n.powf(0.3).floor() as usize + 1;
        while a <= last {
            let b = (a + a / 4).max(a + 1).min(last);
            if let Some(v) = self.far_block(a, b) {
                return Some(v);
            }
            a = b + 1;
        }
        None
    }

    fn far_block(&self, a: usize, b: usize) -> Option<Violation> {
        let (spread, _, _) = max_oscillation(self.walk, b);
        if self.scale * (spread as f64) < self.coef * (a as f64).powf(0.6) {
            return None;
        }
        if b - a <= 4 {
            for d in a..=b {
                let (m, i) = max_at_distance(self.walk, d);
                let dev = self.scale * m as f64;
                let bound = self.coef * (d as f64).powf(0.6);
                if dev >= bound {
                    return Some(Violation {
                        condition: self.condition + 1,
                        label: self.label,
                        i: i + d,
                        j: i,
                        deviation: dev,
                        bound,
                    });
                }
            }
            return None;
        }
        let mid = a + (b - a) / 2;
        self.far_block(a, mid)
            .or_else(|| self.far_block(mid + 1, b))
    }
}

/// Checks conditions (1)-(6) for the single letter `label`.
pub fn petrov_check_label<L: Label>(stats: &LabelStats<L>, label: L, n: usize) -> PetrovReport {
    check(stats, label, n, false)
}

fn check<L: Label>(stats: &LabelStats<L>, label: L, n: usize, stop_first: bool) -> PetrovReport {
    let nf = n as f64;
    let len = stats.n();
    let c = label.to_char();
    let mut out = Vec::new();

    // 2ct(i) - i, so the deviation in (1), (2), (5) is half its increments
    let w: Vec<i64> = (0..=len)
        .map(|i| 2 * stats.ct(label, i) as i64 - i as i64)
        .collect();
    // pos(k) - 2k over k <= ct(n), including pos(0) = 0
    let p: Vec<i64> = std::iter::once(0)
        .chain(
            stats
                .positions(label)
                .iter()
                .enumerate()
                .map(|(k, &x)| x as i64 - 2 * (k as i64 + 1)),
        )
        .collect();

    let counts = Scan {
        walk: &w,
        scale: 0.5,
        coef: 0.5,
        condition: 1,
        label: c,
    };
    let positions = Scan {
        walk: &p,
        scale: 1.0,
        coef: 2.0,
        condition: 3,
        label: c,
    };

    let b5 = nf.powf(0.6);
    let b6 = 2.0 * nf.powf(0.6);
    let cond5 = || {
        let (i, v) = w.iter().enumerate().max_by_key(|(_, v)| v.abs())?;
        let dev = 0.5 * v.abs() as f64;
        (dev >= b5).then_some(Violation {
            condition: 5,
            label: c,
            i,
            j: 0,
            deviation: dev,
            bound: b5,
        })
    };
    let cond6 = || {
        let (k, v) = p.iter().enumerate().skip(1).max_by_key(|(_, v)| v.abs())?;
        let dev = v.abs() as f64;
        (dev >= b6).then_some(Violation {
            condition: 6,
            label: c,
            i: k,
            j: 0,
            deviation: dev,
            bound: b6,
        })
    };
    let cond1 = || counts.near(nf);
    let cond3 = || positions.near(nf);
    let cond2 = || counts.far(nf);
    let cond4 = || positions.far(nf);
    // cheapest first, so the early exit is cheap on typical failures
    let steps: [&dyn Fn() -> Option<Violation>; 6] =
        [&cond5, &cond6, &cond1, &cond3, &cond2, &cond4];
    for step in steps {
        if let Some(v) = step() {
            out.push(v);
            if stop_first {
                break;
            }
        }
    }
    out.sort_by_key(|v| v.condition);
    PetrovReport::from_violations(out)
}

/// Checks both letters of the sequence.
pub fn petrov_check<L: Label>(stats: &LabelStats<L>, n: usize) -> PetrovReport {
    petrov_check_label(stats, L::PRIMARY, n).merge(petrov_check_label(stats, L::SECONDARY, n))
}

/// Same verdict as [`petrov_check`], stopping at the first violation.
pub fn satisfies_petrov<L: Label>(stats: &LabelStats<L>, n: usize) -> bool {
    check(stats, L::PRIMARY, n, true).passed && check(stats, L::SECONDARY, n, true).passed
}
