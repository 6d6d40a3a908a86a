//! Fluctuations of the record families around the edges of the rectangle.
//!
//! For a square permutation with `z0 > n/2 + 10 n^.6` three families are
//! tracked: `DR` (right-to-left minima), `DL` (left-to-right minima with
//! value at most `n - z0 + 1`) and `UR` (right-to-left maxima right of `z0`).
//! Each is rotated onto its edge of the rectangle and rescaled into a path.

use rayon::prelude::*;
use serde::Serialize;

use crate::encoding::{AnchoredPair, LabelStats, XLabel, YLabel};
use crate::error::{Error, Result};
use crate::perm::{records, Permutation, RecordKind};
use crate::sampler::{replicate_rng, sample_regular_anchored, SamplerConfig};

use XLabel::{D, U};
use YLabel::{L, R};

const HALF_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum FamilyKind {
    DR,
    DL,
    UR,
    XDR,
    YDR,
    XDL,
    YDL,
    XUR,
    YUR,
    PDR,
    PDL,
    PUR,
}

/// Points ordered along the family.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointFamily {
    pub kind: FamilyKind,
    pub points: Vec<(f64, f64)>,
}

/// The three record families of a permutation, in the coordinates of its
/// diagram.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Families {
    pub dr: PointFamily,
    pub dl: PointFamily,
    pub ur: PointFamily,
}

/// `z0 > n/2 + 10 n^.6`.
pub fn key_assumption_holds(n: usize, z0: usize) -> bool {
    z0 as f64 > n as f64 / 2.0 + 10.0 * (n as f64).powf(0.6)
}

fn check_key_assumption(n: usize, z0: usize) -> Result<()> {
    if !key_assumption_holds(n, z0) {
        return Err(Error::AnchorConstraint {
            n,
            z0,
            constraint: "z0 > n/2 + 10 n^.6".into(),
        });
    }
    Ok(())
}

/// Reads `DR`, `DL` and `UR` off the diagram. `DR` and `UR` run left to
/// right, `DL` runs right to left from the corner `(z0, 1)`.
pub fn extract_families(p: &Permutation) -> Result<Families> {
    let n = p.len();
    let r = records(p);
    if (1..=n).any(|i| !r.is_record(i)) {
        return Err(Error::NotSquare);
    }
    let z0 = p.position_of(1);
    check_key_assumption(n, z0)?;
    let pt = |i: usize| (i as f64, p.value(i) as f64);
    let dr = r.rlmin().into_iter().map(pt).collect();
    let mut dl: Vec<(f64, f64)> = r
        .lrmin()
        .into_iter()
        .filter(|&i| p.value(i) <= n - z0 + 1)
        .map(pt)
        .collect();
    dl.reverse();
    let ur = r
        .positions(RecordKind::RlMax)
        .into_iter()
        .filter(|&i| i >= z0)
        .map(pt)
        .collect();
    Ok(Families {
        dr: PointFamily {
            kind: FamilyKind::DR,
            points: dr,
        },
        dl: PointFamily {
            kind: FamilyKind::DL,
            points: dl,
        },
        ur: PointFamily {
            kind: FamilyKind::UR,
            points: ur,
        },
    })
}

/// Rotates extracted families onto the x-axis: `DR` clockwise by 45° about
/// `(z0, 1)`, `DL` clockwise by 135° about `(z0, 1)`, and `UR`
/// counter-clockwise by 45° about its first point.
pub fn rotate_families(f: &Families, z0: usize) -> [PointFamily; 3] {
    let (cx, cy) = (z0 as f64, 1.0);
    let rot = |pts: &[(f64, f64)], map: &dyn Fn(f64, f64) -> (f64, f64)| -> Vec<(f64, f64)> {
        pts.iter().map(|&(x, y)| map(x - cx, y - cy)).collect()
    };
    let pdr = rot(&f.dr.points, &|dx, dy| {
        (HALF_SQRT2 * (dx + dy), HALF_SQRT2 * (dy - dx))
    });
    let pdl = rot(&f.dl.points, &|dx, dy| {
        (HALF_SQRT2 * (dy - dx), HALF_SQRT2 * (-dx - dy))
    });
    let mut pur = rot(&f.ur.points, &|dx, dy| {
        (HALF_SQRT2 * (dx - dy), HALF_SQRT2 * (dx + dy))
    });
    if let Some(&(_, y0)) = pur.first() {
        for p in &mut pur {
            p.1 -= y0;
        }
    }
    [
        PointFamily {
            kind: FamilyKind::PDR,
            points: pdr,
        },
        PointFamily {
            kind: FamilyKind::PDL,
            points: pdl,
        },
        PointFamily {
            kind: FamilyKind::PUR,
            points: pur,
        },
    ]
}

/// The label statistics of a pair, read as coordinates of the three
/// families.
pub struct FluctuationTables {
    n: usize,
    z0: usize,
    xs: LabelStats<XLabel>,
    ys: LabelStats<YLabel>,
}

impl FluctuationTables {
    pub fn new(pair: &AnchoredPair) -> Result<Self> {
        check_key_assumption(pair.n(), pair.z0())?;
        Ok(Self {
            n: pair.n(),
            z0: pair.z0(),
            xs: pair.x_stats(),
            ys: pair.y_stats(),
        })
    }

    fn cd(&self) -> usize {
        self.xs.ct(D, self.z0)
    }

    /// `|DR| = ct_D(n) - ct_D(z0) + 1`.
    pub fn size_dr(&self) -> usize {
        self.xs.count(D) - self.cd() + 1
    }

    /// `|DL| = ct_L(n - z0 + 1)`.
    pub fn size_dl(&self) -> usize {
        self.ys.ct(L, self.n - self.z0 + 1)
    }

    /// `|UR| = ct_U(n) - ct_U(z0) + 1`.
    pub fn size_ur(&self) -> usize {
        self.xs.count(U) - self.xs.ct(U, self.z0) + 1
    }

    /// Distance from `z0` of the `i`-th `D` after it.
    pub fn pos_d_after(&self, i: usize) -> i64 {
        self.xs.pos(D, self.cd() + i) as i64 - self.z0 as i64
    }

    /// Distance from `z0` of the `i`-th `D` before it (`i = 0` is `z0`).
    pub fn pos_d_before(&self, i: usize) -> i64 {
        self.z0 as i64 - self.xs.pos_signed(D, self.cd() as i64 - i as i64) as i64
    }

    /// Distance from `z0` of the `i`-th `U` after it.
    pub fn pos_u_after(&self, i: usize) -> i64 {
        self.xs.pos(U, self.xs.ct(U, self.z0) + i) as i64 - self.z0 as i64
    }

    /// `pos_R(i)`, with the corner value 1 at `i = 0`.
    fn pos_r_dr(&self, i: usize) -> i64 {
        if i == 0 {
            1
        } else {
            self.ys.pos(R, i) as i64
        }
    }

    fn pos_r(&self, i: i64) -> i64 {
        self.ys.pos_signed(R, i) as i64
    }

    /// Integer coordinates `(x, y)` of the rotated families before the
    /// common factor `√2/2`.
    pub fn rotated_integer(&self) -> [Vec<(i64, i64)>; 3] {
        let (n, z0) = (self.n as i64, self.z0 as i64);
        let dr = (0..self.size_dr())
            .map(|i| {
                let a = self.pos_d_after(i);
                let b = self.pos_r_dr(i) - 1;
                (a + b, b - a)
            })
            .collect();
        let dl = (0..self.size_dl())
            .map(|i| {
                let a = self.pos_d_before(i);
                let b = self.ys.pos(L, i + 1) as i64 - 1;
                (a + b, a - b)
            })
            .collect();
        let u1 = self.pos_u_after(1);
        let r0 = self.pos_r(n - z0);
        let ur = (1..=self.size_ur())
            .map(|i| {
                let u = self.pos_u_after(i);
                let r = self.pos_r(n - z0 + 1 - i as i64);
                (u + 2 * n - 2 * z0 + 1 - r, u - u1 + r - r0)
            })
            .collect();
        [dr, dl, ur]
    }

    /// `P^DR`, `P^DL`, `P^UR`.
    pub fn rotated(&self) -> [PointFamily; 3] {
        let scale = |v: Vec<(i64, i64)>| -> Vec<(f64, f64)> {
            v.into_iter()
                .map(|(x, y)| (HALF_SQRT2 * x as f64, HALF_SQRT2 * y as f64))
                .collect()
        };
        let [dr, dl, ur] = self.rotated_integer();
        [
            PointFamily {
                kind: FamilyKind::PDR,
                points: scale(dr),
            },
            PointFamily {
                kind: FamilyKind::PDL,
                points: scale(dl),
            },
            PointFamily {
                kind: FamilyKind::PUR,
                points: scale(ur),
            },
        ]
    }

    /// Integer `y` values of `X^DR, Y^DR, X^DL, Y^DL, X^UR, Y^UR`, paired
    /// with their index `i` (from 0 for `DR`, `DL` and from 1 for `UR`).
    pub fn components_integer(&self) -> [Vec<(i64, i64)>; 6] {
        let (n, z0) = (self.n as i64, self.z0 as i64);
        let u1 = self.pos_u_after(1);
        let r0 = self.pos_r(n - z0);
        let mut out: [Vec<(i64, i64)>; 6] = Default::default();
        for i in 0..self.size_dr() {
            let k = i as i64;
            out[0].push((k, -self.pos_d_after(i) + 2 * k));
            out[1].push((k, self.pos_r_dr(i) - 1 - 2 * k));
        }
        for i in 0..self.size_dl() {
            let k = i as i64;
            out[2].push((k, self.pos_d_before(i) - 2 * k));
            out[3].push((k, -(self.ys.pos(L, i + 1) as i64) + 1 + 2 * k));
        }
        for i in 1..=self.size_ur() {
            let k = i as i64;
            out[4].push((k, self.pos_u_after(i) - u1 - 2 * k));
            out[5].push((k, self.pos_r(n - z0 + 1 - k) - r0 + 2 * k));
        }
        out
    }

    pub fn components(&self) -> [PointFamily; 6] {
        use FamilyKind::*;
        let kinds = [XDR, YDR, XDL, YDL, XUR, YUR];
        let ints = self.components_integer();
        let mut k = 0;
        ints.map(|v| {
            let fam = PointFamily {
                kind: kinds[k],
                points: v.into_iter().map(|(i, y)| (i as f64, y as f64)).collect(),
            };
            k += 1;
            fam
        })
    }

    /// Largest `|pos_D^{>z0}(i) + pos_R(i) - 1 - 4i|` over `1 <= i < |DR|`.
    pub fn dr_linear_deviation(&self) -> i64 {
        (1..self.size_dr())
            .map(|i| (self.pos_d_after(i) + self.pos_r(i as i64) - 1 - 4 * i as i64).abs())
            .max()
            .unwrap_or(0)
    }
}

/// A piecewise-linear function on `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Polyline {
    t: Vec<f64>,
    v: Vec<f64>,
}

impl Polyline {
    /// Breakpoints must start at `t = 0`, end at `t = 1` and increase strictly.
    pub fn new(breakpoints: Vec<(f64, f64)>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::DegenerateFamily("fewer than two breakpoints".into()));
        }
        let (t, v): (Vec<f64>, Vec<f64>) = breakpoints.into_iter().unzip();
        if t[0] != 0.0 || *t.last().unwrap() != 1.0 {
            return Err(Error::DegenerateFamily(
                "breakpoints must span [0, 1]".into(),
            ));
        }
        if t.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::DegenerateFamily(
                "breakpoints must increase strictly".into(),
            ));
        }
        Ok(Self { t, v })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, 1.0);
        let k = self.t.partition_point(|&s| s <= t);
        if k == self.t.len() {
            return *self.v.last().unwrap();
        }
        let (t0, t1) = (self.t[k - 1], self.t[k]);
        let (v0, v1) = (self.v[k - 1], self.v[k]);
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }

    pub fn breakpoints(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.t.iter().copied().zip(self.v.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

fn normalized_x(fam: &PointFamily) -> Result<Vec<f64>> {
    let pts = &fam.points;
    if pts.len() < 2 {
        return Err(Error::DegenerateFamily(format!(
            "{:?} has {} points",
            fam.kind,
            pts.len()
        )));
    }
    let x0 = pts[0].0;
    let span = pts[pts.len() - 1].0 - x0;
    if span <= 0.0 {
        return Err(Error::DegenerateFamily(format!(
            "{:?} has no x-extent",
            fam.kind
        )));
    }
    let m = pts.len() - 1;
    Ok(pts
        .iter()
        .enumerate()
        .map(|(k, &(x, _))| if k == m { 1.0 } else { (x - x0) / span })
        .collect())
}

/// `F`: interpolation of `((x_i - x_0)/(x_m - x_0), y_i / √m)`.
pub fn path_f(fam: &PointFamily) -> Result<Polyline> {
    let t = normalized_x(fam)?;
    let sm = ((fam.points.len() - 1) as f64).sqrt();
    Polyline::new(
        t.into_iter()
            .zip(fam.points.iter().map(|&(_, y)| y / sm))
            .collect(),
    )
}

/// `F_X`: interpolation of `((x_i - x_0)/(x_m - x_0), i/m)`.
pub fn path_fx(fam: &PointFamily) -> Result<Polyline> {
    let t = normalized_x(fam)?;
    let m = (fam.points.len() - 1) as f64;
    Polyline::new(
        t.into_iter()
            .enumerate()
            .map(|(i, t)| (t, i as f64 / m))
            .collect(),
    )
}

/// `F_Y`: interpolation of `(i/m, y_i / √m)`.
pub fn path_fy(fam: &PointFamily) -> Result<Polyline> {
    let len = fam.points.len();
    if len < 2 {
        return Err(Error::DegenerateFamily(format!(
            "{:?} has {len} points",
            fam.kind
        )));
    }
    let m = (len - 1) as f64;
    let sm = m.sqrt();
    Polyline::new(
        fam.points
            .iter()
            .enumerate()
            .map(|(i, &(_, y))| (if i == len - 1 { 1.0 } else { i as f64 / m }, y / sm))
            .collect(),
    )
}

/// `sup_t |F_X(t) - t|`, attained at a breakpoint. When
/// `|pos_D^{>z0}(i) + pos_R(i) - 1 - 4i| < E` this is below `2E / (4m - E)`.
pub fn fx_sup_deviation(fx: &Polyline) -> f64 {
    fx.breakpoints()
        .map(|(t, v)| (v - t).abs())
        .fold(0.0, f64::max)
}

/// Statistics compared against the Brownian limit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Moment {
    VarDR,
    VarDL,
    VarUR,
    CovDRDL,
    CovDRUR,
    CovDLUR,
}

impl Moment {
    pub const ALL: [Moment; 6] = [
        Moment::VarDR,
        Moment::VarDL,
        Moment::VarUR,
        Moment::CovDRDL,
        Moment::CovDRUR,
        Moment::CovDLUR,
    ];

    /// Path indices (0 = DR, 1 = DL, 2 = UR).
    fn paths(self) -> (usize, usize) {
        match self {
            Moment::VarDR => (0, 0),
            Moment::VarDL => (1, 1),
            Moment::VarUR => (2, 2),
            Moment::CovDRDL => (0, 1),
            Moment::CovDRUR => (0, 2),
            Moment::CovDLUR => (1, 2),
        }
    }

    /// Limit value at time `t` for `(B1+B2, B3+B1, B4+B2)`.
    pub fn target(self, t: f64) -> f64 {
        match self {
            Moment::VarDR | Moment::VarDL | Moment::VarUR => 2.0 * t,
            Moment::CovDRDL | Moment::CovDRUR => t,
            Moment::CovDLUR => 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentCell {
    pub moment: Moment,
    pub time: f64,
    pub target: f64,
    pub estimate: f64,
    pub stderr: f64,
    /// `|estimate - target| <= 4 stderr`.
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EndpointStats {
    pub n: usize,
    pub z0: usize,
    pub replicates: usize,
    pub times: Vec<f64>,
    pub cells: Vec<MomentCell>,
    /// Whether the 3x3 covariance matrix is positive semidefinite, per time.
    pub psd: Vec<bool>,
}

impl EndpointStats {
    pub fn cell(&self, moment: Moment, time: f64) -> Option<&MomentCell> {
        self.cells
            .iter()
            .find(|c| c.moment == moment && (c.time - time).abs() < 1e-12)
    }
}

/// `n/2 + 10 n^.6 < t_n <= n - n^.9`.
pub fn check_anchor_interval(n: usize, z0: usize) -> Result<()> {
    let nf = n as f64;
    if !(key_assumption_holds(n, z0) && z0 as f64 <= nf - nf.powf(0.9)) {
        return Err(Error::AnchorConstraint {
            n,
            z0,
            constraint: "n/2 + 10 n^.6 < z0 <= n - n^.9".into(),
        });
    }
    Ok(())
}

/// The three paths `F^{P^DR}, F^{P^DL}, F^{P^UR}` of replicate `index`.
pub fn replicate_paths(
    n: usize,
    z0: usize,
    seed: u64,
    index: u64,
    config: &SamplerConfig,
) -> Result<[Polyline; 3]> {
    let mut rng = replicate_rng(seed, index);
    let s = sample_regular_anchored(n, z0, config, &mut rng)?;
    let tables = FluctuationTables::new(&s.pair)?;
    let [a, b, c] = tables.rotated();
    Ok([path_f(&a)?, path_f(&b)?, path_f(&c)?])
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample covariance of `a` and `b` with the standard error of the mean of
/// the centered products.
pub fn covariance_with_se(a: &[f64], b: &[f64]) -> (f64, f64) {
    let r = a.len() as f64;
    let (ma, mb) = (mean(a), mean(b));
    let prods: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).collect();
    let m = mean(&prods);
    let var = prods.iter().map(|p| (p - m) * (p - m)).sum::<f64>() / (r - 1.0);
    (m * r / (r - 1.0), (var / r).sqrt())
}

fn psd3(c: [[f64; 3]; 3]) -> bool {
    let tol = 1e-9 * (1.0 + c[0][0].abs() + c[1][1].abs() + c[2][2].abs());
    let minors2 = [(0, 1), (0, 2), (1, 2)]
        .iter()
        .all(|&(i, j)| c[i][i] * c[j][j] - c[i][j] * c[j][i] >= -tol);
    let det = c[0][0] * (c[1][1] * c[2][2] - c[1][2] * c[2][1])
        - c[0][1] * (c[1][0] * c[2][2] - c[1][2] * c[2][0])
        + c[0][2] * (c[1][0] * c[2][1] - c[1][1] * c[2][0]);
    (0..3).all(|i| c[i][i] >= -tol) && minors2 && det >= -tol
}

/// Endpoint moments of the three rotated paths over `replicates`
/// independent samples conditioned on `z0 = t_n`.
pub fn endpoint_stats(
    n: usize,
    t_n: usize,
    times: &[f64],
    replicates: usize,
    seed: u64,
    config: &SamplerConfig,
) -> Result<EndpointStats> {
    check_anchor_interval(n, t_n)?;
    if replicates < 2 {
        return Err(Error::InvalidArgument(
            "need at least two replicates".into(),
        ));
    }
    let values: Vec<Vec<[f64; 3]>> = (0..replicates as u64)
        .into_par_iter()
        .map(|r| {
            let paths = replicate_paths(n, t_n, seed, r, config)?;
            Ok(times
                .iter()
                .map(|&t| [paths[0].eval(t), paths[1].eval(t), paths[2].eval(t)])
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut cells = Vec::new();
    let mut psd = Vec::new();
    for (k, &t) in times.iter().enumerate() {
        let col = |j: usize| -> Vec<f64> { values.iter().map(|v| v[k][j]).collect() };
        let cols = [col(0), col(1), col(2)];
        let mut cov = [[0.0; 3]; 3];
        for moment in Moment::ALL {
            let (i, j) = moment.paths();
            let (est, se) = covariance_with_se(&cols[i], &cols[j]);
            cov[i][j] = est;
            cov[j][i] = est;
            let target = moment.target(t);
            cells.push(MomentCell {
                moment,
                time: t,
                target,
                estimate: est,
                stderr: se,
                pass: (est - target).abs() <= 4.0 * se,
            });
        }
        psd.push(psd3(cov));
    }
    Ok(EndpointStats {
        n,
        z0: t_n,
        replicates,
        times: times.to_vec(),
        cells,
        psd,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::Regularity;

    #[test]
    fn key_assumption_examples() {
        assert!(extract_families(&Permutation::decreasing(4)).is_err());
        assert!(!key_assumption_holds(4, 4));
        assert!(key_assumption_holds(1_000_000, 700_000));
        assert!(check_anchor_interval(10_000, 7_000).is_err());
    }

    #[test]
    fn polyline_basics() {
        let p = Polyline::new(vec![(0.0, 0.0), (0.5, 1.0), (1.0, 0.0)]).unwrap();
        assert_eq!(p.eval(0.25), 0.5);
        assert_eq!(p.eval(1.0), 0.0);
        assert!(Polyline::new(vec![(0.0, 0.0), (0.0, 1.0), (1.0, 0.0)]).is_err());
        let flat = PointFamily {
            kind: FamilyKind::PDR,
            points: (0..5).map(|i| (i as f64, 0.0)).collect(),
        };
        let f = path_f(&flat).unwrap();
        assert!(f.breakpoints().all(|(_, v)| v == 0.0));
        let fx = path_fx(&flat).unwrap();
        assert!(fx_sup_deviation(&fx) < 1e-15);
        let pts = PointFamily {
            kind: FamilyKind::PDR,
            points: vec![(0.0, 0.0), (1.0, 3.0), (4.0, -1.0), (5.0, 2.0)],
        };
        assert_eq!(path_f(&pts).unwrap().eval(1.0), 2.0 / 3f64.sqrt());
    }

    #[test]
    fn formulas_match_geometry() {
        let n = 20_000;
        let cfg = SamplerConfig::with_regularity(Regularity::Constructive);
        for (k, z0) in [14_000usize, 15_500, 17_000].into_iter().enumerate() {
            let s = sample_regular_anchored(n, z0, &cfg, &mut replicate_rng(21, k as u64)).unwrap();
            let fam = extract_families(&s.perm).unwrap();
            let tables = FluctuationTables::new(&s.pair).unwrap();
            assert_eq!(fam.dr.points.len(), tables.size_dr());
            assert_eq!(fam.dl.points.len(), tables.size_dl());
            assert_eq!(fam.ur.points.len(), tables.size_ur());
            assert_eq!(fam.dr.points[0], (z0 as f64, 1.0));
            assert_eq!(fam.dl.points[0], (z0 as f64, 1.0));
            let geo = rotate_families(&fam, z0);
            let formula = tables.rotated();
            for (g, f) in geo.iter().zip(&formula) {
                assert_eq!(g.points.len(), f.points.len());
                // the UR formula keeps the first point's offset along the x-axis
                let dx = f.points[0].0 - g.points[0].0;
                for (a, b) in g.points.iter().zip(&f.points) {
                    assert!(
                        (a.0 + dx - b.0).abs() < 1e-6 && (a.1 - b.1).abs() < 1e-6,
                        "{a:?} {b:?}"
                    );
                }
                assert_eq!(f.points[0].1, 0.0);
            }
            let comps = tables.components_integer();
            let rot = tables.rotated_integer();
            for (fam_idx, (xc, yc)) in [(0, 1), (2, 3), (4, 5)].into_iter().enumerate() {
                for ((x, y), p) in comps[xc].iter().zip(&comps[yc]).zip(&rot[fam_idx]) {
                    assert_eq!(x.0, y.0);
                    assert_eq!(x.1 + y.1, p.1);
                }
            }
            assert_eq!(comps[0][0].1, 0);
            let e = 4.0 * (n as f64).powf(0.6) + 1.0;
            assert!((tables.dr_linear_deviation() as f64) < e);
            let m = (tables.size_dr() - 1) as f64;
            let fx = path_fx(&formula[0]).unwrap();
            assert!(fx_sup_deviation(&fx) <= 2.0 * e / (4.0 * m - e));
        }
    }
}
