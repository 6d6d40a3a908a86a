//! The empirical permuton `μ_σ`, the rectangle permuton `μ^z`, and the
//! box distance between them on a grid.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::Permutation;

/// The closed rectangle `[a, b] x [c, d]` inside the unit square.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Rect {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let ok =
            |lo: f64, hi: f64| (0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi) && lo <= hi;
        if !ok(a, b) || !ok(c, d) {
            return Err(Error::InvalidArgument(format!(
                "rectangle [{a}, {b}] x [{c}, {d}] not inside the unit square"
            )));
        }
        Ok(Self { a, b, c, d })
    }

    pub const UNIT: Rect = Rect {
        a: 0.0,
        b: 1.0,
        c: 0.0,
        d: 1.0,
    };
}

fn overlap(lo1: f64, hi1: f64, lo2: f64, hi2: f64) -> f64 {
    (hi1.min(hi2) - lo1.max(lo2)).max(0.0)
}

/// `μ_σ(R)`: each point `(i, σ(i))` spreads mass 1/n uniformly over its cell
/// `[(i-1)/n, i/n] x [(σ(i)-1)/n, σ(i)/n]`.
pub fn mu_sigma_rect(p: &Permutation, r: &Rect) -> f64 {
    let n = p.len();
    let nf = n as f64;
    let first = ((r.a * nf).floor() as usize).max(1).min(n);
    let last = ((r.b * nf).ceil() as usize).clamp(1, n);
    let mut mass = 0.0;
    for i in first..=last {
        let ox = overlap((i - 1) as f64 / nf, i as f64 / nf, r.a, r.b);
        if ox == 0.0 {
            continue;
        }
        let v = p.value(i) as f64;
        let oy = overlap((v - 1.0) / nf, v / nf, r.c, r.d);
        mass += nf * ox * oy;
    }
    mass
}

/// The four segments of `μ^z` as `(slope, intercept, x_start, x_end)`.
fn segments(z: f64) -> [(f64, f64, f64, f64); 4] {
    [
        (-1.0, z, 0.0, z),
        (1.0, z, 0.0, 1.0 - z),
        (1.0, -z, z, 1.0),
        (-1.0, 2.0 - z, 1.0 - z, 1.0),
    ]
}

/// The permuton `μ^z`: uniform mass on the boundary of the rectangle with
/// corners `(0,z), (z,0), (1,1-z), (1-z,1)`, half the x-length per segment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RectPermuton {
    pub z: f64,
}

impl RectPermuton {
    pub fn new(z: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&z) {
            return Err(Error::InvalidArgument(format!("z = {z} outside [0, 1]")));
        }
        Ok(Self { z })
    }

    pub fn rect(&self, r: &Rect) -> f64 {
        mu_z_rect(self.z, r)
    }

    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        sample_point_mu_z(self.z, rng)
    }
}

/// `μ^z(R)` by clipping each segment against `R`.
pub fn mu_z_rect(z: f64, r: &Rect) -> f64 {
    let mut mass = 0.0;
    for (m, q, x0, x1) in segments(z) {
        // x-range on which m x + q lies in [c, d]
        let (ya, yb) = ((r.c - q) * m, (r.d - q) * m);
        let (lo, hi) = if ya <= yb { (ya, yb) } else { (yb, ya) };
        let lo = lo.max(x0).max(r.a);
        let hi = hi.min(x1).min(r.b);
        if hi > lo {
            mass += 0.5 * (hi - lo);
        }
    }
    mass
}

/// Corner values of the distribution function of `μ_σ` on a `G x G` grid,
/// kept exactly as integers over the denominator `n G²`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridCdf {
    g: usize,
    n: usize,
    units: Vec<u64>,
}

impl GridCdf {
    pub fn new(p: &Permutation, g: usize) -> Result<Self> {
        if g == 0 {
            return Err(Error::InvalidArgument("grid size must be positive".into()));
        }
        let n = p.len();
        let (n64, g64) = (n as u64, g as u64);
        // coordinates scaled by nG: cell i is [(i-1)G, iG], grid line k is at k n
        let spans = |lo: u64, hi: u64| {
            let first = (lo / n64) as usize;
            let last = (hi.div_ceil(n64) as usize).min(g);
            (first..last).filter_map(move |k| {
                let o = hi
                    .min((k as u64 + 1) * n64)
                    .saturating_sub(lo.max(k as u64 * n64));
                (o > 0).then_some((k, o))
            })
        };
        let w = g + 1;
        let mut cells = vec![0u64; w * w];
        for i in 1..=n {
            let v = p.value(i) as u64;
            let (x0, x1) = ((i as u64 - 1) * g64, i as u64 * g64);
            let (y0, y1) = ((v - 1) * g64, v * g64);
            for (gx, ox) in spans(x0, x1) {
                for (gy, oy) in spans(y0, y1) {
                    cells[(gx + 1) * w + gy + 1] += ox * oy;
                }
            }
        }
        for a in 1..=g {
            for b in 1..=g {
                cells[a * w + b] +=
                    cells[(a - 1) * w + b] + cells[a * w + b - 1] - cells[(a - 1) * w + b - 1];
            }
        }
        Ok(Self { g, n, units: cells })
    }

    pub fn resolution(&self) -> usize {
        self.g
    }

    /// Common denominator `n G²` of the table entries.
    pub fn denominator(&self) -> u64 {
        (self.n * self.g * self.g) as u64
    }

    /// `μ_σ([0, a/G] x [0, b/G])` as a numerator over [`denominator`](Self::denominator).
    pub fn units(&self, a: usize, b: usize) -> u64 {
        self.units[a * (self.g + 1) + b]
    }

    pub fn value(&self, a: usize, b: usize) -> f64 {
        self.units(a, b) as f64 / self.denominator() as f64
    }

    /// Mass of `[a1/G, a2/G] x [b1/G, b2/G]` by inclusion-exclusion.
    pub fn rect_units(&self, a1: usize, a2: usize, b1: usize, b2: usize) -> u64 {
        self.units(a2, b2) + self.units(a1, b1) - self.units(a1, b2) - self.units(a2, b1)
    }
}

/// `max |μ_σ(R) - μ^z(R)|` over rectangles with corners on the `G x G` grid.
/// The supremum over all rectangles exceeds this by at most `4/G`.
pub fn box_distance_grid(p: &Permutation, z: f64, g: usize) -> Result<f64> {
    if g < 2 {
        return Err(Error::InvalidArgument(
            "grid size must be at least 2".into(),
        ));
    }
    let cdf = GridCdf::new(p, g)?;
    Ok(box_distance_from_cdf(&cdf, z))
}

pub fn box_distance_from_cdf(cdf: &GridCdf, z: f64) -> f64 {
    let g = cdf.resolution();
    let gf = g as f64;
    let w = g + 1;
    let mut diff = vec![0.0; w * w];
    for a in 0..=g {
        for b in 0..=g {
            let r = Rect {
                a: 0.0,
                b: a as f64 / gf,
                c: 0.0,
                d: b as f64 / gf,
            };
            diff[a * w + b] = cdf.value(a, b) - mu_z_rect(z, &r);
        }
    }
    let mut best: f64 = 0.0;
    let mut col = vec![0.0; w];
    for a1 in 0..g {
        for a2 in a1 + 1..=g {
            for (b, c) in col.iter_mut().enumerate() {
                *c = diff[a2 * w + b] - diff[a1 * w + b];
            }
            let (lo, hi) = col
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &c| {
                    (lo.min(c), hi.max(c))
                });
            best = best.max(hi - lo);
        }
    }
    best
}

/// One point of `μ^z`: a segment chosen by mass, then uniform along it.
pub fn sample_point_mu_z<R: Rng + ?Sized>(z: f64, rng: &mut R) -> (f64, f64) {
    let u: f64 = rng.random();
    let k = if u < z / 2.0 {
        0
    } else if u < 0.5 {
        1
    } else if u < 1.0 - z / 2.0 {
        2
    } else {
        3
    };
    let (m, q, x0, x1) = segments(z)[k];
    let x = x0 + (x1 - x0) * rng.random::<f64>();
    (x, m * x + q)
}

/// The pattern of `k` independent points of `μ^z`.
pub fn sample_pattern_mu_z<R: Rng + ?Sized>(z: f64, k: usize, rng: &mut R) -> Permutation {
    let mut pts: Vec<(f64, f64)> = Vec::with_capacity(k);
    while pts.len() < k {
        let pt = sample_point_mu_z(z, rng);
        if pts.iter().all(|&(x, y)| x != pt.0 && y != pt.1) {
            pts.push(pt);
        }
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| pts[i].1.total_cmp(&pts[j].1));
    let mut values = vec![0u32; k];
    for (r, &i) in order.iter().enumerate() {
        values[i] = r as u32 + 1;
    }
    Permutation::from_values_unchecked(values)
}

/// Monte Carlo estimate of `Λ_π(μ^z)`, the probability that `|π|` points of
/// `μ^z` form `π`, with its standard error.
pub fn lambda_estimate<R: Rng + ?Sized>(
    pi: &Permutation,
    z: f64,
    trials: u64,
    rng: &mut R,
) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be positive".into()));
    }
    let k = pi.len();
    let hits = (0..trials)
        .filter(|_| sample_pattern_mu_z(z, k, rng) == *pi)
        .count() as f64;
    let m = trials as f64;
    let p = hits / m;
    Ok((p, (p * (1.0 - p) / m).sqrt()))
}
