//! Uniform good anchored pairs, rejection to regular pairs, and the
//! resulting (approximately uniform) square permutations.

use std::ops::AddAssign;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::encoding::{margin_holds, reconstruct_validated, AnchoredPair, Label, XLabel, YLabel};
use crate::enumeration::{enumerate_square, MAX_EXHAUSTIVE};
use crate::error::{Error, Result};
use crate::perm::Permutation;

/// Which pairs the rejection sampler accepts. Every policy also requires
/// that `ρ` builds a square permutation projecting back to the pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Regularity {
    /// Petrov conditions on all four letters and the `n^.9` margin.
    Strict,
    /// The `n^.9` margin only.
    Margin,
    /// No condition beyond a valid construction.
    Constructive,
    /// `Margin` when the margin interval is nonempty, else `Constructive`.
    #[default]
    Auto,
}

impl Regularity {
    /// Resolves `Auto` for size `n`.
    pub fn resolve(self, n: usize) -> Regularity {
        match self {
            Regularity::Auto => {
                if crate::encoding::margin_range(n).is_some() {
                    Regularity::Margin
                } else {
                    Regularity::Constructive
                }
            }
            r => r,
        }
    }

    fn needs_margin(self) -> bool {
        matches!(self, Regularity::Strict | Regularity::Margin)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub regularity: Regularity,
    pub max_attempts: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            regularity: Regularity::Auto,
            max_attempts: 1_000_000,
        }
    }
}

impl SamplerConfig {
    pub fn with_regularity(regularity: Regularity) -> Self {
        Self {
            regularity,
            ..Self::default()
        }
    }
}

/// Rejection counts; `attempts` is the sum of the other five fields.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerStats {
    pub attempts: u64,
    pub accepts: u64,
    pub rejects_anchor_label: u64,
    pub rejects_margin: u64,
    pub rejects_petrov: u64,
    pub rejects_construction: u64,
}

impl AddAssign for SamplerStats {
    fn add_assign(&mut self, o: Self) {
        self.attempts += o.attempts;
        self.accepts += o.accepts;
        self.rejects_anchor_label += o.rejects_anchor_label;
        self.rejects_margin += o.rejects_margin;
        self.rejects_petrov += o.rejects_petrov;
        self.rejects_construction += o.rejects_construction;
    }
}

/// Outcome of one proposal of the rejection sampler.
#[derive(Clone, Debug, PartialEq)]
pub enum Trial {
    AnchorLabel,
    Margin,
    Petrov,
    Construction(Error),
    Accepted(Box<(AnchoredPair, Permutation)>),
}

impl SamplerStats {
    pub fn record(&mut self, t: &Trial) {
        self.attempts += 1;
        match t {
            Trial::AnchorLabel => self.rejects_anchor_label += 1,
            Trial::Margin => self.rejects_margin += 1,
            Trial::Petrov => self.rejects_petrov += 1,
            Trial::Construction(_) => self.rejects_construction += 1,
            Trial::Accepted(_) => self.accepts += 1,
        }
    }
}

/// Uniform labels with both ends set to the primary letter.
pub fn random_labels<L: Label, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<L> {
    let mut out = Vec::with_capacity(n);
    let mut bits = 0u64;
    for k in 0..n {
        if k % 64 == 0 {
            bits = rng.next_u64();
        }
        out.push(L::from_primary(bits & 1 == 1));
        bits >>= 1;
    }
    if n > 0 {
        out[0] = L::PRIMARY;
        out[n - 1] = L::PRIMARY;
    }
    out
}

fn check_size(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::SizeOutOfRange {
            n,
            reason: "samplers need n >= 3",
        });
    }
    if n > u32::MAX as usize {
        return Err(Error::SizeOutOfRange {
            n,
            reason: "values are stored as u32",
        });
    }
    Ok(())
}

/// A uniformly random good anchored pair: `X`, `Y` and `z0` uniform with
/// the forced end labels, redrawn until `X_{z0} = D`.
pub fn sample_good<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<AnchoredPair> {
    check_size(n)?;
    loop {
        let z0 = rng.random_range(1..=n);
        let x: Vec<XLabel> = random_labels(n, rng);
        if x[z0 - 1] != XLabel::D {
            continue;
        }
        let y: Vec<YLabel> = random_labels(n, rng);
        return AnchoredPair::new(x, y, z0);
    }
}

/// One proposal: draw `z0`, check the margin, draw `X` and check
/// `X_{z0} = D`, draw `Y`, check Petrov, then build and validate `ρ`.
/// With `z0` fixed, `X_{z0}` is set to `D` instead of rejected on.
pub fn trial<R: Rng + ?Sized>(
    n: usize,
    fixed_z0: Option<usize>,
    regularity: Regularity,
    rng: &mut R,
) -> Trial {
    let policy = regularity.resolve(n);
    let z0 = fixed_z0.unwrap_or_else(|| rng.random_range(1..=n));
    if policy.needs_margin() && !margin_holds(n, z0) {
        return Trial::Margin;
    }
    let mut x: Vec<XLabel> = random_labels(n, rng);
    if fixed_z0.is_some() {
        x[z0 - 1] = XLabel::D;
    } else if x[z0 - 1] != XLabel::D {
        return Trial::AnchorLabel;
    }
    let y: Vec<YLabel> = random_labels(n, rng);
    let pair = AnchoredPair::new(x, y, z0).expect("sizes agree by construction");
    if policy == Regularity::Strict && !pair.satisfies_petrov() {
        return Trial::Petrov;
    }
    match reconstruct_validated(&pair) {
        Ok(p) => Trial::Accepted(Box::new((pair, p))),
        Err(e) => Trial::Construction(e),
    }
}

/// An accepted pair, its permutation, and the rejections on the way.
#[derive(Clone, Debug)]
pub struct RegularSample {
    pub pair: AnchoredPair,
    pub perm: Permutation,
    pub stats: SamplerStats,
}

fn run<R: Rng + ?Sized>(
    n: usize,
    fixed_z0: Option<usize>,
    config: &SamplerConfig,
    rng: &mut R,
) -> Result<RegularSample> {
    check_size(n)?;
    if let Some(z0) = fixed_z0 {
        if z0 == 0 || z0 > n {
            return Err(Error::AnchorConstraint {
                n,
                z0,
                constraint: "1 <= z0 <= n".into(),
            });
        }
        if config.regularity.resolve(n).needs_margin() && !margin_holds(n, z0) {
            return Err(Error::AnchorConstraint {
                n,
                z0,
                constraint: "n^.9 <= z0 <= n - n^.9".into(),
            });
        }
    }
    let mut stats = SamplerStats::default();
    while stats.attempts < config.max_attempts {
        let t = trial(n, fixed_z0, config.regularity, rng);
        stats.record(&t);
        if let Trial::Accepted(b) = t {
            let (pair, perm) = *b;
            return Ok(RegularSample { pair, perm, stats });
        }
    }
    Err(Error::AttemptCapExceeded {
        n,
        attempts: stats.attempts,
    })
}

/// A uniform element of the accepted set, with rejection statistics.
pub fn sample_regular<R: Rng + ?Sized>(
    n: usize,
    config: &SamplerConfig,
    rng: &mut R,
) -> Result<RegularSample> {
    run(n, None, config, rng)
}

/// Like [`sample_regular`], conditioned on the anchor `z0`.
pub fn sample_regular_anchored<R: Rng + ?Sized>(
    n: usize,
    z0: usize,
    config: &SamplerConfig,
    rng: &mut R,
) -> Result<RegularSample> {
    run(n, Some(z0), config, rng)
}

/// `ρ` of a uniform accepted pair, using the default configuration.
pub fn sample_square_approx<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Permutation> {
    Ok(sample_regular(n, &SamplerConfig::default(), rng)?.perm)
}

/// Exactly uniform sampling from the full list of `Sq(n)`, `n <= 10`.
#[derive(Clone, Debug)]
pub struct ExactSquareSampler {
    all: Vec<Permutation>,
}

impl ExactSquareSampler {
    pub fn new(n: usize) -> Result<Self> {
        if n > MAX_EXHAUSTIVE {
            return Err(Error::SizeOutOfRange {
                n,
                reason: "exact sampling enumerates Sq(n), n <= 10",
            });
        }
        Ok(Self {
            all: enumerate_square(n)?,
        })
    }

    pub fn support(&self) -> &[Permutation] {
        &self.all
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Permutation {
        self.all[rng.random_range(0..self.all.len())].clone()
    }

    /// Index of the draw in [`support`](Self::support).
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        rng.random_range(0..self.all.len())
    }
}

pub fn sample_square_exact<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Permutation> {
    Ok(ExactSquareSampler::new(n)?.sample(rng))
}

/// The generator for replicate `index` under `master`: one ChaCha stream
/// per replicate, so results do not depend on scheduling.
pub fn replicate_rng(master: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn good_pairs_are_good() {
        let mut rng = replicate_rng(1, 0);
        for n in 3..30 {
            for _ in 0..20 {
                let q = sample_good(n, &mut rng).unwrap();
                assert!(q.is_good());
            }
        }
        assert!(sample_good(2, &mut rng).is_err());
    }

    #[test]
    fn stats_add_up() {
        let mut rng = replicate_rng(2, 0);
        let s = sample_regular(200, &SamplerConfig::default(), &mut rng).unwrap();
        let st = s.stats;
        assert_eq!(
            st.attempts,
            st.accepts
                + st.rejects_anchor_label
                + st.rejects_margin
                + st.rejects_petrov
                + st.rejects_construction
        );
        assert_eq!(st.accepts, 1);
        assert_eq!(crate::encoding::project(&s.perm).unwrap(), s.pair);
    }

    #[test]
    fn strict_at_three_hits_the_cap() {
        let mut rng = replicate_rng(3, 0);
        let cfg = SamplerConfig {
            regularity: Regularity::Strict,
            max_attempts: 1000,
        };
        assert_eq!(
            sample_regular(3, &cfg, &mut rng).unwrap_err(),
            Error::AttemptCapExceeded {
                n: 3,
                attempts: 1000
            }
        );
    }

    #[test]
    fn anchored_margin_violation() {
        let mut rng = replicate_rng(4, 0);
        let cfg = SamplerConfig::with_regularity(Regularity::Margin);
        assert!(matches!(
            sample_regular_anchored(100_000, 5, &cfg, &mut rng),
            Err(Error::AnchorConstraint { .. })
        ));
        let s = sample_regular_anchored(100_000, 50_000, &cfg, &mut rng).unwrap();
        assert_eq!(s.pair.z0(), 50_000);
    }

    #[test]
    fn deterministic_streams() {
        let a = sample_square_approx(500, &mut replicate_rng(9, 4)).unwrap();
        let b = sample_square_approx(500, &mut replicate_rng(9, 4)).unwrap();
        let c = sample_square_approx(500, &mut replicate_rng(9, 5)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn exact_guard() {
        let mut rng = replicate_rng(5, 0);
        assert!(sample_square_exact(11, &mut rng).is_err());
        assert_eq!(ExactSquareSampler::new(3).unwrap().support().len(), 6);
    }
}
