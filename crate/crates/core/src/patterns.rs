//! Classical and consecutive pattern proportions.

use num_rational::Ratio;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::perm::{standardize, Permutation};

/// Default bound on `C(n,k)·k` for exact occurrence counting.
pub const DEFAULT_WORK_BOUND: u128 = 10_000_000;

/// A pattern proportion, either counted exactly or estimated by sampling.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Proportion {
    Exact {
        #[serde(serialize_with = "crate::ser_ratio")]
        value: Ratio<u64>,
    },
    MonteCarlo {
        estimate: f64,
        stderr: f64,
        samples: u64,
    },
}

impl Proportion {
    pub fn value(&self) -> f64 {
        match self {
            Proportion::Exact { value } => *value.numer() as f64 / *value.denom() as f64,
            Proportion::MonteCarlo { estimate, .. } => *estimate,
        }
    }

    pub fn stderr(&self) -> f64 {
        match self {
            Proportion::Exact { .. } => 0.0,
            Proportion::MonteCarlo { stderr, .. } => *stderr,
        }
    }

    pub fn exact(&self) -> Option<Ratio<u64>> {
        match self {
            Proportion::Exact { value } => Some(*value),
            Proportion::MonteCarlo { .. } => None,
        }
    }
}

/// `C(n, k)` saturating at `u128::MAX`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

fn check_sizes(pi: &Permutation, p: &Permutation) -> Result<()> {
    if pi.len() > p.len() {
        return Err(Error::PatternTooLong {
            pattern: pi.len(),
            size: p.len(),
        });
    }
    Ok(())
}

/// Number of inversions, by a Fenwick tree over values.
pub fn inversions(p: &Permutation) -> u64 {
    let n = p.len();
    let mut tree = vec![0u32; n + 1];
    let mut inv = 0u64;
    for (seen, &v) in p.values().iter().enumerate() {
        let mut smaller_or_equal = 0u64;
        let mut k = v as usize;
        while k > 0 {
            smaller_or_equal += tree[k] as u64;
            k &= k - 1;
        }
        inv += seen as u64 - smaller_or_equal;
        let mut k = v as usize;
        while k <= n {
            tree[k] += 1;
            k += k & k.wrapping_neg();
        }
    }
    inv
}

fn count_occurrences(pi: &Permutation, p: &Permutation) -> u64 {
    let k = pi.len();
    let n = p.len();
    match k {
        1 => return n as u64,
        2 => {
            let inv = inversions(p);
            let pairs = (n as u64) * (n as u64 - 1) / 2;
            return if pi.value(1) == 1 { pairs - inv } else { inv };
        }
        _ => {}
    }
    let vals = p.values();
    let target = pi.values();
    let mut idx: Vec<usize> = (0..k).collect();
    let mut buf = vec![0u32; k];
    let mut count = 0u64;
    loop {
        for (b, &i) in buf.iter_mut().zip(&idx) {
            *b = vals[i];
        }
        if standardize(&buf).values() == target {
            count += 1;
        }
        // advance to the next k-subset in lexicographic order
        let mut t = k;
        loop {
            if t == 0 {
                return count;
            }
            t -= 1;
            if idx[t] < n - k + t {
                break;
            }
        }
        idx[t] += 1;
        for u in t + 1..k {
            idx[u] = idx[u - 1] + 1;
        }
    }
}

/// Exact `occ(π, σ)` when `C(n,k)·k` is within `bound`. Patterns of size
/// one and two are always exact (via inversion counting).
pub fn occ_exact(pi: &Permutation, p: &Permutation, bound: u128) -> Result<Ratio<u64>> {
    check_sizes(pi, p)?;
    let (n, k) = (p.len() as u64, pi.len() as u64);
    let total = binomial(n, k);
    let work = total.saturating_mul(k as u128);
    if k > 2 && work > bound {
        return Err(Error::WorkBoundExceeded { work, bound });
    }
    let total = u64::try_from(total).map_err(|_| Error::WorkBoundExceeded {
        work,
        bound: u64::MAX as u128,
    })?;
    Ok(Ratio::new(count_occurrences(pi, p), total))
}

/// Unbiased estimate of `occ(π, σ)` from uniformly drawn `k`-subsets.
pub fn occ_sampled<R: Rng + ?Sized>(
    pi: &Permutation,
    p: &Permutation,
    samples: u64,
    rng: &mut R,
) -> Result<Proportion> {
    check_sizes(pi, p)?;
    if samples == 0 {
        return Err(Error::InvalidArgument(
            "sample count must be positive".into(),
        ));
    }
    let (n, k) = (p.len(), pi.len());
    let vals = p.values();
    let mut hits = 0u64;
    let mut buf = vec![0u32; k];
    for _ in 0..samples {
        let mut idx = rand::seq::index::sample(rng, n, k).into_vec();
        idx.sort_unstable();
        for (b, &i) in buf.iter_mut().zip(&idx) {
            *b = vals[i];
        }
        if standardize(&buf) == *pi {
            hits += 1;
        }
    }
    let m = samples as f64;
    let est = hits as f64 / m;
    Ok(Proportion::MonteCarlo {
        estimate: est,
        stderr: (est * (1.0 - est) / m).sqrt(),
        samples,
    })
}

/// `occ(π, σ)`: exact under [`DEFAULT_WORK_BOUND`], otherwise sampled when
/// `samples` is given, otherwise an error.
pub fn occ_proportion<R: Rng + ?Sized>(
    pi: &Permutation,
    p: &Permutation,
    samples: Option<u64>,
    rng: &mut R,
) -> Result<Proportion> {
    match occ_exact(pi, p, DEFAULT_WORK_BOUND) {
        Ok(value) => Ok(Proportion::Exact { value }),
        Err(Error::WorkBoundExceeded { work, bound }) => match samples {
            Some(m) => occ_sampled(pi, p, m, rng),
            None => Err(Error::WorkBoundExceeded { work, bound }),
        },
        Err(e) => Err(e),
    }
}

/// Number of windows `[i, i+k-1]` whose pattern is `π`.
pub fn consecutive_count(pi: &Permutation, p: &Permutation) -> u64 {
    let k = pi.len();
    if k > p.len() {
        return 0;
    }
    p.values()
        .windows(k)
        .filter(|w| standardize(w) == *pi)
        .count() as u64
}

/// `c̃oc(π, σ)`: matching windows divided by `n`.
pub fn coc_proportion(pi: &Permutation, p: &Permutation) -> Result<Ratio<u64>> {
    check_sizes(pi, p)?;
    Ok(Ratio::new(consecutive_count(pi, p), p.len() as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn perm(s: &str) -> Permutation {
        Permutation::parse(s).unwrap()
    }

    #[test]
    fn occ_small_values() {
        assert_eq!(
            occ_exact(&perm("12"), &perm("2413"), DEFAULT_WORK_BOUND).unwrap(),
            Ratio::new(1, 2)
        );
        assert_eq!(
            occ_exact(&perm("1"), &perm("2413"), DEFAULT_WORK_BOUND).unwrap(),
            Ratio::from_integer(1)
        );
        // 2413 contains 231 at {1,2,3}, 132 at {1,2,4}, 213 at {1,3,4}, 312 at {2,3,4}
        for (pat, want) in [("231", 1), ("132", 1), ("213", 1), ("312", 1), ("123", 0)] {
            assert_eq!(
                occ_exact(&perm(pat), &perm("2413"), DEFAULT_WORK_BOUND).unwrap(),
                Ratio::new(want, 4),
                "{pat}"
            );
        }
    }

    #[test]
    fn occ_errors() {
        assert!(matches!(
            occ_exact(&perm("1234"), &perm("213"), DEFAULT_WORK_BOUND),
            Err(Error::PatternTooLong { .. })
        ));
        let big = Permutation::identity(2000);
        let err = occ_exact(&perm("132"), &big, DEFAULT_WORK_BOUND).unwrap_err();
        assert!(matches!(err, Error::WorkBoundExceeded { .. }));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(occ_proportion(&perm("132"), &big, None, &mut rng).is_err());
        let est = occ_proportion(&perm("123"), &big, Some(1000), &mut rng).unwrap();
        assert_eq!(est.value(), 1.0);
    }

    #[test]
    fn inversions_match_brute_force() {
        let p = perm("31524");
        let brute = (0..5)
            .flat_map(|i| (i + 1..5).map(move |j| (i, j)))
            .filter(|&(i, j)| p.values()[i] > p.values()[j])
            .count() as u64;
        assert_eq!(inversions(&p), brute);
        assert_eq!(inversions(&Permutation::decreasing(10)), 45);
    }

    #[test]
    fn sampled_estimate_is_close() {
        let p = perm("2413");
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let est = occ_sampled(&perm("12"), &p, 20_000, &mut rng).unwrap();
        assert!((est.value() - 0.5).abs() < 4.0 * est.stderr());
    }

    #[test]
    fn coc_values() {
        assert_eq!(
            coc_proportion(&perm("21"), &perm("2413")).unwrap(),
            Ratio::new(1, 4)
        );
        assert_eq!(
            coc_proportion(&perm("321"), &perm("1532467")).unwrap(),
            Ratio::new(1, 7)
        );
        assert_eq!(
            coc_proportion(&perm("12"), &Permutation::identity(9)).unwrap(),
            Ratio::new(8, 9)
        );
        assert_eq!(
            coc_proportion(&perm("1"), &perm("2413")).unwrap(),
            Ratio::from_integer(1)
        );
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(6, 3), 20);
        assert_eq!(binomial(4, 0), 1);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(60, 30), 118264581564861424);
    }
}
