//! Exhaustive generation of square permutations and the closed-form counts.

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::perm::{is_square, Permutation};

/// Largest size accepted by the exhaustive oracles (`10! ≈ 3.6e6`).
pub const MAX_EXHAUSTIVE: usize = 10;

/// Rearranges `xs` into the next permutation in lexicographic order,
/// returning false (and leaving `xs` sorted) after the last one.
pub fn next_permutation<T: Ord>(xs: &mut [T]) -> bool {
    if xs.len() < 2 {
        return false;
    }
    let mut i = xs.len() - 1;
    while i > 0 && xs[i - 1] >= xs[i] {
        i -= 1;
    }
    if i == 0 {
        xs.reverse();
        return false;
    }
    let mut j = xs.len() - 1;
    while xs[j] <= xs[i - 1] {
        j -= 1;
    }
    xs.swap(i - 1, j);
    xs[i..].reverse();
    true
}

/// Calls `f` on every permutation of `[n]` in lexicographic order.
pub fn for_each_permutation(n: usize, mut f: impl FnMut(&Permutation)) {
    let mut values: Vec<u32> = (1..=n as u32).collect();
    loop {
        f(&Permutation::from_values_unchecked(values.clone()));
        if !next_permutation(&mut values) {
            break;
        }
    }
}

fn guard(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::SizeOutOfRange {
            n,
            reason: "size must be at least 1",
        });
    }
    if n > MAX_EXHAUSTIVE {
        return Err(Error::SizeOutOfRange {
            n,
            reason: "exhaustive enumeration is limited to n <= 10",
        });
    }
    Ok(())
}

/// All of `Sq(n)`, sorted lexicographically.
pub fn enumerate_square(n: usize) -> Result<Vec<Permutation>> {
    guard(n)?;
    let mut out = Vec::new();
    for_each_permutation(n, |p| {
        if is_square(p) {
            out.push(p.clone());
        }
    });
    Ok(out)
}

fn check_formula_size(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::SizeOutOfRange {
            n,
            reason: "the closed form is stated for n >= 3",
        });
    }
    Ok(())
}

fn binomial_big(n: u64, k: u64) -> BigUint {
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// `2(n+2)4^{n-3} - 4(2n-5) C(2n-6, n-3)`.
pub fn count_square_formula(n: usize) -> Result<BigUint> {
    check_formula_size(n)?;
    let m = n as u64;
    let first = BigUint::from(2 * (m + 2)) << (2 * (m - 3)) as usize;
    let second = BigUint::from(4 * (2 * m - 5)) * binomial_big(2 * m - 6, m - 3);
    Ok(first - second)
}

/// Number of good anchored pairs of size `n`: `2(n+2)4^{n-3}`.
pub fn count_good_pairs(n: usize) -> Result<BigUint> {
    check_formula_size(n)?;
    let m = n as u64;
    Ok(BigUint::from(2 * (m + 2)) << (2 * (m - 3)) as usize)
}

/// The size-5 permutations that are not square.
pub fn non_square_patterns5() -> Vec<Permutation> {
    let mut out = Vec::new();
    for_each_permutation(5, |p| {
        if !is_square(p) {
            out.push(p.clone());
        }
    });
    out
}

/// Exact count of `Sq(n)` by brute force, as a big integer.
pub fn count_square_exhaustive(n: usize) -> Result<BigUint> {
    guard(n)?;
    let mut c = 0u64;
    for_each_permutation(n, |p| c += is_square(p) as u64);
    Ok(BigUint::from(c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formula_values() {
        let want = [6u32, 24, 104, 464, 2088, 9392, 42064];
        for (k, &w) in want.iter().enumerate() {
            assert_eq!(count_square_formula(k + 3).unwrap(), BigUint::from(w));
        }
        assert!(count_square_formula(2).is_err());
    }

    #[test]
    fn good_pair_values() {
        assert_eq!(count_good_pairs(3).unwrap(), BigUint::from(10u32));
        assert_eq!(count_good_pairs(4).unwrap(), BigUint::from(48u32));
        assert_eq!(count_good_pairs(6).unwrap(), BigUint::from(1024u32));
        // 4^{n-3} alone exceeds 128 bits here
        assert!(count_good_pairs(70).unwrap().bits() > 128);
    }

    #[test]
    fn small_enumerations() {
        assert_eq!(enumerate_square(3).unwrap().len(), 6);
        assert_eq!(enumerate_square(4).unwrap().len(), 24);
        let sq5 = enumerate_square(5).unwrap();
        assert_eq!(sq5.len(), 104);
        assert!(sq5.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(non_square_patterns5().len(), 16);
        assert!(enumerate_square(11).is_err());
        assert_eq!(enumerate_square(1).unwrap().len(), 1);
    }

    #[test]
    fn next_permutation_cycles() {
        let mut v = [1, 2, 3];
        let mut seen = vec![v];
        while next_permutation(&mut v) {
            seen.push(v);
        }
        assert_eq!(seen.len(), 6);
        assert_eq!(v, [1, 2, 3]);
        assert_eq!(seen[1], [1, 3, 2]);
    }
}
