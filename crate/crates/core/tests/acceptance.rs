//! Acceptance checks. Each test writes one `criterion N: PASS|FAIL` line to
//! stdout (uncaptured) and then asserts.

use std::collections::HashSet;
use std::io::Write;
use std::time::Instant;

use num_bigint::BigUint;
use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sqperm_core::encoding::{band_report, margin_holds, project};
use sqperm_core::enumeration::{count_square_exhaustive, enumerate_square, for_each_permutation};
use sqperm_core::fluctuations::{endpoint_stats, Moment};
use sqperm_core::local::{
    build_psi, e_counts, e_counts_brute, empirical_window_distribution, limit_p, Case, LocalView,
    Roots,
};
use sqperm_core::patterns::occ_exact;
use sqperm_core::permuton::box_distance_grid;
use sqperm_core::sampler::{
    replicate_rng, sample_regular, sample_regular_anchored, trial, Regularity, SamplerConfig, Trial,
};
use sqperm_core::{count_square_formula, Permutation};

const SEED: u64 = 0x5150_2024;

fn report(k: u8, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    writeln!(out, "criterion {k:>2}: {verdict}  {detail}").unwrap();
    out.flush().unwrap();
    assert!(pass, "criterion {k} failed: {detail}");
}

fn perm(s: &str) -> Permutation {
    Permutation::parse(s).unwrap()
}

fn constructive() -> SamplerConfig {
    SamplerConfig::with_regularity(Regularity::Constructive)
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

/// Samples of size `n` with `z0` stratified over `(0, 1)`.
fn stratified(n: usize, count: usize, seed: u64) -> Vec<Permutation> {
    (0..count)
        .into_par_iter()
        .map(|k| {
            let z0 = (((k as f64 + 0.5) * n as f64 / count as f64) as usize).clamp(1, n);
            sample_regular_anchored(n, z0, &constructive(), &mut replicate_rng(seed, k as u64))
                .unwrap()
                .perm
        })
        .collect()
}

/// Inversions by merge sort.
fn inversions_merge(v: &mut [u32]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let (a, b) = v.split_at_mut(n / 2);
    let mut inv = inversions_merge(a) + inversions_merge(b);
    let (mut i, mut j) = (0, 0);
    let mut merged = Vec::with_capacity(n);
    while i < a.len() && j < b.len() {
        if a[i] < b[j] {
            merged.push(a[i]);
            i += 1;
        } else {
            inv += (a.len() - i) as u64;
            merged.push(b[j]);
            j += 1;
        }
    }
    merged.extend_from_slice(&a[i..]);
    merged.extend_from_slice(&b[j..]);
    v.copy_from_slice(&merged);
    inv
}

#[test]
fn criterion_01_enumeration() {
    let start = Instant::now();
    let known = [6u64, 24, 104, 464, 2088, 9392, 42064];
    let mut ok = true;
    for (n, &k) in (3..=9).zip(&known) {
        let ex = count_square_exhaustive(n).unwrap();
        let fo = count_square_formula(n).unwrap();
        ok &= ex == fo && ex == BigUint::from(k);
    }
    let secs = start.elapsed().as_secs_f64();
    report(
        1,
        ok && secs < 60.0,
        &format!("exhaustive = formula = 6..42064 for n in 3..=9 in {secs:.1}s"),
    );
}

#[test]
fn criterion_02_round_trips() {
    let target = 10_000;
    let mut lines = Vec::new();
    let mut ok = true;
    for (k, (n, policy)) in [
        (1_000usize, Regularity::Constructive),
        (10_000, Regularity::Margin),
        (100_000, Regularity::Margin),
    ]
    .into_iter()
    .enumerate()
    {
        let mut rng = replicate_rng(SEED, 200 + k as u64);
        let (mut reached, mut failures) = (0, 0);
        while reached < target {
            match trial(n, None, policy, &mut rng) {
                Trial::Accepted(b) => {
                    reached += 1;
                    if project(&b.1).as_ref() != Ok(&b.0) {
                        failures += 1;
                    }
                }
                Trial::Construction(_) => {
                    reached += 1;
                    failures += 1;
                }
                _ => {}
            }
        }
        ok &= failures == 0;
        lines.push(format!("n={n} ({policy:?}): {failures}/{target} failures"));
    }
    report(2, ok, &lines.join("; "));
}

#[test]
fn criterion_03_injectivity() {
    let mut collisions = 0;
    for n in 1..=8 {
        let all = enumerate_square(n).unwrap();
        let images: HashSet<_> = all.iter().map(|p| project(p).unwrap()).collect();
        collisions += all.len() - images.len();
    }
    report(
        3,
        collisions == 0,
        &format!("{collisions} collisions over Sq(1..=8)"),
    );
}

#[test]
fn criterion_04_regularity_rate() {
    let n = 100_000;
    let trials = 10_000;
    let mut rng = replicate_rng(SEED, 400);
    let (mut margin, mut reached_petrov, mut petrov) = (0u64, 0u64, 0u64);
    for _ in 0..trials {
        match trial(n, None, Regularity::Strict, &mut rng) {
            Trial::Margin => margin += 1,
            Trial::AnchorLabel => {}
            Trial::Petrov => {
                reached_petrov += 1;
                petrov += 1;
            }
            _ => reached_petrov += 1,
        }
    }
    let exact = (2.0 * (n as f64).powf(0.9).ceil() - 2.0) / n as f64;
    let direct = (1..=n).filter(|&z| !margin_holds(n, z)).count() as f64 / n as f64;
    let freq = margin as f64 / trials as f64;
    let petrov_freq = petrov as f64 / reached_petrov.max(1) as f64;
    let ok = (freq - exact).abs() <= 0.02 && petrov_freq < 1e-3;
    report(
        4,
        ok,
        &format!(
            "margin rejection {freq:.4} vs {exact:.5} (direct count {direct:.5}); \
             Petrov rejection {petrov}/{reached_petrov} = {petrov_freq:.4} (needs < 0.001)"
        ),
    );
}

#[test]
fn criterion_05_diagonal_bands() {
    let mut lines = Vec::new();
    let mut violations = 0;
    for (n, count) in [(1_000usize, 200u64), (100_000, 20)] {
        let cfg = SamplerConfig::default();
        let v: usize = (0..count)
            .into_par_iter()
            .map(|r| {
                let s = sample_regular(n, &cfg, &mut replicate_rng(SEED + 5, n as u64 * 1000 + r))
                    .unwrap();
                band_report(&s.pair).unwrap().violations()
            })
            .sum();
        violations += v;
        lines.push(format!("n={n}: {v} violations over {count} samples"));
    }
    report(5, violations == 0, &lines.join("; "));
}

#[test]
fn criterion_06_permuton_trend() {
    let g = 64;
    let dist = |n: usize, count: u64, seed: u64| -> Vec<f64> {
        (0..count)
            .into_par_iter()
            .map(|r| {
                let s = sample_regular(n, &SamplerConfig::default(), &mut replicate_rng(seed, r))
                    .unwrap();
                box_distance_grid(&s.perm, s.pair.z0() as f64 / n as f64, g).unwrap()
            })
            .collect()
    };
    let small = median(dist(1_000, 20, SEED + 6));
    let large = median(dist(100_000, 20, SEED + 7));
    let n7 = 10_000_000usize;
    let bound = 400.0 * (n7 as f64).powf(-0.4);
    let big = dist(n7, 3, SEED + 8);
    let big_ok = big.iter().all(|&d| d < bound);
    report(
        6,
        large < 0.1 && large < small && big_ok,
        &format!(
            "median d(1e3) = {small:.4}, median d(1e5) = {large:.4}; \
             n=1e7 max d = {:.4} vs 400n^-.4 = {bound:.4}",
            big.iter().cloned().fold(0.0, f64::max)
        ),
    );
}

#[test]
fn criterion_07_fluctuations() {
    let n = 1_000_000;
    let t_n = 7 * n / 10;
    let start = Instant::now();
    let stats = endpoint_stats(
        n,
        t_n,
        &[0.5, 1.0],
        400,
        SEED + 9,
        &SamplerConfig::default(),
    )
    .unwrap();
    let get = |m: Moment, t: f64| stats.cell(m, t).unwrap().estimate;
    let checks = [
        ("Var DR(1)", get(Moment::VarDR, 1.0), 1.7, 2.3),
        ("Cov DR,DL(1)", get(Moment::CovDRDL, 1.0), 0.75, 1.25),
        ("Cov DL,UR(1)", get(Moment::CovDLUR, 1.0), -0.2, 0.2),
        ("Var DR(.5)", get(Moment::VarDR, 0.5), 0.8, 1.2),
    ];
    let ok = checks.iter().all(|&(_, v, lo, hi)| lo <= v && v <= hi);
    let detail: Vec<String> = checks
        .iter()
        .map(|(name, v, lo, hi)| format!("{name} = {v:.3} in [{lo}, {hi}]"))
        .collect();
    report(
        7,
        ok,
        &format!(
            "{}; {:.0}s",
            detail.join(", "),
            start.elapsed().as_secs_f64()
        ),
    );
}

#[test]
fn criterion_08_local_limit() {
    let n = 100_000;
    let p123 = perm("123");
    let p132 = perm("132");
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let s = sample_regular_anchored(
        n,
        3 * n / 10,
        &constructive(),
        &mut replicate_rng(SEED, 800),
    )
    .unwrap();
    let d = empirical_window_distribution(&s.perm, 1, Roots::All, &mut rng);
    let quenched = d.interior_frequency(&p123);
    let mut pooled =
        empirical_window_distribution(&Permutation::identity(1), 1, Roots::All, &mut rng);
    pooled.counts.clear();
    pooled.total = 0;
    for p in stratified(n, 50, SEED + 801) {
        pooled.merge(empirical_window_distribution(&p, 1, Roots::All, &mut rng));
    }
    let a123 = pooled.interior_frequency(&p123);
    let a132 = pooled.interior_frequency(&p132);
    let ok = (0.435..=0.465).contains(&quenched)
        && (0.24..=0.26).contains(&a123)
        && (0.115..=0.135).contains(&a132);
    report(
        8,
        ok,
        &format!(
            "quenched 123 at z0=0.3n: {quenched:.4} (band [0.435, 0.465]); \
             annealed 123: {a123:.4} (band [0.24, 0.26]), 132: {a132:.4} (band [0.115, 0.135])"
        ),
    );
}

#[test]
fn criterion_09_p_distribution() {
    let mut sums = Vec::new();
    let mut agree = true;
    for n in [3, 5] {
        let mut s = Ratio::from_integer(0u64);
        for_each_permutation(n, |p| {
            s += limit_p(p).unwrap();
            agree &= e_counts(p).unwrap() == e_counts_brute(p).unwrap();
        });
        sums.push(s);
    }
    let one = Ratio::from_integer(1);
    report(
        9,
        sums.iter().all(|s| *s == one) && agree,
        &format!(
            "sum over S3 = {}, over S5 = {}; e-counts agree: {agree}",
            sums[0], sums[1]
        ),
    );
}

#[test]
fn criterion_10_psi_phi() {
    let mut checked = 0u64;
    let mut violations = 0u64;
    for p in enumerate_square(7).unwrap() {
        let view = LocalView::new(&p).unwrap();
        for h in 1..=2 {
            for i in 1..=7 {
                if !view.psi_phi_guaranteed(i, h) {
                    continue;
                }
                checked += 1;
                let lab = view.classify(i, h);
                if build_psi(lab.case, &lab.d, h).unwrap() != sqperm_core::restrict(&p, i, h) {
                    violations += 1;
                }
            }
        }
    }
    let n = 100_000;
    let (mut roots, mut fails) = (0u64, 0u64);
    for r in 0..5 {
        let s = sample_regular(
            n,
            &SamplerConfig::default(),
            &mut replicate_rng(SEED + 10, r),
        )
        .unwrap();
        let view = LocalView::new(&s.perm).unwrap();
        for i in 1..=n {
            let sep = match view.case(i, 1) {
                Case::One if view.z0() < view.z2() => view.separating_line(i, 1).unwrap(),
                Case::Four if view.z2() < view.z0() => view.separating_line_mirrored(i, 1).unwrap(),
                _ => continue,
            };
            roots += 1;
            fails += u64::from(!sep);
        }
    }
    let rate = fails as f64 / roots as f64;
    report(
        10,
        violations == 0 && rate < 1e-2,
        &format!(
            "{violations} violations in {checked} guaranteed windows of Sq(7); \
             separating-line failure rate at 1e5: {rate:.2e}"
        ),
    );
}

#[test]
fn criterion_11_pattern_proportions() {
    let n = 10_000;
    let samples = stratified(n, 200, SEED + 11);
    let (p12, p21) = (perm("12"), perm("21"));
    let pairs = (n as u64) * (n as u64 - 1) / 2;
    let mut exact_sum = true;
    let mut oracle = true;
    let mut total = 0.0;
    for s in &samples {
        let a = occ_exact(&p12, s, u128::MAX).unwrap();
        let b = occ_exact(&p21, s, u128::MAX).unwrap();
        exact_sum &= a + b == Ratio::from_integer(1);
        let inv = inversions_merge(&mut s.values().to_vec());
        oracle &= b == Ratio::new(inv, pairs);
        total += *a.numer() as f64 / *a.denom() as f64;
    }
    let mean = total / samples.len() as f64;
    report(
        11,
        (0.47..=0.53).contains(&mean) && exact_sum && oracle,
        &format!(
            "mean occ(12) = {mean:.4} over {} samples; occ(12)+occ(21)=1 on all: {exact_sum}",
            samples.len()
        ),
    );
}
