//! Subcommand implementations.

use std::collections::HashSet;
use std::fmt::Write as _;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use sqperm_core::encoding::{build_lambdas, reconstruct_validated};
use sqperm_core::enumeration::{count_square_exhaustive, for_each_permutation, MAX_EXHAUSTIVE};
use sqperm_core::fluctuations::endpoint_stats;
use sqperm_core::local::{
    build_psi, e_counts, e_counts_brute, empirical_window_distribution, family_membership,
    full_windows, limit_consecutive, limit_p, quenched_gamma, LocalView,
};
use sqperm_core::patterns::{coc_proportion, occ_proportion};
use sqperm_core::permuton::{box_distance_grid, lambda_estimate};
use sqperm_core::sampler::{
    replicate_rng, sample_regular, sample_regular_anchored, ExactSquareSampler, RegularSample,
    SamplerConfig,
};
use sqperm_core::{
    count_square_formula, enumerate_square, project, reconstruct, restrict, AnchoredPair, Error,
    Permutation,
};

use crate::report::{envelope, fmt_f64};
use crate::{Cli, Command, Format};

pub struct Output {
    pub payload: String,
    pub success: bool,
}

pub struct Failure {
    pub kind: &'static str,
    pub message: String,
    pub code: u8,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            kind: "module",
            message: e.to_string(),
            code: 1,
        }
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure {
        kind: "invalid_config",
        message: message.into(),
        code: 2,
    }
}

fn unsupported(cli: &Cli) -> Failure {
    invalid(format!(
        "format {:?} is not available for this command",
        cli.format
    ))
}

fn ratio(r: Ratio<u64>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn to_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn parse_perm(s: &str) -> Result<Permutation, Failure> {
    Permutation::parse(s).map_err(|e| invalid(format!("permutation {s:?}: {e}")))
}

fn config(cli: &Cli) -> SamplerConfig {
    SamplerConfig::with_regularity(cli.regularity.into())
}

fn anchor(n: usize, frac: f64) -> Result<usize, Failure> {
    if !(0.0..=1.0).contains(&frac) {
        return Err(invalid("--anchor-frac must lie in [0, 1]"));
    }
    Ok(((frac * n as f64).floor() as usize).clamp(1, n))
}

fn draw(cli: &Cli, n: usize, z0: Option<usize>, index: u64) -> Result<RegularSample, Failure> {
    let mut rng = replicate_rng(cli.seed, index);
    Ok(match z0 {
        Some(z) => sample_regular_anchored(n, z, &config(cli), &mut rng)?,
        None => sample_regular(n, &config(cli), &mut rng)?,
    })
}

fn json_out<R: Serialize>(cli: &Cli, name: &str, result: &R, success: bool) -> Output {
    Output {
        payload: envelope(name, cli, result),
        success,
    }
}

pub fn run(cli: &Cli) -> Result<Output, Failure> {
    match &cli.command {
        Command::Sample(a) => sample(cli, a),
        Command::Enumerate(a) => enumerate(cli, a.size),
        Command::Encode(a) => encode(cli, &a.perm),
        Command::Decode(a) => decode(cli, a),
        Command::PermutonDistance(a) => permuton_distance(cli, a),
        Command::PatternLimit(a) => pattern_limit(cli, a),
        Command::Fluctuations(a) => fluctuations(cli, a),
        Command::LocalStats(a) => local_stats(cli, a),
        Command::PatternStats(a) => pattern_stats(cli, a),
        Command::Verify(a) => verify(cli, a.max_size),
    }
}

fn sample(cli: &Cli, a: &crate::SampleArgs) -> Result<Output, Failure> {
    let n = a.size;
    let draws: Vec<(Permutation, Option<RegularSample>)> = if a.exact {
        if a.z0.is_some() {
            return Err(invalid("--exact does not take --z0"));
        }
        let sampler = ExactSquareSampler::new(n)?;
        (0..a.count)
            .map(|k| (sampler.sample(&mut replicate_rng(cli.seed, k)), None))
            .collect()
    } else {
        (0..a.count)
            .into_par_iter()
            .map(|k| draw(cli, n, a.z0, k).map(|s| (s.perm.clone(), Some(s))))
            .collect::<Result<_, _>>()?
    };
    match cli.format {
        Format::Plain => {
            let mut s = String::new();
            for (p, _) in &draws {
                writeln!(s, "{p}").unwrap();
            }
            Ok(Output {
                payload: s,
                success: true,
            })
        }
        Format::Csv => {
            let mut s = String::from("index,z0,permutation\n");
            for (k, (p, _)) in draws.iter().enumerate() {
                writeln!(s, "{k},{},{p}", p.position_of(1)).unwrap();
            }
            Ok(Output {
                payload: s,
                success: true,
            })
        }
        Format::Json => {
            let samples: Vec<Value> = draws
                .iter()
                .map(|(p, s)| {
                    json!({
                        "permutation": p.values(),
                        "z0": p.position_of(1),
                        "stats": s.as_ref().map(|s| s.stats),
                    })
                })
                .collect();
            Ok(json_out(
                cli,
                "sample",
                &json!({ "n": n, "samples": samples }),
                true,
            ))
        }
    }
}

fn enumerate(cli: &Cli, n: usize) -> Result<Output, Failure> {
    let formula = count_square_formula(n)?;
    let exhaustive = if n <= MAX_EXHAUSTIVE {
        Some(count_square_exhaustive(n)?)
    } else {
        None
    };
    let matches = exhaustive.as_ref().map(|e| *e == formula);
    match cli.format {
        Format::Plain => Ok(Output {
            payload: format!("{formula}\n"),
            success: matches != Some(false),
        }),
        Format::Json => Ok(json_out(
            cli,
            "enumerate",
            &json!({
                "n": n,
                "formula": formula.to_string(),
                "exhaustive": exhaustive.map(|e| e.to_string()),
                "match": matches,
            }),
            matches != Some(false),
        )),
        Format::Csv => Err(unsupported(cli)),
    }
}

fn encode(cli: &Cli, perm: &str) -> Result<Output, Failure> {
    let p = parse_perm(perm)?;
    let q = project(&p)?;
    match cli.format {
        Format::Plain => Ok(Output {
            payload: q.to_text(),
            success: true,
        }),
        Format::Json => Ok(json_out(
            cli,
            "encode",
            &json!({ "permutation": p.values(), "pair": q, "good": q.is_good() }),
            true,
        )),
        Format::Csv => Err(unsupported(cli)),
    }
}

fn decode(cli: &Cli, a: &crate::DecodeArgs) -> Result<Output, Failure> {
    let q = AnchoredPair::from_strs(&a.x, &a.y, a.z0).map_err(|e| invalid(e.to_string()))?;
    let p = reconstruct(&q)?;
    let fam = build_lambdas(&q)?;
    let validated = reconstruct_validated(&q).is_ok();
    match cli.format {
        Format::Plain => Ok(Output {
            payload: format!("{p}\n"),
            success: true,
        }),
        Format::Json => Ok(json_out(
            cli,
            "decode",
            &json!({
                "pair": q,
                "permutation": p.values(),
                "anchors": fam.anchors,
                "square_and_round_trip": validated,
            }),
            true,
        )),
        Format::Csv => Err(unsupported(cli)),
    }
}

fn permuton_distance(cli: &Cli, a: &crate::PermutonArgs) -> Result<Output, Failure> {
    let n = a.size;
    let rows: Vec<(usize, f64, f64)> = (0..a.samples)
        .into_par_iter()
        .map(|k| {
            let s = draw(cli, n, None, k)?;
            let z = s.pair.z0() as f64 / n as f64;
            Ok((s.pair.z0(), z, box_distance_grid(&s.perm, z, a.grid)?))
        })
        .collect::<Result<_, Failure>>()?;
    let mut d: Vec<f64> = rows.iter().map(|r| r.2).collect();
    d.sort_by(f64::total_cmp);
    let median = if d.len() % 2 == 1 {
        d[d.len() / 2]
    } else {
        (d[d.len() / 2 - 1] + d[d.len() / 2]) / 2.0
    };
    match cli.format {
        Format::Csv => {
            let mut s = String::from("index,z0,z,distance\n");
            for (k, (z0, z, dist)) in rows.iter().enumerate() {
                writeln!(s, "{k},{z0},{},{}", fmt_f64(*z), fmt_f64(*dist)).unwrap();
            }
            Ok(Output {
                payload: s,
                success: true,
            })
        }
        Format::Json => {
            let samples: Vec<Value> = rows
                .iter()
                .map(|(z0, z, dist)| json!({ "z0": z0, "z": z, "distance": dist }))
                .collect();
            Ok(json_out(
                cli,
                "permuton-distance",
                &json!({
                    "n": n,
                    "grid": a.grid,
                    "grid_slack": 4.0 / a.grid as f64,
                    "samples": samples,
                    "median": median,
                    "bound_400_n_pow_neg_0_4": 400.0 * (n as f64).powf(-0.4),
                }),
                true,
            ))
        }
        Format::Plain => Err(unsupported(cli)),
    }
}

fn pattern_limit(cli: &Cli, a: &crate::PatternLimitArgs) -> Result<Output, Failure> {
    if cli.format != Format::Json {
        return Err(unsupported(cli));
    }
    let pi = parse_perm(&a.pattern)?;
    let mut out = json!({ "pattern": pi.values(), "size": pi.len() });
    if pi.len() >= 2 {
        out["consecutive_limit"] = json!(ratio(limit_consecutive(&pi)?));
    }
    if pi.len() >= 3 && pi.len() % 2 == 1 {
        out["e_counts"] = json!(e_counts(&pi)?);
        out["families"] = json!(family_membership(&pi)?);
        out["limit_p"] = json!(ratio(limit_p(&pi)?));
    }
    if let Some(u) = a.anchor_frac {
        if !(0.0..=1.0).contains(&u) {
            return Err(invalid("--anchor-frac must lie in [0, 1]"));
        }
        if pi.len() >= 3 && pi.len() % 2 == 1 {
            out["quenched"] = json!(quenched_gamma(&pi, u)?);
        }
        let (est, se) = lambda_estimate(&pi, u, a.trials, &mut replicate_rng(cli.seed, 0))?;
        out["permuton_density"] =
            json!({ "z": u, "estimate": est, "stderr": se, "trials": a.trials });
    }
    Ok(json_out(cli, "pattern-limit", &out, true))
}

fn fluctuations(cli: &Cli, a: &crate::FluctuationArgs) -> Result<Output, Failure> {
    if !(a.anchor_frac > 0.5 && a.anchor_frac < 1.0) {
        return Err(invalid("--anchor-frac must lie in (0.5, 1)"));
    }
    if a.times.iter().any(|t| !(0.0..=1.0).contains(t)) {
        return Err(invalid("--times must lie in [0, 1]"));
    }
    let t_n = (a.anchor_frac * a.size as f64).floor() as usize;
    let stats = endpoint_stats(a.size, t_n, &a.times, a.replicates, cli.seed, &config(cli))?;
    let success = stats.psd.iter().all(|&b| b);
    match cli.format {
        Format::Csv => {
            let mut s = String::from("moment,time,target,estimate,stderr,pass\n");
            for c in &stats.cells {
                writeln!(
                    s,
                    "{:?},{},{},{},{},{}",
                    c.moment,
                    fmt_f64(c.time),
                    fmt_f64(c.target),
                    fmt_f64(c.estimate),
                    fmt_f64(c.stderr),
                    c.pass
                )
                .unwrap();
            }
            Ok(Output {
                payload: s,
                success,
            })
        }
        Format::Json => Ok(json_out(cli, "fluctuations", &stats, success)),
        Format::Plain => Err(unsupported(cli)),
    }
}

fn z_score(freq: f64, p: f64, total: u64) -> Option<f64> {
    (p > 0.0 && p < 1.0).then(|| (freq - p) / (p * (1.0 - p) / total as f64).sqrt())
}

fn local_stats(cli: &Cli, a: &crate::LocalArgs) -> Result<Output, Failure> {
    let n = a.size;
    let h = a.radius;
    if h > 3 {
        return Err(invalid("--radius is limited to 3"));
    }
    let z0 = a.anchor_frac.map(|f| anchor(n, f)).transpose()?;
    let s = draw(cli, n, z0, 0)?;
    let u = s.pair.z0() as f64 / n as f64;
    let dist = empirical_window_distribution(&s.perm, h, a.roots, &mut replicate_rng(cli.seed, 1));
    let total = dist.interior_total();
    let mut rows = Vec::new();
    for w in full_windows(h) {
        let count = *dist.counts.get(&w).unwrap_or(&0);
        let freq = count as f64 / total as f64;
        let (quenched, annealed) = if h == 0 {
            (1.0, 1.0)
        } else {
            (quenched_gamma(&w.pattern, u)?, to_f64(limit_p(&w.pattern)?))
        };
        rows.push((w, count, freq, quenched, annealed));
    }
    match cli.format {
        Format::Csv => {
            let mut out = String::from(
                "pattern,root,count,frequency,quenched,annealed,z_quenched,z_annealed\n",
            );
            let opt = |z: Option<f64>| z.map(fmt_f64).unwrap_or_default();
            for (w, count, freq, q, an) in &rows {
                writeln!(
                    out,
                    "{},{},{count},{},{},{},{},{}",
                    w.pattern
                        .values()
                        .iter()
                        .map(u32::to_string)
                        .collect::<String>(),
                    w.root,
                    fmt_f64(*freq),
                    fmt_f64(*q),
                    fmt_f64(*an),
                    opt(z_score(*freq, *q, total)),
                    opt(z_score(*freq, *an, total)),
                )
                .unwrap();
            }
            Ok(Output {
                payload: out,
                success: true,
            })
        }
        Format::Json => {
            let windows: Vec<Value> = rows
                .iter()
                .map(|(w, count, freq, q, an)| {
                    json!({
                        "pattern": w.pattern.values(),
                        "root": w.root,
                        "count": count,
                        "frequency": freq,
                        "quenched": q,
                        "annealed": an,
                        "z_quenched": z_score(*freq, *q, total),
                        "z_annealed": z_score(*freq, *an, total),
                    })
                })
                .collect();
            Ok(json_out(
                cli,
                "local-stats",
                &json!({
                    "n": n,
                    "radius": h,
                    "z0": s.pair.z0(),
                    "anchor_fraction": u,
                    "roots_visited": dist.total,
                    "interior_roots": total,
                    "windows": windows,
                }),
                true,
            ))
        }
        Format::Plain => Err(unsupported(cli)),
    }
}

fn pattern_stats(cli: &Cli, a: &crate::PatternStatsArgs) -> Result<Output, Failure> {
    let pi = parse_perm(&a.pattern)?;
    let rows: Vec<(usize, f64, f64, f64, Value)> = (0..a.samples)
        .into_par_iter()
        .map(|k| {
            let s = draw(cli, a.size, None, k)?;
            let occ = occ_proportion(
                &pi,
                &s.perm,
                a.mc_samples,
                &mut replicate_rng(cli.seed ^ 0x9e37, k),
            )?;
            let coc = coc_proportion(&pi, &s.perm)?;
            Ok((
                s.pair.z0(),
                occ.value(),
                occ.stderr(),
                to_f64(coc),
                json!(occ),
            ))
        })
        .collect::<Result<_, Failure>>()?;
    let m = rows.len() as f64;
    let mean_occ = rows.iter().map(|r| r.1).sum::<f64>() / m;
    let mean_coc = rows.iter().map(|r| r.3).sum::<f64>() / m;
    match cli.format {
        Format::Csv => {
            let mut out = String::from("index,z0,occ,occ_stderr,coc\n");
            for (k, r) in rows.iter().enumerate() {
                writeln!(
                    out,
                    "{k},{},{},{},{}",
                    r.0,
                    fmt_f64(r.1),
                    fmt_f64(r.2),
                    fmt_f64(r.3)
                )
                .unwrap();
            }
            Ok(Output {
                payload: out,
                success: true,
            })
        }
        Format::Json => {
            let theory = if pi.len() >= 2 {
                Some(ratio(limit_consecutive(&pi)?))
            } else {
                None
            };
            let samples: Vec<Value> = rows
                .iter()
                .map(|r| json!({ "z0": r.0, "occ": r.4, "coc": r.3 }))
                .collect();
            Ok(json_out(
                cli,
                "pattern-stats",
                &json!({
                    "n": a.size,
                    "pattern": pi.values(),
                    "samples": samples,
                    "mean_occ": mean_occ,
                    "mean_coc": mean_coc,
                    "annealed_coc_limit": theory,
                }),
                true,
            ))
        }
        Format::Plain => Err(unsupported(cli)),
    }
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn verify(cli: &Cli, max_size: usize) -> Result<Output, Failure> {
    if cli.format != Format::Json {
        return Err(unsupported(cli));
    }
    if !(3..=9).contains(&max_size) {
        return Err(invalid("--max-size must lie in 3..=9"));
    }
    let mut checks = Vec::new();

    let mut ok = true;
    for n in 3..=max_size {
        ok &= count_square_exhaustive(n)? == count_square_formula(n)?;
    }
    checks.push(Check {
        name: "enumeration_formula",
        pass: ok,
        detail: format!("n in 3..={max_size}"),
    });

    let (mut collisions, mut round_trip_bad, mut psi_bad, mut psi_checked) = (0, 0, 0, 0);
    for n in 1..=max_size.min(8) {
        let all = enumerate_square(n)?;
        let mut seen = HashSet::new();
        for p in &all {
            let q = project(p)?;
            if let Ok(back) = reconstruct_validated(&q) {
                round_trip_bad += usize::from(back != *p);
            }
            collisions += usize::from(!seen.insert(q));
            let view = LocalView::new(p)?;
            for h in 0..=2 {
                for i in 1..=n {
                    if view.psi_phi_guaranteed(i, h) {
                        psi_checked += 1;
                        let lab = view.classify(i, h);
                        psi_bad +=
                            usize::from(build_psi(lab.case, &lab.d, h)? != restrict(p, i, h));
                    }
                }
            }
        }
    }
    checks.push(Check {
        name: "projection_injective",
        pass: collisions == 0,
        detail: format!("{collisions} collisions"),
    });
    checks.push(Check {
        name: "reconstruction_inverts_projection",
        pass: round_trip_bad == 0,
        detail: format!("{round_trip_bad} mismatches"),
    });
    checks.push(Check {
        name: "psi_phi_restriction",
        pass: psi_bad == 0,
        detail: format!("{psi_bad} violations in {psi_checked} windows"),
    });

    let example = project(&Permutation::parse("2413")?)?;
    let expected = AnchoredPair::from_strs("DUDD", "LLRL", 3)?;
    checks.push(Check {
        name: "projection_example",
        pass: example == expected && reconstruct(&expected)? == Permutation::parse("2413")?,
        detail: "2413 <-> (DUDD, LLRL, 3)".into(),
    });

    let (mut e_ok, mut sums) = (true, Vec::new());
    for n in [3, 5] {
        let mut s = Ratio::from_integer(0u64);
        let mut err = None;
        for_each_permutation(n, |p| match (e_counts(p), e_counts_brute(p), limit_p(p)) {
            (Ok(a), Ok(b), Ok(lp)) => {
                e_ok &= a == b;
                s += lp;
            }
            (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => err = Some(e),
        });
        if let Some(e) = err {
            return Err(e.into());
        }
        sums.push(s);
    }
    checks.push(Check {
        name: "e_counts_closed_form",
        pass: e_ok,
        detail: "S3 and S5".into(),
    });
    checks.push(Check {
        name: "limit_p_normalized",
        pass: sums.iter().all(|s| *s == Ratio::from_integer(1)),
        detail: format!("S3: {}, S5: {}", ratio(sums[0]), ratio(sums[1])),
    });

    let success = checks.iter().all(|c| c.pass);
    Ok(json_out(
        cli,
        "verify",
        &json!({ "checks": checks, "all_passed": success }),
        success,
    ))
}
