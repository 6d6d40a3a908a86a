use std::process::{Command, Output};

use serde_json::Value;

fn sqperm(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_sqperm"));
    c.args(args)
        .env_remove("SQPERM_SEED")
        .env_remove("SQPERM_THREADS");
    for (k, v) in env {
        c.env(k, v);
    }
    c.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn error_json(o: &Output) -> Value {
    let err = String::from_utf8(o.stderr.clone()).unwrap();
    assert_eq!(err.trim_end().lines().count(), 1, "{err}");
    serde_json::from_str(err.trim_end()).unwrap()
}

#[test]
fn enumerate_five() {
    let o = sqperm(&["enumerate", "--size", "5", "--format", "plain"], &[]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "104\n");
    let o = sqperm(&["enumerate", "--size", "7"], &[]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "enumerate");
    assert_eq!(v["result"]["formula"], "2088");
    assert_eq!(v["result"]["match"], true);
}

#[test]
fn encode_decode_round_trip() {
    let o = sqperm(&["encode", "--perm", "2413", "--format", "plain"], &[]);
    assert_eq!(stdout(&o), "DUDD\nLLRL\n3\n");
    let o = sqperm(
        &[
            "decode", "--x", "DUDD", "--y", "LLRL", "--z0", "3", "--format", "plain",
        ],
        &[],
    );
    assert!(o.status.success());
    assert_eq!(stdout(&o), "2 4 1 3\n");
}

#[test]
fn samples_are_deterministic_and_thread_independent() {
    let args = ["sample", "--size", "60", "--count", "5", "--seed", "11"];
    let a = sqperm(&args, &[("SQPERM_THREADS", "1")]);
    let b = sqperm(&args, &[("SQPERM_THREADS", "2")]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = sqperm(
        &["sample", "--size", "60", "--count", "5", "--seed", "12"],
        &[],
    );
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn flag_seed_overrides_env() {
    let base = ["sample", "--size", "30", "--format", "plain"];
    let env_only = sqperm(&base, &[("SQPERM_SEED", "7")]);
    let flag = sqperm(&[&base[..], &["--seed", "7"]].concat(), &[]);
    let both = sqperm(
        &[&base[..], &["--seed", "7"]].concat(),
        &[("SQPERM_SEED", "8")],
    );
    assert_eq!(env_only.stdout, flag.stdout);
    assert_eq!(flag.stdout, both.stdout);
}

#[test]
fn samples_are_square() {
    let o = sqperm(
        &["sample", "--size", "40", "--count", "3", "--format", "csv"],
        &[],
    );
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("index,z0,permutation"));
    for line in lines {
        let perm = line.split(',').nth(2).unwrap();
        let p = sqperm_core::Permutation::parse(perm).unwrap();
        assert!(sqperm_core::is_square(&p));
    }
}

#[test]
fn invalid_config_exits_two() {
    let o = sqperm(&["sample", "--size", "0"], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_json(&o)["error"], "invalid_config");

    let o = sqperm(&["encode", "--perm", "2 2 1"], &[]);
    assert_eq!(o.status.code(), Some(2));

    let o = sqperm(&["enumerate", "--size", "4", "--format", "csv"], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
}

#[test]
fn module_errors_exit_one() {
    let o = sqperm(&["encode", "--perm", "25314"], &[]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(error_json(&o)["error"], "module");

    let o = sqperm(&["fluctuations", "--size", "5000"], &[]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_passes() {
    let o = sqperm(&["verify", "--max-size", "6"], &[]);
    assert!(o.status.success(), "{}", stdout(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"]["all_passed"], true);
}

#[test]
fn output_file() {
    let path = std::env::temp_dir().join(format!("sqperm-out-{}.json", std::process::id()));
    let o = sqperm(
        &[
            "pattern-limit",
            "--pattern",
            "123",
            "--anchor-frac",
            "0.3",
            "--trials",
            "100",
            "--output",
        ],
        &[],
    );
    assert_eq!(o.status.code(), Some(2));
    let o = sqperm(
        &[
            "pattern-limit",
            "--pattern",
            "123",
            "--anchor-frac",
            "0.3",
            "--trials",
            "100",
            "--output",
            path.to_str().unwrap(),
        ],
        &[],
    );
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(v["result"]["limit_p"], "1/4");
    assert_eq!(v["result"]["quenched"], 0.35);
}
