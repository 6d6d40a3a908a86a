//! Report envelope, number formatting and error lines.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Map, Number, Value};

pub const SCHEMA_VERSION: u32 = 1;

/// Rounds every float in `v` to 12 significant digits.
pub fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap();
            let r: f64 = format!("{x:.11e}").parse().unwrap();
            Number::from_f64(r).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_floats).collect()),
        Value::Object(o) => Value::Object(
            o.into_iter()
                .map(|(k, v)| (k, round_floats(v)))
                .collect::<Map<_, _>>(),
        ),
        other => other,
    }
}

/// Float with 12 significant digits, for plain and CSV output.
pub fn fmt_f64(x: f64) -> String {
    match round_floats(json!(x)) {
        Value::Number(n) => n.to_string(),
        _ => "NaN".into(),
    }
}

/// `{"schema_version", "command", "config", "result"}`.
pub fn envelope<C: Serialize, R: Serialize>(command: &str, config: &C, result: &R) -> String {
    let v = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": config,
        "result": result,
    });
    let mut s = serde_json::to_string_pretty(&round_floats(v)).expect("report serializes");
    s.push('\n');
    s
}

pub fn write_payload(payload: &str, output: Option<&Path>) -> io::Result<()> {
    match output {
        Some(path) => File::create(path)?.write_all(payload.as_bytes()),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(payload.as_bytes())?;
            out.flush()
        }
    }
}

/// One-line JSON error on stderr.
pub fn error_line(kind: &str, message: &str) -> String {
    json!({ "error": kind, "message": message }).to_string()
}
