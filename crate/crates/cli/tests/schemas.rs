//! Checks command output against the shipped schemas. The checker covers the
//! keywords the schemas use: type, required, properties, items, enum, const,
//! pattern (anchored character classes only) and local `$ref`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn schema(name: &str) -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas").join(name);
    serde_json::from_slice(&fs::read(path).unwrap()).unwrap()
}

fn type_ok(t: &str, v: &Value) -> bool {
    match t {
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "integer" => v.is_u64() || v.is_i64(),
        "number" => v.is_number(),
        "null" => v.is_null(),
        "boolean" => v.is_boolean(),
        _ => false,
    }
}

fn pattern_ok(p: &str, s: &str) -> bool {
    match p {
        "^[0-9]+$" => !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()),
        "^[0-9a-f]+$" => !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b)),
        "^0x[0-9a-f]+$" => s.strip_prefix("0x").is_some_and(|r| pattern_ok("^[0-9a-f]+$", r)),
        _ => panic!("unsupported pattern {p}"),
    }
}

fn check(root: &Value, s: &Value, v: &Value, at: &str) -> Result<(), String> {
    if let Some(r) = s.get("$ref").and_then(Value::as_str) {
        let target = r.trim_start_matches("#/").split('/').fold(root, |acc, k| &acc[k]);
        return check(root, target, v, at);
    }
    if let Some(t) = s.get("type") {
        let ok = match t {
            Value::String(t) => type_ok(t, v),
            Value::Array(ts) => ts.iter().any(|t| type_ok(t.as_str().unwrap(), v)),
            _ => false,
        };
        if !ok {
            return Err(format!("{at}: {v} is not of type {t}"));
        }
    }
    if let Some(c) = s.get("const") {
        if c != v {
            return Err(format!("{at}: {v} != {c}"));
        }
    }
    if let Some(e) = s.get("enum").and_then(Value::as_array) {
        if !e.contains(v) {
            return Err(format!("{at}: {v} not in {e:?}"));
        }
    }
    if let (Some(p), Some(text)) = (s.get("pattern").and_then(Value::as_str), v.as_str()) {
        if !pattern_ok(p, text) {
            return Err(format!("{at}: {text:?} does not match {p}"));
        }
    }
    if let Some(req) = s.get("required").and_then(Value::as_array) {
        for k in req {
            if v.get(k.as_str().unwrap()).is_none() {
                return Err(format!("{at}: missing {k}"));
            }
        }
    }
    if let (Some(props), Some(obj)) = (s.get("properties").and_then(Value::as_object), v.as_object()) {
        for (k, sub) in props {
            if let Some(x) = obj.get(k) {
                check(root, sub, x, &format!("{at}.{k}"))?;
            }
        }
    }
    if let (Some(items), Some(arr)) = (s.get("items"), v.as_array()) {
        for (i, x) in arr.iter().enumerate() {
            check(root, items, x, &format!("{at}[{i}]"))?;
        }
    }
    Ok(())
}

fn validate(name: &str, v: &Value) {
    let s = schema(name);
    if let Err(e) = check(&s, &s, v, "$") {
        panic!("{name}: {e}");
    }
}

fn run(args: &[&str]) -> Value {
    let o = Command::new(env!("CARGO_BIN_EXE_cwac")).args(args).output().unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn read(p: &PathBuf) -> Value {
    serde_json::from_slice(&fs::read(p).unwrap()).unwrap()
}

#[test]
fn outputs_match_schemas() {
    validate("bound.schema.json", &run(&["bound", "--m", "6", "--n", "2", "--w", "3", "--d", "3", "--json"]));
    validate("bound.schema.json", &run(&["bound", "--m", "12", "--n", "3", "--w", "4", "--d", "4", "--json"]));
    validate("oracle.schema.json", &run(&["oracle", "--m", "5", "--n", "2", "--w", "2", "--d", "3"]));

    let dir = tempfile::tempdir().unwrap();
    let code = dir.path().join("code.json");
    let input = dir.path().join("in.bin");
    let stream = dir.path().join("s.json");
    let c = code.to_str().unwrap();
    run(&["construct", "--m", "8", "--w", "4", "--f", "2", "--n", "7", "--k", "3", "--out", c]);
    validate("code.schema.json", &read(&code));
    fs::write(&input, b"schema check").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_cwac"))
        .args(["encode", "--code", c, "--in", input.to_str().unwrap(), "--out", stream.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(o.success());
    validate("stream.schema.json", &read(&stream));
    let stats = run(&["simulate", "--code", c, "--losses", "3", "--injections", "2", "--trials", "100", "--seed", "5"]);
    validate("simulate.schema.json", &stats);
}

#[test]
fn checker_rejects_bad_documents() {
    let s = schema("code.schema.json");
    let bad = serde_json::json!({"m": 6, "w": 3, "f": 2, "b": 2, "n": 3, "k": 1, "primitive_poly_hex": "7", "inner_codewords": []});
    assert!(check(&s, &s, &bad, "$").is_err());
}
