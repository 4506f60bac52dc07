use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn cwac(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cwac")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn bound_json() {
    let v = json(&cwac(&["bound", "--m", "4", "--n", "1", "--w", "2", "--d", "2", "--json"]));
    assert_eq!(v["lower"], "2");
    assert_eq!(v["upper"], "2");
    assert_eq!(v["children"].as_array().unwrap().len(), 2);
}

#[test]
fn oracle_exact() {
    let v = json(&cwac(&["oracle", "--m", "4", "--n", "1", "--w", "2", "--d", "2"]));
    assert_eq!(v["exact"], "2");
    assert_eq!(v["witness"].as_array().unwrap().len(), 2);
    let a = json(&cwac(&["oracle", "--m", "4", "--n", "1", "--w", "2", "--anticode", "--delta", "1"]));
    assert_eq!(a["exact"], "3");
    let g = json(&cwac(&["oracle-gamma", "--q", "2", "--n", "3", "--delta", "2"]));
    assert_eq!(g["exact"], "4");
}

#[test]
fn exit_codes() {
    assert_eq!(cwac(&["bound", "--m", "3", "--n", "1", "--w", "4", "--d", "1"]).status.code(), Some(2));
    assert_eq!(cwac(&["bound", "--m", "3", "--frobnicate"]).status.code(), Some(2));
    assert_eq!(cwac(&["oracle", "--m", "9", "--n", "2", "--w", "4", "--d", "2"]).status.code(), Some(4));
    assert_eq!(cwac(&["construct", "--m", "4", "--w", "2", "--f", "2", "--n", "3", "--k", "1", "--out", "/dev/null"]).status.code(), Some(2));
}

#[test]
fn table_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.csv");
    let o = cwac(&["table", "--m", "4..5", "--n", "1..2", "--w", "2", "--d", "1..3", "--out", p(&out)]);
    assert!(o.status.success());
    let mut rdr = csv::Reader::from_path(&out).unwrap();
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>(),
        ["m", "n", "w", "d", "lower", "upper", "lower_rule", "upper_rule"]
    );
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 12);
    assert_eq!(rows[0].iter().take(4).collect::<Vec<_>>(), ["4", "1", "2", "1"]);
    assert_eq!(&rows[0][4], "6");
    for r in &rows {
        assert!(r[4].parse::<u64>().unwrap() <= r[5].parse::<u64>().unwrap());
    }
}

#[test]
fn encode_decode_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let code = dir.path().join("code.json");
    let plan = json(&cwac(&["construct", "--m", "6", "--w", "3", "--f", "2", "--n", "3", "--k", "2", "--out", p(&code)]));
    assert_eq!(plan["guarantee"], 3);
    let desc: Value = serde_json::from_slice(&fs::read(&code).unwrap()).unwrap();
    assert_eq!(desc["primitive_poly_hex"], "0x7");
    for len in [0usize, 1, 2, 7, 100] {
        let input = dir.path().join("in.bin");
        let stream = dir.path().join("s.json");
        let output = dir.path().join("out.bin");
        let bytes: Vec<u8> = (0..len).map(|i| (i * 131 % 251) as u8).collect();
        fs::write(&input, &bytes).unwrap();
        assert!(cwac(&["encode", "--code", p(&code), "--in", p(&input), "--out", p(&stream)]).status.success());
        let o = cwac(&["decode", "--code", p(&code), "--in", p(&stream), "--out", p(&output)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(fs::read(&output).unwrap(), bytes);
    }
}

#[test]
fn decode_failure_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let code = dir.path().join("code.json");
    assert!(cwac(&["construct", "--m", "6", "--w", "3", "--f", "2", "--n", "3", "--k", "1", "--out", p(&code)]).status.success());
    let input = dir.path().join("in.bin");
    let stream = dir.path().join("s.json");
    fs::write(&input, b"x").unwrap();
    assert!(cwac(&["encode", "--code", p(&code), "--in", p(&input), "--out", p(&stream)]).status.success());
    let mut s: Value = serde_json::from_slice(&fs::read(&stream).unwrap()).unwrap();
    // every column replaced by the all-ones word: no inner symbol is within reach
    for block in s["blocks"].as_array_mut().unwrap() {
        for col in block.as_array_mut().unwrap() {
            *col = Value::String("3f".into());
        }
    }
    fs::write(&stream, serde_json::to_vec(&s).unwrap()).unwrap();
    let o = cwac(&["decode", "--code", p(&code), "--in", p(&stream), "--out", p(&dir.path().join("o.bin"))]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn simulate_is_thread_independent() {
    let dir = tempfile::tempdir().unwrap();
    let code = dir.path().join("code.json");
    assert!(cwac(&["construct", "--m", "6", "--w", "3", "--f", "2", "--n", "3", "--k", "1", "--out", p(&code)]).status.success());
    let args = |t: &'static str| {
        vec!["--threads", t, "simulate", "--code", p(&code), "--losses", "2", "--injections", "3", "--trials", "2000", "--seed", "42"]
    };
    let a = json(&cwac(&args("1")));
    let b = json(&cwac(&args("8")));
    assert_eq!(a, b);
    assert_eq!(a["success"], 2000);
    assert_eq!(a["wrong"], 0);
    assert!(a["generator"].as_str().unwrap().contains("ChaCha8"));
    let records = dir.path().join("r.csv");
    let o = cwac(&["simulate", "--code", p(&code), "--losses", "9", "--trials", "50", "--seed", "1", "--policy", "per-column-capped", "--records", p(&records)]);
    assert!(o.status.success());
    assert_eq!(csv::Reader::from_path(&records).unwrap().records().count(), 50);
    assert_eq!(cwac(&["simulate", "--code", p(&code), "--trials", "0", "--seed", "1"]).status.code(), Some(2));
}

#[test]
fn man_page_lists_commands() {
    let o = cwac(&["man"]);
    let text = String::from_utf8(o.stdout).unwrap();
    for cmd in ["bound", "table", "oracle", "construct", "encode", "decode", "simulate", "selftest"] {
        assert!(text.contains(&format!(".SS {cmd}")), "{cmd}");
    }
}
