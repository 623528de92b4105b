//! The binary end to end: documented outputs, exit codes and determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_choiceless"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(args: &[&str]) -> (i32, Value) {
    let out = bin(args);
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), v)
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

#[test]
fn documented_payloads() {
    let (code, v) = report(&["star", "--n", "16"]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"], json!({ "value": "56874039553217" }));
    assert_eq!(v["command"], "star");
    assert_eq!(v["status"], "ok");
    let (_, v) = report(&["scan-pow2", "--limit", "100"]);
    assert_eq!(v["payload"], json!({ "hits": [0, 1, 3] }));
    let (_, v) = report(&["encode", "fin", "--decode", "5"]);
    assert_eq!(v["payload"], json!({ "set": [0, 2] }));
}

#[test]
fn unknown_subcommand_is_usage() {
    let out = bin(&["nonsense"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn malformed_oracle_exits_3_with_location() {
    let dir = std::env::temp_dir().join(format!("choiceless-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(
        &bad,
        r#"{"space":"finSet","universe":["a"],"forward":[["0",["z"]]]}"#,
    )
    .unwrap();
    let out = bin(&["specker", "thm3-run", "--oracle", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("forward[0][1][0]"), "{err}");
    std::fs::write(&bad, "{\"space\": \"finSet\",\n  \"universe\": [").unwrap();
    let out = bin(&["specker", "thm3-run", "--oracle", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    let out = bin(&[
        "specker",
        "thm3-run",
        "--oracle",
        dir.join("missing.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn engines_on_fixtures() {
    let (code, v) = report(&[
        "specker",
        "thm3-run",
        "--oracle",
        &fixture("thm3_extend.json"),
    ]);
    assert_eq!(code, 1);
    assert_eq!(v["status"], "witness");
    assert_eq!(v["payload"]["extended"], 3);
    assert_eq!(v["payload"]["outcome"]["witness"]["kind"], "unattained");

    let (_, v) = report(&["specker", "lemma-run", "--oracle", &fixture("lemma.json")]);
    assert_eq!(
        v["payload"]["outcome"]["witness"]["kind"],
        "inverse-inconsistent"
    );

    let (_, v) = report(&[
        "specker",
        "thm4-run",
        "--oracle",
        &fixture("thm4_stop.json"),
    ]);
    let w = &v["payload"]["outcome"]["witness"];
    assert_eq!(
        (w["kind"].as_str(), w["kappa"].as_u64(), w["star"].as_str()),
        (Some("stop-count"), Some(4), Some("65"))
    );

    let (_, v) = report(&["specker", "thm5-run", "--oracle", &fixture("thm5.json")]);
    assert_eq!(v["payload"]["extended"], 2);
    assert_eq!(v["parameters"]["s0"], "a");

    // an engine given the wrong kind of oracle runs out rather than failing
    let (code, v) = report(&[
        "specker",
        "lemma-run",
        "--oracle",
        &fixture("thm3_extend.json"),
    ]);
    assert_eq!((code, v["status"].as_str()), (1, Some("exhausted")));
}

#[test]
fn identical_invocations_are_byte_identical() {
    for args in [
        vec!["specker", "thm3-fact", "--trials", "50", "--seed", "7"],
        vec![
            "specker",
            "thm4-run",
            "--oracle",
            &fixture("thm4_extend.json"),
        ],
        vec!["hereditary", "build", "--level", "2"],
        vec!["lemmas", "identity2", "--n-max", "12", "--k-max", "4"],
    ] {
        let a = bin(&args);
        let b = bin(&args);
        assert_eq!(a.stdout, b.stdout);
        assert_eq!(a.status.code(), b.status.code());
    }
}

#[test]
fn thread_count_from_environment() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_choiceless"))
            .args(["lemmas", "identity2", "--n-max", "10", "--k-max", "3"])
            .env("CHOICELESS_THREADS", threads)
            .output()
            .unwrap()
    };
    let one = run("1");
    assert!(one.status.success());
    assert_eq!(one.stdout, run("4").stdout);
    assert_eq!(run("zero").status.code(), Some(2));
}

#[test]
fn pretty_and_seed_flags() {
    let out = bin(&["--pretty", "star", "--n", "3"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("\n  \"payload\""));
    let (_, a) = report(&["specker", "thm3-fact", "--trials", "20", "--seed", "1"]);
    assert_eq!(a["parameters"]["seed"], 1);
    assert_eq!(a["status"], "ok");
}
