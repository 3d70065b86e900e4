use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use notestd_core::corpus::read_notes_jsonl;
use serde_json::Value;
use sha2::{Digest, Sha256};

const BIN: &str = env!("CARGO_BIN_EXE_notestd");

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN)
        .current_dir(dir)
        .args(args)
        .env_remove("NOTESTD_API_KEY")
        .env_remove("RUST_LOG")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn long_note(i: usize, chars: usize) -> String {
    let mut s = format!("History: patient {i} reports numbness.");
    while s.chars().count() < chars {
        s.push_str(" Gait is stable.");
    }
    s.chars().take(chars).collect()
}

#[test]
fn ingest_keeps_only_long_notes() {
    let dir = tempfile::tempdir().unwrap();
    let lengths = [1999, 2000, 50, 8000, 2001];
    let mut w = csv::Writer::from_path(dir.path().join("neuro.csv")).unwrap();
    w.write_record(["accession", "note_text", "setting"]).unwrap();
    for (i, n) in lengths.iter().enumerate() {
        let setting = if i == 4 { "inpatient" } else { "outpatient" };
        w.write_record([&(100 + i).to_string(), &long_note(i, *n), setting]).unwrap();
    }
    w.flush().unwrap();

    let o = run(dir.path(), &["ingest", "neuro.csv", "--min-chars", "2000", "--id-column", "accession"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let notes = read_notes_jsonl(std::fs::File::open(dir.path().join("notes.jsonl")).unwrap()).unwrap();
    let ids: Vec<_> = notes.iter().map(|n| n.accession_num.as_str()).collect();
    assert_eq!(ids, ["101", "103", "104"]);
    assert!(notes.iter().all(|n| n.note_text.chars().count() >= 2000));
    let dropped = std::fs::read_to_string(dir.path().join("dropped.jsonl")).unwrap();
    assert_eq!(dropped.lines().count(), 2);

    let o = run(dir.path(), &["ingest", "neuro.csv", "--id-column", "accession", "--filter", "setting=outpatient"]);
    assert_eq!(code(&o), 0);
    let notes = read_notes_jsonl(std::fs::File::open(dir.path().join("notes.jsonl")).unwrap()).unwrap();
    assert_eq!(notes.len(), 2);
    let m: Value = serde_json::from_slice(&std::fs::read(dir.path().join("run_manifest.json")).unwrap()).unwrap();
    assert_eq!(m["stages"]["ingest"]["counts"]["kept"], 2);
    assert_eq!(m["stages"]["ingest"]["counts"]["rows"], 5);
}

#[test]
fn llm_backend_without_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("notes.jsonl"), "{\"accession_num\":\"1\",\"note_text\":\"Plan: MRI\"}\n").unwrap();
    let o = run(dir.path(), &["--backend", "llm", "standardize", "notes.jsonl"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("NOTESTD_API_KEY"), "{}", stderr(&o));
    assert!(!dir.path().join("standardized.jsonl").exists());
}

#[test]
fn configuration_and_input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.toml"), "parallelism = 0\n").unwrap();
    std::fs::write(dir.path().join("typo.toml"), "paralelism = 2\n").unwrap();
    assert_eq!(code(&run(dir.path(), &["--config", "bad.toml", "estimate", "x.jsonl"])), 2);
    assert_eq!(code(&run(dir.path(), &["--config", "typo.toml", "estimate", "x.jsonl"])), 2);
    assert_eq!(code(&run(dir.path(), &["--config", "missing.toml", "estimate", "x.jsonl"])), 2);
    assert_eq!(code(&run(dir.path(), &["estimate", "x.jsonl"])), 2);
    assert_eq!(code(&run(dir.path(), &["--parallelism", "0", "estimate", "x.jsonl"])), 2);
    assert_eq!(code(&run(dir.path(), &["--backend", "gpt", "estimate", "x.jsonl"])), 2);
    std::fs::write(dir.path().join("x.jsonl"), "not json\n").unwrap();
    let o = run(dir.path(), &["estimate", "x.jsonl"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("x.jsonl"));
}

#[test]
fn partial_failure_exits_1_and_keeps_the_rest() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert_eq!(code(&run(p, &["--seed", "3", "fixtures", "generate", "--n", "6"])), 0);
    std::fs::write(
        p.join("replies.jsonl"),
        "{\"accession_num\":\"SYN000002\",\"response\":\"I cannot help with that.\"}\n\
         {\"accession_num\":\"SYN000004\",\"failure\":\"rate_limited\"}\n",
    )
    .unwrap();
    let o = run(p, &["--backend", "mock", "--transcript", "replies.jsonl", "--out-dir", "out", "standardize", "notes.jsonl"]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    let ok = std::fs::read_to_string(p.join("out/standardized.jsonl")).unwrap();
    let failed = std::fs::read_to_string(p.join("out/failures.jsonl")).unwrap();
    assert_eq!((ok.lines().count(), failed.lines().count()), (4, 2));
    let kinds: Vec<Value> = failed.lines().map(|l| serde_json::from_str::<Value>(l).unwrap()["kind"].clone()).collect();
    assert_eq!(kinds, ["unparseable", "rate_limited"]);
    assert!(failed.contains("I cannot help with that."));
}

#[test]
fn config_file_values_apply_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    std::fs::write(p.join("run.toml"), "seed = 9\nout_dir = \"from-file\"\n[llm]\ncost_per_output_token = 0.0\n").unwrap();
    assert_eq!(code(&run(p, &["--config", "run.toml", "fixtures", "generate", "--n", "3"])), 0);
    assert!(p.join("from-file/notes.jsonl").exists());
    assert_eq!(code(&run(p, &["--config", "run.toml", "--seed", "9", "--out-dir", "flag", "fixtures", "generate", "--n", "3"])), 0);
    assert_eq!(
        std::fs::read(p.join("from-file/notes.jsonl")).unwrap(),
        std::fs::read(p.join("flag/notes.jsonl")).unwrap()
    );
    let o = run(p, &["--config", "run.toml", "estimate", "from-file/notes.jsonl"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let est: Value = serde_json::from_slice(&std::fs::read(p.join("from-file/estimate.json")).unwrap()).unwrap();
    let per_note = &est["per_note"][0];
    let input_only = per_note["input_tokens"].as_f64().unwrap() * 10.0e-6;
    assert!((per_note["cost"].as_f64().unwrap() - input_only).abs() < 1e-12);
}

fn golden_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/chain.sha256")
}

/// The full rule-backend chain on a small fixture corpus; digests are checked
/// against the committed golden file (`NOTESTD_BLESS=1` rewrites it).
#[test]
fn full_chain_matches_golden_run() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let steps: [&[&str]; 7] = [
        &["--seed", "11", "fixtures", "generate", "--n", "24"],
        &["--out-dir", "out", "--backend", "rules", "standardize", "notes.jsonl"],
        &["--out-dir", "out", "metrics", "out/standardized.jsonl", "--notes", "notes.jsonl", "--format", "json"],
        &["--out-dir", "out", "extract", "out/standardized.jsonl"],
        &["--out-dir", "out", "export-fhir", "out/mentions.jsonl"],
        &["--out-dir", "out", "--seed", "5", "evaluate", "notes.jsonl", "out/standardized.jsonl", "--sample", "10"],
        &["--out-dir", "out", "estimate", "notes.jsonl"],
    ];
    for args in steps {
        let o = run(p, args);
        assert_eq!(code(&o), 0, "{args:?}: {}", stderr(&o));
    }
    let files = [
        "notes.jsonl",
        "ledger.jsonl",
        "out/standardized.jsonl",
        "out/failures.jsonl",
        "out/stats.csv",
        "out/summary.json",
        "out/hist_grammatical_errors.svg",
        "out/medications.csv",
        "out/findings.csv",
        "out/mentions.jsonl",
        "out/bundle.json",
        "out/unmapped_terms.csv",
        "out/content_diffs.jsonl",
        "out/review_sample.jsonl",
        "out/ratings.csv",
        "out/estimate.json",
    ];
    let mut digest = String::new();
    for f in files {
        let bytes = std::fs::read(p.join(f)).unwrap_or_else(|e| panic!("{f}: {e}"));
        digest.push_str(&format!("{}  {f}\n", hex::encode(Sha256::digest(&bytes))));
    }
    let m: Value = serde_json::from_slice(&std::fs::read(p.join("out/run_manifest.json")).unwrap()).unwrap();
    let stages: Vec<&str> = m["stages"].as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(stages, ["estimate", "evaluate", "export-fhir", "extract", "metrics", "standardize"]);
    let reviewed = std::fs::read_to_string(p.join("out/review_sample.jsonl")).unwrap();
    assert_eq!(reviewed.lines().count(), 10);

    if std::env::var_os("NOTESTD_BLESS").is_some() {
        std::fs::create_dir_all(golden_path().parent().unwrap()).unwrap();
        std::fs::write(golden_path(), &digest).unwrap();
    }
    let golden = std::fs::read_to_string(golden_path()).expect("golden digests present");
    assert_eq!(digest, golden);
}
