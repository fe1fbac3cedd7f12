//! End-to-end CLI checks over the shipped corpus: the exit-code contract
//! (0 valid, 1 failed/invalid, 2 usage) and report plumbing.

use std::path::{Path, PathBuf};
use std::process::Command;

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

fn perfrepair(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_perfrepair")).args(args).output().unwrap()
}

#[test]
fn bench_on_corpus_exits_zero() {
    let suite = corpus("toy-count").join("suite.toml");
    let out = perfrepair(&["bench", suite.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# bench"));
    assert!(text.contains("class=slow"));
}

#[test]
fn validate_accepts_every_developer_patch() {
    for name in ["strsearch", "toy-count", "accum-loop"] {
        let suite = corpus(name).join("suite.toml");
        let patch = corpus(name).join("developer.patch");
        let out =
            perfrepair(&["validate", suite.to_str().unwrap(), patch.to_str().unwrap()]);
        let text = String::from_utf8(out.stdout).unwrap();
        assert_eq!(out.status.code(), Some(0), "{name} report:\n{text}");
        assert!(text.contains("result=valid"), "{name} report:\n{text}");
    }
}

#[test]
fn validate_rejects_every_overfit_patch_with_exit_one() {
    for name in ["strsearch", "toy-count", "accum-loop"] {
        let suite = corpus(name).join("suite.toml");
        let patch = corpus(name).join("overfit.patch");
        let out =
            perfrepair(&["validate", suite.to_str().unwrap(), patch.to_str().unwrap()]);
        let text = String::from_utf8(out.stdout).unwrap();
        assert_eq!(out.status.code(), Some(1), "{name} report:\n{text}");
        assert!(text.contains("passes_suite=true"), "{name} report:\n{text}");
    }
}

#[test]
fn missing_suite_is_a_usage_error() {
    let out = perfrepair(&["bench", "/nonexistent/suite.toml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_trace_case_is_a_usage_error() {
    let suite = corpus("toy-count").join("suite.toml");
    let out = perfrepair(&["trace", suite.to_str().unwrap(), "--case", "no-such-id"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn infer_reports_counter_bounds_on_strsearch() {
    let suite = corpus("strsearch").join("suite.toml");
    let out = perfrepair(&["infer", suite.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("[bounds]"));
    assert!(text.contains("cnt_9="));
}
