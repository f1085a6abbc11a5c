#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

pub fn fsr3d(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fsr3d"))
        .args(args)
        .output()
        .expect("spawn fsr3d")
}

/// Runs the binary and panics with its stderr unless it exits with 0.
pub fn fsr3d_ok(args: &[&str]) -> String {
    let out = fsr3d(args);
    assert!(
        out.status.success(),
        "fsr3d {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 manifest")
}

pub fn parse_manifest(text: &str) -> Vec<(String, String)> {
    text.lines()
        .map(|l| {
            let (k, v) = l
                .split_once('=')
                .unwrap_or_else(|| panic!("not key=value: {l}"));
            (k.to_string(), v.to_string())
        })
        .collect()
}

pub fn manifest_value<'a>(entries: &'a [(String, String)], key: &str) -> Option<&'a str> {
    entries
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.as_str())
}

/// Keys that hold wall-clock measurements, excluded from reproducibility checks.
pub fn is_timing_key(key: &str) -> bool {
    key.contains("seconds") || key.contains("speedup") || key.contains("time_ratio")
}

pub fn without_timing(text: &str) -> Vec<(String, String)> {
    parse_manifest(text)
        .into_iter()
        .filter(|(k, _)| !is_timing_key(k))
        .collect()
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}
