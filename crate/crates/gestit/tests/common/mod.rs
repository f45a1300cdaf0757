#![allow(dead_code)]

pub mod rule_cases;

use std::fs;
use std::path::{Path, PathBuf};

use tempfile::TempDir;

pub const CONVERSATION: &str = "DUC22051430";

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn copy_dir(src: &Path, dst: &Path) {
    fs::create_dir_all(dst).unwrap();
    for entry in fs::read_dir(src).unwrap() {
        let entry = entry.unwrap();
        let to = dst.join(entry.file_name());
        if entry.file_type().unwrap().is_dir() {
            copy_dir(&entry.path(), &to);
        } else {
            fs::copy(entry.path(), &to).unwrap();
        }
    }
}

/// A scratch copy of the clean repository fixture.
pub fn scratch_repo() -> TempDir {
    let dir = TempDir::new().unwrap();
    copy_dir(&fixtures().join("repo"), dir.path());
    dir
}

/// Replaces the first occurrence of `from`, which must be present.
pub fn edit(path: &Path, from: &str, to: &str) {
    let text = fs::read_to_string(path).unwrap();
    assert!(text.contains(from), "{from:?} not in {}", path.display());
    fs::write(path, text.replacen(from, to, 1)).unwrap();
}

pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn gestit<S: AsRef<str>>(args: &[S]) -> Output {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("gestit").chain(args.iter().map(AsRef::as_ref));
    let code = gestit::cli::run(argv, &mut out, &mut err);
    Output { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

/// Rule codes reported by `validate --format json` on `root`.
pub fn validate_rules(root: &Path, strict: bool) -> (i32, Vec<String>) {
    let root = root.display().to_string();
    let mut args = vec!["validate", "--format", "json", "--root", root.as_str()];
    if strict {
        args.push("--strict");
    }
    let o = gestit(&args);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", o.stdout));
    let rules = v.as_array().unwrap().iter().map(|d| d["rule_id"].as_str().unwrap().to_string()).collect();
    (o.code, rules)
}
