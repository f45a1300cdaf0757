//! Loading a corpus repository from disk.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use gestit_core::conllu::{self, ReadOptions};
use gestit_core::corpus::{EafFile, Entry, Repository};
use gestit_core::diagnostic::normalize;
use gestit_core::metadata::Stage;
use gestit_core::{Diagnostic, Rule};

use crate::eaf_xml::read_eaf;
use crate::yaml::{conversation_from_yaml, participant_from_yaml};

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("repository root {0} does not exist or is not a directory")]
    MissingRoot(PathBuf),
}

/// Where each kind of file lives, relative to the root.
#[derive(Debug, Clone)]
pub struct Layout {
    pub participants: PathBuf,
    pub conversations: PathBuf,
    pub conll: PathBuf,
    pub eaf: PathBuf,
}

impl Default for Layout {
    fn default() -> Self {
        Layout {
            participants: "data/participants".into(),
            conversations: "data/conversations".into(),
            conll: "data/conll".into(),
            eaf: "data/eaf".into(),
        }
    }
}

fn files(dir: &Path, extensions: &[&str]) -> Vec<PathBuf> {
    let Ok(read) = fs::read_dir(dir) else { return Vec::new() };
    let mut out: Vec<PathBuf> = read
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.is_file() && p.extension().and_then(|e| e.to_str()).is_some_and(|e| extensions.contains(&e)))
        .collect();
    out.sort();
    out
}

/// Path as shown in diagnostics: relative to the root, `/`-separated.
fn display(root: &Path, path: &Path) -> String {
    let rel = path.strip_prefix(root).unwrap_or(path);
    rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/")
}

/// Conversation code from a file name such as `DUC22051430.annotated.conll`.
pub fn conversation_of_name(path: &Path) -> Option<String> {
    let name = path.file_name()?.to_str()?;
    Some(name.split('.').next()?.to_string()).filter(|s| !s.is_empty())
}

fn load_failure(file: &str, e: impl std::fmt::Display) -> Diagnostic {
    Diagnostic::new(Rule::Rep004, e.to_string()).in_file(file)
}

/// Reads every metadata file, transcription and EAF file under `root`.
/// Per-file failures become `REP004` and the rest still loads.
pub fn load_repository(root: &Path, layout: &Layout) -> Result<(Repository, Vec<Diagnostic>), LoadError> {
    if !root.is_dir() {
        return Err(LoadError::MissingRoot(root.to_path_buf()));
    }
    let mut repo = Repository::default();
    let mut diags = Vec::new();

    for path in files(&root.join(&layout.participants), &["yaml", "yml"]) {
        let file = display(root, &path);
        let parsed = fs::read_to_string(&path)
            .map_err(|e| e.to_string())
            .and_then(|t| participant_from_yaml(&t).map_err(|e| e.to_string()));
        match parsed {
            Err(e) => diags.push(load_failure(&file, e)),
            Ok((record, d)) => {
                diags.extend(d.into_iter().map(|d| d.in_file(file.clone())));
                let key = record.code.clone().or_else(|| conversation_of_name(&path)).unwrap_or_default();
                if let Some(prev) = repo.participants.get(&key) {
                    diags.push(load_failure(&file, format!("participant {key} is already defined in {}", prev.file)));
                    continue;
                }
                repo.participants.insert(key, Entry { file, record });
            }
        }
    }

    for path in files(&root.join(&layout.conversations), &["yaml", "yml"]) {
        let file = display(root, &path);
        let parsed = fs::read_to_string(&path)
            .map_err(|e| e.to_string())
            .and_then(|t| conversation_from_yaml(&t).map_err(|e| e.to_string()));
        match parsed {
            Err(e) => diags.push(load_failure(&file, e)),
            Ok((record, d)) => {
                diags.extend(d.into_iter().map(|d| d.in_file(file.clone())));
                let key = record.code.clone().or_else(|| conversation_of_name(&path)).unwrap_or_default();
                if let Some(prev) = repo.conversations.get(&key) {
                    diags.push(load_failure(&file, format!("conversation {key} is already defined in {}", prev.file)));
                    continue;
                }
                let mut present = BTreeSet::new();
                for stage in Stage::ALL {
                    if let Some(p) = record.data.stage(stage) {
                        let p = Path::new(p.trim());
                        let full = if p.is_absolute() { p.to_path_buf() } else { root.join(p) };
                        if !p.as_os_str().is_empty() && full.is_file() {
                            present.insert(stage);
                        }
                    }
                }
                repo.stages_present.insert(key.clone(), present);
                repo.conversations.insert(key, Entry { file, record });
            }
        }
    }

    for path in files(&root.join(&layout.conll), &["conll", "conllu"]) {
        let file = display(root, &path);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) => {
                diags.push(load_failure(&file, e));
                continue;
            }
        };
        match conllu::read_str(&text, &ReadOptions { source: Some(file.clone()), partial: false }) {
            Ok((doc, d)) => {
                diags.extend(d);
                repo.documents.push(doc);
            }
            Err(e) => diags.push(load_failure(&file, e)),
        }
    }

    for path in files(&root.join(&layout.eaf), &["eaf"]) {
        let file = display(root, &path);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) => {
                diags.push(load_failure(&file, e));
                continue;
            }
        };
        match read_eaf(&text, Some(&file)) {
            Ok((tiers, d)) => {
                diags.extend(d);
                repo.eaf_files.push(EafFile { file, conversation: conversation_of_name(&path), tiers });
            }
            Err(e) => diags.push(load_failure(&file, e)),
        }
    }

    normalize(&mut diags);
    Ok((repo, diags))
}
