//! Path and stream entry points for the string-based readers.

use std::fs;
use std::io::{self, Read};
use std::path::Path;

use gestit_core::conllu::{self, ConlluError, ReadOptions};
use gestit_core::eaf::EafTier;
use gestit_core::{CorpusDocument, Diagnostic};

use crate::eaf_xml::{read_eaf, EafError};

#[derive(Debug, thiserror::Error)]
pub enum FileError {
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error(transparent)]
    Conllu(#[from] ConlluError),
    #[error(transparent)]
    Eaf(#[from] EafError),
}

/// Reads extended CoNLL-U from any reader, e.g. stdin.
pub fn read_conllu(mut input: impl Read, opts: &ReadOptions) -> Result<(CorpusDocument, Vec<Diagnostic>), FileError> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    Ok(conllu::read_str(&text, opts)?)
}

/// Reads a CoNLL-U file; diagnostics carry the path as their file.
pub fn read_conllu_file(path: &Path, partial: bool) -> Result<(CorpusDocument, Vec<Diagnostic>), FileError> {
    let opts = ReadOptions { source: Some(path.display().to_string()), partial };
    read_conllu(fs::File::open(path)?, &opts)
}

pub fn read_eaf_file(path: &Path) -> Result<(Vec<EafTier>, Vec<Diagnostic>), FileError> {
    let xml = fs::read_to_string(path)?;
    Ok(read_eaf(&xml, Some(&path.display().to_string()))?)
}
