//! Pure, allocation-only building blocks for multimodal conversation corpora:
//! speech units transcribed in a simplified Jefferson notation, gesture units
//! transcribed in Typannot, both stored in one extended CoNLL-U document.
//!
//! Nothing in this crate touches the filesystem. Readers take `&str`, writers
//! return `String`, and every validation step returns [`Diagnostic`] values
//! instead of failing, so a caller can always collect a complete report.
//!
//! The companion `gestit` crate adds file IO, EAF (XML) and YAML decoding,
//! repository loading and the command-line front end.

#![no_std]

extern crate alloc;

pub mod conllu;
pub mod corpus;
pub mod diagnostic;
pub mod eaf;
pub mod jefferson;
pub mod metadata;
pub mod model;
pub mod overlap;
pub mod time;
pub mod typannot;

pub use diagnostic::{Diagnostic, Rule, Severity};
pub use model::{CorpusDocument, GesturalUnit, Token, TranscriptionUnit, Unit, UnitId};
pub use time::{Millis, TimeInterval};
