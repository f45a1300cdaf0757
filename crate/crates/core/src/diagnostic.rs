//! Validation findings and the rule catalog.
//!
//! Every check in the toolkit reports through [`Diagnostic`]. Rule ids are
//! stable strings (`DUR001`, `JEF003`, ...) grouped in families:
//!
//! | family | scope |
//! |--------|-------|
//! | `DUR`  | declared duration vs. aligned span |
//! | `JEF`  | Jefferson notation well-formedness |
//! | `CON`  | extended CoNLL-U structure |
//! | `OVL`  | unit and token overlap annotation |
//! | `TYP`  | Typannot gesture code structure |
//! | `MET`  | participant / conversation metadata |
//! | `REP`  | repository cross references |
//! | `EAF`  | ELAN ingestion notes |

use alloc::string::String;
use core::fmt;

use serde::{Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Info,
    Warning,
    Error,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Info => "info",
            Severity::Warning => "warning",
            Severity::Error => "error",
        }
    }
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

macro_rules! rules {
    ($( $variant:ident => $code:literal, $sev:ident, $summary:literal; )*) => {
        /// Catalog of every rule the validators can emit.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum Rule {
            $( $variant, )*
        }

        impl Rule {
            pub const ALL: &'static [Rule] = &[$( Rule::$variant, )*];

            pub fn code(self) -> &'static str {
                match self { $( Rule::$variant => $code, )* }
            }

            pub fn default_severity(self) -> Severity {
                match self { $( Rule::$variant => Severity::$sev, )* }
            }

            pub fn summary(self) -> &'static str {
                match self { $( Rule::$variant => $summary, )* }
            }

            pub fn from_code(code: &str) -> Option<Rule> {
                match code {
                    $( $code => Some(Rule::$variant), )*
                    _ => None,
                }
            }
        }
    };
}

rules! {
    Dur001 => "DUR001", Error, "declared duration differs from aligned span by more than 1 ms";

    Jef001 => "JEF001", Error, "unclosed delimiter";
    Jef002 => "JEF002", Error, "closing delimiter without matching opener";
    Jef003 => "JEF003", Error, "delimited span contains no text";
    Jef004 => "JEF004", Error, "overlap brackets nested inside an open overlap";
    Jef005 => "JEF005", Error, "prosodic spans of different kinds interleave";
    Jef006 => "JEF006", Error, "prosodic symbol with no word to attach to";

    Con001 => "CON001", Error, "token numbering or dependency tree is malformed";
    Con002 => "CON002", Error, "text does not match stripped text_jefferson";
    Con003 => "CON003", Error, "text does not match the token forms";
    Con004 => "CON004", Warning, "overlaps lists an id not present in the document";
    Con005 => "CON005", Error, "duplicate sent_id";
    Con006 => "CON006", Error, "missing or malformed unit metadata";
    Con007 => "CON007", Error, "missing or invalid AlignBegin/AlignEnd";
    Con008 => "CON008", Error, "gestural unit violates its shape (EMPTY token, type, gesture)";

    Ovl001 => "OVL001", Error, "overlap listed in one direction only";
    Ovl002 => "OVL002", Error, "overlap listed between disjoint intervals";
    Ovl003 => "OVL003", Error, "intersecting units not listed as overlapping";
    Ovl004 => "OVL004", Warning, "overlap span cannot be paired with a partner unit";
    Ovl005 => "OVL005", Error, "token Overlap feature is malformed or names an unlisted unit";
    Ovl006 => "OVL006", Warning, "token Overlap features differ from the regenerated ones";

    Typ001 => "TYP001", Error, "unbalanced group in gesture code";
    Typ002 => "TYP002", Error, "empty group in gesture code";
    Typ003 => "TYP003", Error, "gesture code glyph outside the Private Use Area";
    Typ004 => "TYP004", Warning, "gesture prefix glyph disagrees with the unit articulator";

    Met001 => "MET001", Error, "participant code is not [SB] + 3 digits";
    Met002 => "MET002", Error, "gender is not F or M";
    Met003 => "MET003", Error, "first language is not an upper-case ISO 639-3 code";
    Met004 => "MET004", Error, "age is not one of the age bins";
    Met005 => "MET005", Error, "region is not an Italian region";
    Met006 => "MET006", Error, "education level is not in the closed list";
    Met007 => "MET007", Warning, "profession is not in the category list";
    Met008 => "MET008", Error, "required metadata field missing";
    Met009 => "MET009", Error, "conversation must list exactly two participants";
    Met010 => "MET010", Error, "condition letter disagrees with participant sight codes";
    Met011 => "MET011", Error, "facing letter in code disagrees with Facing field";
    Met012 => "MET012", Error, "conversation code grammar violated";
    Met013 => "MET013", Warning, "room letter outside the configured room set";
    Met014 => "MET014", Error, "conversation references an unknown participant";
    Met015 => "MET015", Error, "Facing is not M or U";
    Met016 => "MET016", Warning, "masked setting recorded for a blind-blind pair";
    Met017 => "MET017", Warning, "conversation data path missing";

    Rep001 => "REP001", Error, "transcription refers to an unknown conversation";
    Rep002 => "REP002", Error, "unit speaker is not a known participant";
    Rep003 => "REP003", Error, "tier name matches no participant and no articulator";
    Rep004 => "REP004", Error, "file could not be loaded";

    Eaf001 => "EAF001", Info, "tier annotations were out of time order and have been sorted";
    Eaf002 => "EAF002", Info, "unsupported EAF element ignored";
    Eaf003 => "EAF003", Info, "experimenter tier mapped to regular transcription units";
    Eaf004 => "EAF004", Warning, "empty annotation skipped";
    Eaf005 => "EAF005", Warning, "annotations overlap within one tier";
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl Serialize for Rule {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.code())
    }
}

/// One machine-readable finding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    #[serde(rename = "rule_id")]
    pub rule: Rule,
    pub severity: Severity,
    pub file: Option<String>,
    pub line: Option<usize>,
    pub unit: Option<String>,
    pub field: Option<String>,
    pub message: String,
}

impl Diagnostic {
    pub fn new(rule: Rule, message: impl Into<String>) -> Diagnostic {
        Diagnostic {
            rule,
            severity: rule.default_severity(),
            file: None,
            line: None,
            unit: None,
            field: None,
            message: message.into(),
        }
    }

    pub fn with_severity(mut self, severity: Severity) -> Self {
        self.severity = severity;
        self
    }

    pub fn in_file(mut self, file: impl Into<String>) -> Self {
        self.file = Some(file.into());
        self
    }

    pub fn at_line(mut self, line: Option<usize>) -> Self {
        self.line = line;
        self
    }

    pub fn for_unit(mut self, unit: impl Into<String>) -> Self {
        self.unit = Some(unit.into());
        self
    }

    pub fn on_field(mut self, field: impl Into<String>) -> Self {
        self.field = Some(field.into());
        self
    }

    fn sort_key(&self) -> (&str, usize, &str, &str, &str, &str) {
        (
            self.file.as_deref().unwrap_or(""),
            self.line.unwrap_or(0),
            self.rule.code(),
            self.unit.as_deref().unwrap_or(""),
            self.field.as_deref().unwrap_or(""),
            &self.message,
        )
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(file) = &self.file {
            f.write_str(file)?;
            if let Some(line) = self.line {
                write!(f, ":{line}")?;
            }
            f.write_str(": ")?;
        } else if let Some(line) = self.line {
            write!(f, "line {line}: ")?;
        }
        write!(f, "{} {}", self.severity, self.rule)?;
        if let Some(unit) = &self.unit {
            write!(f, " [{unit}]")?;
        }
        if let Some(field) = &self.field {
            write!(f, " ({field})")?;
        }
        write!(f, ": {}", self.message)
    }
}

/// Sorts by file, then line, then rule, and drops exact duplicates.
pub fn normalize(diags: &mut alloc::vec::Vec<Diagnostic>) {
    diags.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    diags.dedup();
}

pub fn max_severity(diags: &[Diagnostic]) -> Option<Severity> {
    diags.iter().map(|d| d.severity).max()
}
