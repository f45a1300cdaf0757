//! Shared domain types: tokens, speech and gesture units, documents.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::diagnostic::{Diagnostic, Rule};
use crate::time::{Millis, TimeInterval};

pub const ALIGN_BEGIN: &str = "AlignBegin";
pub const ALIGN_END: &str = "AlignEnd";
pub const OVERLAP: &str = "Overlap";
pub const GESTURE: &str = "gesture";
pub const META: &str = "meta";
/// Form of the single token carried by non-verbal units.
pub const EMPTY_FORM: &str = "EMPTY";

/// Maximum allowed gap between `duration` and the aligned span.
pub const DURATION_TOLERANCE: Millis = Millis(1);

/// One `key=value` (or bare `key`) entry of a FEATS or MISC column.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Feature {
    pub key: String,
    pub value: Option<String>,
}

/// An ordered FEATS/MISC list. Order is preserved from the source; [`set`]
/// inserts new keys at their sorted position.
///
/// [`set`]: Features::set
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Features(Vec<Feature>);

impl Features {
    pub fn new() -> Features {
        Features(Vec::new())
    }

    /// Parses a column value; `_` is the empty list.
    pub fn parse(column: &str) -> Features {
        if column == "_" || column.is_empty() {
            return Features::new();
        }
        Features(
            column
                .split('|')
                .map(|entry| match entry.split_once('=') {
                    Some((k, v)) => Feature { key: k.to_string(), value: Some(v.to_string()) },
                    None => Feature { key: entry.to_string(), value: None },
                })
                .collect(),
        )
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Feature> {
        self.0.iter()
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.iter().find(|f| f.key == key).and_then(|f| f.value.as_deref())
    }

    pub fn contains(&self, key: &str) -> bool {
        self.0.iter().any(|f| f.key == key)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        let value = Some(value.into());
        if let Some(f) = self.0.iter_mut().find(|f| f.key == key) {
            f.value = value;
            return;
        }
        let pos = self.0.iter().position(|f| f.key.as_str() > key).unwrap_or(self.0.len());
        self.0.insert(pos, Feature { key: key.to_string(), value });
    }

    /// Appends `key=value`, or extends an existing key's comma-separated values.
    pub fn append(&mut self, key: &str, value: &str) {
        if let Some(f) = self.0.iter_mut().find(|f| f.key == key) {
            match &mut f.value {
                Some(v) if v.split(',').any(|x| x == value) => {}
                Some(v) => {
                    v.push(',');
                    v.push_str(value);
                }
                None => f.value = Some(value.to_string()),
            }
            return;
        }
        self.0.push(Feature { key: key.to_string(), value: Some(value.to_string()) });
    }

    pub fn remove(&mut self, key: &str) -> Option<String> {
        let pos = self.0.iter().position(|f| f.key == key)?;
        self.0.remove(pos).value
    }
}

impl fmt::Display for Features {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("_");
        }
        for (i, feat) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            f.write_str(&feat.key)?;
            if let Some(v) = &feat.value {
                write!(f, "={v}")?;
            }
        }
        Ok(())
    }
}

/// One 10-column token line. Optional columns are `None` when written as `_`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub id: usize,
    pub form: String,
    pub lemma: Option<String>,
    pub upos: Option<String>,
    pub xpos: Option<String>,
    pub feats: Features,
    /// `Some(0)` is the root; `None` means the unit carries no syntax.
    pub head: Option<usize>,
    pub deprel: Option<String>,
    pub deps: Option<String>,
    pub misc: Features,
}

impl Token {
    /// A bare token with only id and form filled in.
    pub fn bare(id: usize, form: impl Into<String>) -> Token {
        Token {
            id,
            form: form.into(),
            lemma: None,
            upos: None,
            xpos: None,
            feats: Features::new(),
            head: None,
            deprel: None,
            deps: None,
            misc: Features::new(),
        }
    }

    /// The `EMPTY` placeholder used by gestural and para-verbal units.
    pub fn placeholder(misc: Features) -> Token {
        Token {
            id: 1,
            form: EMPTY_FORM.to_string(),
            lemma: Some(EMPTY_FORM.to_string()),
            upos: Some("X".to_string()),
            xpos: None,
            feats: Features::new(),
            head: Some(0),
            deprel: Some("root".to_string()),
            deps: None,
            misc,
        }
    }

    pub fn is_placeholder(&self) -> bool {
        self.form == EMPTY_FORM
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitKind {
    /// Speech or para-verbal unit, `tu` ids.
    Transcription,
    /// Gesture unit, `gu` ids.
    Gestural,
}

impl UnitKind {
    pub fn prefix(self) -> &'static str {
        match self {
            UnitKind::Transcription => "tu",
            UnitKind::Gestural => "gu",
        }
    }
}

/// A unit identifier such as `tu0005` or `gu0003`.
///
/// The hyphenated spelling `tu-0005` is accepted on input and normalized
/// away; the digit string is kept as written.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UnitId {
    kind: UnitKind,
    digits: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0:?} is not a unit id (tu/gu followed by digits)")]
pub struct BadUnitId(pub String);

impl UnitId {
    pub fn new(kind: UnitKind, number: u64) -> UnitId {
        UnitId { kind, digits: alloc::format!("{number:04}") }
    }

    pub fn kind(&self) -> UnitKind {
        self.kind
    }

    pub fn digits(&self) -> &str {
        &self.digits
    }

    fn significant_digits(&self) -> &str {
        let t = self.digits.trim_start_matches('0');
        if t.is_empty() {
            "0"
        } else {
            t
        }
    }
}

impl FromStr for UnitId {
    type Err = BadUnitId;

    fn from_str(s: &str) -> Result<UnitId, BadUnitId> {
        let kind = if s.starts_with("tu") {
            UnitKind::Transcription
        } else if s.starts_with("gu") {
            UnitKind::Gestural
        } else {
            return Err(BadUnitId(s.to_string()));
        };
        let rest = &s[2..];
        let digits = rest.strip_prefix('-').unwrap_or(rest);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(BadUnitId(s.to_string()));
        }
        Ok(UnitId { kind, digits: digits.to_string() })
    }
}

impl fmt::Display for UnitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind.prefix(), self.digits)
    }
}

impl Serialize for UnitId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Orders `tu` before `gu`, then by numeric value.
impl Ord for UnitId {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (self.significant_digits(), other.significant_digits());
        self.kind
            .cmp(&other.kind)
            .then(a.len().cmp(&b.len()))
            .then(a.cmp(b))
            .then(self.digits.cmp(&other.digits))
    }
}

impl PartialOrd for UnitId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Typannot articulatory systems used for gesture units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Articulator {
    #[serde(rename = "F:LH")]
    FingerLeft,
    #[serde(rename = "F:RH")]
    FingerRight,
    #[serde(rename = "UL")]
    UpperLimb,
    #[serde(rename = "UB")]
    UpperBody,
}

impl Articulator {
    pub const ALL: [Articulator; 4] = [
        Articulator::FingerLeft,
        Articulator::FingerRight,
        Articulator::UpperLimb,
        Articulator::UpperBody,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Articulator::FingerLeft => "F:LH",
            Articulator::FingerRight => "F:RH",
            Articulator::UpperLimb => "UL",
            Articulator::UpperBody => "UB",
        }
    }

    pub fn from_code(code: &str) -> Option<Articulator> {
        Articulator::ALL.into_iter().find(|a| a.code() == code)
    }
}

impl fmt::Display for Articulator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// Metadata shared by both unit kinds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitHeader {
    pub sent_id: UnitId,
    pub conversation_id: String,
    pub speaker_id: String,
    pub duration: Millis,
    pub overlaps: Vec<UnitId>,
    /// Comment lines with keys this dialect does not define, kept verbatim
    /// (without the leading `# `).
    pub extra: Vec<String>,
}

/// A speech unit. Para-verbal units (laughs, noises) are transcription units
/// whose only token is `EMPTY` with a `meta` MISC feature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranscriptionUnit {
    pub header: UnitHeader,
    pub text_jefferson: Option<String>,
    pub text: String,
    pub tokens: Vec<Token>,
}

impl TranscriptionUnit {
    /// True for units that carry words rather than a `meta` placeholder.
    pub fn is_verbal(&self) -> bool {
        !(self.tokens.len() == 1 && self.tokens[0].is_placeholder())
    }
}

/// A gesture unit for one articulator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GesturalUnit {
    pub header: UnitHeader,
    /// The `type` metadata value as written; see [`GesturalUnit::articulator`].
    pub unit_type: String,
    pub text: String,
    pub tokens: Vec<Token>,
}

impl GesturalUnit {
    pub fn articulator(&self) -> Option<Articulator> {
        Articulator::from_code(&self.unit_type)
    }

    /// The raw `gesture` MISC value (including its quotes) of the placeholder token.
    pub fn gesture_code(&self) -> Option<&str> {
        self.tokens.iter().find(|t| t.is_placeholder())?.misc.get(GESTURE)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Unit {
    Transcription(TranscriptionUnit),
    Gestural(GesturalUnit),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlignmentError {
    #[error("unit {unit} has no tokens")]
    NoTokens { unit: String },
    #[error("unit {unit}: first token carries no {ALIGN_BEGIN}")]
    MissingBegin { unit: String },
    #[error("unit {unit}: last token carries no {ALIGN_END}")]
    MissingEnd { unit: String },
    #[error("unit {unit}: {feature}={value:?} is not a time in seconds")]
    BadValue { unit: String, feature: &'static str, value: String },
    #[error("unit {unit}: {source}")]
    Empty { unit: String, source: crate::time::EmptyInterval },
}

impl Unit {
    pub fn header(&self) -> &UnitHeader {
        match self {
            Unit::Transcription(u) => &u.header,
            Unit::Gestural(u) => &u.header,
        }
    }

    pub fn header_mut(&mut self) -> &mut UnitHeader {
        match self {
            Unit::Transcription(u) => &mut u.header,
            Unit::Gestural(u) => &mut u.header,
        }
    }

    pub fn id(&self) -> &UnitId {
        &self.header().sent_id
    }

    pub fn kind(&self) -> UnitKind {
        match self {
            Unit::Transcription(_) => UnitKind::Transcription,
            Unit::Gestural(_) => UnitKind::Gestural,
        }
    }

    pub fn tokens(&self) -> &[Token] {
        match self {
            Unit::Transcription(u) => &u.tokens,
            Unit::Gestural(u) => &u.tokens,
        }
    }

    pub fn tokens_mut(&mut self) -> &mut Vec<Token> {
        match self {
            Unit::Transcription(u) => &mut u.tokens,
            Unit::Gestural(u) => &mut u.tokens,
        }
    }

    pub fn text(&self) -> &str {
        match self {
            Unit::Transcription(u) => &u.text,
            Unit::Gestural(u) => &u.text,
        }
    }

    pub fn as_transcription(&self) -> Option<&TranscriptionUnit> {
        match self {
            Unit::Transcription(u) => Some(u),
            Unit::Gestural(_) => None,
        }
    }

    pub fn as_gestural(&self) -> Option<&GesturalUnit> {
        match self {
            Unit::Gestural(u) => Some(u),
            Unit::Transcription(_) => None,
        }
    }

    /// The `[AlignBegin, AlignEnd]` span read from the first and last token.
    pub fn interval(&self) -> Result<TimeInterval, AlignmentError> {
        unit_interval(self)
    }
}

pub fn unit_interval(unit: &Unit) -> Result<TimeInterval, AlignmentError> {
    let name = || unit.id().to_string();
    let tokens = unit.tokens();
    let (first, last) = match (tokens.first(), tokens.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(AlignmentError::NoTokens { unit: name() }),
    };
    let read = |tok: &Token, feature: &'static str| -> Result<Option<Millis>, AlignmentError> {
        match tok.misc.get(feature) {
            None => Ok(None),
            Some(v) => Millis::parse_seconds(v).map(Some).map_err(|_| AlignmentError::BadValue {
                unit: name(),
                feature,
                value: v.to_string(),
            }),
        }
    };
    let begin = read(first, ALIGN_BEGIN)?.ok_or_else(|| AlignmentError::MissingBegin { unit: name() })?;
    let end = read(last, ALIGN_END)?.ok_or_else(|| AlignmentError::MissingEnd { unit: name() })?;
    TimeInterval::new(begin, end).map_err(|source| AlignmentError::Empty { unit: name(), source })
}

/// `DUR001` when `duration` and the aligned span disagree by more than 1 ms.
pub fn check_duration(unit: &Unit) -> Option<Diagnostic> {
    let span = unit.interval().ok()?.length();
    let declared = unit.header().duration;
    let gap = declared.abs_diff(span);
    (gap > DURATION_TOLERANCE).then(|| {
        Diagnostic::new(
            Rule::Dur001,
            alloc::format!("duration {declared} but aligned span is {span} ({} ms apart)", gap.0),
        )
        .for_unit(unit.id().to_string())
        .on_field("duration")
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("token {position} has id {found}, expected {expected}")]
    Numbering { position: usize, expected: usize, found: usize },
    #[error("some tokens have a HEAD and others do not")]
    PartialHeads,
    #[error("token {token} has HEAD {head} outside 0..={max}")]
    HeadOutOfRange { token: usize, head: usize, max: usize },
    #[error("{count} tokens attach to the root (exactly one required)")]
    RootCount { count: usize },
    #[error("token {token} is on a HEAD cycle")]
    Cycle { token: usize },
}

/// Checks that ids run 1..=n and, if heads are present, that they form a
/// single-rooted tree. Units without any HEAD values pass the tree part.
pub fn check_tree(tokens: &[Token]) -> Result<(), TreeError> {
    for (i, tok) in tokens.iter().enumerate() {
        if tok.id != i + 1 {
            return Err(TreeError::Numbering { position: i + 1, expected: i + 1, found: tok.id });
        }
    }
    let with_head = tokens.iter().filter(|t| t.head.is_some()).count();
    if with_head == 0 {
        return Ok(());
    }
    if with_head != tokens.len() {
        return Err(TreeError::PartialHeads);
    }
    let heads: Vec<usize> = tokens.iter().map(|t| t.head.unwrap_or(0)).collect();
    let n = heads.len();
    for (i, &h) in heads.iter().enumerate() {
        if h > n {
            return Err(TreeError::HeadOutOfRange { token: i + 1, head: h, max: n });
        }
    }
    let roots = heads.iter().filter(|&&h| h == 0).count();
    if roots != 1 {
        return Err(TreeError::RootCount { count: roots });
    }
    // 0 = unvisited, 1 = on current path, 2 = reaches root
    let mut state = alloc::vec![0u8; n + 1];
    state[0] = 2;
    for start in 1..=n {
        let mut path = Vec::new();
        let mut node = start;
        while state[node] == 0 {
            state[node] = 1;
            path.push(node);
            node = heads[node - 1];
        }
        if state[node] == 1 {
            return Err(TreeError::Cycle { token: node });
        }
        for p in path {
            state[p] = 2;
        }
    }
    Ok(())
}

/// Source positions of a unit in the file it was read from (1-based lines).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct UnitLines {
    pub start: usize,
    pub first_token: usize,
}

/// An ordered collection of units, usually one conversation or part of one.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CorpusDocument {
    pub units: Vec<Unit>,
    /// Path or name the document was read from, used in diagnostics.
    pub source: Option<String>,
    /// Parallel to `units` when the document came from text.
    pub lines: Vec<UnitLines>,
}

impl CorpusDocument {
    pub fn new(units: Vec<Unit>) -> CorpusDocument {
        CorpusDocument { units, source: None, lines: Vec::new() }
    }

    pub fn unit(&self, id: &UnitId) -> Option<&Unit> {
        self.units.iter().find(|u| u.id() == id)
    }

    pub fn unit_line(&self, index: usize) -> Option<usize> {
        self.lines.get(index).map(|l| l.start)
    }

    pub fn token_line(&self, index: usize, token: usize) -> Option<usize> {
        self.lines.get(index).map(|l| l.first_token + token)
    }

    /// Conversation id of the first unit.
    pub fn conversation_id(&self) -> Option<&str> {
        self.units.first().map(|u| u.header().conversation_id.as_str())
    }
}
