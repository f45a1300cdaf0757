//! Participant and conversation records, the conversation code grammar and
//! the controlled vocabularies they are checked against.
//!
//! Records hold every field as optional so that a file with gaps still
//! loads and every gap is reported. Decoding from YAML lives in the `gestit`
//! crate; field names in diagnostics are the YAML keys.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::diagnostic::{Diagnostic, Rule};
use crate::time::Millis;

pub const F_CODE: &str = "Code";
pub const F_GENDER: &str = "Gender";
pub const F_AGE: &str = "Age";
pub const F_REGION: &str = "Region";
pub const F_FIRST_LANGUAGE: &str = "First language";
pub const F_EDUCATION: &str = "Education level";
pub const F_PROFESSION: &str = "Profession";
pub const F_SIGHT_NOTES: &str = "Notes on sight-related disabilities";
pub const F_PARTICIPANTS: &str = "Participants";
pub const F_FACING: &str = "Facing";
pub const F_DATA: &str = "Data";
pub const F_DURATION: &str = "Duration";

pub const EDUCATION_LEVELS: [&str; 5] = ["Primaria", "Medie inferiori", "Medie superiori", "Laurea", "PhD"];

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParticipantRecord {
    pub code: Option<String>,
    pub gender: Option<String>,
    pub age: Option<String>,
    pub region: Option<String>,
    pub first_language: Option<String>,
    pub education: Option<String>,
    pub profession: Option<String>,
    pub sight_notes: Option<String>,
}

/// The four transcription layers a conversation goes through.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Automatic,
    ManuallyRevised,
    Prosodic,
    Gestual,
}

impl Stage {
    pub const ALL: [Stage; 4] = [Stage::Automatic, Stage::ManuallyRevised, Stage::Prosodic, Stage::Gestual];

    pub fn label(self) -> &'static str {
        match self {
            Stage::Automatic => "Automatic",
            Stage::ManuallyRevised => "Manually revised",
            Stage::Prosodic => "Prosodic",
            Stage::Gestual => "Gestual",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DataPaths {
    pub video_left: Option<String>,
    pub video_centre: Option<String>,
    pub video_right: Option<String>,
    pub audio: Option<String>,
    pub automatic: Option<String>,
    pub manually_revised: Option<String>,
    pub prosodic: Option<String>,
    pub gestual: Option<String>,
}

impl DataPaths {
    pub fn stage(&self, stage: Stage) -> Option<&str> {
        match stage {
            Stage::Automatic => self.automatic.as_deref(),
            Stage::ManuallyRevised => self.manually_revised.as_deref(),
            Stage::Prosodic => self.prosodic.as_deref(),
            Stage::Gestual => self.gestual.as_deref(),
        }
    }

    /// Every declared slot with its field path, in schema order.
    pub fn entries(&self) -> [(&'static str, Option<&str>); 8] {
        [
            ("Data.Video.Left", self.video_left.as_deref()),
            ("Data.Video.Centre", self.video_centre.as_deref()),
            ("Data.Video.Right", self.video_right.as_deref()),
            ("Data.Audio", self.audio.as_deref()),
            ("Data.Transcription.Automatic", self.automatic.as_deref()),
            ("Data.Transcription.Manually revised", self.manually_revised.as_deref()),
            ("Data.Transcription.Prosodic", self.prosodic.as_deref()),
            ("Data.Transcription.Gestual", self.gestual.as_deref()),
        ]
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConversationRecord {
    pub code: Option<String>,
    /// Left seat first.
    pub participants: Option<Vec<String>>,
    pub facing: Option<String>,
    pub data: DataPaths,
    /// Declared media length, when the file gives one.
    pub duration: Option<Millis>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    Same,
    Different,
}

impl Condition {
    pub fn letter(self) -> char {
        match self {
            Condition::Same => 'S',
            Condition::Different => 'D',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Facing {
    Masked,
    Unmasked,
}

impl Facing {
    pub fn letter(self) -> char {
        match self {
            Facing::Masked => 'M',
            Facing::Unmasked => 'U',
        }
    }

    pub fn from_letter(s: &str) -> Option<Facing> {
        match s {
            "M" => Some(Facing::Masked),
            "U" => Some(Facing::Unmasked),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ConversationCode {
    pub condition: Condition,
    pub facing: Facing,
    pub room: char,
    pub day: u8,
    pub month: u8,
    pub hour: u8,
    pub minute: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum TimestampField {
    #[error("day")]
    Day,
    #[error("month")]
    Month,
    #[error("hour")]
    Hour,
    #[error("minute")]
    Minute,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error("conversation code must be 11 characters, got {0}")]
    BadLength(usize),
    #[error("condition letter {0:?} is not S or D")]
    BadConditionLetter(char),
    #[error("facing letter {0:?} is not M or U")]
    BadFacingLetter(char),
    #[error("room letter {0:?} is not an upper-case letter")]
    BadRoomLetter(char),
    #[error("timestamp {field} {value:?} is out of range")]
    BadTimestamp { field: TimestampField, value: String },
}

pub fn parse_conversation_code(code: &str) -> Result<ConversationCode, CodeError> {
    let chars: Vec<char> = code.chars().collect();
    if chars.len() != 11 {
        return Err(CodeError::BadLength(chars.len()));
    }
    let condition = match chars[0] {
        'S' => Condition::Same,
        'D' => Condition::Different,
        c => return Err(CodeError::BadConditionLetter(c)),
    };
    let facing = match chars[1] {
        'M' => Facing::Masked,
        'U' => Facing::Unmasked,
        c => return Err(CodeError::BadFacingLetter(c)),
    };
    let room = chars[2];
    if !room.is_ascii_uppercase() {
        return Err(CodeError::BadRoomLetter(room));
    }
    let field = |at: usize, which: TimestampField, lo: u8, hi: u8| {
        let pair = &chars[at..at + 2];
        let bad = || CodeError::BadTimestamp { field: which, value: pair.iter().collect() };
        if !pair.iter().all(char::is_ascii_digit) {
            return Err(bad());
        }
        let v = (pair[0] as u8 - b'0') * 10 + (pair[1] as u8 - b'0');
        if v < lo || v > hi {
            return Err(bad());
        }
        Ok(v)
    };
    Ok(ConversationCode {
        condition,
        facing,
        room,
        day: field(3, TimestampField::Day, 1, 31)?,
        month: field(5, TimestampField::Month, 1, 12)?,
        hour: field(7, TimestampField::Hour, 0, 23)?,
        minute: field(9, TimestampField::Minute, 0, 59)?,
    })
}

impl fmt::Display for ConversationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}{}{:02}{:02}{:02}{:02}",
            self.condition.letter(),
            self.facing.letter(),
            self.room,
            self.day,
            self.month,
            self.hour,
            self.minute
        )
    }
}

/// `S` or `B` from a valid participant code.
pub fn sight_letter(code: &str) -> Option<char> {
    let b = code.as_bytes();
    (b.len() == 4 && matches!(b[0], b'S' | b'B') && b[1..].iter().all(u8::is_ascii_digit)).then_some(b[0] as char)
}

pub fn is_participant_code(code: &str) -> bool {
    sight_letter(code).is_some()
}

/// Closed lists used by the validators. The bundled defaults come from
/// the data files shipped with the crate; each list can be replaced.
#[derive(Debug, Clone)]
pub struct Vocabularies {
    pub languages: Vec<String>,
    pub regions: Vec<String>,
    pub professions: Vec<String>,
    pub age_bins: Vec<String>,
    pub rooms: Vec<char>,
}

/// Non-empty, non-comment lines; for TSV input only the first column.
pub fn parse_list(text: &str) -> Vec<String> {
    text.lines()
        .map(|l| l.split('\t').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(ToString::to_string)
        .collect()
}

pub fn age_bins() -> Vec<String> {
    let mut bins = alloc::vec![String::from("0-5"), String::from("6-10"), String::from("11-20")];
    let mut lo = 21;
    while lo < 100 {
        bins.push(alloc::format!("{}-{}", lo, lo + 4));
        lo += 5;
    }
    bins
}

impl Default for Vocabularies {
    fn default() -> Self {
        let mut languages = parse_list(include_str!("../data/iso639-3.tsv"));
        languages.sort();
        Vocabularies {
            languages,
            regions: parse_list(include_str!("../data/regions.txt")),
            professions: parse_list(include_str!("../data/professions.txt")),
            age_bins: age_bins(),
            rooms: alloc::vec!['L', 'S', 'C'],
        }
    }
}

impl Vocabularies {
    pub fn is_language(&self, code: &str) -> bool {
        self.languages.binary_search_by(|l| l.as_str().cmp(code)).is_ok()
    }
}

fn field_diag(rule: Rule, field: &str, message: String) -> Diagnostic {
    Diagnostic::new(rule, message).on_field(field.to_string())
}

fn missing(field: &str) -> Diagnostic {
    field_diag(Rule::Met008, field, alloc::format!("`{field}` is missing"))
}

fn closed(value: &str, list: &[String]) -> bool {
    list.iter().any(|v| v == value)
}

pub fn validate_participant(rec: &ParticipantRecord, vocab: &Vocabularies) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut check = |field: &str, value: &Option<String>, ok: &dyn Fn(&str) -> Option<(Rule, String)>| match value {
        None => out.push(missing(field)),
        Some(v) => {
            if let Some((rule, msg)) = ok(v) {
                out.push(field_diag(rule, field, msg));
            }
        }
    };
    check(F_CODE, &rec.code, &|v| {
        (!is_participant_code(v)).then(|| (Rule::Met001, alloc::format!("{v:?} is not S or B followed by 3 digits")))
    });
    check(F_GENDER, &rec.gender, &|v| {
        (!matches!(v, "F" | "M")).then(|| (Rule::Met002, alloc::format!("{v:?} is not F or M")))
    });
    check(F_AGE, &rec.age, &|v| {
        (!closed(v, &vocab.age_bins)).then(|| (Rule::Met004, alloc::format!("{v:?} is not an age bin (0-5, 6-10, 11-20, 21-25, ...)")))
    });
    check(F_REGION, &rec.region, &|v| {
        if closed(v, &vocab.regions) {
            return None;
        }
        let hint = vocab.regions.iter().find(|r| r.to_lowercase() == v.to_lowercase());
        Some(match hint {
            Some(r) => (Rule::Met005, alloc::format!("{v:?} should be spelled {r:?}")),
            None => (Rule::Met005, alloc::format!("{v:?} is not one of the 20 regions")),
        })
    });
    check(F_FIRST_LANGUAGE, &rec.first_language, &|v| {
        let shaped = v.len() == 3 && v.bytes().all(|b| b.is_ascii_uppercase());
        if shaped && vocab.is_language(v) {
            None
        } else if shaped {
            Some((Rule::Met003, alloc::format!("{v:?} is not in the ISO 639-3 table")))
        } else {
            Some((Rule::Met003, alloc::format!("{v:?} is not an upper-case three-letter ISO 639-3 code")))
        }
    });
    check(F_EDUCATION, &rec.education, &|v| {
        (!EDUCATION_LEVELS.contains(&v)).then(|| (Rule::Met006, alloc::format!("{v:?} is not one of {}", EDUCATION_LEVELS.join(", "))))
    });
    check(F_PROFESSION, &rec.profession, &|v| {
        (!closed(v, &vocab.professions)).then(|| (Rule::Met007, alloc::format!("{v:?} is not in the profession list")))
    });
    out
}

pub fn validate_conversation(
    rec: &ConversationRecord,
    participants: &BTreeMap<String, ParticipantRecord>,
    vocab: &Vocabularies,
) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let code = match &rec.code {
        None => {
            out.push(missing(F_CODE));
            None
        }
        Some(c) => match parse_conversation_code(c) {
            Ok(code) => {
                if !vocab.rooms.contains(&code.room) {
                    out.push(field_diag(
                        Rule::Met013,
                        F_CODE,
                        alloc::format!("room {:?} is not one of {:?}", code.room, vocab.rooms),
                    ));
                }
                Some(code)
            }
            Err(e) => {
                out.push(field_diag(Rule::Met012, F_CODE, alloc::format!("{c:?}: {e}")));
                None
            }
        },
    };

    let mut pair: Option<(char, char)> = None;
    match &rec.participants {
        None => out.push(missing(F_PARTICIPANTS)),
        Some(list) => {
            let distinct = list.len() != 2 || list[0] != list[1];
            if list.len() != 2 || !distinct {
                out.push(field_diag(
                    Rule::Met009,
                    F_PARTICIPANTS,
                    alloc::format!("expected two distinct participants, got [{}]", list.join(", ")),
                ));
            }
            for p in list {
                if !is_participant_code(p) {
                    out.push(field_diag(Rule::Met001, F_PARTICIPANTS, alloc::format!("{p:?} is not a participant code")));
                } else if !participants.contains_key(p) {
                    out.push(field_diag(Rule::Met014, F_PARTICIPANTS, alloc::format!("{p} has no participant record")));
                }
            }
            if let [a, b] = list.as_slice() {
                if let (Some(a), Some(b)) = (sight_letter(a), sight_letter(b)) {
                    pair = Some((a, b));
                }
            }
        }
    }

    let facing = match &rec.facing {
        None => {
            out.push(missing(F_FACING));
            None
        }
        Some(f) => {
            let parsed = Facing::from_letter(f);
            if parsed.is_none() {
                out.push(field_diag(Rule::Met015, F_FACING, alloc::format!("{f:?} is not M or U")));
            }
            parsed
        }
    };

    if let Some(code) = code {
        if let Some(f) = facing {
            if f != code.facing {
                out.push(field_diag(
                    Rule::Met011,
                    F_FACING,
                    alloc::format!("Facing is {} but the code says {}", f.letter(), code.facing.letter()),
                ));
            }
        }
        if let Some((a, b)) = pair {
            let expected = if a == b { Condition::Same } else { Condition::Different };
            if expected != code.condition {
                out.push(field_diag(
                    Rule::Met010,
                    F_CODE,
                    alloc::format!(
                        "participants {a}/{b} make this a {} conversation but the code says {}",
                        expected.letter(),
                        code.condition.letter()
                    ),
                ));
            }
        }
    }
    let masked = facing == Some(Facing::Masked) || code.is_some_and(|c| c.facing == Facing::Masked);
    if masked && pair == Some(('B', 'B')) {
        out.push(field_diag(Rule::Met016, F_FACING, "masked setting recorded for two blind participants".to_string()));
    }

    for (field, path) in rec.data.entries() {
        if path.is_none_or(|p| p.trim().is_empty()) {
            out.push(field_diag(Rule::Met017, field, alloc::format!("`{field}` has no path")));
        }
    }
    out
}
