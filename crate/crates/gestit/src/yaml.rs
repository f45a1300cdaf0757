//! Decoding participant and conversation files.
//!
//! The files use the multi-word keys of the schema (`First language`,
//! `Manually revised`, ...). Nested sections may be written either as
//! mappings or as lists of one-key mappings; both are accepted.

use gestit_core::metadata::{
    ConversationRecord, DataPaths, ParticipantRecord, F_AGE, F_CODE, F_DATA, F_DURATION, F_EDUCATION, F_FACING,
    F_FIRST_LANGUAGE, F_GENDER, F_PARTICIPANTS, F_PROFESSION, F_REGION, F_SIGHT_NOTES,
};
use gestit_core::{Diagnostic, Millis, Rule};
use serde_yaml::Value;

#[derive(Debug, thiserror::Error)]
pub enum YamlError {
    #[error("{0}")]
    Syntax(#[from] serde_yaml::Error),
    #[error("top level is not a mapping")]
    NotAMapping,
}

/// `(key, value)` pairs of a mapping, or of a list of one-key mappings.
fn entries(v: &Value) -> Vec<(String, &Value)> {
    match v {
        Value::Mapping(m) => m.iter().filter_map(|(k, v)| Some((scalar(k)?, v))).collect(),
        Value::Sequence(items) => items.iter().flat_map(entries).collect(),
        _ => Vec::new(),
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.trim().to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::Bool(b) => Some(b.to_string()),
        _ => None,
    }
}

fn lookup<'a>(pairs: &'a [(String, &'a Value)], key: &str) -> Option<&'a Value> {
    pairs.iter().find(|(k, _)| k.eq_ignore_ascii_case(key)).map(|(_, v)| *v)
}

/// A field that must be a single value. Null and empty strings count as
/// missing; lists and mappings are reported.
fn text_field(pairs: &[(String, &Value)], key: &str, diags: &mut Vec<Diagnostic>) -> Option<String> {
    match lookup(pairs, key)? {
        Value::Null => None,
        Value::Tagged(t) => scalar(&t.value),
        v => match scalar(v) {
            Some(s) if s.is_empty() => None,
            Some(s) => Some(s),
            None => {
                diags.push(Diagnostic::new(Rule::Met008, format!("`{key}` must be a single value")).on_field(key));
                None
            }
        },
    }
}

fn parse_mapping(text: &str) -> Result<Value, YamlError> {
    let v: Value = serde_yaml::from_str(text)?;
    match v {
        Value::Mapping(_) => Ok(v),
        Value::Null => Ok(Value::Mapping(Default::default())),
        _ => Err(YamlError::NotAMapping),
    }
}

pub fn participant_from_yaml(text: &str) -> Result<(ParticipantRecord, Vec<Diagnostic>), YamlError> {
    let v = parse_mapping(text)?;
    let pairs = entries(&v);
    let mut d = Vec::new();
    let rec = ParticipantRecord {
        code: text_field(&pairs, F_CODE, &mut d),
        gender: text_field(&pairs, F_GENDER, &mut d),
        age: text_field(&pairs, F_AGE, &mut d),
        region: text_field(&pairs, F_REGION, &mut d),
        first_language: text_field(&pairs, F_FIRST_LANGUAGE, &mut d),
        education: text_field(&pairs, F_EDUCATION, &mut d),
        profession: text_field(&pairs, F_PROFESSION, &mut d),
        sight_notes: text_field(&pairs, F_SIGHT_NOTES, &mut d),
    };
    Ok((rec, d))
}

pub fn conversation_from_yaml(text: &str) -> Result<(ConversationRecord, Vec<Diagnostic>), YamlError> {
    let v = parse_mapping(text)?;
    let pairs = entries(&v);
    let mut d = Vec::new();

    let participants = lookup(&pairs, F_PARTICIPANTS).and_then(|v| match v {
        Value::Null => None,
        Value::Sequence(items) => Some(
            items
                .iter()
                // `- [S001]` is a one-element flow list
                .filter_map(|i| match i {
                    Value::Sequence(inner) if inner.len() == 1 => scalar(&inner[0]),
                    other => scalar(other),
                })
                .collect(),
        ),
        other => {
            let s = scalar(other).unwrap_or_default();
            Some(s.split([',', ' ']).filter(|p| !p.is_empty()).map(String::from).collect())
        }
    });

    let data = lookup(&pairs, F_DATA).map(entries).unwrap_or_default();
    let video = lookup(&data, "Video").map(entries).unwrap_or_default();
    let transcription = lookup(&data, "Transcription").map(entries).unwrap_or_default();
    let mut paths = DataPaths::default();
    paths.video_left = text_field(&video, "Left", &mut d);
    paths.video_centre = text_field(&video, "Centre", &mut d).or_else(|| text_field(&video, "Center", &mut d));
    paths.video_right = text_field(&video, "Right", &mut d);
    paths.audio = text_field(&data, "Audio", &mut d);
    paths.automatic = text_field(&transcription, "Automatic", &mut d);
    paths.manually_revised = text_field(&transcription, "Manually revised", &mut d);
    paths.prosodic = text_field(&transcription, "Prosodic", &mut d);
    paths.gestual = text_field(&transcription, "Gestual", &mut d);

    let duration = match text_field(&pairs, F_DURATION, &mut d) {
        None => None,
        Some(s) => match Millis::parse_seconds(&s) {
            Ok(m) => Some(m),
            Err(e) => {
                d.push(Diagnostic::new(Rule::Met008, format!("Duration {s:?}: {e}")).on_field(F_DURATION));
                None
            }
        },
    };

    let rec = ConversationRecord {
        code: text_field(&pairs, F_CODE, &mut d),
        participants,
        facing: text_field(&pairs, F_FACING, &mut d),
        data: paths,
        duration,
    };
    Ok((rec, d))
}
