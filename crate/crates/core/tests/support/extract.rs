//! The published seven-unit extract of DUC22051430 and the units it
//! refers to without including them.

use std::collections::BTreeSet;

use gestit_core::conllu::{self, ReadOptions};
use gestit_core::model::{Features, Token, TranscriptionUnit, UnitHeader, ALIGN_BEGIN, ALIGN_END, OVERLAP};
use gestit_core::{CorpusDocument, GesturalUnit, Millis, Unit, UnitId};

pub const EXTRACT: &str = include_str!("../fixtures/duc22051430_extract.conllu");

pub fn read() -> CorpusDocument {
    let (doc, diags) = conllu::read_str(EXTRACT, &ReadOptions { source: None, partial: true }).unwrap();
    assert!(diags.is_empty(), "{diags:?}");
    doc
}

pub fn id(s: &str) -> UnitId {
    s.parse().unwrap()
}

pub fn overlaps(doc: &CorpusDocument, unit: &str) -> Vec<String> {
    doc.unit(&id(unit)).unwrap().header().overlaps.iter().map(ToString::to_string).collect()
}

pub fn token_overlap(doc: &CorpusDocument, unit: &str) -> Vec<Option<String>> {
    doc.unit(&id(unit)).unwrap().tokens().iter().map(|t| t.misc.get(OVERLAP).map(String::from)).collect()
}

/// `key = value` pairs of every comment, with the two spellings of the
/// speaker and conversation keys folded together.
pub fn comment_fields(text: &str) -> Vec<BTreeSet<(String, String)>> {
    text.split("\n\n")
        .filter(|b| !b.trim().is_empty())
        .map(|block| {
            block
                .lines()
                .filter_map(|l| l.strip_prefix("# "))
                .map(|l| {
                    let (k, v) = l.split_once(" = ").unwrap();
                    let k = match k {
                        "speaker" => "speaker_id",
                        "conversation_id" => "conversation",
                        k => k,
                    };
                    (k.to_string(), v.to_string())
                })
                .collect()
        })
        .collect()
}

pub fn stripped(doc: &CorpusDocument) -> CorpusDocument {
    let mut bare = doc.clone();
    for u in &mut bare.units {
        u.header_mut().overlaps.clear();
        for t in u.tokens_mut() {
            t.misc.remove(OVERLAP);
        }
    }
    bare
}

pub fn aligned_tokens(words: &[&str], begin: u64, end: u64) -> Vec<Token> {
    let mut tokens: Vec<Token> = words.iter().enumerate().map(|(i, w)| Token::bare(i + 1, *w)).collect();
    tokens[0].misc.set(ALIGN_BEGIN, Millis(begin).seconds_string());
    tokens.last_mut().unwrap().misc.set(ALIGN_END, Millis(end).seconds_string());
    tokens
}

pub fn header(unit: &str, speaker: &str, begin: u64, end: u64) -> UnitHeader {
    UnitHeader {
        sent_id: id(unit),
        conversation_id: "DUC22051430".into(),
        speaker_id: speaker.into(),
        duration: Millis(end - begin),
        overlaps: vec![],
        extra: vec![],
    }
}

pub fn speech(unit: &str, speaker: &str, begin: u64, end: u64) -> Unit {
    Unit::Transcription(TranscriptionUnit {
        header: header(unit, speaker, begin, end),
        text_jefferson: None,
        text: "x".into(),
        tokens: aligned_tokens(&["x"], begin, end),
    })
}

pub fn gesture(unit: &str, begin: u64, end: u64) -> Unit {
    let mut misc = Features::new();
    misc.set(ALIGN_BEGIN, Millis(begin).seconds_string());
    misc.set(ALIGN_END, Millis(end).seconds_string());
    Unit::Gestural(GesturalUnit {
        header: header(unit, "S001", begin, end),
        unit_type: "F:LH".into(),
        text: "EMPTY".into(),
        tokens: vec![Token::placeholder(misc)],
    })
}

/// Units of the conversation that the extract refers to but leaves out,
/// with intervals chosen to be consistent with every published list.
pub fn surrounding_units() -> Vec<Unit> {
    vec![
        speech("tu0004", "B001", 11_000, 11_600),
        speech("tu0008", "S001", 14_100, 15_000),
        gesture("gu0007", 13_100, 13_500),
        gesture("gu0008", 13_500, 13_800),
        gesture("gu0009", 13_800, 14_100),
        gesture("gu0010", 14_100, 14_300),
        gesture("gu0011", 14_300, 14_500),
        gesture("gu0012", 14_500, 14_700),
        gesture("gu0013", 14_700, 14_900),
    ]
}
