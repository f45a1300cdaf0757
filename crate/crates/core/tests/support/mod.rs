//! Generators and fixtures shared by the integration tests and the
//! acceptance suite.
#![allow(dead_code)]

pub mod extract;

use proptest::collection::vec;
use proptest::prelude::*;

use gestit_core::model::{Articulator, Features, Token, TranscriptionUnit, UnitHeader, UnitKind, ALIGN_BEGIN, ALIGN_END, GESTURE};
use gestit_core::{CorpusDocument, GesturalUnit, Millis, TimeInterval, Unit, UnitId};

pub fn brute_force(ivs: &[TimeInterval]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..ivs.len() {
        for j in i + 1..ivs.len() {
            let (a, b) = (ivs[i], ivs[j]);
            if a.begin().max(b.begin()) < a.end().min(b.end()) {
                out.push((i, j));
            }
        }
    }
    out
}

pub fn intervals() -> impl Strategy<Value = Vec<TimeInterval>> {
    // a small time range so that touching and identical intervals are common
    vec((0u64..2_000, 1u64..400), 0..=200)
        .prop_map(|v| v.into_iter().map(|(b, l)| TimeInterval::from_millis(b, b + l).unwrap()).collect())
}

pub fn gesture_unit(n: usize, iv: TimeInterval) -> Unit {
    let mut misc = Features::new();
    misc.set(ALIGN_BEGIN, iv.begin().seconds_string());
    misc.set(ALIGN_END, iv.end().seconds_string());
    misc.set(GESTURE, "'\u{e000}'");
    Unit::Gestural(GesturalUnit {
        header: UnitHeader {
            sent_id: UnitId::new(UnitKind::Gestural, n as u64 + 1),
            conversation_id: "SMC01010000".into(),
            speaker_id: "S001".into(),
            duration: iv.length(),
            overlaps: vec![],
            extra: vec![],
        },
        unit_type: "UB".into(),
        text: "EMPTY".into(),
        tokens: vec![Token::placeholder(misc)],
    })
}

pub fn word() -> impl Strategy<Value = String> {
    "[a-zàèìòù][a-zàèìòù']{0,6}"
}

#[derive(Debug, Clone)]
pub struct Piece {
    word: String,
    upper: bool,
    colon_at: Option<usize>,
    suffix: &'static str,
    pause_before: bool,
}

pub fn piece() -> impl Strategy<Value = Piece> {
    (
        word(),
        prop::bool::weighted(0.15),
        prop::option::weighted(0.2, 1usize..8),
        prop::sample::select(vec!["", "", "", ".", ",", "?", "-", "="]),
        prop::bool::weighted(0.1),
    )
        .prop_map(|(word, upper, colon_at, suffix, pause_before)| Piece { word, upper, colon_at, suffix, pause_before })
}

pub const DELIMS: [(&str, &str); 5] = [("[", "]"), ("°", "°"), (">", "<"), ("<", ">"), ("(", ")")];

/// Well-formed transcriptions: decorated words, with spans over disjoint
/// runs of words.
pub fn transcription() -> impl Strategy<Value = String> {
    (vec(piece(), 1..12), vec((0usize..12, 0usize..3, 0usize..5), 0..4)).prop_map(|(pieces, spans)| {
        let n = pieces.len();
        let mut opens = vec![None; n];
        let mut closes = vec![None; n];
        let mut taken = vec![false; n];
        for (start, len, kind) in spans {
            let start = start % n;
            let end = (start + len).min(n - 1);
            if taken[start..=end].iter().any(|t| *t) {
                continue;
            }
            taken[start..=end].iter_mut().for_each(|t| *t = true);
            opens[start] = Some(DELIMS[kind].0);
            closes[end] = Some(DELIMS[kind].1);
        }
        let mut out = Vec::new();
        for (i, p) in pieces.iter().enumerate() {
            let mut w = String::new();
            if p.pause_before {
                out.push("(.)".to_string());
            }
            w.push_str(opens[i].unwrap_or(""));
            for (k, c) in p.word.chars().enumerate() {
                if p.upper {
                    w.extend(c.to_uppercase());
                } else {
                    w.push(c);
                }
                if p.colon_at == Some(k + 1) {
                    w.push(':');
                }
            }
            w.push_str(p.suffix);
            w.push_str(closes[i].unwrap_or(""));
            out.push(w);
        }
        out.join(" ")
    })
}

pub fn seconds() -> impl Strategy<Value = String> {
    (0u64..100_000_000).prop_map(|m| Millis(m).seconds_string())
}

pub fn features(keys: &'static str) -> impl Strategy<Value = Features> {
    vec((keys, prop::option::weighted(0.9, "[A-Za-z0-9:.,]{1,6}")), 0..3).prop_map(|pairs| {
        let mut f = Features::new();
        for (k, v) in pairs {
            match v {
                Some(v) => f.set(&k, v),
                None => f.append(&k, "Yes"),
            }
        }
        f
    })
}

pub fn tokens() -> impl Strategy<Value = Vec<Token>> {
    (1usize..6, prop::bool::ANY, seconds(), seconds()).prop_flat_map(|(n, syntax, b, e)| {
        (
            vec(("[a-zàè']{1,8}", prop::option::of("[a-z]{1,8}"), prop::option::of("[A-Z]{3,5}"), features("[A-Z][a-z]{1,6}"), features("[A-Z][a-z]{1,6}")), n),
            vec(0usize..64, n),
        )
            .prop_map(move |(cols, heads)| {
                let mut out = Vec::with_capacity(n);
                for (i, ((form, lemma, upos, feats, misc), h)) in cols.into_iter().zip(heads).enumerate() {
                    let mut t = Token::bare(i + 1, form);
                    t.lemma = lemma;
                    t.upos = upos;
                    t.feats = feats;
                    t.misc = misc;
                    if syntax {
                        // token 1 is the root; the rest attach to an earlier token
                        t.head = Some(if i == 0 { 0 } else { 1 + h % i });
                        t.deprel = Some(if i == 0 { "root".into() } else { "dep".into() });
                    }
                    out.push(t);
                }
                out[0].misc.set(ALIGN_BEGIN, b.clone());
                out[n - 1].misc.set(ALIGN_END, e.clone());
                out
            })
    })
}

pub fn header(kind: UnitKind) -> impl Strategy<Value = UnitHeader> {
    (
        "[SD][MU][LSC](0[1-9]|[12][0-9]|3[01])(0[1-9]|1[0-2])([01][0-9]|2[0-3])[0-5][0-9]",
        "[SB][0-9]{3}",
        0u64..100_000,
        vec((prop::bool::ANY, 1u64..10_000), 0..4),
        vec("[a-z_]{1,8} = [a-z]([a-z ]{0,8}[a-z])?|newpar|newdoc", 0..2),
    )
        .prop_map(move |(conversation_id, speaker_id, d, overlaps, extra)| UnitHeader {
            sent_id: UnitId::new(kind, 0),
            conversation_id,
            speaker_id,
            duration: Millis(d),
            overlaps: overlaps
                .into_iter()
                .map(|(tu, n)| UnitId::new(if tu { UnitKind::Transcription } else { UnitKind::Gestural }, n))
                .collect(),
            extra: extra.into_iter().map(|e| format!("x_{e}")).collect(),
        })
}

pub fn unit() -> impl Strategy<Value = Unit> {
    prop_oneof![
        (header(UnitKind::Transcription), tokens(), prop::option::of("[a-z\\[\\]:°]([a-z \\[\\]:°]{0,20}[a-z\\]])?"))
            .prop_map(|(header, tokens, text_jefferson)| {
                let text = tokens.iter().map(|t| t.form.as_str()).collect::<Vec<_>>().join(" ");
                Unit::Transcription(TranscriptionUnit { header, text_jefferson, text, tokens })
            }),
        (header(UnitKind::Gestural), prop::sample::select(Articulator::ALL.to_vec()), "[\u{e000}-\u{e0ff}]{1,4}( \\[ [\u{e000}-\u{e0ff}]{1,3} \\])?", seconds(), seconds())
            .prop_map(|(header, a, code, b, e)| {
                let mut misc = Features::new();
                misc.set(ALIGN_BEGIN, b);
                misc.set(ALIGN_END, e);
                misc.set(GESTURE, format!("'{code}'"));
                Unit::Gestural(GesturalUnit { header, unit_type: a.code().into(), text: "EMPTY".into(), tokens: vec![Token::placeholder(misc)] })
            }),
    ]
}

pub fn document() -> impl Strategy<Value = CorpusDocument> {
    vec(unit(), 0..8).prop_map(|mut units| {
        let (mut tu, mut gu) = (0, 0);
        for u in &mut units {
            let kind = u.kind();
            let n = match kind {
                UnitKind::Transcription => { tu += 1; tu }
                UnitKind::Gestural => { gu += 1; gu }
            };
            u.header_mut().sent_id = UnitId::new(kind, n);
        }
        CorpusDocument::new(units)
    })
}

pub fn code_char() -> impl Strategy<Value = char> {
    prop_oneof![
        prop::sample::select(vec!['S', 'D', 'M', 'U', 'L', 'C', 'X', 'a']),
        prop::char::range('0', '9'),
        prop::char::any(),
    ]
}
