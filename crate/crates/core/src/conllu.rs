//! Extended CoNLL-U: speech (`tu`) and gesture (`gu`) units in one file.
//!
//! ```text
//! # sent_id = tu0006
//! # overlaps = tu0007 gu0007
//! # conversation = DUC22051430
//! # speaker_id = S001
//! # duration = 0.987
//! # text_jefferson = e[h: la sera]
//! # text = eh la sera
//! 1	eh	eh	INTJ	_	_	3	discourse	_	AlignBegin=13.047|Overlap=B:tu0007|ProlongedSound=eh:
//! ```
//!
//! Gesture units add `# type = <articulator>` and hold one `EMPTY` token
//! whose MISC carries the alignment and the quoted `gesture` code.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write as _;

use thiserror::Error;

use crate::diagnostic::{Diagnostic, Rule, Severity};
use crate::jefferson;
use crate::model::{
    check_duration, check_tree, CorpusDocument, Features, GesturalUnit, Token, TranscriptionUnit, Unit, UnitHeader,
    UnitId, UnitKind, UnitLines, EMPTY_FORM,
};
use crate::overlap;
use crate::time::Millis;
use crate::typannot::{self, PrefixMap};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConlluError {
    #[error("line {line}: expected 10 tab-separated columns, found {found}")]
    Columns { line: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WriteError {
    #[error("unit {unit}: {reason}")]
    InvariantViolation { unit: String, reason: String },
}

#[derive(Debug, Clone, Default)]
pub struct ReadOptions {
    /// Path or name used in diagnostics.
    pub source: Option<String>,
    /// The file is an extract; overlap ids may point outside it.
    pub partial: bool,
}

#[derive(Debug, Clone, Default)]
pub struct ValidateOptions {
    pub partial: bool,
    /// Adds the gesture prefix / articulator agreement warning.
    pub strict: bool,
    pub prefix_map: PrefixMap,
}

struct Comment {
    line: usize,
    key: Option<String>,
    value: String,
}

#[derive(Default)]
struct Block {
    start: usize,
    first_token: usize,
    comments: Vec<Comment>,
    tokens: Vec<Token>,
}

/// Parses a document. Structural defects become diagnostics; only a token
/// line without exactly 10 columns aborts.
pub fn read_str(input: &str, opts: &ReadOptions) -> Result<(CorpusDocument, Vec<Diagnostic>), ConlluError> {
    let input = input.strip_prefix('\u{feff}').unwrap_or(input);
    let mut diags = Vec::new();
    let mut blocks = Vec::new();
    let mut block: Option<Block> = None;

    for (n, raw) in input.split('\n').enumerate() {
        let line = n + 1;
        let text = raw.strip_suffix('\r').unwrap_or(raw);
        if text.trim().is_empty() {
            blocks.extend(block.take());
            continue;
        }
        let b = block.get_or_insert_with(|| Block { start: line, ..Block::default() });
        if let Some(body) = text.strip_prefix('#') {
            let body = body.trim();
            let (key, value) = match body.split_once('=') {
                Some((k, v)) if !k.trim().is_empty() && !k.trim().contains(' ') => {
                    (Some(k.trim().to_string()), v.trim().to_string())
                }
                _ => (None, body.to_string()),
            };
            b.comments.push(Comment { line, key, value });
            continue;
        }
        let cols: Vec<&str> = text.split('\t').collect();
        if cols.len() != 10 {
            return Err(ConlluError::Columns { line, found: cols.len() });
        }
        if b.tokens.is_empty() {
            b.first_token = line;
        }
        let con001 = |msg: String| Diagnostic::new(Rule::Con001, msg).at_line(Some(line));
        let id = match cols[0].parse::<usize>() {
            Ok(id) if id > 0 => id,
            _ => {
                diags.push(con001(alloc::format!("token id {:?} is not a positive integer", cols[0])));
                continue;
            }
        };
        let head = match cols[6] {
            "_" => None,
            h => match h.parse::<usize>() {
                Ok(h) => Some(h),
                Err(_) => {
                    diags.push(con001(alloc::format!("HEAD {h:?} is not an integer")));
                    None
                }
            },
        };
        let opt = |s: &str| (s != "_").then(|| s.to_string());
        b.tokens.push(Token {
            id,
            form: cols[1].to_string(),
            lemma: opt(cols[2]),
            upos: opt(cols[3]),
            xpos: opt(cols[4]),
            feats: Features::parse(cols[5]),
            head,
            deprel: opt(cols[7]),
            deps: opt(cols[8]),
            misc: Features::parse(cols[9]),
        });
    }
    blocks.extend(block.take());

    let mut doc = CorpusDocument { units: Vec::new(), source: opts.source.clone(), lines: Vec::new() };
    for b in blocks {
        if let Some(unit) = build_unit(b.comments, b.tokens, b.start, &mut diags) {
            doc.units.push(unit);
            doc.lines.push(UnitLines { start: b.start, first_token: b.first_token });
        }
    }
    diags.extend(duplicate_ids(&doc));
    if !opts.partial {
        let present: Vec<&UnitId> = doc.units.iter().map(Unit::id).collect();
        for (i, u) in doc.units.iter().enumerate() {
            for o in &u.header().overlaps {
                if !present.contains(&o) {
                    diags.push(
                        Diagnostic::new(Rule::Con004, alloc::format!("{o} is not in this document"))
                            .for_unit(u.id().to_string())
                            .on_field("overlaps")
                            .at_line(doc.unit_line(i)),
                    );
                }
            }
        }
    }
    if let Some(src) = &opts.source {
        for d in &mut diags {
            d.file = Some(src.clone());
        }
    }
    Ok((doc, diags))
}

fn build_unit(comments: Vec<Comment>, tokens: Vec<Token>, start: usize, diags: &mut Vec<Diagnostic>) -> Option<Unit> {
    let mut known: BTreeMap<&'static str, (usize, String)> = BTreeMap::new();
    let mut extra = Vec::new();
    for c in comments {
        let slot = match c.key.as_deref() {
            Some("sent_id") => "sent_id",
            Some("overlaps") => "overlaps",
            Some("conversation") | Some("conversation_id") => "conversation",
            Some("speaker") | Some("speaker_id") => "speaker",
            Some("duration") => "duration",
            Some("text") => "text",
            Some("text_jefferson") => "text_jefferson",
            Some("type") => "type",
            Some(k) => {
                extra.push(alloc::format!("{k} = {}", c.value).trim_end().to_string());
                continue;
            }
            None => {
                extra.push(c.value);
                continue;
            }
        };
        known.insert(slot, (c.line, c.value));
    }
    let con006 = |line: usize, field: &str, msg: String| {
        Diagnostic::new(Rule::Con006, msg).on_field(field.to_string()).at_line(Some(line))
    };

    let Some((id_line, raw_id)) = known.get("sent_id") else {
        diags.push(con006(start, "sent_id", "unit has no sent_id; skipped".to_string()));
        return None;
    };
    let sent_id: UnitId = match raw_id.parse() {
        Ok(id) => id,
        Err(e) => {
            diags.push(con006(*id_line, "sent_id", alloc::format!("{e}; unit skipped")));
            return None;
        }
    };
    let unit_name = sent_id.to_string();
    let mut required = |key: &'static str| -> String {
        match known.get(key) {
            Some((_, v)) => v.clone(),
            None => {
                diags.push(
                    con006(start, key, alloc::format!("missing `{key}` metadata")).for_unit(unit_name.clone()),
                );
                String::new()
            }
        }
    };
    let conversation_id = required("conversation");
    let speaker_id = required("speaker");
    let text = required("text");
    let duration_raw = required("duration");
    let duration = match Millis::parse_seconds(&duration_raw) {
        Ok(d) => d,
        Err(e) => {
            if known.contains_key("duration") {
                let line = known["duration"].0;
                diags.push(con006(line, "duration", e.to_string()).for_unit(unit_name.clone()));
            }
            Millis::ZERO
        }
    };
    let mut overlaps = Vec::new();
    if let Some((line, v)) = known.get("overlaps") {
        for part in v.split_whitespace() {
            match part.parse::<UnitId>() {
                Ok(id) => overlaps.push(id),
                Err(e) => diags.push(con006(*line, "overlaps", e.to_string()).for_unit(unit_name.clone())),
            }
        }
    }
    if tokens.is_empty() {
        diags.push(con006(start, "tokens", "unit has no token lines".to_string()).for_unit(unit_name.clone()));
    }
    let header = UnitHeader { sent_id: sent_id.clone(), conversation_id, speaker_id, duration, overlaps, extra };

    match known.get("type") {
        Some((line, unit_type)) => {
            if sent_id.kind() != UnitKind::Gestural {
                diags.push(
                    con006(*line, "sent_id", alloc::format!("{sent_id} has a `type` but is not a gu id"))
                        .for_unit(unit_name.clone()),
                );
            }
            let mut header = header;
            if let Some((_, tj)) = known.get("text_jefferson") {
                header.extra.push(alloc::format!("text_jefferson = {tj}"));
            }
            Some(Unit::Gestural(GesturalUnit { header, unit_type: unit_type.clone(), text, tokens }))
        }
        None => {
            if sent_id.kind() != UnitKind::Transcription {
                diags.push(
                    con006(*id_line, "type", alloc::format!("{sent_id} is a gu id but has no `type`"))
                        .for_unit(unit_name),
                );
            }
            let text_jefferson = known.get("text_jefferson").map(|(_, v)| v.clone());
            Some(Unit::Transcription(TranscriptionUnit { header, text_jefferson, text, tokens }))
        }
    }
}

fn duplicate_ids(doc: &CorpusDocument) -> Vec<Diagnostic> {
    let mut seen: BTreeMap<&UnitId, usize> = BTreeMap::new();
    let mut out = Vec::new();
    for (i, u) in doc.units.iter().enumerate() {
        if let Some(first) = seen.insert(u.id(), i) {
            out.push(
                Diagnostic::new(
                    Rule::Con005,
                    alloc::format!("{} already used by the unit at line {}", u.id(), doc.unit_line(first).unwrap_or(0)),
                )
                .for_unit(u.id().to_string())
                .on_field("sent_id")
                .at_line(doc.unit_line(i)),
            );
            seen.insert(u.id(), first);
        }
    }
    out
}

fn check_unit_shape(unit: &Unit) -> Result<(), String> {
    if unit.tokens().is_empty() {
        return Err("unit has no tokens".to_string());
    }
    check_tree(unit.tokens()).map_err(|e| e.to_string())?;
    if let Unit::Gestural(g) = unit {
        if g.tokens.len() != 1 || !g.tokens[0].is_placeholder() {
            return Err(alloc::format!("gestural unit must hold exactly one {EMPTY_FORM} token"));
        }
        if g.articulator().is_none() {
            return Err(typannot::articulator_of(&g.unit_type).unwrap_err().to_string());
        }
    }
    let h = unit.header();
    let clean = |s: &str| !s.contains(['\n', '\r']);
    if !clean(&h.conversation_id) || !clean(&h.speaker_id) || !clean(unit.text()) || !h.extra.iter().all(|e| clean(e)) {
        return Err("metadata value contains a line break".to_string());
    }
    if let Unit::Transcription(t) = unit {
        if !t.text_jefferson.as_deref().is_none_or(clean) {
            return Err("text_jefferson contains a line break".to_string());
        }
    }
    for t in unit.tokens() {
        let fields = [Some(&t.form), t.lemma.as_ref(), t.upos.as_ref(), t.xpos.as_ref(), t.deprel.as_ref(), t.deps.as_ref()];
        if fields.iter().flatten().any(|f| f.is_empty() || f.contains(['\t', '\n', '\r'])) {
            return Err(alloc::format!("token {} has an empty field or one containing a tab or line break", t.id));
        }
        for f in t.misc.iter().chain(t.feats.iter()) {
            let bad = |s: &str| s.is_empty() || s.contains(['\t', '\n', '\r', '|']);
            if bad(&f.key) || f.key.contains('=') || f.value.as_deref().is_some_and(|v| v.contains(['\t', '\n', '\r', '|'])) {
                return Err(alloc::format!("token {} has an unwritable feature {:?}", t.id, f.key));
            }
        }
    }
    Ok(())
}

/// Writes the canonical form of `doc`.
pub fn write(doc: &CorpusDocument) -> Result<String, WriteError> {
    if let Some(d) = duplicate_ids(doc).into_iter().next() {
        return Err(WriteError::InvariantViolation { unit: d.unit.unwrap_or_default(), reason: d.message });
    }
    let mut out = String::new();
    for unit in &doc.units {
        check_unit_shape(unit).map_err(|reason| WriteError::InvariantViolation { unit: unit.id().to_string(), reason })?;
        let h = unit.header();
        let _ = writeln!(out, "# sent_id = {}", h.sent_id);
        if !h.overlaps.is_empty() {
            out.push_str("# overlaps =");
            for o in &h.overlaps {
                let _ = write!(out, " {o}");
            }
            out.push('\n');
        }
        let _ = writeln!(out, "# conversation = {}", h.conversation_id);
        let _ = writeln!(out, "# speaker_id = {}", h.speaker_id);
        let _ = writeln!(out, "# duration = {}", h.duration.seconds_string());
        match unit {
            Unit::Transcription(t) => {
                if let Some(tj) = &t.text_jefferson {
                    let _ = writeln!(out, "# text_jefferson = {tj}");
                }
                let _ = writeln!(out, "# text = {}", t.text);
            }
            Unit::Gestural(g) => {
                let _ = writeln!(out, "# text = {}", g.text);
                let _ = writeln!(out, "# type = {}", g.unit_type);
            }
        }
        for e in &h.extra {
            let _ = writeln!(out, "# {e}");
        }
        for t in unit.tokens() {
            let col = |v: &Option<String>| v.as_deref().unwrap_or("_").to_string();
            let head = t.head.map_or_else(|| "_".to_string(), |h| h.to_string());
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                t.id,
                t.form,
                col(&t.lemma),
                col(&t.upos),
                col(&t.xpos),
                t.feats,
                head,
                col(&t.deprel),
                col(&t.deps),
                t.misc
            );
        }
        out.push('\n');
    }
    Ok(out)
}

/// Every structural, textual and overlap check on one document.
pub fn validate_structure(doc: &CorpusDocument, opts: &ValidateOptions) -> Vec<Diagnostic> {
    let mut diags = duplicate_ids(doc);
    for (i, unit) in doc.units.iter().enumerate() {
        let name = unit.id().to_string();
        let line = doc.unit_line(i);
        let at = |d: Diagnostic| d.for_unit(name.clone()).at_line(line);

        if let Err(e) = unit.interval() {
            diags.push(at(Diagnostic::new(Rule::Con007, e.to_string())));
        }
        if let Some(d) = check_duration(unit) {
            diags.push(d.at_line(line));
        }
        if let Err(e) = check_tree(unit.tokens()) {
            diags.push(at(Diagnostic::new(Rule::Con001, e.to_string())));
        }
        let forms: Vec<&str> = unit.tokens().iter().map(|t| t.form.as_str()).collect();
        let joined = forms.join(" ");
        if unit.text() != joined {
            diags.push(at(Diagnostic::new(
                Rule::Con003,
                alloc::format!("text {:?} but token forms read {:?}", unit.text(), joined),
            )
            .on_field("text")));
        }
        match unit {
            Unit::Transcription(t) => {
                if let Some(tj) = &t.text_jefferson {
                    let jef = jefferson::validate(tj);
                    if jef.is_empty() {
                        let stripped = jefferson::strip(tj).unwrap_or_default();
                        if stripped != t.text {
                            diags.push(at(Diagnostic::new(
                                Rule::Con002,
                                alloc::format!("text {:?} but text_jefferson strips to {:?}", t.text, stripped),
                            )
                            .on_field("text")));
                        }
                    }
                    diags.extend(jef.into_iter().map(at));
                }
            }
            Unit::Gestural(g) => {
                if g.tokens.len() != 1 || !g.tokens[0].is_placeholder() {
                    diags.push(at(Diagnostic::new(
                        Rule::Con008,
                        alloc::format!("gestural unit must hold exactly one {EMPTY_FORM} token, found {}", g.tokens.len()),
                    )));
                }
                let articulator = match typannot::articulator_of(&g.unit_type) {
                    Ok(a) => Some(a),
                    Err(e) => {
                        diags.push(at(Diagnostic::new(Rule::Con008, e.to_string()).on_field("type")));
                        None
                    }
                };
                match g.gesture_code() {
                    None => diags.push(at(Diagnostic::new(Rule::Con008, "placeholder token has no gesture feature")
                        .on_field("gesture"))),
                    Some(raw) => match typannot::parse_gesture(raw) {
                        Err(e) => diags.push(at(Diagnostic::new(e.rule(), e.to_string()).on_field("gesture"))),
                        Ok(code) => {
                            if let (true, Some(a)) = (opts.strict, articulator) {
                                if let Some(d) = typannot::check_prefix(&code, a, &opts.prefix_map) {
                                    diags.push(at(d.on_field("gesture")));
                                }
                            }
                        }
                    },
                }
            }
        }
    }
    diags.extend(overlap::check_overlaps(doc, opts.partial));
    if let Some(src) = &doc.source {
        for d in &mut diags {
            d.file = Some(src.clone());
        }
    }
    crate::diagnostic::normalize(&mut diags);
    diags
}

/// True if any diagnostic reaches `threshold`.
pub fn has_findings(diags: &[Diagnostic], threshold: Severity) -> bool {
    diags.iter().any(|d| d.severity >= threshold)
}
