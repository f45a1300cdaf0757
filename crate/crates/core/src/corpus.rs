//! Repository-wide checks and reports.
//!
//! A [`Repository`] is filled by a loader (see the `gestit` crate); this
//! module only inspects it.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write as _;

use serde::Serialize;

use crate::conllu::{self, ValidateOptions};
use crate::diagnostic::{normalize, Diagnostic, Rule, Severity};
use crate::eaf::{self, ConversionContext, EafTier, EXPERIMENTER, METALANGUAGE};
use crate::metadata::{
    parse_conversation_code, validate_conversation, validate_participant, Condition, ConversationRecord, Facing,
    ParticipantRecord, Stage, Vocabularies,
};
use crate::model::{Articulator, CorpusDocument, Unit, OVERLAP};
use crate::overlap;
use crate::time::{Millis, TimeInterval};
use crate::typannot::PrefixMap;

/// A record together with the file it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry<T> {
    pub file: String,
    pub record: T,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EafFile {
    pub file: String,
    /// Conversation the file belongs to, from its name.
    pub conversation: Option<String>,
    pub tiers: Vec<EafTier>,
}

#[derive(Debug, Clone, Default)]
pub struct Repository {
    pub participants: BTreeMap<String, Entry<ParticipantRecord>>,
    pub conversations: BTreeMap<String, Entry<ConversationRecord>>,
    /// Transcriptions, each carrying its file name as `source`.
    pub documents: Vec<CorpusDocument>,
    pub eaf_files: Vec<EafFile>,
    /// Transcription stages whose declared file exists, per conversation.
    pub stages_present: BTreeMap<String, BTreeSet<Stage>>,
}

#[derive(Debug, Clone, Default)]
pub struct CheckOptions {
    pub strict: bool,
    pub vocabularies: Vocabularies,
    pub prefix_map: PrefixMap,
}

impl Repository {
    /// Conversation a file belongs to, if any.
    pub fn conversation_of_file(&self, file: &str) -> Option<&str> {
        if let Some((code, _)) = self.conversations.iter().find(|(_, e)| e.file == file) {
            return Some(code);
        }
        if let Some(d) = self.documents.iter().find(|d| d.source.as_deref() == Some(file)) {
            return d.conversation_id();
        }
        self.eaf_files.iter().find(|e| e.file == file).and_then(|e| e.conversation.as_deref())
    }

    /// Documents of one conversation.
    pub fn documents_of<'a>(&'a self, code: &'a str) -> impl Iterator<Item = &'a CorpusDocument> {
        self.documents.iter().filter(move |d| d.conversation_id() == Some(code))
    }

    fn participant_records(&self) -> BTreeMap<String, ParticipantRecord> {
        self.participants.iter().map(|(k, e)| (k.clone(), e.record.clone())).collect()
    }
}

fn is_reserved_speaker(s: &str) -> bool {
    s == EXPERIMENTER || s == METALANGUAGE
}

/// Runs every check in a fixed order and returns the findings sorted by
/// file, then line.
pub fn run_all_checks(repo: &Repository, opts: &CheckOptions) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let people = repo.participant_records();

    for e in repo.participants.values() {
        out.extend(validate_participant(&e.record, &opts.vocabularies).into_iter().map(|d| d.in_file(e.file.clone())));
    }
    for (code, e) in &repo.conversations {
        out.extend(validate_conversation(&e.record, &people, &opts.vocabularies).into_iter().map(|d| d.in_file(e.file.clone())));
        let present = repo.stages_present.get(code);
        for stage in Stage::ALL {
            if let Some(path) = e.record.data.stage(stage) {
                if !path.trim().is_empty() && !present.is_some_and(|p| p.contains(&stage)) {
                    out.push(
                        Diagnostic::new(Rule::Met017, alloc::format!("{} transcription {path:?} not found", stage.label()))
                            .on_field(alloc::format!("Data.Transcription.{}", stage.label()))
                            .in_file(e.file.clone()),
                    );
                }
            }
        }
    }

    let vopts = ValidateOptions { partial: false, strict: opts.strict, prefix_map: opts.prefix_map.clone() };
    for doc in &repo.documents {
        let file = doc.source.clone().unwrap_or_default();
        out.extend(conllu::validate_structure(doc, &vopts));
        out.extend(regeneration_drift(doc));
        out.extend(reference_checks(repo, doc).into_iter().map(|d| d.in_file(file.clone())));
    }

    for f in &repo.eaf_files {
        let participants = f
            .conversation
            .as_ref()
            .and_then(|c| repo.conversations.get(c))
            .and_then(|e| e.record.participants.clone())
            .unwrap_or_else(|| people.keys().cloned().collect());
        let ctx = ConversionContext::new(f.conversation.clone().unwrap_or_default()).with_participants(participants);
        // the mapping to units reports unknown tiers and unusable annotations
        let (_, diags) = eaf::tiers_to_units(&f.tiers, &ctx);
        out.extend(diags.into_iter().map(|d| d.in_file(f.file.clone())));
    }

    normalize(&mut out);
    out
}

/// Token `Overlap` features that a fresh regeneration would write differently.
fn regeneration_drift(doc: &CorpusDocument) -> Vec<Diagnostic> {
    if doc.units.iter().any(|u| u.interval().is_err()) {
        return Vec::new();
    }
    let (fresh, unpaired) = overlap::regenerate(doc, &[]);
    let mut out = unpaired;
    for (i, (old, new)) in doc.units.iter().zip(&fresh.units).enumerate() {
        let has_tj = old.as_transcription().is_some_and(|t| t.text_jefferson.is_some());
        if !has_tj {
            continue;
        }
        for (a, b) in old.tokens().iter().zip(new.tokens()) {
            let (x, y) = (a.misc.get(OVERLAP), b.misc.get(OVERLAP));
            if x != y {
                out.push(
                    Diagnostic::new(
                        Rule::Ovl006,
                        alloc::format!("token {} has Overlap={} but regeneration gives {}", a.id, x.unwrap_or("_"), y.unwrap_or("_")),
                    )
                    .for_unit(old.id().to_string())
                    .on_field(OVERLAP)
                    .at_line(doc.token_line(i, a.id)),
                );
            }
        }
    }
    if let Some(src) = &doc.source {
        out = out.into_iter().map(|d| d.in_file(src.clone())).collect();
    }
    out
}

fn reference_checks(repo: &Repository, doc: &CorpusDocument) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut unknown_conv = BTreeSet::new();
    let mut unknown_speaker = BTreeSet::new();
    for (i, u) in doc.units.iter().enumerate() {
        let h = u.header();
        let at = |d: Diagnostic| d.for_unit(u.id().to_string()).at_line(doc.unit_line(i));
        let conv = repo.conversations.get(&h.conversation_id);
        if conv.is_none() && unknown_conv.insert(h.conversation_id.clone()) {
            out.push(at(Diagnostic::new(Rule::Rep001, alloc::format!("conversation {:?} has no metadata file", h.conversation_id))
                .on_field("conversation")));
        }
        if is_reserved_speaker(&h.speaker_id) || !unknown_speaker.insert(h.speaker_id.clone()) {
            continue;
        }
        if !repo.participants.contains_key(&h.speaker_id) {
            out.push(at(Diagnostic::new(Rule::Rep002, alloc::format!("speaker {:?} has no participant record", h.speaker_id))
                .on_field("speaker_id")));
        } else if let Some(list) = conv.and_then(|c| c.record.participants.as_ref()) {
            if !list.contains(&h.speaker_id) {
                out.push(at(Diagnostic::new(
                    Rule::Rep002,
                    alloc::format!("speaker {} is not a participant of {}", h.speaker_id, h.conversation_id),
                )
                .on_field("speaker_id")));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Cell {
    pub conversations: usize,
    /// Recording length: declared duration, else the last aligned time.
    pub recording_minutes: f64,
    /// Summed duration of speech units.
    pub speech_minutes: f64,
}

impl Cell {
    fn add(&mut self, other: &Cell) {
        self.conversations += other.conversations;
        self.recording_minutes += other.recording_minutes;
        self.speech_minutes += other.speech_minutes;
    }
}

/// Conversations per sight condition (rows) and setting (columns).
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ConditionTable {
    pub same_masked: Cell,
    pub same_unmasked: Cell,
    pub different_masked: Cell,
    pub different_unmasked: Cell,
    /// Conversations whose code could not be read; not counted in any cell.
    pub unclassified: Vec<String>,
}

impl ConditionTable {
    pub fn cell(&self, c: Condition, f: Facing) -> &Cell {
        match (c, f) {
            (Condition::Same, Facing::Masked) => &self.same_masked,
            (Condition::Same, Facing::Unmasked) => &self.same_unmasked,
            (Condition::Different, Facing::Masked) => &self.different_masked,
            (Condition::Different, Facing::Unmasked) => &self.different_unmasked,
        }
    }

    fn cell_mut(&mut self, c: Condition, f: Facing) -> &mut Cell {
        match (c, f) {
            (Condition::Same, Facing::Masked) => &mut self.same_masked,
            (Condition::Same, Facing::Unmasked) => &mut self.same_unmasked,
            (Condition::Different, Facing::Masked) => &mut self.different_masked,
            (Condition::Different, Facing::Unmasked) => &mut self.different_unmasked,
        }
    }

    pub fn row_total(&self, c: Condition) -> Cell {
        let mut t = *self.cell(c, Facing::Masked);
        t.add(self.cell(c, Facing::Unmasked));
        t
    }

    pub fn column_total(&self, f: Facing) -> Cell {
        let mut t = *self.cell(Condition::Same, f);
        t.add(self.cell(Condition::Different, f));
        t
    }

    pub fn total(&self) -> Cell {
        let mut t = self.row_total(Condition::Same);
        t.add(&self.row_total(Condition::Different));
        t
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let fmt_cell = |c: &Cell| alloc::format!("{} | {:.2} | {:.2}", c.conversations, c.recording_minutes, c.speech_minutes);
        out.push_str("| | M n | M rec. min | M speech min | U n | U rec. min | U speech min | Total n | Total rec. min | Total speech min |\n");
        out.push_str("|---|---|---|---|---|---|---|---|---|---|\n");
        for c in [Condition::Same, Condition::Different] {
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} |",
                c.letter(),
                fmt_cell(self.cell(c, Facing::Masked)),
                fmt_cell(self.cell(c, Facing::Unmasked)),
                fmt_cell(&self.row_total(c))
            );
        }
        let _ = writeln!(
            out,
            "| Total | {} | {} | {} |",
            fmt_cell(&self.column_total(Facing::Masked)),
            fmt_cell(&self.column_total(Facing::Unmasked)),
            fmt_cell(&self.total())
        );
        if !self.unclassified.is_empty() {
            let _ = writeln!(out, "\nNot classified: {}", self.unclassified.join(", "));
        }
        out
    }
}

fn speech_units(doc: &CorpusDocument) -> impl Iterator<Item = (&Unit, TimeInterval)> {
    doc.units.iter().filter_map(|u| {
        let t = u.as_transcription()?;
        if !t.is_verbal() {
            return None;
        }
        Some((u, u.interval().ok()?))
    })
}

fn minutes(m: Millis) -> f64 {
    m.0 as f64 / 60_000.0
}

pub fn condition_table(repo: &Repository) -> ConditionTable {
    let mut table = ConditionTable::default();
    for (code, e) in &repo.conversations {
        let Ok(parsed) = parse_conversation_code(code) else {
            table.unclassified.push(code.clone());
            continue;
        };
        let docs: Vec<&CorpusDocument> = repo.documents_of(code).collect();
        let last_end = docs
            .iter()
            .flat_map(|d| d.units.iter())
            .filter_map(|u| u.interval().ok())
            .map(|i| i.end())
            .max()
            .unwrap_or(Millis::ZERO);
        let recording = e.record.duration.unwrap_or(last_end);
        let speech: u64 = docs.iter().flat_map(|d| speech_units(d)).map(|(_, i)| i.length().0).sum();
        let cell = table.cell_mut(parsed.condition, parsed.facing);
        cell.conversations += 1;
        cell.recording_minutes += minutes(recording);
        cell.speech_minutes += minutes(Millis(speech));
    }
    table
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StatusRow {
    pub conversation: String,
    pub participants: Vec<String>,
    pub facing: Option<String>,
    pub stages: Vec<(String, bool)>,
    pub transcription_units: usize,
    pub gestural_units: usize,
    pub errors: usize,
    pub warnings: usize,
}

pub fn status_rows(repo: &Repository, diagnostics: &[Diagnostic]) -> Vec<StatusRow> {
    repo.conversations
        .iter()
        .map(|(code, e)| {
            let present = repo.stages_present.get(code);
            let (mut tu, mut gu) = (0, 0);
            for d in repo.documents_of(code) {
                for u in &d.units {
                    match u {
                        Unit::Transcription(_) => tu += 1,
                        Unit::Gestural(_) => gu += 1,
                    }
                }
            }
            let mine = diagnostics
                .iter()
                .filter(|d| d.file.as_deref().and_then(|f| repo.conversation_of_file(f)) == Some(code.as_str()));
            let (mut errors, mut warnings) = (0, 0);
            for d in mine {
                match d.severity {
                    Severity::Error => errors += 1,
                    Severity::Warning => warnings += 1,
                    Severity::Info => {}
                }
            }
            StatusRow {
                conversation: code.clone(),
                participants: e.record.participants.clone().unwrap_or_default(),
                facing: e.record.facing.clone(),
                stages: Stage::ALL
                    .iter()
                    .map(|s| (s.label().to_string(), present.is_some_and(|p| p.contains(s))))
                    .collect(),
                transcription_units: tu,
                gestural_units: gu,
                errors,
                warnings,
            }
        })
        .collect()
}

/// One markdown row per conversation.
pub fn status_table(repo: &Repository, diagnostics: &[Diagnostic]) -> String {
    let mut out = String::from(
        "| Conversation | Participants | Facing | Automatic | Manually revised | Prosodic | Gestual | tu | gu | Errors | Warnings |\n\
         |---|---|---|---|---|---|---|---|---|---|---|\n",
    );
    for r in status_rows(repo, diagnostics) {
        let flags: Vec<&str> = r.stages.iter().map(|(_, ok)| if *ok { "yes" } else { "no" }).collect();
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {} | {} | {} | {} |",
            r.conversation,
            r.participants.join(" "),
            r.facing.as_deref().unwrap_or("?"),
            flags.join(" | "),
            r.transcription_units,
            r.gestural_units,
            r.errors,
            r.warnings
        );
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SpeakerStats {
    pub conversation: String,
    pub speaker: String,
    pub speech_units: usize,
    pub tokens: usize,
    pub speech_seconds: f64,
    /// Gesture units per articulator, in F:LH, F:RH, UL, UB order.
    pub gestural_units: [usize; 4],
    /// Share of this speaker's speech time that another speaker's speech overlaps.
    pub overlap_rate: f64,
}

impl SpeakerStats {
    pub fn gestures(&self) -> usize {
        self.gestural_units.iter().sum()
    }
}

/// Total length of the union of `intervals`.
fn covered(mut intervals: Vec<TimeInterval>) -> u64 {
    intervals.sort_by_key(|i| (i.begin(), i.end()));
    let mut total = 0;
    let mut cur: Option<(u64, u64)> = None;
    for i in intervals {
        let (b, e) = (i.begin().0, i.end().0);
        match cur {
            Some((cb, ce)) if b <= ce => cur = Some((cb, ce.max(e))),
            Some((cb, ce)) => {
                total += ce - cb;
                cur = Some((b, e));
            }
            None => cur = Some((b, e)),
        }
    }
    total + cur.map_or(0, |(b, e)| e - b)
}

pub fn document_stats(doc: &CorpusDocument) -> Vec<SpeakerStats> {
    let conversation = doc.conversation_id().unwrap_or("").to_string();
    let mut rows: BTreeMap<&str, SpeakerStats> = BTreeMap::new();
    let speech: Vec<(&Unit, TimeInterval)> = speech_units(doc).collect();
    for u in &doc.units {
        let h = u.header();
        let r = rows.entry(h.speaker_id.as_str()).or_insert_with(|| SpeakerStats {
            conversation: conversation.clone(),
            speaker: h.speaker_id.clone(),
            ..SpeakerStats::default()
        });
        match u {
            Unit::Gestural(g) => {
                if let Some(a) = g.articulator() {
                    let k = Articulator::ALL.iter().position(|x| *x == a).unwrap_or(0);
                    r.gestural_units[k] += 1;
                }
            }
            Unit::Transcription(t) if t.is_verbal() => {
                r.speech_units += 1;
                r.tokens += t.tokens.len();
            }
            Unit::Transcription(_) => {}
        }
    }
    for r in rows.values_mut() {
        let mine: Vec<TimeInterval> =
            speech.iter().filter(|(u, _)| u.header().speaker_id == r.speaker).map(|(_, i)| *i).collect();
        let total: u64 = mine.iter().map(|i| i.length().0).sum();
        let mut shared = Vec::new();
        for a in &mine {
            for (u, b) in &speech {
                if u.header().speaker_id != r.speaker {
                    shared.extend(a.intersection(b));
                }
            }
        }
        r.speech_seconds = total as f64 / 1000.0;
        r.overlap_rate = if total == 0 { 0.0 } else { covered(shared) as f64 / covered(mine) as f64 };
    }
    // speakers with only metalanguage placeholders have nothing to count
    rows.into_values().filter(|r| r.speech_units > 0 || r.gestures() > 0).collect()
}

pub fn token_stats(repo: &Repository) -> Vec<SpeakerStats> {
    let mut out: Vec<SpeakerStats> = repo.documents.iter().flat_map(document_stats).collect();
    out.sort_by(|a, b| (&a.conversation, &a.speaker).cmp(&(&b.conversation, &b.speaker)));
    out
}

pub fn token_stats_markdown(rows: &[SpeakerStats]) -> String {
    let mut out = String::from(
        "| Conversation | Speaker | Speech units | Tokens | Speech s | F:LH | F:RH | UL | UB | Overlap rate |\n\
         |---|---|---|---|---|---|---|---|---|---|\n",
    );
    for r in rows {
        let g = r.gestural_units;
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {:.3} | {} | {} | {} | {} | {:.3} |",
            r.conversation, r.speaker, r.speech_units, r.tokens, r.speech_seconds, g[0], g[1], g[2], g[3], r.overlap_rate
        );
    }
    out
}
