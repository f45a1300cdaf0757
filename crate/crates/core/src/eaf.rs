//! Turning ELAN tiers into units.
//!
//! XML decoding happens in the `gestit` crate; this module works on the
//! already resolved tiers. A tier is one of:
//!
//! - a speaker tier named after a participant (`S001`), one speech unit per
//!   annotation, the value being the Jefferson transcription;
//! - `experimenter`, handled like a speaker tier;
//! - `metalanguage`, one `EMPTY` unit per annotation with a `meta` feature;
//! - an articulator tier (`F:LH`, `S001@F:LH`, ...), one gesture unit per
//!   annotation, the value being the Typannot code.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

use crate::diagnostic::{Diagnostic, Rule};
use crate::jefferson;
use crate::model::{
    Articulator, CorpusDocument, Features, GesturalUnit, Token, TranscriptionUnit, Unit, UnitHeader, UnitId, UnitKind,
    ALIGN_BEGIN, ALIGN_END, EMPTY_FORM, GESTURE, META,
};
use crate::overlap;
use crate::time::TimeInterval;

pub const EXPERIMENTER: &str = "experimenter";
pub const METALANGUAGE: &str = "metalanguage";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EafAnnotation {
    pub id: String,
    pub interval: TimeInterval,
    pub value: String,
    /// Source line of the annotation element, when known.
    pub line: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EafTier {
    pub tier_id: String,
    pub participant: Option<String>,
    pub annotations: Vec<EafAnnotation>,
    /// Every attribute of the TIER element, in document order.
    pub attributes: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TierClass {
    Speaker(String),
    Experimenter,
    Metalanguage { speaker: String },
    Articulator { speaker: String, articulator: Articulator },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TierError {
    #[error("tier {0:?} matches no participant and no articulator")]
    UnknownTier(String),
    #[error("articulator tier {0:?} has no participant attribute and no `<speaker>@` prefix")]
    NoSpeaker(String),
}

#[derive(Debug, Clone)]
pub struct ConversionContext {
    pub conversation_id: String,
    /// Known participant codes. `None` accepts any well-formed code.
    pub participants: Option<Vec<String>>,
    /// Separator of the `<speaker>@<articulator>` tier naming convention.
    pub speaker_separator: char,
}

impl ConversionContext {
    pub fn new(conversation_id: impl Into<String>) -> Self {
        ConversionContext { conversation_id: conversation_id.into(), participants: None, speaker_separator: '@' }
    }

    pub fn with_participants(mut self, participants: Vec<String>) -> Self {
        self.participants = Some(participants);
        self
    }

    fn is_participant(&self, code: &str) -> bool {
        match &self.participants {
            Some(list) => list.iter().any(|p| p == code),
            None => crate::metadata::is_participant_code(code),
        }
    }
}

pub fn classify(tier: &EafTier, ctx: &ConversionContext) -> Result<TierClass, TierError> {
    let id = tier.tier_id.as_str();
    if id == EXPERIMENTER {
        return Ok(TierClass::Experimenter);
    }
    if id == METALANGUAGE {
        let speaker = tier.participant.clone().unwrap_or_else(|| METALANGUAGE.to_string());
        return Ok(TierClass::Metalanguage { speaker });
    }
    if ctx.is_participant(id) {
        return Ok(TierClass::Speaker(id.to_string()));
    }
    let (prefix, code) = match id.rsplit_once(ctx.speaker_separator) {
        Some((p, c)) => (Some(p), c),
        None => (None, id),
    };
    let Some(articulator) = Articulator::from_code(code) else {
        return Err(TierError::UnknownTier(id.to_string()));
    };
    let speaker = tier
        .participant
        .as_deref()
        .filter(|p| !p.is_empty())
        .or(prefix)
        .ok_or_else(|| TierError::NoSpeaker(id.to_string()))?;
    if !ctx.is_participant(speaker) {
        return Err(TierError::UnknownTier(id.to_string()));
    }
    Ok(TierClass::Articulator { speaker: speaker.to_string(), articulator })
}

/// Sorts a tier's annotations by time and reports what had to be fixed.
pub fn normalize_tier(tier: &mut EafTier) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let key = |a: &EafAnnotation| (a.interval.begin(), a.interval.end());
    if tier.annotations.windows(2).any(|w| key(&w[0]) > key(&w[1])) {
        tier.annotations.sort_by_key(key);
        out.push(
            Diagnostic::new(Rule::Eaf001, alloc::format!("annotations of tier {} re-sorted by start time", tier.tier_id))
                .on_field(tier.tier_id.clone()),
        );
    }
    for w in tier.annotations.windows(2) {
        if w[0].interval.intersects(&w[1].interval) {
            out.push(
                Diagnostic::new(
                    Rule::Eaf005,
                    alloc::format!("{} {} overlaps {} {}", w[0].id, w[0].interval, w[1].id, w[1].interval),
                )
                .on_field(tier.tier_id.clone())
                .at_line(w[1].line),
            );
        }
    }
    out
}

struct Pending {
    interval: TimeInterval,
    tier: usize,
    unit: Unit,
}

fn aligned(mut misc: Features, interval: TimeInterval) -> Features {
    misc.set(ALIGN_BEGIN, interval.begin().seconds_string());
    misc.set(ALIGN_END, interval.end().seconds_string());
    misc
}

fn misc_value(raw: &str) -> String {
    raw.split_whitespace().collect::<Vec<_>>().join(" ").replace('|', "/")
}

fn header(ctx: &ConversionContext, speaker: &str, interval: TimeInterval) -> UnitHeader {
    UnitHeader {
        sent_id: UnitId::new(UnitKind::Transcription, 0),
        conversation_id: ctx.conversation_id.clone(),
        speaker_id: speaker.to_string(),
        duration: interval.length(),
        overlaps: Vec::new(),
        extra: Vec::new(),
    }
}

fn speech_unit(ctx: &ConversionContext, speaker: &str, a: &EafAnnotation, diags: &mut Vec<Diagnostic>, tier_id: &str) -> Option<Unit> {
    let value = a.value.trim();
    let (parsed, errors) = jefferson::parse_lenient(value);
    for e in &errors {
        diags.push(
            Diagnostic::new(e.rule(), alloc::format!("{}: {e}", a.id)).on_field(tier_id.to_string()).at_line(a.line),
        );
    }
    if parsed.tokens.is_empty() {
        diags.push(
            Diagnostic::new(Rule::Eaf004, alloc::format!("{} has no words", a.id)).on_field(tier_id.to_string()).at_line(a.line),
        );
        return None;
    }
    let n = parsed.tokens.len();
    let mut tokens: Vec<Token> = parsed
        .tokens
        .iter()
        .zip(jefferson::to_misc_features(&parsed.tokens))
        .enumerate()
        .map(|(i, (pt, feats))| {
            let mut t = Token::bare(i + 1, pt.form.clone());
            for f in feats.iter() {
                t.misc.set(&f.key, f.value.clone().unwrap_or_default());
            }
            t
        })
        .collect();
    tokens[0].misc.set(ALIGN_BEGIN, a.interval.begin().seconds_string());
    tokens[n - 1].misc.set(ALIGN_END, a.interval.end().seconds_string());
    Some(Unit::Transcription(TranscriptionUnit {
        header: header(ctx, speaker, a.interval),
        text_jefferson: Some(value.to_string()),
        text: parsed.plain_text(),
        tokens,
    }))
}

/// Builds a document from classified tiers. Speech and metalanguage units
/// come first in time order, then gesture units; ids are assigned in that
/// order starting from `tu0001` and `gu0001`. Overlap lists are left empty.
pub fn tiers_to_units(tiers: &[EafTier], ctx: &ConversionContext) -> (CorpusDocument, Vec<Diagnostic>) {
    let mut diags = Vec::new();
    let mut speech = Vec::new();
    let mut gestures = Vec::new();

    for (ti, tier) in tiers.iter().enumerate() {
        let class = match classify(tier, ctx) {
            Ok(c) => c,
            Err(e) => {
                diags.push(Diagnostic::new(Rule::Rep003, e.to_string()).on_field(tier.tier_id.clone()));
                continue;
            }
        };
        if class == TierClass::Experimenter && !tier.annotations.is_empty() {
            diags.push(
                Diagnostic::new(
                    Rule::Eaf003,
                    alloc::format!("{} experimenter annotations become regular speech units", tier.annotations.len()),
                )
                .on_field(tier.tier_id.clone()),
            );
        }
        for a in &tier.annotations {
            if a.value.trim().is_empty() {
                diags.push(
                    Diagnostic::new(Rule::Eaf004, alloc::format!("{} is empty", a.id))
                        .on_field(tier.tier_id.clone())
                        .at_line(a.line),
                );
                continue;
            }
            let unit = match &class {
                TierClass::Speaker(s) => speech_unit(ctx, s, a, &mut diags, &tier.tier_id),
                TierClass::Experimenter => speech_unit(ctx, EXPERIMENTER, a, &mut diags, &tier.tier_id),
                TierClass::Metalanguage { speaker } => {
                    let mut misc = Features::new();
                    misc.set(META, misc_value(&a.value));
                    Some(Unit::Transcription(TranscriptionUnit {
                        header: header(ctx, speaker, a.interval),
                        text_jefferson: None,
                        text: EMPTY_FORM.to_string(),
                        tokens: alloc::vec![Token::placeholder(aligned(misc, a.interval))],
                    }))
                }
                TierClass::Articulator { speaker, articulator } => {
                    let code = misc_value(&a.value);
                    let quoted = if code.len() >= 2 && code.starts_with('\'') && code.ends_with('\'') {
                        code
                    } else {
                        alloc::format!("'{code}'")
                    };
                    let mut misc = Features::new();
                    misc.set(GESTURE, quoted);
                    let mut h = header(ctx, speaker, a.interval);
                    h.sent_id = UnitId::new(UnitKind::Gestural, 0);
                    Some(Unit::Gestural(GesturalUnit {
                        header: h,
                        unit_type: articulator.code().to_string(),
                        text: EMPTY_FORM.to_string(),
                        tokens: alloc::vec![Token::placeholder(aligned(misc, a.interval))],
                    }))
                }
            };
            if let Some(unit) = unit {
                let p = Pending { interval: a.interval, tier: ti, unit };
                match p.unit.kind() {
                    UnitKind::Transcription => speech.push(p),
                    UnitKind::Gestural => gestures.push(p),
                }
            }
        }
    }

    let mut units = Vec::with_capacity(speech.len() + gestures.len());
    for (kind, mut list) in [(UnitKind::Transcription, speech), (UnitKind::Gestural, gestures)] {
        list.sort_by_key(|p| (p.interval.begin(), p.tier, p.interval.end()));
        for (n, mut p) in list.into_iter().enumerate() {
            p.unit.header_mut().sent_id = UnitId::new(kind, n as u64 + 1);
            units.push(p.unit);
        }
    }
    (CorpusDocument::new(units), diags)
}

/// Full conversion: units from tiers, then overlap lists and token
/// `Overlap` features.
pub fn convert(tiers: &[EafTier], ctx: &ConversionContext) -> (CorpusDocument, Vec<Diagnostic>) {
    let (doc, mut diags) = tiers_to_units(tiers, ctx);
    let (doc, more) = overlap::regenerate(&doc, &[]);
    diags.extend(more);
    (doc, diags)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time::Millis;
    use alloc::vec;

    fn ann(id: &str, b: u64, e: u64, value: &str) -> EafAnnotation {
        EafAnnotation { id: id.into(), interval: TimeInterval::from_millis(b, e).unwrap(), value: value.into(), line: None }
    }

    fn tier(id: &str, participant: Option<&str>, annotations: Vec<EafAnnotation>) -> EafTier {
        EafTier { tier_id: id.into(), participant: participant.map(Into::into), annotations, attributes: Vec::new() }
    }

    fn ctx() -> ConversionContext {
        ConversionContext::new("DUC22051430").with_participants(vec!["S001".into(), "B001".into()])
    }

    #[test]
    fn classification() {
        let c = ctx();
        assert_eq!(classify(&tier("S001", None, vec![]), &c), Ok(TierClass::Speaker("S001".into())));
        assert_eq!(
            classify(&tier("F:LH", Some("S001"), vec![]), &c),
            Ok(TierClass::Articulator { speaker: "S001".into(), articulator: Articulator::FingerLeft })
        );
        assert_eq!(
            classify(&tier("B001@UB", None, vec![]), &c),
            Ok(TierClass::Articulator { speaker: "B001".into(), articulator: Articulator::UpperBody })
        );
        assert_eq!(classify(&tier("F:RH", None, vec![]), &c), Err(TierError::NoSpeaker("F:RH".into())));
        assert_eq!(classify(&tier("X999", None, vec![]), &c), Err(TierError::UnknownTier("X999".into())));
        assert_eq!(classify(&tier("S002", None, vec![]), &c), Err(TierError::UnknownTier("S002".into())));
        assert_eq!(classify(&tier("S002", None, vec![]), &ConversionContext::new("x")), Ok(TierClass::Speaker("S002".into())));
    }

    #[test]
    fn speech_and_gesture_units() {
        let tiers = vec![
            tier("S001", None, vec![ann("a1", 11704, 12792, "entrambe da sole")]),
            tier("F:LH", Some("S001"), vec![ann("a2", 11410, 11740, "\u{e5de}\u{e002} [ \u{f197} ]")]),
            tier("X999", None, vec![ann("a3", 0, 10, "x")]),
        ];
        let (doc, diags) = tiers_to_units(&tiers, &ctx());
        assert_eq!(diags.iter().map(|d| d.rule).collect::<Vec<_>>(), [Rule::Rep003]);
        assert_eq!(doc.units.len(), 2);
        let tu = &doc.units[0];
        assert_eq!(tu.id().to_string(), "tu0001");
        assert_eq!(tu.header().duration, Millis(1088));
        assert_eq!(tu.text(), "entrambe da sole");
        assert_eq!(tu.tokens()[0].misc.to_string(), "AlignBegin=11.704");
        let gu = doc.units[1].as_gestural().unwrap();
        assert_eq!(gu.header.sent_id.to_string(), "gu0001");
        assert_eq!(gu.unit_type, "F:LH");
        assert_eq!(gu.header.speaker_id, "S001");
        assert_eq!(gu.header.duration, Millis(330));
        assert!(gu.gesture_code().unwrap().starts_with('\''));
    }

    #[test]
    fn prosodic_features_and_empty_values() {
        let tiers = vec![tier("S001", None, vec![ann("a1", 13047, 14034, "e[h: la sera]"), ann("a2", 15000, 15500, "  ")])];
        let (doc, diags) = tiers_to_units(&tiers, &ctx());
        assert_eq!(diags.iter().map(|d| d.rule).collect::<Vec<_>>(), [Rule::Eaf004]);
        assert_eq!(doc.units[0].tokens()[0].misc.to_string(), "AlignBegin=13.047|ProlongedSound=eh:");
    }

    #[test]
    fn resorting_and_intra_tier_overlap() {
        let mut t = tier("S001", None, vec![ann("b", 500, 900, "b"), ann("a", 0, 600, "a")]);
        let d = normalize_tier(&mut t);
        assert_eq!(d.iter().map(|d| d.rule).collect::<Vec<_>>(), [Rule::Eaf001, Rule::Eaf005]);
        assert_eq!(t.annotations[0].id, "a");
    }
}
