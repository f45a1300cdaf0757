//! Simplified Jefferson prosodic notation.
//!
//! Symbols (see `docs/jefferson.md` for the full table and the MISC feature
//! names they map to):
//!
//! ```text
//! .  descending        ?  rising           ,  weakly rising
//! (.) short pause      cia-  interrupted   =  prosodically bound
//! >ciao< faster        <ciao> slower       °ciao° lower volume
//! :  prolonged sound   [ciao] overlap      CIAO louder
//! xxx unintelligible   (ciao) uncertain hearing
//! ```
//!
//! Delimiters may open or close inside a word (`p[er natale]`); they never
//! split a token; positions are recorded as (token, char offset) pairs.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::diagnostic::{Diagnostic, Rule};
use crate::model::Features;

/// Prosodic or interactional event attached to one token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProsodicEvent {
    DescendingIntonation,
    WeaklyRisingIntonation,
    RisingIntonation,
    ShortPause,
    InterruptedWord,
    FasterSpan,
    SlowerSpan,
    LowerVolumeSpan,
    /// Upper-case run covering form chars `start..end`.
    LouderWord { start: usize, end: usize },
    /// `:` written after `offset` form chars.
    ProlongedSound { offset: usize },
    /// `=` written right after this token.
    ProsodicBinding,
    OverlapSpan { span_id: usize },
    Unintelligible,
    UncertainHearing,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProsodicToken {
    /// Lower-cased word with every notation symbol removed.
    pub form: String,
    pub events: Vec<ProsodicEvent>,
    /// Source substring the token was read from.
    pub raw: String,
}

impl ProsodicToken {
    pub fn form_len(&self) -> usize {
        self.form.chars().count()
    }

    pub fn has(&self, event: ProsodicEvent) -> bool {
        self.events.contains(&event)
    }

    /// Form with `:` re-inserted where sounds are prolonged (`eh:`, `fatt:o`).
    pub fn prolonged_form(&self) -> Option<String> {
        let mut offsets: Vec<usize> = self
            .events
            .iter()
            .filter_map(|e| match e {
                ProsodicEvent::ProlongedSound { offset } => Some(*offset),
                _ => None,
            })
            .collect();
        if offsets.is_empty() {
            return None;
        }
        offsets.sort_unstable();
        let mut out = String::new();
        let mut next = offsets.iter().peekable();
        for (i, c) in self.form.chars().enumerate() {
            out.push(c);
            while next.peek().is_some_and(|&&o| o == i + 1) {
                out.push(':');
                next.next();
            }
        }
        Some(out)
    }
}

/// A point between form characters: `offset` chars into token `token`
/// (both 0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position {
    pub token: usize,
    pub offset: usize,
}

/// One `[...]` overlap span.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OverlapSpanMark {
    /// 1-based ordinal within the unit.
    pub span_id: usize,
    pub start: Position,
    pub end: Position,
}

impl OverlapSpanMark {
    /// Indices of tokens with at least one form char inside the span.
    pub fn covered_tokens(&self, tokens: &[ProsodicToken]) -> Vec<usize> {
        covered(self.start, self.end, tokens)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpanKind {
    Faster,
    Slower,
    LowerVolume,
    Uncertain,
}

impl SpanKind {
    fn event(self) -> ProsodicEvent {
        match self {
            SpanKind::Faster => ProsodicEvent::FasterSpan,
            SpanKind::Slower => ProsodicEvent::SlowerSpan,
            SpanKind::LowerVolume => ProsodicEvent::LowerVolumeSpan,
            SpanKind::Uncertain => ProsodicEvent::UncertainHearing,
        }
    }

    fn delimiters(self) -> (char, char) {
        match self {
            SpanKind::Faster => ('>', '<'),
            SpanKind::Slower => ('<', '>'),
            SpanKind::LowerVolume => ('°', '°'),
            SpanKind::Uncertain => ('(', ')'),
        }
    }
}

/// A speed, volume or uncertain-hearing span.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanMark {
    pub kind: SpanKind,
    pub start: Position,
    pub end: Position,
}

/// Parse result for one transcription unit.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParsedUnit {
    pub tokens: Vec<ProsodicToken>,
    pub overlaps: Vec<OverlapSpanMark>,
    pub spans: Vec<SpanMark>,
    /// `(.)` markers before the first word.
    pub leading_pauses: usize,
    // (open sequence number, index into overlaps or spans) in opening order
    order: Vec<(usize, Mark)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mark {
    Overlap(usize),
    Span(usize),
}

impl ParsedUnit {
    /// Forms joined with single spaces.
    pub fn plain_text(&self) -> String {
        let mut out = String::new();
        for (i, t) in self.tokens.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(&t.form);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JeffersonError {
    #[error("unclosed '{delimiter}' at offset {offset}")]
    UnbalancedDelimiter { offset: usize, delimiter: char },
    #[error("'{delimiter}' at offset {offset} closes nothing")]
    StrayClosingDelimiter { offset: usize, delimiter: char },
    #[error("span opened at offset {offset} contains no text")]
    EmptySpan { offset: usize },
    #[error("'[' at offset {offset} opens an overlap inside another overlap")]
    NestedOverlap { offset: usize },
    #[error("'{delimiter}' at offset {offset} closes a span that is not the innermost one")]
    InterleavedSpans { offset: usize, delimiter: char },
    #[error("'{symbol}' at offset {offset} has no word to attach to")]
    MisplacedSymbol { offset: usize, symbol: char },
}

impl JeffersonError {
    pub fn rule(&self) -> Rule {
        match self {
            JeffersonError::UnbalancedDelimiter { .. } => Rule::Jef001,
            JeffersonError::StrayClosingDelimiter { .. } => Rule::Jef002,
            JeffersonError::EmptySpan { .. } => Rule::Jef003,
            JeffersonError::NestedOverlap { .. } => Rule::Jef004,
            JeffersonError::InterleavedSpans { .. } => Rule::Jef005,
            JeffersonError::MisplacedSymbol { .. } => Rule::Jef006,
        }
    }

    pub fn offset(&self) -> usize {
        match *self {
            JeffersonError::UnbalancedDelimiter { offset, .. }
            | JeffersonError::StrayClosingDelimiter { offset, .. }
            | JeffersonError::EmptySpan { offset }
            | JeffersonError::NestedOverlap { offset }
            | JeffersonError::InterleavedSpans { offset, .. }
            | JeffersonError::MisplacedSymbol { offset, .. } => offset,
        }
    }
}

/// Symbols that never appear in a token form.
pub const RESERVED: &[char] = &['.', ',', '?', ':', '=', '°', '>', '<', '[', ']', '(', ')'];

fn is_form_char(c: char) -> bool {
    !c.is_whitespace() && !RESERVED.contains(&c) && c != '-'
}

/// Parses one unit, failing on the first defect.
pub fn parse(text: &str) -> Result<ParsedUnit, JeffersonError> {
    let (parsed, mut errors) = parse_lenient(text);
    if errors.is_empty() {
        Ok(parsed)
    } else {
        Err(errors.swap_remove(0))
    }
}

/// Parses with error recovery: returns the best-effort tokens and every
/// defect found, ordered by offset.
pub fn parse_lenient(text: &str) -> (ParsedUnit, Vec<JeffersonError>) {
    let mut s = Scanner::new(text);
    s.run();
    let mut errors = s.errors;
    errors.sort_by_key(|e| e.offset());
    (s.out, errors)
}

/// The plain `text` for a Jefferson transcription.
pub fn strip(text: &str) -> Result<String, JeffersonError> {
    parse(text).map(|p| p.plain_text())
}

/// One `JEF` diagnostic per defect; empty iff [`parse`] succeeds.
pub fn validate(text: &str) -> Vec<Diagnostic> {
    parse_lenient(text)
        .1
        .into_iter()
        .map(|e| Diagnostic::new(e.rule(), e.to_string()).on_field("text_jefferson"))
        .collect()
}

struct OpenSpan {
    seq: usize,
    kind: Option<SpanKind>, // None = overlap
    offset: usize,
    start: Position,
    form_total: usize,
    span_id: usize,
}

struct Builder {
    form: String,
    len: usize,
    events: Vec<ProsodicEvent>,
    raw_start: usize,
    raw_end: usize,
    caps_start: Option<usize>,
    marked: Vec<usize>,
}

struct Scanner<'a> {
    text: &'a str,
    chars: Vec<(usize, char)>,
    out: ParsedUnit,
    errors: Vec<JeffersonError>,
    cur: Option<Builder>,
    overlap: Option<OpenSpan>,
    stack: Vec<OpenSpan>,
    form_total: usize,
    seq: usize,
}

impl<'a> Scanner<'a> {
    fn new(text: &'a str) -> Scanner<'a> {
        Scanner {
            text,
            chars: text.char_indices().collect(),
            out: ParsedUnit::default(),
            errors: Vec::new(),
            cur: None,
            overlap: None,
            stack: Vec::new(),
            form_total: 0,
            seq: 0,
        }
    }

    fn run(&mut self) {
        let mut i = 0;
        while i < self.chars.len() {
            let c = self.chars[i].1;
            let next = self.chars.get(i + 1).map(|&(_, c)| c);
            match c {
                c if c.is_whitespace() => self.finish(),
                '(' if next == Some('.') && self.chars.get(i + 2).map(|p| p.1) == Some(')') => {
                    self.pause(i + 2);
                    i += 3;
                    continue;
                }
                '(' => self.open(Some(SpanKind::Uncertain), i),
                ')' => self.close(SpanKind::Uncertain, i, ')'),
                '[' => {
                    if self.overlap.is_some() {
                        self.errors.push(JeffersonError::NestedOverlap { offset: i });
                    } else {
                        self.open(None, i);
                    }
                }
                ']' => self.close_overlap(i),
                '°' => {
                    if self.stack.iter().any(|s| s.kind == Some(SpanKind::LowerVolume)) {
                        self.close(SpanKind::LowerVolume, i, '°');
                    } else {
                        self.open(Some(SpanKind::LowerVolume), i);
                    }
                }
                '>' => {
                    if self.stack.iter().any(|s| s.kind == Some(SpanKind::Slower)) {
                        self.close(SpanKind::Slower, i, '>');
                    } else {
                        self.open(Some(SpanKind::Faster), i);
                    }
                }
                '<' => {
                    if self.stack.iter().any(|s| s.kind == Some(SpanKind::Faster)) {
                        self.close(SpanKind::Faster, i, '<');
                    } else {
                        self.open(Some(SpanKind::Slower), i);
                    }
                }
                '.' | '?' | ',' => {
                    let ev = match c {
                        '.' => ProsodicEvent::DescendingIntonation,
                        '?' => ProsodicEvent::RisingIntonation,
                        _ => ProsodicEvent::WeaklyRisingIntonation,
                    };
                    if self.attach(ev, i) {
                        self.finish();
                    }
                }
                '=' => {
                    if self.attach(ProsodicEvent::ProsodicBinding, i) {
                        self.finish();
                    }
                }
                ':' => match &mut self.cur {
                    Some(b) => {
                        b.events.push(ProsodicEvent::ProlongedSound { offset: b.len });
                        b.raw_end = self.chars[i].0 + c.len_utf8();
                    }
                    None => self.errors.push(JeffersonError::MisplacedSymbol { offset: i, symbol: c }),
                },
                '-' if next.is_some_and(is_form_char) => self.push_form_char(i, c),
                '-' => match &mut self.cur {
                    Some(b) => {
                        b.events.push(ProsodicEvent::InterruptedWord);
                        b.raw_end = self.chars[i].0 + 1;
                    }
                    None => self.errors.push(JeffersonError::MisplacedSymbol { offset: i, symbol: c }),
                },
                _ => self.push_form_char(i, c),
            }
            i += 1;
        }
        self.finish();
        if let Some(o) = self.overlap.take() {
            self.errors.push(JeffersonError::UnbalancedDelimiter { offset: o.offset, delimiter: '[' });
        }
        for s in core::mem::take(&mut self.stack) {
            let delimiter = s.kind.map_or('[', |k| k.delimiters().0);
            self.errors.push(JeffersonError::UnbalancedDelimiter { offset: s.offset, delimiter });
        }
    }

    fn open_position(&self) -> Position {
        match &self.cur {
            Some(b) => Position { token: self.out.tokens.len(), offset: b.len },
            None => Position { token: self.out.tokens.len(), offset: 0 },
        }
    }

    fn close_position(&self) -> Position {
        match (&self.cur, self.out.tokens.last()) {
            (Some(b), _) => Position { token: self.out.tokens.len(), offset: b.len },
            (None, Some(t)) => Position { token: self.out.tokens.len() - 1, offset: t.form_len() },
            (None, None) => Position { token: 0, offset: 0 },
        }
    }

    fn open(&mut self, kind: Option<SpanKind>, offset: usize) {
        let span = OpenSpan {
            seq: self.seq,
            kind,
            offset,
            start: self.open_position(),
            form_total: self.form_total,
            span_id: if kind.is_none() { self.out.overlaps.len() + 1 } else { 0 },
        };
        self.seq += 1;
        self.touch_raw(offset);
        match kind {
            None => self.overlap = Some(span),
            Some(_) => self.stack.push(span),
        }
    }

    fn touch_raw(&mut self, offset: usize) {
        let (byte, c) = self.chars[offset];
        if let Some(b) = &mut self.cur {
            b.raw_end = byte + c.len_utf8();
        }
    }

    fn close_overlap(&mut self, offset: usize) {
        let Some(open) = self.overlap.take() else {
            self.errors.push(JeffersonError::StrayClosingDelimiter { offset, delimiter: ']' });
            return;
        };
        self.touch_raw(offset);
        if open.form_total == self.form_total {
            self.errors.push(JeffersonError::EmptySpan { offset: open.offset });
            return;
        }
        let end = self.close_position();
        let idx = self.out.overlaps.len();
        self.out.overlaps.push(OverlapSpanMark { span_id: open.span_id, start: open.start, end });
        self.out.order.push((open.seq, Mark::Overlap(idx)));
    }

    fn close(&mut self, kind: SpanKind, offset: usize, delimiter: char) {
        let Some(pos) = self.stack.iter().rposition(|s| s.kind == Some(kind)) else {
            self.errors.push(JeffersonError::StrayClosingDelimiter { offset, delimiter });
            return;
        };
        if pos != self.stack.len() - 1 {
            self.errors.push(JeffersonError::InterleavedSpans { offset, delimiter });
        }
        let open = self.stack.remove(pos);
        self.touch_raw(offset);
        if open.form_total == self.form_total {
            self.errors.push(JeffersonError::EmptySpan { offset: open.offset });
            return;
        }
        let end = self.close_position();
        let idx = self.out.spans.len();
        self.out.spans.push(SpanMark { kind, start: open.start, end });
        self.out.order.push((open.seq, Mark::Span(idx)));
    }

    /// Attaches a word-final event to the current token, or to the previous
    /// one when the symbol follows whitespace. Returns false if there is no
    /// token at all.
    fn attach(&mut self, ev: ProsodicEvent, offset: usize) -> bool {
        let (byte, c) = self.chars[offset];
        if let Some(b) = &mut self.cur {
            b.events.push(ev);
            b.raw_end = byte + c.len_utf8();
            return true;
        }
        match self.out.tokens.last_mut() {
            Some(t) => {
                t.events.push(ev);
                true
            }
            None => {
                self.errors.push(JeffersonError::MisplacedSymbol { offset, symbol: c });
                false
            }
        }
    }

    fn pause(&mut self, last: usize) {
        let (byte, _) = self.chars[last];
        if let Some(b) = &mut self.cur {
            b.events.push(ProsodicEvent::ShortPause);
            b.raw_end = byte + 1;
            self.finish();
        } else if let Some(t) = self.out.tokens.last_mut() {
            t.events.push(ProsodicEvent::ShortPause);
        } else {
            self.out.leading_pauses += 1;
        }
    }

    fn push_form_char(&mut self, offset: usize, c: char) {
        let byte = self.chars[offset].0;
        let b = self.cur.get_or_insert_with(|| Builder {
            form: String::new(),
            len: 0,
            events: Vec::new(),
            raw_start: byte,
            raw_end: byte,
            caps_start: None,
            marked: Vec::new(),
        });
        let mut open: Vec<(usize, ProsodicEvent)> = self
            .stack
            .iter()
            .filter_map(|s| s.kind.map(|k| (s.seq, k.event())))
            .collect();
        if let Some(o) = &self.overlap {
            open.push((o.seq, ProsodicEvent::OverlapSpan { span_id: o.span_id }));
        }
        open.sort_by_key(|(seq, _)| *seq);
        for (seq, ev) in open {
            if !b.marked.contains(&seq) {
                b.marked.push(seq);
                b.events.push(ev);
            }
        }
        if c.is_uppercase() {
            if b.caps_start.is_none() {
                b.caps_start = Some(b.len);
            }
            for lc in c.to_lowercase() {
                b.form.push(lc);
                b.len += 1;
            }
        } else {
            if let Some(start) = b.caps_start.take() {
                b.events.push(ProsodicEvent::LouderWord { start, end: b.len });
            }
            b.form.push(c);
            b.len += 1;
        }
        b.raw_end = byte + c.len_utf8();
        self.form_total += 1;
    }

    fn finish(&mut self) {
        let Some(mut b) = self.cur.take() else { return };
        if let Some(start) = b.caps_start.take() {
            b.events.push(ProsodicEvent::LouderWord { start, end: b.len });
        }
        if b.form == "xxx" {
            b.events.push(ProsodicEvent::Unintelligible);
        }
        self.out.tokens.push(ProsodicToken {
            form: b.form,
            events: b.events,
            raw: self.text[b.raw_start..b.raw_end].to_string(),
        });
    }
}

fn covered(start: Position, end: Position, tokens: &[ProsodicToken]) -> Vec<usize> {
    (start.token..=end.token.min(tokens.len().saturating_sub(1)))
        .filter(|&i| {
            let len = tokens[i].form_len();
            let from = if i == start.token { start.offset } else { 0 };
            let to = if i == end.token { end.offset } else { len };
            from < to
        })
        .collect()
}

/// Re-renders a parse in canonical spacing. `parse(render(p))` yields the
/// same tokens, events and spans as `p`.
pub fn render(parsed: &ParsedUnit) -> String {
    struct Delim {
        seq: usize,
        open: char,
        close: char,
        start: Position,
        end: Position,
    }
    let delims: Vec<Delim> = parsed
        .order
        .iter()
        .map(|&(seq, mark)| match mark {
            Mark::Overlap(i) => {
                let o = &parsed.overlaps[i];
                Delim { seq, open: '[', close: ']', start: o.start, end: o.end }
            }
            Mark::Span(i) => {
                let s = &parsed.spans[i];
                let (open, close) = s.kind.delimiters();
                Delim { seq, open, close, start: s.start, end: s.end }
            }
        })
        .collect();

    let mut out = String::new();
    for _ in 0..parsed.leading_pauses {
        out.push_str("(.) ");
    }
    for (ti, tok) in parsed.tokens.iter().enumerate() {
        if ti > 0 {
            out.push(' ');
        }
        let chars: Vec<char> = tok.form.chars().collect();
        for p in 0..=chars.len() {
            let here = Position { token: ti, offset: p };
            let mut closes: Vec<&Delim> = delims.iter().filter(|d| d.end == here).collect();
            closes.sort_by(|a, b| b.seq.cmp(&a.seq));
            closes.iter().for_each(|d| out.push(d.close));
            let mut opens: Vec<&Delim> = delims.iter().filter(|d| d.start == here).collect();
            opens.sort_by_key(|d| d.seq);
            opens.iter().for_each(|d| out.push(d.open));
            if let Some(&c) = chars.get(p) {
                let loud = tok.events.iter().any(
                    |e| matches!(*e, ProsodicEvent::LouderWord { start, end } if start <= p && p < end),
                );
                if loud {
                    out.extend(c.to_uppercase());
                } else {
                    out.push(c);
                }
                for e in &tok.events {
                    if *e == (ProsodicEvent::ProlongedSound { offset: p + 1 }) {
                        out.push(':');
                    }
                }
            }
        }
        for e in &tok.events {
            match e {
                ProsodicEvent::DescendingIntonation => out.push('.'),
                ProsodicEvent::RisingIntonation => out.push('?'),
                ProsodicEvent::WeaklyRisingIntonation => out.push(','),
                ProsodicEvent::InterruptedWord => out.push('-'),
                ProsodicEvent::ProsodicBinding => out.push('='),
                ProsodicEvent::ShortPause => out.push_str(" (.)"),
                _ => {}
            }
        }
    }
    out
}

/// MISC features for each token, in event order. Overlap spans are left to
/// the overlap module, which knows the partner units.
pub fn to_misc_features(tokens: &[ProsodicToken]) -> Vec<Features> {
    tokens
        .iter()
        .map(|tok| {
            let mut f = Features::new();
            for e in &tok.events {
                let (key, value) = match e {
                    ProsodicEvent::DescendingIntonation => ("Intonation", "Descending"),
                    ProsodicEvent::RisingIntonation => ("Intonation", "Rising"),
                    ProsodicEvent::WeaklyRisingIntonation => ("Intonation", "WeaklyRising"),
                    ProsodicEvent::ShortPause => ("Pause", "Short"),
                    ProsodicEvent::InterruptedWord => ("Interrupted", "Yes"),
                    ProsodicEvent::FasterSpan => ("Speed", "Faster"),
                    ProsodicEvent::SlowerSpan => ("Speed", "Slower"),
                    ProsodicEvent::LowerVolumeSpan => ("Volume", "Lower"),
                    ProsodicEvent::LouderWord { .. } => ("Volume", "Louder"),
                    ProsodicEvent::ProsodicBinding => ("ProsodicBinding", "Yes"),
                    ProsodicEvent::Unintelligible => ("Unintelligible", "Yes"),
                    ProsodicEvent::UncertainHearing => ("Uncertain", "Yes"),
                    ProsodicEvent::ProlongedSound { .. } => {
                        if !f.contains("ProlongedSound") {
                            if let Some(p) = tok.prolonged_form() {
                                f.append("ProlongedSound", &p);
                            }
                        }
                        continue;
                    }
                    ProsodicEvent::OverlapSpan { .. } => continue,
                };
                f.append(key, value);
            }
            f
        })
        .collect()
}

impl fmt::Display for ParsedUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use ProsodicEvent::*;

    fn forms(p: &ParsedUnit) -> Vec<&str> {
        p.tokens.iter().map(|t| t.form.as_str()).collect()
    }

    #[test]
    fn overlap_opening_mid_word() {
        let p = parse("e[h: la sera]").unwrap();
        assert_eq!(forms(&p), ["eh", "la", "sera"]);
        assert!(p.tokens[0].has(ProlongedSound { offset: 2 }));
        for t in &p.tokens {
            assert!(t.has(OverlapSpan { span_id: 1 }));
        }
        assert_eq!(
            p.overlaps,
            vec![OverlapSpanMark {
                span_id: 1,
                start: Position { token: 0, offset: 1 },
                end: Position { token: 2, offset: 4 },
            }]
        );
        assert_eq!(p.overlaps[0].covered_tokens(&p.tokens), [0, 1, 2]);
        assert_eq!(p.tokens[0].raw, "e[h:");
    }

    #[test]
    fn faster_span() {
        let p = parse(">ciao<").unwrap();
        assert_eq!(forms(&p), ["ciao"]);
        assert_eq!(p.tokens[0].events, [FasterSpan]);
    }

    #[test]
    fn slower_and_volume_spans() {
        let p = parse("<piano> °sotto voce°").unwrap();
        assert_eq!(p.tokens[0].events, [SlowerSpan]);
        assert_eq!(p.tokens[1].events, [LowerVolumeSpan]);
        assert_eq!(p.tokens[2].events, [LowerVolumeSpan]);
    }

    #[test]
    fn unclosed_volume() {
        assert_eq!(
            parse("°ciao"),
            Err(JeffersonError::UnbalancedDelimiter { offset: 0, delimiter: '°' })
        );
    }

    #[test]
    fn strip_examples() {
        assert_eq!(strip("e[h: la sera]").unwrap(), "eh la sera");
        assert_eq!(strip("p[er natale]").unwrap(), "per natale");
        assert_eq!(strip("CIAO").unwrap(), "ciao");
        assert_eq!(strip("[e parlare di viag]gi no[n sarebbe male]").unwrap(), "e parlare di viaggi non sarebbe male");
        assert_eq!(
            strip("l'ultimo che ho fatt:o allora sono stata a siviglia:, p[er natale]").unwrap(),
            "l'ultimo che ho fatto allora sono stata a siviglia per natale"
        );
        assert_eq!(strip("(.) ciao (.) come=stai? xxx (forse)").unwrap(), "ciao come stai xxx forse");
        assert_eq!(strip("cia- ciao").unwrap(), "cia ciao");
    }

    #[test]
    fn validate_examples() {
        assert!(validate("[che io ador]o che [io adoro]").is_empty());
        let d = validate("ciao]");
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].rule, Rule::Jef002);
        let d = validate("><");
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].rule, Rule::Jef003);
    }

    #[test]
    fn validate_reports_every_defect() {
        let d = validate("°ciao ] [a [b] (c");
        let rules: Vec<Rule> = d.iter().map(|d| d.rule).collect();
        assert_eq!(rules, [Rule::Jef001, Rule::Jef002, Rule::Jef004, Rule::Jef001]);
    }

    #[test]
    fn interleaved_spans() {
        assert_eq!(
            parse("°>ciao°<").unwrap_err(),
            JeffersonError::InterleavedSpans { offset: 6, delimiter: '°' }
        );
        // overlap brackets are independent of speed/volume nesting
        assert!(parse("[°ciao] bello°").is_ok());
    }

    #[test]
    fn misplaced_symbols() {
        assert!(matches!(parse(": ciao"), Err(JeffersonError::MisplacedSymbol { offset: 0, .. })));
        assert!(matches!(parse("?"), Err(JeffersonError::MisplacedSymbol { .. })));
        assert!(matches!(parse("ciao -"), Err(JeffersonError::MisplacedSymbol { offset: 5, .. })));
    }

    #[test]
    fn pauses() {
        let p = parse("(.) ciao (.) bello(.)").unwrap();
        assert_eq!(p.leading_pauses, 1);
        assert_eq!(p.tokens[0].events, [ShortPause]);
        assert_eq!(p.tokens[1].events, [ShortPause]);
        assert_eq!(p.plain_text(), "ciao bello");
    }

    #[test]
    fn binding_and_intonation() {
        let p = parse("ciao=come stai? bene. allora, sì").unwrap();
        assert_eq!(forms(&p), ["ciao", "come", "stai", "bene", "allora", "sì"]);
        assert_eq!(p.tokens[0].events, [ProsodicBinding]);
        assert_eq!(p.tokens[2].events, [RisingIntonation]);
        assert_eq!(p.tokens[3].events, [DescendingIntonation]);
        assert_eq!(p.tokens[4].events, [WeaklyRisingIntonation]);
    }

    #[test]
    fn louder_runs_and_unintelligible() {
        let p = parse("ciAO XXX").unwrap();
        assert_eq!(p.tokens[0].form, "ciao");
        assert_eq!(p.tokens[0].events, [LouderWord { start: 2, end: 4 }]);
        assert_eq!(p.tokens[1].events, [LouderWord { start: 0, end: 3 }, Unintelligible]);
    }

    #[test]
    fn uncertain_hearing_keeps_content() {
        let p = parse("(che dice) xxx:").unwrap();
        assert_eq!(forms(&p), ["che", "dice", "xxx"]);
        assert!(p.tokens[0].has(UncertainHearing));
        assert!(p.tokens[1].has(UncertainHearing));
        assert_eq!(p.tokens[2].events, [ProlongedSound { offset: 3 }, Unintelligible]);
        assert_eq!(parse("()"), Err(JeffersonError::EmptySpan { offset: 0 }));
    }

    #[test]
    fn hyphen_inside_word_is_form() {
        let p = parse("anti-age").unwrap();
        assert_eq!(forms(&p), ["anti-age"]);
        assert!(p.tokens[0].events.is_empty());
    }

    #[test]
    fn misc_features() {
        let p = parse("e[h: la sera]").unwrap();
        let f = to_misc_features(&p.tokens);
        assert_eq!(f[0].to_string(), "ProlongedSound=eh:");
        assert!(f[1].is_empty());
        let p = parse("ciao").unwrap();
        assert!(to_misc_features(&p.tokens)[0].is_empty());
        let p = parse("siviglia:,").unwrap();
        assert_eq!(
            to_misc_features(&p.tokens)[0].to_string(),
            "ProlongedSound=siviglia:|Intonation=WeaklyRising"
        );
        let p = parse("fatt:o::").unwrap();
        assert_eq!(to_misc_features(&p.tokens)[0].to_string(), "ProlongedSound=fatt:o::");
    }

    #[test]
    fn render_canonical_inputs() {
        for s in [
            "e[h: la sera]",
            "p[er natale]",
            "[e parlare di viag]gi no[n sarebbe male]",
            "l'ultimo che ho fatt:o allora sono stata a siviglia:, p[er natale]",
            "°>ciao< bello° CIAO (forse) cia- (.) xxx",
            "ciao[ bello]",
        ] {
            assert_eq!(render(&parse(s).unwrap()), s);
        }
    }

    #[test]
    fn two_overlap_spans_partner_order() {
        let p = parse("[e parlare di viag]gi no[n sarebbe male]").unwrap();
        assert_eq!(p.overlaps.len(), 2);
        assert_eq!(p.overlaps[0].covered_tokens(&p.tokens), [0, 1, 2, 3]);
        assert_eq!(p.overlaps[1].covered_tokens(&p.tokens), [4, 5, 6]);
    }
}
