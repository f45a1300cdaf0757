//! Temporal overlap between units, and projection of `[...]` spans onto
//! token-level `Overlap=B:<id>` / `Overlap=I` features.

use alloc::collections::{BTreeMap, BTreeSet, BinaryHeap};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Reverse;

use crate::diagnostic::{Diagnostic, Rule};
use crate::jefferson::{self, OverlapSpanMark, Position, ProsodicToken};
use crate::model::{AlignmentError, CorpusDocument, TranscriptionUnit, Unit, UnitId, OVERLAP};
use crate::time::{Millis, TimeInterval};

/// Two units whose intervals share a stretch of positive length.
/// `a` comes before `b` in the input order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OverlapEdge {
    pub a: UnitId,
    pub b: UnitId,
    pub intersection: TimeInterval,
}

/// Index pairs `(i, j)`, `i < j`, of intervals that intersect with positive
/// length, sorted. Sweep over begin times with a min-heap of active ends.
pub fn overlapping_pairs(intervals: &[TimeInterval]) -> Vec<(usize, usize)> {
    let mut order: Vec<usize> = (0..intervals.len()).collect();
    order.sort_by_key(|&i| (intervals[i].begin(), i));
    let mut active: BinaryHeap<Reverse<(Millis, usize)>> = BinaryHeap::new();
    let mut pairs = Vec::new();
    for i in order {
        let begin = intervals[i].begin();
        while active.peek().is_some_and(|Reverse((end, _))| *end <= begin) {
            active.pop();
        }
        for Reverse((_, j)) in active.iter() {
            pairs.push(if *j < i { (*j, i) } else { (i, *j) });
        }
        active.push(Reverse((intervals[i].end(), i)));
    }
    pairs.sort_unstable();
    pairs
}

pub fn compute_overlaps(units: &[Unit]) -> Result<Vec<OverlapEdge>, AlignmentError> {
    let intervals = units.iter().map(Unit::interval).collect::<Result<Vec<_>, _>>()?;
    Ok(overlapping_pairs(&intervals)
        .into_iter()
        .filter_map(|(i, j)| {
            let intersection = intervals[i].intersection(&intervals[j])?;
            Some(OverlapEdge { a: units[i].id().clone(), b: units[j].id().clone(), intersection })
        })
        .collect())
}

/// A candidate partner for token-level projection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partner {
    pub id: UnitId,
    pub interval: TimeInterval,
}

/// Per-token `Overlap` values for one unit, plus pairing diagnostics.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenOverlaps {
    pub features: Vec<Option<String>>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Maps the unit's overlap spans to partner units and renders `B:`/`I`.
///
/// `partners` are the overlapping speech units of other speakers, sorted by
/// begin time. With as many partners as spans, the k-th span gets the k-th
/// partner. Otherwise each span's time window is estimated by spreading
/// the unit interval linearly over its form characters, and a partner whose
/// interval alone meets that window is chosen.
pub fn project_token_overlaps(
    unit: &TranscriptionUnit,
    interval: TimeInterval,
    tokens: &[ProsodicToken],
    spans: &[OverlapSpanMark],
    partners: &[Partner],
) -> TokenOverlaps {
    let mut out = TokenOverlaps { features: alloc::vec![None; tokens.len()], diagnostics: Vec::new() };
    let unit_id = unit.header.sent_id.to_string();
    let assignment: Vec<Option<usize>> = if spans.len() == partners.len() {
        (0..spans.len()).map(Some).collect()
    } else {
        let total: usize = tokens.iter().map(ProsodicToken::form_len).sum();
        let at = |p: Position| -> Millis {
            let chars: usize = tokens[..p.token.min(tokens.len())].iter().map(|t| t.form_len()).sum::<usize>() + p.offset;
            let span = u128::from(interval.length().0);
            let frac = if total == 0 { 0 } else { span * chars as u128 / total as u128 };
            Millis(interval.begin().0 + frac as u64)
        };
        let mut used = BTreeSet::new();
        let mut result = Vec::new();
        for (k, span) in spans.iter().enumerate() {
            let (ws, we) = (at(span.start), at(span.end));
            let candidates: Vec<usize> = (0..partners.len())
                .filter(|i| !used.contains(i))
                .filter(|&i| partners[i].interval.begin() < we.max(Millis(ws.0 + 1)) && ws < partners[i].interval.end())
                .collect();
            let pick = match candidates.as_slice() {
                [only] => Some(*only),
                [first, ..] => {
                    out.diagnostics.push(
                        Diagnostic::new(
                            Rule::Ovl004,
                            alloc::format!(
                                "overlap span {} could belong to {} partners; chose {}",
                                span.span_id,
                                candidates.len(),
                                partners[*first].id
                            ),
                        )
                        .for_unit(unit_id.clone()),
                    );
                    Some(*first)
                }
                [] => (k < partners.len() && !used.contains(&k))
                    .then_some(k)
                    .or_else(|| (0..partners.len()).find(|i| !used.contains(i))),
            };
            if let Some(p) = pick {
                used.insert(p);
            } else {
                out.diagnostics.push(
                    Diagnostic::new(
                        Rule::Ovl004,
                        alloc::format!(
                            "overlap span {} has no partner unit ({} spans, {} partners)",
                            span.span_id,
                            spans.len(),
                            partners.len()
                        ),
                    )
                    .for_unit(unit_id.clone()),
                );
            }
            result.push(pick);
        }
        result
    };
    for (span, partner) in spans.iter().zip(assignment) {
        let Some(p) = partner else { continue };
        for (n, t) in span.covered_tokens(tokens).into_iter().enumerate() {
            out.features[t] = Some(if n == 0 { alloc::format!("B:{}", partners[p].id) } else { "I".to_string() });
        }
    }
    out
}

fn intervals_of(units: &[Unit], diags: &mut Vec<Diagnostic>) -> Vec<Option<TimeInterval>> {
    units
        .iter()
        .map(|u| match u.interval() {
            Ok(iv) => Some(iv),
            Err(e) => {
                diags.push(Diagnostic::new(Rule::Con007, e.to_string()).for_unit(u.id().to_string()));
                None
            }
        })
        .collect()
}

/// Neighbours of every unit in `doc`, sorted `tu` before `gu`, then by number.
/// `context` units take part as partners but get no list of their own.
fn neighbour_lists(
    doc: &CorpusDocument,
    context: &[Unit],
    diags: &mut Vec<Diagnostic>,
) -> (Vec<Vec<usize>>, Vec<Option<TimeInterval>>) {
    let all: Vec<Unit> = doc.units.iter().chain(context.iter()).cloned().collect();
    let intervals = intervals_of(&all, diags);
    let aligned: Vec<usize> = (0..all.len()).filter(|&i| intervals[i].is_some()).collect();
    let ivs: Vec<TimeInterval> = aligned.iter().filter_map(|&i| intervals[i]).collect();
    let mut lists = alloc::vec![Vec::new(); all.len()];
    for (x, y) in overlapping_pairs(&ivs) {
        let (i, j) = (aligned[x], aligned[y]);
        if all[i].id() == all[j].id() {
            continue;
        }
        lists[i].push(j);
        lists[j].push(i);
    }
    for l in &mut lists {
        l.sort_by(|&a, &b| all[a].id().cmp(all[b].id()));
        l.dedup_by(|a, b| all[*a].id() == all[*b].id());
    }
    (lists, intervals)
}

/// Rewrites every unit's `overlaps` list from the unit intervals.
pub fn annotate_overlaps(doc: &CorpusDocument) -> Result<CorpusDocument, AlignmentError> {
    annotate_overlaps_with_context(doc, &[])
}

/// Like [`annotate_overlaps`], with extra units (for instance the rest of a
/// conversation an extract was cut from) taking part as partners.
pub fn annotate_overlaps_with_context(doc: &CorpusDocument, context: &[Unit]) -> Result<CorpusDocument, AlignmentError> {
    for u in doc.units.iter().chain(context) {
        u.interval()?;
    }
    let mut diags = Vec::new();
    let (lists, _) = neighbour_lists(doc, context, &mut diags);
    let all_ids: Vec<UnitId> = doc.units.iter().chain(context).map(|u| u.id().clone()).collect();
    let mut out = doc.clone();
    for (i, unit) in out.units.iter_mut().enumerate() {
        unit.header_mut().overlaps = lists[i].iter().map(|&j| all_ids[j].clone()).collect();
    }
    Ok(out)
}

/// Regenerates both the unit `overlaps` lists and the token `Overlap`
/// features of every verbal unit that has a `text_jefferson`.
pub fn regenerate(doc: &CorpusDocument, context: &[Unit]) -> (CorpusDocument, Vec<Diagnostic>) {
    let mut diags = Vec::new();
    let (lists, intervals) = neighbour_lists(doc, context, &mut diags);
    let all: Vec<&Unit> = doc.units.iter().chain(context).collect();
    let mut out = doc.clone();
    for (i, unit) in out.units.iter_mut().enumerate() {
        unit.header_mut().overlaps = lists[i].iter().map(|&j| all[j].id().clone()).collect();
        for t in unit.tokens_mut() {
            t.misc.remove(OVERLAP);
        }
        let (Unit::Transcription(tu), Some(interval)) = (unit, intervals[i]) else { continue };
        let Some(tj) = tu.text_jefferson.as_deref() else { continue };
        let Ok(parsed) = jefferson::parse(tj) else { continue };
        if parsed.tokens.len() != tu.tokens.len() {
            continue;
        }
        let mut partners: Vec<Partner> = lists[i]
            .iter()
            .filter_map(|&j| {
                let other = all[j].as_transcription()?;
                let interval = intervals[j]?;
                (other.is_verbal() && other.header.speaker_id != tu.header.speaker_id)
                    .then(|| Partner { id: other.header.sent_id.clone(), interval })
            })
            .collect();
        partners.sort_by(|a, b| a.interval.begin().cmp(&b.interval.begin()).then(a.id.cmp(&b.id)));
        let projected = project_token_overlaps(tu, interval, &parsed.tokens, &parsed.overlaps, &partners);
        for (tok, value) in tu.tokens.iter_mut().zip(projected.features) {
            if let Some(v) = value {
                tok.misc.set(OVERLAP, v);
            }
        }
        let line = doc.unit_line(i);
        diags.extend(projected.diagnostics.into_iter().map(|d| d.at_line(line)));
    }
    if let Some(src) = &doc.source {
        diags = diags.into_iter().map(|d| d.in_file(src.clone())).collect();
    }
    (out, diags)
}

/// Consistency of the `overlaps` lists and token `Overlap` features.
///
/// In partial mode (an extract of a longer conversation), ids that do not
/// resolve inside the document are accepted silently; otherwise each one is
/// a `CON004` warning.
pub fn check_overlaps(doc: &CorpusDocument, partial: bool) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let index: BTreeMap<&UnitId, usize> = doc.units.iter().enumerate().map(|(i, u)| (u.id(), i)).collect();
    let mut scratch = Vec::new();
    let intervals = intervals_of(&doc.units, &mut scratch);
    let at = |i: usize, rule: Rule, msg: String| {
        Diagnostic::new(rule, msg).for_unit(doc.units[i].id().to_string()).on_field("overlaps").at_line(doc.unit_line(i))
    };

    for (i, unit) in doc.units.iter().enumerate() {
        let listed = &unit.header().overlaps;
        for other in listed {
            let Some(&j) = index.get(other) else {
                if !partial {
                    diags.push(at(i, Rule::Con004, alloc::format!("{other} is not in this document")));
                }
                continue;
            };
            if !doc.units[j].header().overlaps.contains(unit.id()) {
                diags.push(at(i, Rule::Ovl001, alloc::format!("{} lists {other} but {other} does not list {}", unit.id(), unit.id())));
            }
            if let (Some(a), Some(b)) = (intervals[i], intervals[j]) {
                if a.intersection(&b).is_none() {
                    diags.push(at(i, Rule::Ovl002, alloc::format!("{} {a} and {other} {b} do not overlap", unit.id())));
                }
            }
        }
    }

    let aligned: Vec<usize> = (0..doc.units.len()).filter(|&i| intervals[i].is_some()).collect();
    let ivs: Vec<TimeInterval> = aligned.iter().filter_map(|&i| intervals[i]).collect();
    for (x, y) in overlapping_pairs(&ivs) {
        let (i, j) = (aligned[x], aligned[y]);
        let (a, b) = (&doc.units[i], &doc.units[j]);
        if a.id() == b.id() {
            continue;
        }
        for (u, v, k) in [(a, b, i), (b, a, j)] {
            if !u.header().overlaps.contains(v.id()) {
                diags.push(at(k, Rule::Ovl003, alloc::format!("{} overlaps {} in time but does not list it", u.id(), v.id())));
            }
        }
    }

    for (i, unit) in doc.units.iter().enumerate() {
        let mut previous = false;
        for (n, tok) in unit.tokens().iter().enumerate() {
            let line = doc.token_line(i, n);
            let bad = |msg: String| {
                Diagnostic::new(Rule::Ovl005, msg).for_unit(unit.id().to_string()).on_field(OVERLAP).at_line(line)
            };
            let Some(value) = tok.misc.get(OVERLAP) else {
                previous = false;
                continue;
            };
            if matches!(unit, Unit::Gestural(_)) {
                diags.push(bad("gestural units carry no token Overlap feature".to_string()));
            } else if value == "I" {
                if !previous {
                    diags.push(bad(alloc::format!("token {} continues an overlap that never began", tok.id)));
                }
            } else if let Some(id) = value.strip_prefix("B:") {
                match id.parse::<UnitId>() {
                    Ok(id) if unit.header().overlaps.contains(&id) => {}
                    Ok(id) => diags.push(bad(alloc::format!("token {} names {id}, which is not in overlaps", tok.id))),
                    Err(e) => diags.push(bad(e.to_string())),
                }
            } else {
                diags.push(bad(alloc::format!("token {}: Overlap={value} is neither B:<id> nor I", tok.id)));
            }
            previous = true;
        }
    }
    diags
}
