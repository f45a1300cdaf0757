//! Reading the ELAN subset we use: time slots, tiers and alignable
//! annotations.

use std::collections::{BTreeMap, BTreeSet};

use gestit_core::eaf::{normalize_tier, EafAnnotation, EafTier};
use gestit_core::{Diagnostic, Millis, Rule, TimeInterval};
use roxmltree::{Document, Node};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EafError {
    #[error("not well-formed XML: {0}")]
    Xml(#[from] roxmltree::Error),
    #[error("malformed EAF (line {line}): {message}")]
    Malformed { line: usize, message: String },
}

/// Elements that every ELAN file carries and that say nothing about the
/// annotations themselves.
const SCAFFOLDING: [&str; 5] = ["HEADER", "LINGUISTIC_TYPE", "LOCALE", "LANGUAGE", "CONSTRAINT"];

fn line_of(doc: &Document, node: Node) -> usize {
    doc.text_pos_at(node.range().start).row as usize
}

fn malformed(doc: &Document, node: Node, message: String) -> EafError {
    EafError::Malformed { line: line_of(doc, node), message }
}

/// Parses an EAF document. Unsupported constructs become `EAF002` notes,
/// tier ordering fixes `EAF001`, zero-length annotations `EAF004`.
pub fn read_eaf(xml: &str, source: Option<&str>) -> Result<(Vec<EafTier>, Vec<Diagnostic>), EafError> {
    let doc = Document::parse(xml)?;
    let root = doc.root_element();
    if root.tag_name().name() != "ANNOTATION_DOCUMENT" {
        return Err(malformed(&doc, root, format!("root element is <{}>", root.tag_name().name())));
    }
    let mut diags = Vec::new();
    let mut slots: BTreeMap<&str, Option<u64>> = BTreeMap::new();
    let mut tiers = Vec::new();
    let mut ignored = BTreeSet::new();

    for el in root.children().filter(Node::is_element) {
        match el.tag_name().name() {
            "TIME_ORDER" => {
                for slot in el.children().filter(|n| n.has_tag_name("TIME_SLOT")) {
                    let id = slot
                        .attribute("TIME_SLOT_ID")
                        .ok_or_else(|| malformed(&doc, slot, "TIME_SLOT without TIME_SLOT_ID".into()))?;
                    let value = match slot.attribute("TIME_VALUE") {
                        None => None,
                        Some(v) => Some(v.trim().parse::<u64>().map_err(|_| {
                            malformed(&doc, slot, format!("time slot {id} has value {v:?}, expected milliseconds"))
                        })?),
                    };
                    slots.insert(id, value);
                }
            }
            "TIER" => tiers.push(el),
            name if SCAFFOLDING.contains(&name) => {}
            name => {
                ignored.insert((name.to_string(), line_of(&doc, el)));
            }
        }
    }

    let mut out = Vec::new();
    for el in tiers {
        let tier_id = el
            .attribute("TIER_ID")
            .ok_or_else(|| malformed(&doc, el, "TIER without TIER_ID".into()))?
            .to_string();
        let participant = el.attribute("PARTICIPANT").map(str::trim).filter(|p| !p.is_empty()).map(String::from);
        let attributes = el.attributes().map(|a| (a.name().to_string(), a.value().to_string())).collect();
        let mut annotations = Vec::new();
        for ann in el.children().filter(|n| n.has_tag_name("ANNOTATION")) {
            for inner in ann.children().filter(Node::is_element) {
                if !inner.has_tag_name("ALIGNABLE_ANNOTATION") {
                    ignored.insert((inner.tag_name().name().to_string(), line_of(&doc, inner)));
                    continue;
                }
                let id = inner.attribute("ANNOTATION_ID").unwrap_or("").to_string();
                let slot = |attr: &str| -> Result<Millis, EafError> {
                    let name = inner
                        .attribute(attr)
                        .ok_or_else(|| malformed(&doc, inner, format!("annotation {id} has no {attr}")))?;
                    match slots.get(name) {
                        None => Err(malformed(&doc, inner, format!("annotation {id} refers to undefined time slot {name}"))),
                        Some(None) => Err(malformed(&doc, inner, format!("time slot {name} of annotation {id} has no time value"))),
                        Some(Some(ms)) => Ok(Millis(*ms)),
                    }
                };
                let (begin, end) = (slot("TIME_SLOT_REF1")?, slot("TIME_SLOT_REF2")?);
                let value: String = inner
                    .children()
                    .filter(|n| n.has_tag_name("ANNOTATION_VALUE"))
                    .flat_map(|v| v.descendants().filter(Node::is_text).filter_map(|t| t.text()))
                    .collect();
                let line = Some(line_of(&doc, inner));
                match TimeInterval::new(begin, end) {
                    Ok(interval) => annotations.push(EafAnnotation { id, interval, value, line }),
                    Err(_) => diags.push(
                        Diagnostic::new(Rule::Eaf004, format!("{id} spans {begin} to {end} and is skipped"))
                            .on_field(tier_id.clone())
                            .at_line(line),
                    ),
                }
            }
        }
        let mut tier = EafTier { tier_id, participant, annotations, attributes };
        diags.extend(normalize_tier(&mut tier));
        out.push(tier);
    }

    for (name, line) in ignored {
        diags.push(Diagnostic::new(Rule::Eaf002, format!("<{name}> is not supported and was ignored")).at_line(Some(line)));
    }
    if let Some(src) = source {
        diags = diags.into_iter().map(|d| d.in_file(src)).collect();
    }
    Ok((out, diags))
}
