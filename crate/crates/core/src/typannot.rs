//! Structural checks for Typannot gesture codes.
//!
//! Glyphs are opaque Private Use Area code points. A code is a sequence of
//! glyph runs, `-` separators and `[ ]` / `( )` groups:
//!
//! ```text
//! '<prefix glyphs> [ <glyphs> <glyphs> - <glyphs> ] [ <glyphs> ( <glyphs> ) ]'
//! ```
//!
//! `\uXXXX` escapes are decoded as the glyph they name, so codes copied from
//! printed material validate the same as the real characters.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::diagnostic::{Diagnostic, Rule};
use crate::model::Articulator;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupKind {
    Bracket,
    Paren,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Item {
    Glyphs(String),
    Separator,
    Group(Group),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Group {
    pub kind: GroupKind,
    pub items: Vec<Item>,
}

impl Group {
    pub fn subgroups(&self) -> impl Iterator<Item = &Group> {
        self.items.iter().filter_map(|i| match i {
            Item::Group(g) => Some(g),
            _ => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GestureCode {
    raw: String,
    items: Vec<Item>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GestureError {
    #[error("unbalanced '{delimiter}' at offset {offset}")]
    UnbalancedGroup { offset: usize, delimiter: char },
    #[error("empty group at offset {offset}")]
    EmptyGroup { offset: usize },
    #[error("U+{:04X} at offset {offset} is not a Private Use Area glyph", *.glyph as u32)]
    NonPuaGlyph { offset: usize, glyph: char },
}

impl GestureError {
    pub fn rule(&self) -> Rule {
        match self {
            GestureError::UnbalancedGroup { .. } => Rule::Typ001,
            GestureError::EmptyGroup { .. } => Rule::Typ002,
            GestureError::NonPuaGlyph { .. } => Rule::Typ003,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0:?} is not an articulator (F:LH, F:RH, UL, UB)")]
pub struct UnknownArticulator(pub String);

pub fn is_pua(c: char) -> bool {
    matches!(c as u32, 0xE000..=0xF8FF | 0xF0000..=0xFFFFD | 0x100000..=0x10FFFD)
}

/// Decodes the value into (char offset, glyph) pairs, resolving `\uXXXX`.
fn decode(raw: &str) -> Vec<(usize, char)> {
    let chars: Vec<char> = raw.chars().collect();
    let mut out = Vec::with_capacity(chars.len());
    let mut i = 0;
    while i < chars.len() {
        if chars[i] == '\\' && chars.get(i + 1) == Some(&'u') && i + 6 <= chars.len() {
            let hex: String = chars[i + 2..i + 6].iter().collect();
            if let Some(c) = u32::from_str_radix(&hex, 16).ok().and_then(char::from_u32) {
                out.push((i, c));
                i += 6;
                continue;
            }
        }
        out.push((i, chars[i]));
        i += 1;
    }
    out
}

pub fn parse_gesture(raw: &str) -> Result<GestureCode, GestureError> {
    let inner = raw
        .strip_prefix('\'')
        .and_then(|s| s.strip_suffix('\''))
        .filter(|_| raw.len() >= 2)
        .unwrap_or(raw);
    let quote = usize::from(inner.len() != raw.len());
    let glyphs = decode(inner);

    // stack of (kind, open offset, items)
    let mut stack: Vec<(GroupKind, usize, Vec<Item>)> = Vec::new();
    let mut top: Vec<Item> = Vec::new();
    let mut run = String::new();

    fn flush(run: &mut String, items: &mut Vec<Item>) {
        if !run.is_empty() {
            items.push(Item::Glyphs(core::mem::take(run)));
        }
    }

    for &(offset, c) in &glyphs {
        let offset = offset + quote;
        let items = stack.last_mut().map_or(&mut top, |s| &mut s.2);
        match c {
            '[' | '(' => {
                flush(&mut run, items);
                let kind = if c == '[' { GroupKind::Bracket } else { GroupKind::Paren };
                stack.push((kind, offset, Vec::new()));
            }
            ']' | ')' => {
                flush(&mut run, items);
                let want = if c == ']' { GroupKind::Bracket } else { GroupKind::Paren };
                match stack.pop() {
                    Some((kind, open, group_items)) if kind == want => {
                        let has_glyphs = group_items.iter().any(|i| !matches!(i, Item::Separator));
                        if !has_glyphs {
                            return Err(GestureError::EmptyGroup { offset: open });
                        }
                        let parent = stack.last_mut().map_or(&mut top, |s| &mut s.2);
                        parent.push(Item::Group(Group { kind, items: group_items }));
                    }
                    _ => return Err(GestureError::UnbalancedGroup { offset, delimiter: c }),
                }
            }
            '-' => {
                flush(&mut run, items);
                items.push(Item::Separator);
            }
            c if c.is_whitespace() => flush(&mut run, items),
            c if is_pua(c) => run.push(c),
            glyph => return Err(GestureError::NonPuaGlyph { offset, glyph }),
        }
    }
    if let Some((kind, open, _)) = stack.pop() {
        let delimiter = if kind == GroupKind::Bracket { '[' } else { '(' };
        return Err(GestureError::UnbalancedGroup { offset: open, delimiter });
    }
    flush(&mut run, &mut top);
    Ok(GestureCode { raw: String::from(raw), items: top })
}

impl GestureCode {
    /// The value exactly as it was given.
    pub fn raw(&self) -> &str {
        &self.raw
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    /// Glyphs before the first group.
    pub fn prefix(&self) -> String {
        let mut out = String::new();
        for item in &self.items {
            match item {
                Item::Glyphs(g) => out.push_str(g),
                Item::Group(_) => break,
                Item::Separator => {}
            }
        }
        out
    }

    pub fn groups(&self) -> impl Iterator<Item = &Group> {
        self.items.iter().filter_map(|i| match i {
            Item::Group(g) => Some(g),
            _ => None,
        })
    }

    /// Canonical rendering: single spaces between items, quotes kept if the
    /// raw value had them.
    pub fn render(&self) -> String {
        fn items(out: &mut String, list: &[Item]) {
            for (n, item) in list.iter().enumerate() {
                if n > 0 {
                    out.push(' ');
                }
                match item {
                    Item::Glyphs(g) => out.push_str(g),
                    Item::Separator => out.push('-'),
                    Item::Group(g) => {
                        let (o, c) = match g.kind {
                            GroupKind::Bracket => ('[', ']'),
                            GroupKind::Paren => ('(', ')'),
                        };
                        out.push(o);
                        out.push(' ');
                        items(out, &g.items);
                        out.push(' ');
                        out.push(c);
                    }
                }
            }
        }
        let mut out = String::new();
        items(&mut out, &self.items);
        if self.raw.starts_with('\'') && self.raw.ends_with('\'') && self.raw.len() >= 2 {
            alloc::format!("'{out}'")
        } else {
            out
        }
    }
}

impl fmt::Display for GestureCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.raw)
    }
}

/// Maps a unit `type` value to its articulator.
pub fn articulator_of(unit_type: &str) -> Result<Articulator, UnknownArticulator> {
    Articulator::from_code(unit_type).ok_or_else(|| UnknownArticulator(String::from(unit_type)))
}

/// Glyph that marks a hand in gesture prefixes, used by the strict check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixMap(pub Vec<(char, Articulator)>);

impl Default for PrefixMap {
    fn default() -> Self {
        PrefixMap(alloc::vec![('\u{e002}', Articulator::FingerLeft), ('\u{e003}', Articulator::FingerRight)])
    }
}

/// Strict-mode `TYP004`: a prefix glyph mapped to a different articulator.
pub fn check_prefix(code: &GestureCode, articulator: Articulator, map: &PrefixMap) -> Option<Diagnostic> {
    let prefix = code.prefix();
    let (glyph, other) = map
        .0
        .iter()
        .find(|(g, a)| prefix.contains(*g) && *a != articulator)
        .copied()?;
    let hinted_here = map.0.iter().any(|(g, a)| *a == articulator && prefix.contains(*g));
    (!hinted_here).then(|| {
        Diagnostic::new(
            Rule::Typ004,
            alloc::format!("prefix glyph U+{:04X} suggests {other}, unit type is {articulator}", glyph as u32),
        )
    })
}
