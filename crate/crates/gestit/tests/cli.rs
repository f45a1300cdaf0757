mod common;

use std::fs;

use common::{edit, fixtures, gestit, scratch_repo, CONVERSATION};
use gestit::eaf_xml::{read_eaf, EafError};
use gestit_core::eaf::{classify, convert, ConversionContext, TierClass, TierError};
use gestit_core::model::Articulator;
use gestit_core::{Millis, Unit};
use tempfile::TempDir;

fn fixture_eaf() -> String {
    fixtures().join("eaf/DUC22051430.eaf").display().to_string()
}

fn golden() -> String {
    fs::read_to_string(fixtures().join("DUC22051430.golden.conll")).unwrap()
}

#[test]
fn convert_matches_golden() {
    let repo = fixtures().join("repo").display().to_string();
    let o = gestit(&["convert", "--from", "eaf", "--to", "conll", &fixture_eaf(), "-o", "-", "--conversation", CONVERSATION, "--root", &repo]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert_eq!(o.stdout, golden());

    // the participant list can also come from the command line
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out.conll").display().to_string();
    let o = gestit(&[
        "convert", "--from", "eaf", "--to", "conll", &fixture_eaf(), "-o", &out, "--conversation", CONVERSATION,
        "--participants", "S001,B001", "--root", "/nonexistent",
    ]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert_eq!(fs::read_to_string(&out).unwrap(), golden());
}

#[test]
fn convert_reports_unknown_tier() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("x.eaf");
    fs::copy(fixture_eaf(), &input).unwrap();
    edit(&input, "TIER_ID=\"B001\"", "TIER_ID=\"X999\"");
    let o = gestit(&[
        "convert", "--from", "eaf", "--to", "conll", input.to_str().unwrap(), "-o", "-", "--conversation", CONVERSATION,
        "--participants", "S001,B001",
    ]);
    assert_eq!(o.code, 1);
    assert!(o.stderr.contains("REP003"), "{}", o.stderr);
}

#[test]
fn convert_fatal_errors() {
    let o = gestit(&["convert", "--from", "eaf", "--to", "conll", &fixture_eaf(), "-o", "-"]);
    assert_eq!(o.code, 2, "missing --conversation is a usage error");

    let dir = TempDir::new().unwrap();
    let input = dir.path().join("bad.eaf");
    fs::copy(fixture_eaf(), &input).unwrap();
    edit(&input, "TIME_SLOT_REF2=\"ts5\"", "TIME_SLOT_REF2=\"ts99\"");
    let o = gestit(&["convert", "--from", "eaf", "--to", "conll", input.to_str().unwrap(), "-o", "-", "--conversation", CONVERSATION]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("ts99"), "{}", o.stderr);
    assert!(o.stdout.is_empty());

    let o = gestit(&["convert", "--from", "eaf", "--to", "conll", "/nonexistent.eaf", "-o", "-", "--conversation", CONVERSATION]);
    assert_eq!(o.code, 2);
}

#[test]
fn strip_lines() {
    let o = gestit(&["strip", "--text", "e[h: la sera]"]);
    assert_eq!((o.code, o.stdout.as_str()), (0, "eh la sera\n"));
    let o = gestit(&["strip", "--text", "[siviglia meravigliosa]"]);
    assert_eq!(o.stdout, "siviglia meravigliosa\n");

    let dir = TempDir::new().unwrap();
    let file = dir.path().join("lines.txt");
    fs::write(&file, "p[er natale]\n°x\n").unwrap();
    let o = gestit(&["strip", file.to_str().unwrap()]);
    assert_eq!(o.code, 1);
    assert_eq!(o.stdout.lines().next(), Some("per natale"));
    assert!(o.stderr.starts_with("line 2: error JEF001"), "{}", o.stderr);
}

#[test]
fn validate_exit_codes() {
    let repo = scratch_repo();
    let root = repo.path().to_str().unwrap();
    let o = gestit(&["validate", "--root", root]);
    assert_eq!((o.code, o.stdout.as_str()), (0, ""));
    assert!(o.stderr.contains("0 error(s)"));

    let o = gestit(&["validate", "--root", "/nonexistent/corpus"]);
    assert_eq!(o.code, 2);
    let o = gestit(&["validate", "--root", root, "--format", "yaml"]);
    assert_eq!(o.code, 2);
}

#[test]
fn json_round_trips_and_is_deterministic() {
    let repo = scratch_repo();
    edit(&repo.path().join("data/conll/DUC22051430.conll"), "# duration = 1.088", "# duration = 1.200");
    edit(&repo.path().join("data/participants/S001.yaml"), "Gender: F", "Gender: X");
    let root = repo.path().to_str().unwrap();
    let first = gestit(&["validate", "--root", root, "--format", "json"]);
    assert_eq!(first.code, 1);
    let value: serde_json::Value = serde_json::from_str(&first.stdout).unwrap();
    assert_eq!(value.as_array().unwrap().len(), 2);
    let again: serde_json::Value = serde_json::from_str(&serde_json::to_string(&value).unwrap()).unwrap();
    assert_eq!(again, value);
    for _ in 0..3 {
        assert_eq!(gestit(&["validate", "--root", root, "--format", "json"]).stdout, first.stdout);
    }
    let text = gestit(&["validate", "--root", root]);
    assert!(text.stdout.contains("data/conll/DUC22051430.conll:1: error DUR001 [tu0001] (duration)"), "{}", text.stdout);
}

#[test]
fn stats_tables() {
    let repo = fixtures().join("repo").display().to_string();
    let o = gestit(&["stats", "--table", "status", "--root", &repo]);
    assert_eq!(o.code, 0);
    assert_eq!(o.stdout.lines().filter(|l| l.starts_with("| DUC")).count(), 1);

    let o = gestit(&["stats", "--table", "status", "--root", &repo, "--format", "json"]);
    let rows: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 1);

    let empty = TempDir::new().unwrap();
    let o = gestit(&["stats", "--table", "tokens", "--root", empty.path().to_str().unwrap()]);
    assert_eq!(o.code, 0);
    assert_eq!(o.stdout.lines().count(), 2, "header only: {}", o.stdout);
    let o = gestit(&["stats", "--table", "tokens", "--root", empty.path().to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.stdout.trim(), "[]");

    let o = gestit(&["stats", "--table", "tokens", "--root", &repo]);
    assert!(o.stdout.contains("| DUC22051430 | S001 | 3 | 8 |"), "{}", o.stdout);
    assert!(!o.stdout.contains("metalanguage"));

    assert_eq!(gestit(&["stats", "--table", "conditions", "--root", "/nonexistent"]).code, 2);
}

#[test]
fn eaf_tiers_and_units() {
    let xml = fs::read_to_string(fixture_eaf()).unwrap();
    let (tiers, diags) = read_eaf(&xml, None).unwrap();
    assert!(diags.is_empty(), "{diags:?}");
    let ids: Vec<&str> = tiers.iter().map(|t| t.tier_id.as_str()).collect();
    assert_eq!(ids, ["S001", "B001", "experimenter", "metalanguage", "F:LH", "F:RH"]);

    let ctx = ConversionContext::new(CONVERSATION).with_participants(vec!["S001".into(), "B001".into()]);
    assert_eq!(classify(&tiers[4], &ctx), Ok(TierClass::Articulator { speaker: "S001".into(), articulator: Articulator::FingerLeft }));
    let mut unknown = tiers[0].clone();
    unknown.tier_id = "X999".into();
    assert_eq!(classify(&unknown, &ctx), Err(TierError::UnknownTier("X999".into())));

    let (doc, diags) = convert(&tiers, &ctx);
    assert!(diags.is_empty());
    let annotations: usize = tiers.iter().map(|t| t.annotations.len()).sum();
    assert_eq!(doc.units.len(), annotations);
    let first = doc.units.iter().find(|u| u.tokens()[0].form == "entrambe").unwrap();
    assert_eq!(first.header().duration, Millis(1088));
    let Unit::Gestural(g) = doc.units.iter().find(|u| matches!(u, Unit::Gestural(_))).unwrap() else { unreachable!() };
    assert_eq!((g.unit_type.as_str(), g.header.speaker_id.as_str()), ("F:LH", "S001"));
    assert_eq!(g.header.duration, Millis(330));
}

#[test]
fn eaf_malformed_and_unordered() {
    let xml = fs::read_to_string(fixture_eaf()).unwrap();
    let bad = xml.replacen("TIME_SLOT_REF1=\"ts2\"", "TIME_SLOT_REF1=\"nope\"", 1);
    assert!(matches!(read_eaf(&bad, None), Err(EafError::Malformed { line: 24, .. })));

    let swapped = xml
        .replacen("\"a1\" TIME_SLOT_REF1=\"ts2\" TIME_SLOT_REF2=\"ts5\"", "\"a1\" TIME_SLOT_REF1=\"ts10\" TIME_SLOT_REF2=\"ts12\"", 1)
        .replacen("\"a3\" TIME_SLOT_REF1=\"ts10\" TIME_SLOT_REF2=\"ts12\"", "\"a3\" TIME_SLOT_REF1=\"ts2\" TIME_SLOT_REF2=\"ts5\"", 1);
    let (tiers, diags) = read_eaf(&swapped, None).unwrap();
    assert_eq!(diags.len(), 1);
    assert_eq!(diags[0].rule.code(), "EAF001");
    let begins: Vec<u64> = tiers[0].annotations.iter().map(|a| a.interval.begin().0).collect();
    let mut sorted = begins.clone();
    sorted.sort_unstable();
    assert_eq!(begins, sorted);
    assert_eq!(begins, [11704, 13047, 14400]);
}
