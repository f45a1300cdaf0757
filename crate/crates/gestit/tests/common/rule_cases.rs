//! One repository mutation per catalog rule, each producing that rule.

use std::fs;
use std::path::Path;

use super::{edit, CONVERSATION};

const CONLL: &str = "data/conll/DUC22051430.conll";
const EAF: &str = "data/eaf/DUC22051430.eaf";
const CONV: &str = "data/conversations/DUC22051430.yaml";
const S001: &str = "data/participants/S001.yaml";

pub struct Case {
    pub rule: &'static str,
    pub strict: bool,
    pub mutate: fn(&Path),
}

pub fn conll(r: &Path, from: &str, to: &str) {
    edit(&r.join(CONLL), from, to)
}

fn eaf(r: &Path, from: &str, to: &str) {
    edit(&r.join(EAF), from, to)
}

pub fn conv(r: &Path, from: &str, to: &str) {
    edit(&r.join(CONV), from, to)
}

fn s001(r: &Path, from: &str, to: &str) {
    edit(&r.join(S001), from, to)
}

fn case(rule: &'static str, mutate: fn(&Path)) -> Case {
    Case { rule, strict: false, mutate }
}

pub fn cases() -> Vec<Case> {
    vec![
        case("DUR001", |r| conll(r, "# duration = 1.088", "# duration = 1.200")),
        case("JEF001", |r| conll(r, "text_jefferson = e[h: la sera]", "text_jefferson = e[h: la sera")),
        case("JEF002", |r| conll(r, "text_jefferson = entrambe da sole", "text_jefferson = entrambe da sole]")),
        case("JEF003", |r| conll(r, "text_jefferson = [bellissima] poi", "text_jefferson = [bellissima] poi ><")),
        case("JEF004", |r| conll(r, "text_jefferson = [e parlare di", "text_jefferson = [e parlare [di]")),
        case("JEF005", |r| conll(r, "text_jefferson = entrambe da sole", "text_jefferson = °>entrambe° da< sole")),
        case("JEF006", |r| conll(r, "text_jefferson = entrambe da sole", "text_jefferson = : entrambe da sole")),
        case("CON001", |r| conll(r, "2\tda\t", "5\tda\t")),
        case("CON002", |r| conll(r, "text_jefferson = entrambe da sole", "text_jefferson = entrambe da soli")),
        case("CON003", |r| conll(r, "# text = entrambe da sole", "# text = entrambe da soli")),
        case("CON004", |r| conll(r, "# sent_id = tu0004\n# overlaps = tu0003", "# sent_id = tu0004\n# overlaps = tu0003 tu0099")),
        case("CON005", |r| conll(r, "# sent_id = tu0005", "# sent_id = tu0001")),
        case("CON006", |r| conll(r, "# speaker_id = B001\n", "")),
        case("CON007", |r| conll(r, "\tAlignEnd=12.792", "\t_")),
        case("CON008", |r| conll(r, "# type = F:RH", "# type = F:XX")),
        case("OVL001", |r| conll(r, "# sent_id = tu0002\n# overlaps = tu0003\n", "# sent_id = tu0002\n")),
        case("OVL002", |r| {
            conll(r, "# sent_id = tu0004\n# overlaps = tu0003", "# sent_id = tu0004\n# overlaps = tu0003 gu0004");
            conll(r, "# sent_id = gu0004\n# overlaps = tu0001", "# sent_id = gu0004\n# overlaps = tu0001 tu0004");
        }),
        case("OVL003", |r| {
            conll(r, "# sent_id = tu0002\n# overlaps = tu0003\n", "# sent_id = tu0002\n");
            conll(r, "# overlaps = tu0002 tu0004", "# overlaps = tu0004");
        }),
        case("OVL004", |r| conll(r, "text_jefferson = entrambe da sole", "text_jefferson = [entrambe] da sole")),
        case("OVL005", |r| conll(r, "Overlap=B:tu0004", "Overlap=B:tu0001")),
        case("OVL006", |r| conll(r, "2\tparlare\t_\t_\t_\t_\t_\t_\t_\tOverlap=I", "2\tparlare\t_\t_\t_\t_\t_\t_\t_\t_")),
        case("TYP001", |r| conll(r, "]'", "'")),
        case("TYP002", |r| conll(r, "[ \u{f198}\u{e001} ]", "[ ]")),
        case("TYP003", |r| conll(r, "gesture='\u{e5de}", "gesture='a\u{e5de}")),
        Case { rule: "TYP004", strict: true, mutate: |r| conll(r, "# type = F:RH", "# type = F:LH") },
        case("MET001", |r| s001(r, "Code: S001", "Code: X001")),
        case("MET002", |r| s001(r, "Gender: F", "Gender: X")),
        case("MET003", |r| s001(r, "First language: ITA", "First language: ita")),
        case("MET004", |r| s001(r, "Age: 21-25", "Age: 22")),
        case("MET005", |r| s001(r, "Region: Emilia-Romagna", "Region: Atlantide")),
        case("MET006", |r| s001(r, "Education level: Laurea", "Education level: Dottorato")),
        Case { rule: "MET007", strict: true, mutate: |r| s001(r, "Profession: Studente", "Profession: Astronauta") },
        case("MET008", |r| s001(r, "Gender: F\n", "")),
        case("MET009", |r| conv(r, "  - B001\n", "  - S001\n")),
        case("MET010", |r| conv(r, "  - B001\n", "  - S002\n")),
        case("MET011", |r| conv(r, "Facing: U", "Facing: M")),
        case("MET012", |r| conv(r, "Code: DUC22051430", "Code: DUC22053430")),
        case("MET013", |r| conv(r, "Code: DUC22051430", "Code: DUQ22051430")),
        case("MET014", |r| conv(r, "  - B001\n", "  - B009\n")),
        case("MET015", |r| conv(r, "Facing: U", "Facing: Z")),
        Case {
            rule: "MET016",
            strict: true,
            mutate: |r| {
                let b001 = fs::read_to_string(r.join("data/participants/B001.yaml")).unwrap();
                fs::write(r.join("data/participants/B002.yaml"), b001.replace("B001", "B002")).unwrap();
                let conv = fs::read_to_string(r.join(CONV)).unwrap();
                let masked = conv.replace("DUC", "SMC").replace("S001", "B002").replace("Facing: U", "Facing: M");
                fs::write(r.join("data/conversations/SMC22051430.yaml"), masked).unwrap();
            },
        },
        Case { rule: "MET017", strict: true, mutate: |r| conv(r, "    - Gestual: data/conll/DUC22051430.conll\n", "") },
        Case { rule: "MET017", strict: true, mutate: |r| conv(r, "data/automatic/", "data/missing/") },
        case("REP001", |r| {
            let path = r.join(CONLL);
            let text = fs::read_to_string(&path).unwrap();
            fs::write(path, text.replace(CONVERSATION, "DUC22051431")).unwrap();
        }),
        case("REP002", |r| conll(r, "# speaker_id = B001", "# speaker_id = B002")),
        case("REP003", |r| eaf(r, "TIER_ID=\"F:RH\"", "TIER_ID=\"F:XX\"")),
        case("REP004", |r| fs::write(r.join("data/participants/B001.yaml"), "Code: [B001\n").unwrap()),
        Case {
            rule: "EAF001",
            strict: true,
            mutate: |r| {
                eaf(r, "\"a1\" TIME_SLOT_REF1=\"ts2\" TIME_SLOT_REF2=\"ts5\"", "\"a1\" TIME_SLOT_REF1=\"ts10\" TIME_SLOT_REF2=\"ts12\"");
                eaf(r, "\"a3\" TIME_SLOT_REF1=\"ts10\" TIME_SLOT_REF2=\"ts12\"", "\"a3\" TIME_SLOT_REF1=\"ts2\" TIME_SLOT_REF2=\"ts5\"");
            },
        },
        Case {
            rule: "EAF002",
            strict: true,
            mutate: |r| eaf(r, "</ANNOTATION_DOCUMENT>", "<CONTROLLED_VOCABULARY CV_ID=\"moves\"/>\n</ANNOTATION_DOCUMENT>"),
        },
        Case {
            rule: "EAF003",
            strict: true,
            mutate: |r| {
                eaf(
                    r,
                    "TIER_ID=\"experimenter\"/>",
                    "TIER_ID=\"experimenter\"><ANNOTATION><ALIGNABLE_ANNOTATION ANNOTATION_ID=\"x1\" TIME_SLOT_REF1=\"ts13\" TIME_SLOT_REF2=\"ts14\"><ANNOTATION_VALUE>ok</ANNOTATION_VALUE></ALIGNABLE_ANNOTATION></ANNOTATION></TIER>",
                )
            },
        },
        Case { rule: "EAF004", strict: true, mutate: |r| eaf(r, "\"a5\" TIME_SLOT_REF1=\"ts13\"", "\"a5\" TIME_SLOT_REF1=\"ts14\"") },
        Case { rule: "EAF005", strict: true, mutate: |r| eaf(r, "\"a7\" TIME_SLOT_REF1=\"ts3\"", "\"a7\" TIME_SLOT_REF1=\"ts2\"") },
    ]
}
