//! The built-in program corpus: victim components, attacker contexts, a
//! whole-program smoke test, golden traces, and the expected verdict table.
//!
//! Every file is embedded at compile time so the binary is self-contained;
//! the on-disk copies under `corpus/` are the build-time source of truth.
//! A corpus that fails to parse is a build defect, so the accessors panic
//! rather than propagate errors.

use lang_core::{parse_attacker, parse_component, parse_program, Attacker, Component, Program, WholeProgram};
use serde::{Deserialize, Serialize};

/// Embedded corpus files, keyed by their path relative to `corpus/`.
static FILES: &[(&str, &str)] = &[
    ("listing1.prog", include_str!("../corpus/listing1.prog")),
    ("listing2.prog", include_str!("../corpus/listing2.prog")),
    ("listing3.prog", include_str!("../corpus/listing3.prog")),
    ("listing4.prog", include_str!("../corpus/listing4.prog")),
    ("listing5.prog", include_str!("../corpus/listing5.prog")),
    ("listing6.prog", include_str!("../corpus/listing6.prog")),
    ("listing1-msvc.prog", include_str!("../corpus/listing1-msvc.prog")),
    ("listing3-msvc.prog", include_str!("../corpus/listing3-msvc.prog")),
    ("a0.prog", include_str!("../corpus/a0.prog")),
    ("a8.prog", include_str!("../corpus/a8.prog")),
    ("a42.prog", include_str!("../corpus/a42.prog")),
    ("trivial.prog", include_str!("../corpus/trivial.prog")),
    (
        "goldens/listing1-a0-nonspec.trace",
        include_str!("../corpus/goldens/listing1-a0-nonspec.trace"),
    ),
    (
        "goldens/listing1-a0-spec.trace",
        include_str!("../corpus/goldens/listing1-a0-spec.trace"),
    ),
    (
        "goldens/listing1-a8-nonspec.trace",
        include_str!("../corpus/goldens/listing1-a8-nonspec.trace"),
    ),
    (
        "goldens/listing1-a8-spec.trace",
        include_str!("../corpus/goldens/listing1-a8-spec.trace"),
    ),
];

const CORPUS_JSON: &str = include_str!("../corpus/corpus.json");

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct AddressConstants {
    pub a_base: u64,
    pub b_base: u64,
    pub size_location: u64,
    pub note: String,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct ComponentEntry {
    pub id: String,
    pub file: String,
    /// Whether the verdict table quantifies over this component.
    pub table_source: bool,
    pub note: String,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct AttackerEntry {
    pub id: String,
    pub file: String,
    pub note: String,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct WholeEntry {
    pub id: String,
    pub file: String,
    pub note: String,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct GoldenEntry {
    pub component: String,
    pub attacker: String,
    /// `nonspec` or `spec`.
    pub sem: String,
    /// `strong` or `weak`.
    pub mode: String,
    #[serde(default)]
    pub omega: Option<u64>,
    pub file: String,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct ExpectedRow {
    /// CLI name of the hardening pass.
    pub pass: String,
    /// Expected status of the strong-mode robustness cell.
    pub strong: String,
    /// Expected status of the weak-mode robustness cell.
    pub weak: String,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct TableExpectation {
    pub dom_values: Vec<u64>,
    pub omega: u64,
    pub budget: u64,
    pub rows: Vec<ExpectedRow>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct Corpus {
    pub address_constants: AddressConstants,
    pub components: Vec<ComponentEntry>,
    pub attackers: Vec<AttackerEntry>,
    pub whole: Vec<WholeEntry>,
    pub goldens: Vec<GoldenEntry>,
    pub table: TableExpectation,
}

impl Corpus {
    pub fn load() -> Corpus {
        serde_json::from_str(CORPUS_JSON).expect("embedded corpus metadata is well-formed")
    }

    /// Raw text of an embedded corpus file (path relative to `corpus/`).
    pub fn file(&self, name: &str) -> Option<&'static str> {
        FILES.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
    }

    fn file_or_panic(&self, name: &str) -> &'static str {
        self.file(name)
            .unwrap_or_else(|| panic!("corpus metadata names missing file {name:?}"))
    }

    pub fn component(&self, id: &str) -> Option<Component> {
        let entry = self.components.iter().find(|e| e.id == id)?;
        let text = self.file_or_panic(&entry.file);
        Some(parse_component(text).expect("embedded corpus component parses"))
    }

    pub fn attacker(&self, id: &str) -> Option<Attacker> {
        let entry = self.attackers.iter().find(|e| e.id == id)?;
        let text = self.file_or_panic(&entry.file);
        Some(parse_attacker(text).expect("embedded corpus attacker parses"))
    }

    pub fn whole(&self, id: &str) -> Option<WholeProgram> {
        let entry = self.whole.iter().find(|e| e.id == id)?;
        let text = self.file_or_panic(&entry.file);
        match parse_program(text).expect("embedded corpus program parses") {
            Program::Whole(w) => Some(w),
            _ => panic!("corpus entry {id:?} is not a whole program"),
        }
    }

    /// The components the verdict table quantifies over, in corpus order.
    pub fn table_sources(&self) -> Vec<(String, Component)> {
        self.components
            .iter()
            .filter(|e| e.table_source)
            .map(|e| {
                (
                    e.id.clone(),
                    self.component(&e.id).expect("table source exists"),
                )
            })
            .collect()
    }

    /// All corpus attackers, in corpus order.
    pub fn table_attackers(&self) -> Vec<(String, Attacker)> {
        self.attackers
            .iter()
            .map(|e| (e.id.clone(), self.attacker(&e.id).expect("attacker exists")))
            .collect()
    }

    /// Raw text of a golden trace file.
    pub fn golden_text(&self, golden: &GoldenEntry) -> &'static str {
        self.file_or_panic(&golden.file)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_embedded_program_parses_and_is_listed() {
        let corpus = Corpus::load();
        for e in &corpus.components {
            assert!(corpus.component(&e.id).is_some(), "{}", e.id);
        }
        for e in &corpus.attackers {
            let a = corpus.attacker(&e.id).expect(&e.id);
            assert!(a.validate().is_ok(), "{} is a valid attacker", e.id);
        }
        for e in &corpus.whole {
            assert!(corpus.whole(&e.id).is_some(), "{}", e.id);
        }
        for g in &corpus.goldens {
            assert!(!corpus.golden_text(g).is_empty(), "{}", g.file);
        }
        assert_eq!(corpus.table_sources().len(), 6);
        assert_eq!(corpus.table_attackers().len(), 3);
    }

    #[test]
    fn golden_files_use_the_canonical_serialization() {
        let corpus = Corpus::load();
        for g in &corpus.goldens {
            let text = corpus.golden_text(g);
            let parsed = trace_model::parse_trace(text).expect("golden parses");
            assert_eq!(trace_model::format_trace(&parsed), text, "{}", g.file);
        }
    }
}
