//! Printing a program and re-parsing it must reproduce the AST exactly
//! (generated programs are built sequence-normalized, and the parser only
//! produces normalized statements, so equality is on the nose).

use lang_core::gen::gen_whole_program;
use lang_core::{parse_program, Program};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn print_parse_roundtrip(w in gen_whole_program()) {
        let text = w.to_string();
        let parsed = parse_program(&text)
            .unwrap_or_else(|e| panic!("reparse failed: {e}\n---\n{text}"));
        let Program::Whole(w2) = parsed else {
            panic!("expected whole program back, got a fragment\n---\n{text}");
        };
        prop_assert_eq!(&w.attacker, &w2.attacker, "attacker mismatch\n---\n{}", text);
        prop_assert_eq!(&w.component, &w2.component, "component mismatch\n---\n{}", text);
    }

    #[test]
    fn generated_programs_link(w in gen_whole_program()) {
        w.validate().unwrap();
    }
}
