//! Low-equivalence: programs that differ only in private heap values.

use lang_core::{Taint, WholeProgram};

fn sorted_entries(decls: &[lang_core::HeapDecl]) -> Vec<(i64, u64, Taint)> {
    let mut v: Vec<_> = decls.iter().map(|d| (d.addr, d.value, d.taint)).collect();
    v.sort_unstable();
    v
}

fn sorted_domain(decls: &[lang_core::HeapDecl]) -> Vec<(i64, Taint)> {
    let mut v: Vec<_> = decls.iter().map(|d| (d.addr, d.taint)).collect();
    v.sort_unstable();
    v
}

/// Two linked programs are low-equivalent when an observer without access
/// to private values cannot tell them apart statically: identical code on
/// both sides, identical imports, identical public heap declarations
/// (values included — public values are observable), and identical private
/// heap *domains* (addresses and declared taints), with private *values*
/// left free. Both private heaps must be valid (negative addresses only).
pub fn low_equivalent(w1: &WholeProgram, w2: &WholeProgram) -> bool {
    w1.attacker.fns == w2.attacker.fns
        && sorted_entries(&w1.attacker.publics) == sorted_entries(&w2.attacker.publics)
        && w1.component.fns == w2.component.fns
        && w1.component.imports == w2.component.imports
        && w1.component.validate().is_ok()
        && w2.component.validate().is_ok()
        && sorted_domain(&w1.component.privates) == sorted_domain(&w2.component.privates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use lang_core::{parse_attacker, parse_component, plug};

    fn program(privates: &str, publics: &str) -> WholeProgram {
        let c = parse_component(&format!(
            "component {{
                private {{ {privates} }}
                fn f(y) {{ let v = readp(1) in write(0, y) }}
            }}"
        ))
        .unwrap();
        let a = parse_attacker(&format!(
            "attacker {{
                public {{ {publics} }}
                fn main(x) {{ call f 1; ret }}
            }}"
        ))
        .unwrap();
        plug(a, c).unwrap()
    }

    #[test]
    fn reflexive() {
        let w = program("-1 = 4 :U;", "2 = 9;");
        assert!(low_equivalent(&w, &w));
    }

    #[test]
    fn private_values_are_free() {
        let w1 = program("-1 = 4 :U;", "2 = 9;");
        let w2 = program("-1 = 7 :U;", "2 = 9;");
        assert!(low_equivalent(&w1, &w2));
    }

    #[test]
    fn public_values_matter() {
        let w1 = program("-1 = 4 :U;", "2 = 9;");
        let w2 = program("-1 = 4 :U;", "2 = 8;");
        assert!(!low_equivalent(&w1, &w2));
    }

    #[test]
    fn private_domain_matters() {
        let w1 = program("-1 = 4 :U;", "2 = 9;");
        let w2 = program("-1 = 4 :U; -2 = 0 :U;", "2 = 9;");
        assert!(!low_equivalent(&w1, &w2));
    }

    #[test]
    fn private_taints_matter() {
        let w1 = program("-1 = 4 :U;", "2 = 9;");
        let w2 = program("-1 = 4 :S;", "2 = 9;");
        assert!(!low_equivalent(&w1, &w2));
    }

    #[test]
    fn code_matters() {
        let w1 = program("-1 = 4 :U;", "2 = 9;");
        let c = parse_component(
            "component {
                private { -1 = 4 :U; }
                fn f(y) { let v = readp(1) in write(0, y + 1) }
            }",
        )
        .unwrap();
        let a = parse_attacker(
            "attacker {
                public { 2 = 9; }
                fn main(x) { call f 1; ret }
            }",
        )
        .unwrap();
        let w2 = plug(a, c).unwrap();
        assert!(!low_equivalent(&w1, &w2));
    }
}
