//! A small attacker synthesizer: call each exported function with each
//! value in a range.

use lang_core::{Attacker, Component, Expr, FnDef, Stmt};

/// One attacker per (export, value) pair, in component definition order
/// then value order. Each attacker's `main` calls a single export with a
/// single literal argument; stub definitions are provided for every import
/// the component declares (except `main` itself, which is the caller).
pub fn synth_attackers(component: &Component, values: impl IntoIterator<Item = u64>) -> Vec<Attacker> {
    let values: Vec<u64> = values.into_iter().collect();
    let mut out = Vec::new();
    for export in &component.fns {
        for &v in &values {
            let main = FnDef {
                name: "main".to_string(),
                param: "x".to_string(),
                body: Stmt::seq(Stmt::Call(export.name.clone(), Expr::Nat(v)), Stmt::Ret),
            };
            let mut fns = vec![main];
            for import in &component.imports {
                if import != "main" {
                    fns.push(FnDef {
                        name: import.clone(),
                        param: "z".to_string(),
                        body: Stmt::Skip,
                    });
                }
            }
            out.push(Attacker {
                publics: vec![],
                fns,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use lang_core::{parse_component, plug};

    #[test]
    fn synthesized_attackers_link() {
        let c = parse_component(
            "component {
                import helper;
                fn get(y) { call helper y }
                fn set(y) { skip }
            }",
        )
        .unwrap();
        let attackers = synth_attackers(&c, 0..3);
        assert_eq!(attackers.len(), 6);
        for a in &attackers {
            assert!(a.validate().is_ok());
            assert!(plug(a.clone(), c.clone()).is_ok());
        }
        // First attacker calls the first export with the first value.
        assert_eq!(
            attackers[0].fns[0].body,
            Stmt::seq(Stmt::Call("get".into(), Expr::Nat(0)), Stmt::Ret)
        );
    }
}
