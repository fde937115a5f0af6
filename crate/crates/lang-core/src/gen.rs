//! Random program generation for property tests (feature `testgen`).
//!
//! Generated programs are well-formed and terminating by construction:
//!
//! - every expression variable is drawn from the enclosing scope, so
//!   evaluation never hits an unbound variable;
//! - `cmov` targets are always already bound;
//! - the call graph is a DAG: functions are arranged in a global order
//!   `main < attacker helpers < component functions < attacker leaf
//!   imports`, and every call goes strictly forward in that order (the
//!   language has no loops, so this guarantees termination);
//! - attacker bodies never touch the private heap;
//! - the component imports exactly the attacker leaf functions it may call.
//!
//! Generated identifiers never use `$`, so the programs are also valid
//! hardening-pass inputs.

use crate::ast::{BinOp, Expr, FnDef, HeapDecl, Stmt};
use crate::program::{Attacker, Component, WholeProgram};
use crate::Taint;
use proptest::prelude::*;

const VAR_POOL: &[&str] = &["a", "b", "t", "u", "w"];

fn gen_value() -> impl Strategy<Value = u64> {
    0u64..=6
}

fn gen_var(scope: Vec<String>) -> impl Strategy<Value = Expr> {
    prop::sample::select(scope).prop_map(Expr::Var)
}

fn gen_binop() -> impl Strategy<Value = BinOp> {
    prop::sample::select(vec![
        BinOp::Add,
        BinOp::Sub,
        BinOp::Mul,
        BinOp::Lt,
        BinOp::Gt,
        BinOp::Eq,
        BinOp::Or,
    ])
}

/// Expression over the given scope, depth-bounded.
pub fn gen_expr(scope: &[String], depth: u32) -> BoxedStrategy<Expr> {
    let leaf = if scope.is_empty() {
        gen_value().prop_map(Expr::Nat).boxed()
    } else {
        prop_oneof![
            gen_value().prop_map(Expr::Nat),
            gen_var(scope.to_vec()),
        ]
        .boxed()
    };
    if depth == 0 {
        return leaf;
    }
    let inner = gen_expr(scope, depth - 1);
    prop_oneof![
        3 => leaf,
        2 => (gen_binop(), inner.clone(), gen_expr(scope, depth - 1))
            .prop_map(|(op, a, b)| Expr::bin(op, a, b)),
        1 => inner.prop_map(Expr::not),
    ]
    .boxed()
}

/// Fresh variable for a binder: either reuse a pool name (shadowing the
/// function-scoped binding) or derive one.
fn gen_binder_name() -> impl Strategy<Value = String> {
    prop::sample::select(VAR_POOL.to_vec()).prop_map(str::to_string)
}

/// Statement generator. `callable` lists functions this body may call
/// (already restricted to preserve the call DAG). `component` enables
/// private-heap accesses.
pub fn gen_stmt(
    scope: Vec<String>,
    callable: Vec<String>,
    component: bool,
    depth: u32,
) -> BoxedStrategy<Stmt> {
    let expr = || gen_expr(&scope, 1);

    let mut leaves: Vec<BoxedStrategy<Stmt>> = vec![
        Just(Stmt::Skip).boxed(),
        Just(Stmt::Lfence).boxed(),
        (expr(), expr())
            .prop_map(|(a, v)| Stmt::Write(a, v))
            .boxed(),
    ];
    if component {
        leaves.push(
            (expr(), expr())
                .prop_map(|(a, v)| Stmt::WriteP(a, v))
                .boxed(),
        );
    }
    if !callable.is_empty() {
        let funcs = callable.clone();
        leaves.push(
            (prop::sample::select(funcs), expr())
                .prop_map(|(f, e)| Stmt::Call(f, e))
                .boxed(),
        );
    }
    if !scope.is_empty() {
        let targets = scope.clone();
        let e1 = expr();
        let e2 = expr();
        leaves.push(
            (prop::sample::select(targets), e1, e2)
                .prop_map(|(x, e, g)| Stmt::CMov(x, e, g, Box::new(Stmt::Skip)))
                .boxed(),
        );
    }
    let leaf = prop::strategy::Union::new(leaves).boxed();

    if depth == 0 {
        return leaf;
    }

    let sub = |extra: Option<String>| {
        let mut scope2 = scope.clone();
        if let Some(x) = extra {
            if !scope2.contains(&x) {
                scope2.push(x);
            }
        }
        gen_stmt(scope2, callable.clone(), component, depth - 1)
    };

    let let_plain = (gen_binder_name(), expr()).prop_flat_map({
        let scope = scope.clone();
        let callable = callable.clone();
        move |(x, e)| {
            let mut scope2 = scope.clone();
            if !scope2.contains(&x) {
                scope2.push(x.clone());
            }
            gen_stmt(scope2, callable.clone(), component, depth - 1)
                .prop_map(move |body| Stmt::Let(x.clone(), e.clone(), Box::new(body)))
        }
    });

    let let_read = (gen_binder_name(), expr()).prop_flat_map({
        let scope = scope.clone();
        let callable = callable.clone();
        move |(x, e)| {
            let mut scope2 = scope.clone();
            if !scope2.contains(&x) {
                scope2.push(x.clone());
            }
            gen_stmt(scope2, callable.clone(), component, depth - 1)
                .prop_map(move |body| Stmt::LetRead(x.clone(), e.clone(), Box::new(body)))
        }
    });

    let let_readp = (gen_binder_name(), expr()).prop_flat_map({
        let scope = scope.clone();
        let callable = callable.clone();
        move |(x, e)| {
            let mut scope2 = scope.clone();
            if !scope2.contains(&x) {
                scope2.push(x.clone());
            }
            gen_stmt(scope2, callable.clone(), component, depth - 1)
                .prop_map(move |body| Stmt::LetReadP(x.clone(), e.clone(), Box::new(body)))
        }
    });

    let ifz = (expr(), sub(None), sub(None))
        .prop_map(|(g, a, b)| Stmt::IfZ(g, Box::new(a), Box::new(b)));

    let seq = (sub(None), sub(None)).prop_map(|(a, b)| Stmt::seq(a, b).normalized());

    let mut choices: Vec<BoxedStrategy<Stmt>> = vec![
        leaf,
        let_plain.boxed(),
        let_read.boxed(),
        ifz.boxed(),
        seq.boxed(),
    ];
    if component {
        choices.push(let_readp.boxed());
    }
    prop::strategy::Union::new(choices).boxed()
}

fn gen_heap_decl(addr: i64, default_taint: Taint, allow_unsafe: bool) -> BoxedStrategy<HeapDecl> {
    if allow_unsafe {
        (gen_value(), prop::bool::ANY)
            .prop_map(move |(value, keep_default)| HeapDecl {
                addr,
                value,
                taint: if keep_default {
                    default_taint
                } else {
                    match default_taint {
                        Taint::U => Taint::S,
                        Taint::S => Taint::S,
                    }
                },
            })
            .boxed()
    } else {
        gen_value()
            .prop_map(move |value| HeapDecl {
                addr,
                value,
                taint: default_taint,
            })
            .boxed()
    }
}

/// A linked whole program: attacker `main` (plus an optional helper) around
/// a component of one to three functions, with one or two attacker leaf
/// functions available as component imports.
pub fn gen_whole_program() -> impl Strategy<Value = WholeProgram> {
    let publics = prop::collection::vec(any::<bool>(), 0..3).prop_flat_map(|mask| {
        mask.iter()
            .enumerate()
            .filter(|&(_, keep)| *keep)
            .map(|(i, _)| gen_heap_decl(i as i64 + 1, Taint::S, false))
            .collect::<Vec<_>>()
    });
    let privates = prop::collection::vec(any::<bool>(), 1..4).prop_flat_map(|mask| {
        mask.iter()
            .enumerate()
            .map(|(i, &mixed)| gen_heap_decl(-(i as i64 + 1), Taint::U, mixed))
            .collect::<Vec<_>>()
    });

    (publics, privates, 1usize..=3, 1usize..=2).prop_flat_map(|(publics, privates, n_comp, n_leaf)| {
        let comp_names: Vec<String> = (0..n_comp).map(|i| format!("c{i}")).collect();
        let leaf_names: Vec<String> = (0..n_leaf).map(|i| format!("ext{i}")).collect();

        // Component function i may call later component functions and leaves.
        let comp_fns: Vec<BoxedStrategy<FnDef>> = (0..n_comp)
            .map(|i| {
                let name = comp_names[i].clone();
                let mut callable: Vec<String> = comp_names[i + 1..].to_vec();
                callable.extend(leaf_names.iter().cloned());
                gen_stmt(vec!["y".to_string()], callable, true, 2)
                    .prop_map(move |body| FnDef {
                        name: name.clone(),
                        param: "y".to_string(),
                        body: body.normalized(),
                    })
                    .boxed()
            })
            .collect();

        // Attacker leaves call nothing. Attacker main calls component fns.
        let leaf_fns: Vec<BoxedStrategy<FnDef>> = leaf_names
            .iter()
            .map(|name| {
                let name = name.clone();
                gen_stmt(vec!["z".to_string()], vec![], false, 1)
                    .prop_map(move |body| FnDef {
                        name: name.clone(),
                        param: "z".to_string(),
                        body: body.normalized(),
                    })
                    .boxed()
            })
            .collect();

        let main_fn = gen_stmt(vec!["x".to_string()], comp_names.clone(), false, 2).prop_map(
            |body| FnDef {
                name: "main".to_string(),
                param: "x".to_string(),
                body: body.normalized(),
            },
        );

        let leaf_names2 = leaf_names.clone();
        (main_fn, comp_fns, leaf_fns).prop_map(move |(main_fn, comp_fns, leaf_fns)| {
            let mut attacker_fns = vec![main_fn];
            attacker_fns.extend(leaf_fns);
            let attacker = Attacker {
                publics: publics.clone(),
                fns: attacker_fns,
            };
            let component = Component {
                privates: privates.clone(),
                imports: leaf_names2.clone(),
                fns: comp_fns,
            };
            WholeProgram::new(attacker, component)
        })
    })
}
