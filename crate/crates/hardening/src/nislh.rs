//! Non-interprocedural load hardening: the predicate bit is a local.
//!
//! Each compiled function starts with `let $pr = 1 in …` (optionally
//! preceded by an `lfence`) and rebinds `$pr` at every branch, so the bit
//! tracks mis-speculation within the function. Private-load results are
//! masked against it; everything else stays as written. Without the entry
//! fence a caller can speculate into a callee whose fresh `$pr = 1`
//! wrongly claims architectural execution — that variant exists to make
//! the hole demonstrable.

use lang_core::{BinOp, Component, Expr, FnDef, Stmt};

const GUARD: &str = "$g";
const PRED: &str = "$pr";

fn or(a: Expr, b: Expr) -> Expr {
    Expr::bin(BinOp::Or, a, b)
}

pub(crate) fn compile_nislh(c: &Component, entry_fence: bool) -> Component {
    Component {
        privates: c.privates.clone(),
        imports: c.imports.clone(),
        fns: c
            .fns
            .iter()
            .map(|f| {
                let body = Stmt::Let(PRED.into(), Expr::Nat(1), Box::new(tx(&f.body)));
                let body = if entry_fence {
                    Stmt::seq(Stmt::Lfence, body)
                } else {
                    body
                };
                FnDef {
                    name: f.name.clone(),
                    param: f.param.clone(),
                    body: body.normalized(),
                }
            })
            .collect(),
    }
}

fn tx(s: &Stmt) -> Stmt {
    match s {
        Stmt::Skip | Stmt::Lfence | Stmt::Ret | Stmt::Call(..) | Stmt::Write(..)
        | Stmt::WriteP(..) => s.clone(),
        Stmt::Seq(a, b) => Stmt::seq(tx(a), tx(b)),
        Stmt::Let(x, e, body) => Stmt::Let(x.clone(), e.clone(), Box::new(tx(body))),
        Stmt::CMov(x, e, g, body) => Stmt::CMov(x.clone(), e.clone(), g.clone(), Box::new(tx(body))),
        Stmt::LetRead(x, e, body) => Stmt::LetRead(x.clone(), e.clone(), Box::new(tx(body))),
        Stmt::LetReadP(x, e, body) => Stmt::LetReadP(
            x.clone(),
            e.clone(),
            Box::new(Stmt::CMov(
                x.clone(),
                Expr::Nat(0),
                Expr::var(PRED),
                Box::new(tx(body)),
            )),
        ),
        Stmt::IfZ(e, s1, s2) => {
            let rebind = |flip: bool, rest: Stmt| {
                let g = Expr::var(GUARD);
                let g = if flip { Expr::not(g) } else { g };
                Stmt::Let(PRED.into(), or(Expr::var(PRED), g), Box::new(rest))
            };
            Stmt::Let(
                GUARD.into(),
                e.clone(),
                Box::new(Stmt::IfZ(
                    Expr::var(GUARD),
                    Box::new(rebind(true, tx(s1))),
                    Box::new(rebind(false, tx(s2))),
                )),
            )
        }
    }
}
