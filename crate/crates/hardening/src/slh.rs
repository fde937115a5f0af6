//! Load hardening with the predicate bit in private cell `-1`.
//!
//! The declared private heap moves down one cell (`-n` to `-n-1`) to free
//! cell `-1`, which starts at `1` ("not speculating") and is set to `0` by
//! the first statement of any mis-speculated branch. Compiled code loads
//! the bit into `$pr` and uses `cmov` to force values to the constant `0`
//! (safe) while `$pr` is `0`: branch guards, call arguments and both store
//! operands are masked before use; loads are masked on their output
//! ([`ReadMask::Output`]) or on their address ([`ReadMask::Input`]).
//!
//! Because the bit lives in the heap, a callee sees the caller's
//! speculation state: the hardening is interprocedural without fences.

use lang_core::{BinOp, Component, Expr, FnDef, HeapDecl, Stmt, Taint};

/// Where read masking applies: `Output` replaces the loaded value after
/// the access (the address still reaches the trace), `Input` replaces the
/// address before it.
#[derive(Clone, Copy, PartialEq, Eq)]
pub(crate) enum ReadMask {
    Output,
    Input,
}

const GUARD: &str = "$g";
const PRED: &str = "$pr";
const ADDR: &str = "$a";
const VALUE: &str = "$v";

fn or(a: Expr, b: Expr) -> Expr {
    Expr::bin(BinOp::Or, a, b)
}

fn pred(body: Stmt) -> Stmt {
    Stmt::LetReadP(PRED.into(), Expr::Nat(1), Box::new(body))
}

fn mask(x: &str, body: Stmt) -> Stmt {
    Stmt::CMov(x.into(), Expr::Nat(0), Expr::var(PRED), Box::new(body))
}

fn shifted(e: &Expr) -> Expr {
    Expr::add(e.clone(), Expr::Nat(1))
}

pub(crate) fn compile_slh(c: &Component, rm: ReadMask) -> Component {
    let mut privates = vec![HeapDecl {
        addr: -1,
        value: 1,
        taint: Taint::S,
    }];
    privates.extend(c.privates.iter().map(|d| HeapDecl {
        addr: d.addr - 1,
        value: d.value,
        taint: d.taint,
    }));
    Component {
        privates,
        imports: c.imports.clone(),
        fns: c
            .fns
            .iter()
            .map(|f| FnDef {
                name: f.name.clone(),
                param: f.param.clone(),
                body: tx(&f.body, rm).normalized(),
            })
            .collect(),
    }
}

fn tx(s: &Stmt, rm: ReadMask) -> Stmt {
    match s {
        Stmt::Skip | Stmt::Lfence | Stmt::Ret => s.clone(),
        Stmt::Seq(a, b) => Stmt::seq(tx(a, rm), tx(b, rm)),
        Stmt::Let(x, e, body) => Stmt::Let(x.clone(), e.clone(), Box::new(tx(body, rm))),
        Stmt::CMov(x, e, g, body) => {
            Stmt::CMov(x.clone(), e.clone(), g.clone(), Box::new(tx(body, rm)))
        }
        Stmt::IfZ(e, s1, s2) => {
            let update = |flip: bool| {
                let g = Expr::var(GUARD);
                let g = if flip { Expr::not(g) } else { g };
                Stmt::WriteP(Expr::Nat(1), or(Expr::var(PRED), g))
            };
            Stmt::Let(
                GUARD.into(),
                e.clone(),
                Box::new(pred(mask(
                    GUARD,
                    Stmt::IfZ(
                        Expr::var(GUARD),
                        Box::new(Stmt::seq(update(true), tx(s1, rm))),
                        Box::new(Stmt::seq(update(false), tx(s2, rm))),
                    ),
                ))),
            )
        }
        Stmt::LetRead(x, e, body) => read(x, e.clone(), body, rm, Stmt::LetRead),
        Stmt::LetReadP(x, e, body) => read(x, shifted(e), body, rm, Stmt::LetReadP),
        Stmt::Write(a, v) => store(a.clone(), v, Stmt::Write),
        Stmt::WriteP(a, v) => store(shifted(a), v, Stmt::WriteP),
        Stmt::Call(f, e) => Stmt::Let(
            VALUE.into(),
            e.clone(),
            Box::new(pred(mask(VALUE, Stmt::Call(f.clone(), Expr::var(VALUE))))),
        ),
    }
}

/// Shared shape of both read compilations; `addr` is already shifted for
/// private reads. `make` picks the public or private load constructor.
fn read(
    x: &str,
    addr: Expr,
    body: &Stmt,
    rm: ReadMask,
    make: fn(String, Expr, Box<Stmt>) -> Stmt,
) -> Stmt {
    let load = |inner: Stmt| make(x.into(), Expr::var(ADDR), Box::new(inner));
    let rest = tx(body, rm);
    let masked = match rm {
        ReadMask::Output => load(mask(x, rest)),
        ReadMask::Input => mask(ADDR, load(rest)),
    };
    Stmt::Let(ADDR.into(), addr, Box::new(pred(masked)))
}

/// Shared shape of both store compilations; `addr` is already shifted for
/// private stores.
fn store(addr: Expr, value: &Expr, make: fn(Expr, Expr) -> Stmt) -> Stmt {
    Stmt::Let(
        ADDR.into(),
        addr,
        Box::new(Stmt::Let(
            VALUE.into(),
            value.clone(),
            Box::new(pred(mask(
                ADDR,
                mask(VALUE, make(Expr::var(ADDR), Expr::var(VALUE))),
            ))),
        )),
    )
}
