//! Pretty-printer producing concrete syntax that re-parses to the same AST.
//!
//! Expressions are parenthesized conservatively: every binary operand that
//! is itself a compound expression gets parentheses, so printing is immune
//! to precedence subtleties.

use crate::ast::{BinOp, Expr, FnDef, HeapDecl, Stmt};
use crate::program::{Attacker, Component, WholeProgram};
use crate::Taint;
use std::fmt;

impl fmt::Display for BinOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Lt => "<",
            BinOp::Gt => ">",
            BinOp::Eq => "==",
            BinOp::Or => "or",
        };
        write!(f, "{s}")
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr) -> fmt::Result {
    match e {
        Expr::Nat(_) | Expr::Var(_) | Expr::Not(_) => write!(f, "{e}"),
        Expr::Bin(..) => write!(f, "({e})"),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Nat(n) => write!(f, "{n}"),
            Expr::Var(x) => write!(f, "{x}"),
            Expr::Bin(op, a, b) => {
                write_operand(f, a)?;
                write!(f, " {op} ")?;
                write_operand(f, b)
            }
            Expr::Not(e) => write!(f, "not({e})"),
        }
    }
}

/// Statement printer with indentation. Statements print as a `;`-separated
/// block; binders print `in` followed by the rest of the block at the same
/// indentation.
struct StmtPrinter<'a> {
    stmt: &'a Stmt,
    indent: usize,
}

impl fmt::Display for StmtPrinter<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_block(f, self.stmt, self.indent)
    }
}

fn pad(f: &mut fmt::Formatter<'_>, indent: usize) -> fmt::Result {
    for _ in 0..indent {
        write!(f, "  ")?;
    }
    Ok(())
}

fn write_block(f: &mut fmt::Formatter<'_>, stmt: &Stmt, indent: usize) -> fmt::Result {
    write_units(f, vec![stmt], indent)
}

/// Print a worklist of block units in order. A binder unit absorbs every
/// unit after it into its body (matching the parser's scoping rule), so the
/// printed form re-parses to the sequence-normalized AST even for
/// programmatically built statements like `Seq(Let(..), rest)`.
fn write_units(f: &mut fmt::Formatter<'_>, mut work: Vec<&Stmt>, indent: usize) -> fmt::Result {
    // The worklist is kept in reverse order (next unit at the end).
    work.reverse();
    let mut first = true;
    while let Some(s) = work.pop() {
        match s {
            Stmt::Seq(a, b) => {
                work.push(b);
                work.push(a);
                continue;
            }
            Stmt::Let(..) | Stmt::LetRead(..) | Stmt::LetReadP(..) | Stmt::CMov(..) => {
                if !first {
                    writeln!(f, ";")?;
                }
                pad(f, indent)?;
                let body = match s {
                    Stmt::Let(x, e, body) => {
                        writeln!(f, "let {x} = {e} in")?;
                        body
                    }
                    Stmt::LetRead(x, addr, body) => {
                        writeln!(f, "let {x} = read({addr}) in")?;
                        body
                    }
                    Stmt::LetReadP(x, addr, body) => {
                        writeln!(f, "let {x} = readp({addr}) in")?;
                        body
                    }
                    Stmt::CMov(x, e, guard, body) => {
                        writeln!(f, "cmov {x}, {e} if0 {guard} in")?;
                        body
                    }
                    _ => unreachable!(),
                };
                work.push(body);
                first = true;
                continue;
            }
            simple => {
                if !first {
                    writeln!(f, ";")?;
                }
                pad(f, indent)?;
                write_simple(f, simple, indent)?;
                first = false;
            }
        }
    }
    writeln!(f)
}

/// Print a non-binder, non-sequence unit (no trailing separator).
fn write_simple(f: &mut fmt::Formatter<'_>, s: &Stmt, indent: usize) -> fmt::Result {
    match s {
        Stmt::Skip => write!(f, "skip"),
        Stmt::Lfence => write!(f, "lfence"),
        Stmt::Ret => write!(f, "ret"),
        Stmt::Call(name, arg) => {
            write!(f, "call {name} ")?;
            write_operand(f, arg)
        }
        Stmt::Write(a, v) => write!(f, "write({a}, {v})"),
        Stmt::WriteP(a, v) => write!(f, "writep({a}, {v})"),
        Stmt::IfZ(guard, then_branch, else_branch) => {
            writeln!(f, "if0 {guard} {{")?;
            write_block(f, then_branch, indent + 1)?;
            pad(f, indent)?;
            writeln!(f, "}} else {{")?;
            write_block(f, else_branch, indent + 1)?;
            pad(f, indent)?;
            write!(f, "}}")
        }
        Stmt::Seq(..)
        | Stmt::Let(..)
        | Stmt::LetRead(..)
        | Stmt::LetReadP(..)
        | Stmt::CMov(..) => unreachable!("handled by write_units"),
    }
}

impl fmt::Display for Stmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}",
            StmtPrinter {
                stmt: self,
                indent: 0
            }
        )
    }
}

impl fmt::Display for HeapDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let default = if self.addr < 0 { Taint::U } else { Taint::S };
        if self.taint == default {
            write!(f, "{} = {};", self.addr, self.value)
        } else {
            write!(f, "{} = {} :{};", self.addr, self.value, self.taint)
        }
    }
}

fn write_fn(f: &mut fmt::Formatter<'_>, def: &FnDef, indent: usize) -> fmt::Result {
    pad(f, indent)?;
    writeln!(f, "fn {}({}) {{", def.name, def.param)?;
    write_block(f, &def.body, indent + 1)?;
    pad(f, indent)?;
    writeln!(f, "}}")
}

impl fmt::Display for FnDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_fn(f, self, 0)
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "component {{")?;
        if !self.privates.is_empty() {
            pad(f, 1)?;
            writeln!(f, "private {{")?;
            for d in &self.privates {
                pad(f, 2)?;
                writeln!(f, "{d}")?;
            }
            pad(f, 1)?;
            writeln!(f, "}}")?;
        }
        for i in &self.imports {
            pad(f, 1)?;
            writeln!(f, "import {i};")?;
        }
        for (i, def) in self.fns.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write_fn(f, def, 1)?;
        }
        writeln!(f, "}}")
    }
}

impl fmt::Display for Attacker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "attacker {{")?;
        if !self.publics.is_empty() {
            pad(f, 1)?;
            writeln!(f, "public {{")?;
            for d in &self.publics {
                pad(f, 2)?;
                writeln!(f, "{d}")?;
            }
            pad(f, 1)?;
            writeln!(f, "}}")?;
        }
        for (i, def) in self.fns.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write_fn(f, def, 1)?;
        }
        writeln!(f, "}}")
    }
}

impl fmt::Display for WholeProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.attacker)?;
        writeln!(f)?;
        write!(f, "{}", self.component)
    }
}
