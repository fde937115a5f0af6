//! Abstract syntax shared by all four language variants.

use crate::Taint;

pub type Ident = String;

/// Binary operators over naturals. Comparisons and `or` use the boolean
/// encoding where `0` means true and any non-zero value means false.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Lt,
    Gt,
    Eq,
    Or,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    /// Natural-number literal.
    Nat(u64),
    Var(Ident),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    /// `not(e)`: `0` if `e` is non-zero, `1` if `e` is `0`.
    Not(Box<Expr>),
}

impl Expr {
    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }

    pub fn bin(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Bin(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn add(lhs: Expr, rhs: Expr) -> Expr {
        Expr::bin(BinOp::Add, lhs, rhs)
    }

    pub fn not(e: Expr) -> Expr {
        Expr::Not(Box::new(e))
    }

    /// All variables mentioned in the expression, in first-occurrence order.
    pub fn vars(&self) -> Vec<Ident> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<Ident>) {
        match self {
            Expr::Nat(_) => {}
            Expr::Var(x) => {
                if !out.contains(x) {
                    out.push(x.clone());
                }
            }
            Expr::Bin(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::Not(a) => a.collect_vars(out),
        }
    }
}

/// Statements. `Let`, `LetRead`, `LetReadP`, and `CMov` are binders whose
/// body extends over the rest of the enclosing block; see the parser for
/// the concrete scoping rule.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Stmt {
    Skip,
    Seq(Box<Stmt>, Box<Stmt>),
    /// `let x = e in s`
    Let(Ident, Expr, Box<Stmt>),
    /// `if0 e { s } else { s' }`: takes the first branch when `e` evaluates
    /// to `0`.
    IfZ(Expr, Box<Stmt>, Box<Stmt>),
    /// `call f e`
    Call(Ident, Expr),
    /// `write(e, e')`: public heap store at address `+e`.
    Write(Expr, Expr),
    /// `writep(e, e')`: private heap store at address `-e`.
    WriteP(Expr, Expr),
    /// `let x = read(e) in s`: public heap load from address `+e`.
    LetRead(Ident, Expr, Box<Stmt>),
    /// `let x = readp(e) in s`: private heap load from address `-e`.
    LetReadP(Ident, Expr, Box<Stmt>),
    /// Speculation barrier; a no-op architecturally.
    Lfence,
    /// `cmov x, e if0 e' in s`: assign `e` to the already-bound `x` when
    /// `e'` evaluates to `0`, keep the old value otherwise. Either way the
    /// guard taint joins into `x`.
    CMov(Ident, Expr, Expr, Box<Stmt>),
    /// Return from the current function.
    Ret,
}

impl Stmt {
    pub fn seq(a: Stmt, b: Stmt) -> Stmt {
        Stmt::Seq(Box::new(a), Box::new(b))
    }

    /// Right-nested sequence of `stmts`; `Skip` when empty.
    pub fn seq_all(stmts: Vec<Stmt>) -> Stmt {
        let mut iter = stmts.into_iter().rev();
        let Some(last) = iter.next() else {
            return Stmt::Skip;
        };
        iter.fold(last, |acc, s| Stmt::seq(s, acc))
    }

    /// Whether the statement (sub)tree contains a `readp` or `writep`.
    pub fn mentions_private_heap(&self) -> bool {
        self.any(&mut |s| matches!(s, Stmt::LetReadP(..) | Stmt::WriteP(..)))
    }

    /// Canonical sequence shape: right-nested `Seq` with no binder or `Seq`
    /// in a left position (a binder followed by statements absorbs them
    /// into its body, which is semantically transparent because bindings
    /// are function-scoped). Parsed statements are already in this shape;
    /// this matters for programmatically built statements, and the printer
    /// emits exactly this shape's concrete syntax.
    pub fn normalized(self) -> Stmt {
        match self {
            Stmt::Seq(a, b) => {
                let b = b.normalized();
                match a.normalized() {
                    Stmt::Seq(p, q) => Stmt::seq(*p, Stmt::seq(*q, b)).normalized(),
                    Stmt::Let(x, e, body) => {
                        Stmt::Let(x, e, Box::new(Stmt::seq(*body, b).normalized()))
                    }
                    Stmt::LetRead(x, e, body) => {
                        Stmt::LetRead(x, e, Box::new(Stmt::seq(*body, b).normalized()))
                    }
                    Stmt::LetReadP(x, e, body) => {
                        Stmt::LetReadP(x, e, Box::new(Stmt::seq(*body, b).normalized()))
                    }
                    Stmt::CMov(x, e, g, body) => {
                        Stmt::CMov(x, e, g, Box::new(Stmt::seq(*body, b).normalized()))
                    }
                    other => Stmt::seq(other, b),
                }
            }
            Stmt::Let(x, e, body) => Stmt::Let(x, e, Box::new(body.normalized())),
            Stmt::LetRead(x, e, body) => Stmt::LetRead(x, e, Box::new(body.normalized())),
            Stmt::LetReadP(x, e, body) => Stmt::LetReadP(x, e, Box::new(body.normalized())),
            Stmt::CMov(x, e, g, body) => Stmt::CMov(x, e, g, Box::new(body.normalized())),
            Stmt::IfZ(g, a, b) => Stmt::IfZ(g, Box::new(a.normalized()), Box::new(b.normalized())),
            simple => simple,
        }
    }

    /// Whether any sub-statement satisfies `pred`.
    pub fn any(&self, pred: &mut dyn FnMut(&Stmt) -> bool) -> bool {
        if pred(self) {
            return true;
        }
        match self {
            Stmt::Seq(a, b) => a.any(pred) || b.any(pred),
            Stmt::Let(_, _, s) | Stmt::LetRead(_, _, s) | Stmt::LetReadP(_, _, s) => s.any(pred),
            Stmt::IfZ(_, a, b) => a.any(pred) || b.any(pred),
            Stmt::CMov(_, _, _, s) => s.any(pred),
            Stmt::Skip
            | Stmt::Call(..)
            | Stmt::Write(..)
            | Stmt::WriteP(..)
            | Stmt::Lfence
            | Stmt::Ret => false,
        }
    }

    /// All identifiers (variables bound or mentioned) in the statement.
    pub fn idents(&self) -> Vec<Ident> {
        let mut out = Vec::new();
        self.collect_idents(&mut out);
        out
    }

    fn collect_idents(&self, out: &mut Vec<Ident>) {
        let mut push = |x: &Ident| {
            if !out.contains(x) {
                out.push(x.clone());
            }
        };
        match self {
            Stmt::Skip | Stmt::Lfence | Stmt::Ret => {}
            Stmt::Seq(a, b) => {
                a.collect_idents(out);
                b.collect_idents(out);
            }
            Stmt::Let(x, e, s) => {
                push(x);
                for v in e.vars() {
                    if !out.contains(&v) {
                        out.push(v);
                    }
                }
                s.collect_idents(out);
            }
            Stmt::IfZ(e, a, b) => {
                for v in e.vars() {
                    if !out.contains(&v) {
                        out.push(v);
                    }
                }
                a.collect_idents(out);
                b.collect_idents(out);
            }
            Stmt::Call(_, e) => {
                for v in e.vars() {
                    if !out.contains(&v) {
                        out.push(v);
                    }
                }
            }
            Stmt::Write(a, b) | Stmt::WriteP(a, b) => {
                for v in a.vars().into_iter().chain(b.vars()) {
                    if !out.contains(&v) {
                        out.push(v);
                    }
                }
            }
            Stmt::LetRead(x, e, s) | Stmt::LetReadP(x, e, s) => {
                push(x);
                for v in e.vars() {
                    if !out.contains(&v) {
                        out.push(v);
                    }
                }
                s.collect_idents(out);
            }
            Stmt::CMov(x, e, g, s) => {
                push(x);
                for v in e.vars().into_iter().chain(g.vars()) {
                    if !out.contains(&v) {
                        out.push(v);
                    }
                }
                s.collect_idents(out);
            }
        }
    }
}

/// A function definition `fn f(x) { body }`. Returning happens either via
/// an explicit trailing `ret` or implicitly when the body is exhausted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FnDef {
    pub name: Ident,
    pub param: Ident,
    pub body: Stmt,
}

/// A heap declaration `addr = value;` with an optional taint annotation
/// `addr = value :T;`. Component (private) entries default to `U`,
/// attacker (public) entries default to `S`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HeapDecl {
    pub addr: i64,
    pub value: u64,
    pub taint: Taint,
}
