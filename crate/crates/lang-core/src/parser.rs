//! Recursive-descent parser for components, attackers, and whole programs.
//!
//! Grammar sketch (`//` comments allowed everywhere):
//!
//! ```text
//! program   := component | attacker | component attacker | attacker component
//! component := "component" "{" ["private" "{" heapdecl* "}"] ("import" ident ";")* fn* "}"
//! attacker  := "attacker" "{" ["public" "{" heapdecl* "}"] fn* "}"
//! heapdecl  := int "=" nat [":" ("S" | "U")] ";"
//! fn        := "fn" ident "(" ident ")" "{" block "}"
//! block     := unit (";" unit)* [";"]
//! unit      := "skip" | "lfence" | "ret"
//!            | "if0" expr "{" block "}" "else" "{" block "}"
//!            | "call" ident expr
//!            | "write" "(" expr "," expr ")" | "writep" "(" expr "," expr ")"
//!            | "let" ident "=" ("read" | "readp") "(" expr ")" "in" block
//!            | "let" ident "=" expr "in" block
//!            | "cmov" ident "," expr "if0" expr "in" block
//! expr      := or-expr; precedence: not()/() > "*" > "+","-" > "<",">","==" > "or",
//!              all binary operators left-associative
//! ```
//!
//! Binders (`let`, `let-read`, `let-readp`, `cmov`) scope over the rest of
//! the enclosing block: `let x = 1 in skip; call f x` parses as
//! `let x = 1 in (skip; call f x)`.
//!
//! `ret` may appear only as the final statement of a function body (possibly
//! under a chain of trailing binders), never inside a branch. Functions
//! without a trailing `ret` return implicitly when their body is exhausted.

use crate::ast::{BinOp, Expr, FnDef, HeapDecl, Ident, Stmt};
use crate::lexer::{lex, LexError, Spanned, Token};
use crate::program::{Attacker, Component, WholeProgram};
use crate::Taint;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error("parse error on line {line}: {message}")]
    Syntax { line: u32, message: String },
    #[error("parse error: unexpected end of input ({expected})")]
    Eof { expected: String },
    #[error("line {line}: {message}")]
    Invalid { line: u32, message: String },
}

/// Result of parsing a source file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Program {
    Component(Component),
    Attacker(Attacker),
    /// A file containing both an attacker and a component block.
    Whole(WholeProgram),
}

/// Parse a file that may contain a component, an attacker, or both.
pub fn parse_program(src: &str) -> Result<Program, ParseError> {
    let tokens = lex(src)?;
    let mut p = Parser { tokens, pos: 0 };
    let mut component: Option<Component> = None;
    let mut attacker: Option<Attacker> = None;
    while !p.at_end() {
        match p.peek()? {
            Token::Component => {
                if component.is_some() {
                    return Err(p.invalid("duplicate component block"));
                }
                component = Some(p.component()?);
            }
            Token::Attacker => {
                if attacker.is_some() {
                    return Err(p.invalid("duplicate attacker block"));
                }
                attacker = Some(p.attacker()?);
            }
            other => {
                return Err(p.syntax(format!(
                    "expected \"component\" or \"attacker\", found {other}"
                )))
            }
        }
    }
    match (attacker, component) {
        (Some(a), Some(c)) => Ok(Program::Whole(WholeProgram::new(a, c))),
        (Some(a), None) => Ok(Program::Attacker(a)),
        (None, Some(c)) => Ok(Program::Component(c)),
        (None, None) => Err(ParseError::Eof {
            expected: "a component or attacker block".into(),
        }),
    }
}

/// Parse a file that must contain exactly one component.
pub fn parse_component(src: &str) -> Result<Component, ParseError> {
    match parse_program(src)? {
        Program::Component(c) => Ok(c),
        _ => Err(ParseError::Invalid {
            line: 1,
            message: "expected a file containing exactly one component block".into(),
        }),
    }
}

/// Parse a file that must contain exactly one attacker.
pub fn parse_attacker(src: &str) -> Result<Attacker, ParseError> {
    match parse_program(src)? {
        Program::Attacker(a) => Ok(a),
        _ => Err(ParseError::Invalid {
            line: 1,
            message: "expected a file containing exactly one attacker block".into(),
        }),
    }
}

struct Parser {
    tokens: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn line(&self) -> u32 {
        self.tokens
            .get(self.pos.min(self.tokens.len().saturating_sub(1)))
            .map(|s| s.line)
            .unwrap_or(0)
    }

    fn peek(&self) -> Result<&Token, ParseError> {
        self.tokens
            .get(self.pos)
            .map(|s| &s.token)
            .ok_or(ParseError::Eof {
                expected: "more input".into(),
            })
    }

    fn peek2(&self) -> Option<&Token> {
        self.tokens.get(self.pos + 1).map(|s| &s.token)
    }

    fn next(&mut self) -> Result<Token, ParseError> {
        let t = self
            .tokens
            .get(self.pos)
            .map(|s| s.token.clone())
            .ok_or(ParseError::Eof {
                expected: "more input".into(),
            })?;
        self.pos += 1;
        Ok(t)
    }

    fn expect(&mut self, want: Token) -> Result<(), ParseError> {
        let line = self.line();
        let got = self.next().map_err(|_| ParseError::Eof {
            expected: format!("{want}"),
        })?;
        if got == want {
            Ok(())
        } else {
            Err(ParseError::Syntax {
                line,
                message: format!("expected {want}, found {got}"),
            })
        }
    }

    fn eat(&mut self, want: &Token) -> bool {
        if self.tokens.get(self.pos).map(|s| &s.token) == Some(want) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn syntax(&self, message: String) -> ParseError {
        ParseError::Syntax {
            line: self.line(),
            message,
        }
    }

    fn invalid(&self, message: &str) -> ParseError {
        ParseError::Invalid {
            line: self.line(),
            message: message.into(),
        }
    }

    fn ident(&mut self) -> Result<Ident, ParseError> {
        let line = self.line();
        match self.next()? {
            Token::Ident(s) => Ok(s),
            other => Err(ParseError::Syntax {
                line,
                message: format!("expected an identifier, found {other}"),
            }),
        }
    }

    fn nat(&mut self) -> Result<u64, ParseError> {
        let line = self.line();
        match self.next()? {
            Token::Nat(n) => Ok(n),
            other => Err(ParseError::Syntax {
                line,
                message: format!("expected a number, found {other}"),
            }),
        }
    }

    // --- top-level blocks -------------------------------------------------

    fn component(&mut self) -> Result<Component, ParseError> {
        self.expect(Token::Component)?;
        self.expect(Token::LBrace)?;
        let mut privates = Vec::new();
        if self.eat(&Token::Private) {
            self.expect(Token::LBrace)?;
            while !self.eat(&Token::RBrace) {
                let decl = self.heap_decl(Taint::U)?;
                if decl.addr >= 0 {
                    return Err(self.invalid(&format!(
                        "component private heap addresses must be negative (got {})",
                        decl.addr
                    )));
                }
                privates.push(decl);
            }
        }
        let mut imports = Vec::new();
        while self.eat(&Token::Import) {
            imports.push(self.ident()?);
            self.expect(Token::Semi)?;
        }
        let mut fns = Vec::new();
        while !self.eat(&Token::RBrace) {
            fns.push(self.fn_def()?);
        }
        let c = Component {
            privates,
            imports,
            fns,
        };
        c.validate()
            .map_err(|e| self.invalid(&format!("invalid component: {e}")))?;
        Ok(c)
    }

    fn attacker(&mut self) -> Result<Attacker, ParseError> {
        self.expect(Token::Attacker)?;
        self.expect(Token::LBrace)?;
        let mut publics = Vec::new();
        if self.eat(&Token::Public) {
            self.expect(Token::LBrace)?;
            while !self.eat(&Token::RBrace) {
                let decl = self.heap_decl(Taint::S)?;
                if decl.addr < 0 {
                    return Err(self.invalid(&format!(
                        "attacker public heap addresses must be non-negative (got {})",
                        decl.addr
                    )));
                }
                if decl.taint != Taint::S {
                    return Err(self.invalid("attacker public heap entries must be tainted S"));
                }
                publics.push(decl);
            }
        }
        let mut fns = Vec::new();
        while !self.eat(&Token::RBrace) {
            fns.push(self.fn_def()?);
        }
        Ok(Attacker { publics, fns })
    }

    fn heap_decl(&mut self, default_taint: Taint) -> Result<HeapDecl, ParseError> {
        let negative = self.eat(&Token::Minus);
        let magnitude = self.nat()?;
        let addr = if negative {
            -(i64::try_from(magnitude).map_err(|_| self.invalid("heap address out of range"))?)
        } else {
            i64::try_from(magnitude).map_err(|_| self.invalid("heap address out of range"))?
        };
        self.expect(Token::Assign)?;
        let value = self.nat()?;
        let taint = if self.eat(&Token::Colon) {
            let line = self.line();
            match self.next()? {
                Token::Ident(s) if s == "S" => Taint::S,
                Token::Ident(s) if s == "U" => Taint::U,
                other => {
                    return Err(ParseError::Syntax {
                        line,
                        message: format!("expected taint S or U, found {other}"),
                    })
                }
            }
        } else {
            default_taint
        };
        self.expect(Token::Semi)?;
        Ok(HeapDecl { addr, value, taint })
    }

    fn fn_def(&mut self) -> Result<FnDef, ParseError> {
        self.expect(Token::Fn)?;
        let name = self.ident()?;
        self.expect(Token::LParen)?;
        let param = self.ident()?;
        self.expect(Token::RParen)?;
        self.expect(Token::LBrace)?;
        let body = self.block()?;
        self.expect(Token::RBrace)?;
        check_ret_positions(&body, true).map_err(|msg| self.invalid(&msg))?;
        Ok(FnDef { name, param, body })
    }

    // --- statements --------------------------------------------------------

    /// Parse a `;`-separated statement block up to (not consuming) `}` / EOF.
    fn block(&mut self) -> Result<Stmt, ParseError> {
        let mut units = Vec::new();
        loop {
            if self.block_ended() {
                break;
            }
            let unit = self.unit()?;
            let is_binder = matches!(
                unit,
                Stmt::Let(..) | Stmt::LetRead(..) | Stmt::LetReadP(..) | Stmt::CMov(..)
            );
            units.push(unit);
            if is_binder {
                // The binder consumed the rest of the block as its body.
                break;
            }
            if !self.eat(&Token::Semi) {
                break;
            }
        }
        if units.is_empty() {
            return Err(self.syntax("expected a statement".into()));
        }
        Ok(Stmt::seq_all(units))
    }

    fn block_ended(&self) -> bool {
        self.at_end() || matches!(self.tokens.get(self.pos).map(|s| &s.token), Some(Token::RBrace))
    }

    fn unit(&mut self) -> Result<Stmt, ParseError> {
        match self.peek()? {
            Token::Skip => {
                self.next()?;
                Ok(Stmt::Skip)
            }
            Token::Lfence => {
                self.next()?;
                Ok(Stmt::Lfence)
            }
            Token::Ret => {
                self.next()?;
                Ok(Stmt::Ret)
            }
            Token::If0 => {
                self.next()?;
                let guard = self.expr()?;
                self.expect(Token::LBrace)?;
                let then_branch = self.block()?;
                self.expect(Token::RBrace)?;
                self.expect(Token::Else)?;
                self.expect(Token::LBrace)?;
                let else_branch = self.block()?;
                self.expect(Token::RBrace)?;
                Ok(Stmt::IfZ(
                    guard,
                    Box::new(then_branch),
                    Box::new(else_branch),
                ))
            }
            Token::Call => {
                self.next()?;
                let f = self.ident()?;
                let arg = self.expr()?;
                Ok(Stmt::Call(f, arg))
            }
            Token::Write => {
                self.next()?;
                self.expect(Token::LParen)?;
                let addr = self.expr()?;
                self.expect(Token::Comma)?;
                let value = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(Stmt::Write(addr, value))
            }
            Token::WriteP => {
                self.next()?;
                self.expect(Token::LParen)?;
                let addr = self.expr()?;
                self.expect(Token::Comma)?;
                let value = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(Stmt::WriteP(addr, value))
            }
            Token::Let => {
                self.next()?;
                let x = self.ident()?;
                self.expect(Token::Assign)?;
                match self.peek()? {
                    Token::Read if self.peek2() == Some(&Token::LParen) => {
                        self.next()?;
                        self.expect(Token::LParen)?;
                        let addr = self.expr()?;
                        self.expect(Token::RParen)?;
                        self.expect(Token::In)?;
                        let body = self.block()?;
                        Ok(Stmt::LetRead(x, addr, Box::new(body)))
                    }
                    Token::ReadP if self.peek2() == Some(&Token::LParen) => {
                        self.next()?;
                        self.expect(Token::LParen)?;
                        let addr = self.expr()?;
                        self.expect(Token::RParen)?;
                        self.expect(Token::In)?;
                        let body = self.block()?;
                        Ok(Stmt::LetReadP(x, addr, Box::new(body)))
                    }
                    _ => {
                        let e = self.expr()?;
                        self.expect(Token::In)?;
                        let body = self.block()?;
                        Ok(Stmt::Let(x, e, Box::new(body)))
                    }
                }
            }
            Token::CMov => {
                self.next()?;
                let x = self.ident()?;
                self.expect(Token::Comma)?;
                let e = self.expr()?;
                self.expect(Token::If0)?;
                let guard = self.expr()?;
                self.expect(Token::In)?;
                let body = self.block()?;
                Ok(Stmt::CMov(x, e, guard, Box::new(body)))
            }
            other => Err(self.syntax(format!("expected a statement, found {other}"))),
        }
    }

    // --- expressions --------------------------------------------------------

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.or_expr()
    }

    fn or_expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.cmp_expr()?;
        while self.eat(&Token::Or) {
            let rhs = self.cmp_expr()?;
            lhs = Expr::bin(BinOp::Or, lhs, rhs);
        }
        Ok(lhs)
    }

    fn cmp_expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.add_expr()?;
        loop {
            let op = match self.peek().ok() {
                Some(Token::Lt) => BinOp::Lt,
                Some(Token::Gt) => BinOp::Gt,
                Some(Token::EqEq) => BinOp::Eq,
                _ => break,
            };
            self.next()?;
            let rhs = self.add_expr()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn add_expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.mul_expr()?;
        loop {
            let op = match self.peek().ok() {
                Some(Token::Plus) => BinOp::Add,
                Some(Token::Minus) => BinOp::Sub,
                _ => break,
            };
            self.next()?;
            let rhs = self.mul_expr()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn mul_expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.atom()?;
        while self.eat(&Token::Star) {
            let rhs = self.atom()?;
            lhs = Expr::bin(BinOp::Mul, lhs, rhs);
        }
        Ok(lhs)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek()? {
            Token::Nat(_) => {
                let n = self.nat()?;
                Ok(Expr::Nat(n))
            }
            Token::Ident(_) => {
                let x = self.ident()?;
                Ok(Expr::Var(x))
            }
            Token::Not => {
                self.next()?;
                self.expect(Token::LParen)?;
                let e = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(Expr::not(e))
            }
            Token::LParen => {
                self.next()?;
                let e = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(e)
            }
            other => Err(self.syntax(format!("expected an expression, found {other}"))),
        }
    }
}

/// `ret` may only occur in tail position of a function body: as the last
/// unit of the top-level block, possibly under trailing binder bodies,
/// never inside an `if0` branch.
fn check_ret_positions(s: &Stmt, tail: bool) -> Result<(), String> {
    match s {
        Stmt::Ret => {
            if tail {
                Ok(())
            } else {
                Err("ret may only appear as the final statement of a function body".into())
            }
        }
        Stmt::Seq(a, b) => {
            check_ret_positions(a, false)?;
            check_ret_positions(b, tail)
        }
        Stmt::Let(_, _, body)
        | Stmt::LetRead(_, _, body)
        | Stmt::LetReadP(_, _, body)
        | Stmt::CMov(_, _, _, body) => check_ret_positions(body, tail),
        Stmt::IfZ(_, a, b) => {
            check_ret_positions(a, false)?;
            check_ret_positions(b, false)
        }
        Stmt::Skip
        | Stmt::Call(..)
        | Stmt::Write(..)
        | Stmt::WriteP(..)
        | Stmt::Lfence => Ok(()),
    }
}
