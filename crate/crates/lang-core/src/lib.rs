//! Core language definitions shared by every other crate in the workspace.
//!
//! One concrete syntax is shared by four language variants: the source
//! languages execute non-speculatively, the target languages additionally
//! mispredict every component branch, and each of those comes in a strong
//! flavour (private reads never expose values in the trace) and a weak
//! flavour (non-speculative private reads expose the value read). The
//! variant split is carried by [`Mode`]; the speculative/non-speculative
//! split lives in the two `exec-*` crates.
//!
//! This crate owns:
//! - the AST ([`ast`]) plus a parser ([`parser`]) and printer ([`printer`])
//!   that round-trip,
//! - tainted heaps ([`heap`]),
//! - program shapes and linking ([`program`]): components, attackers,
//!   whole programs, `plug`, and the initial machine configuration.

pub mod ast;
#[cfg(feature = "testgen")]
pub mod gen;
pub mod heap;
pub mod lexer;
pub mod parser;
pub mod printer;
pub mod program;

pub use ast::{BinOp, Expr, FnDef, HeapDecl, Ident, Stmt};
pub use heap::Heap;
pub use parser::{parse_attacker, parse_component, parse_program, ParseError, Program};
pub use program::{
    is_valid_attacker, plug, Attacker, Component, PlugError, ValidityError, WholeProgram,
    ENTRY_SENTINEL,
};

use std::fmt;
use std::str::FromStr;

/// Security taint: `S` (safe/public) or `U` (unsafe/secret-derived).
///
/// The lattice order is `S ≤ U`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Taint {
    /// Safe: not influenced by private data.
    S,
    /// Unsafe: potentially influenced by private data.
    U,
}

impl fmt::Display for Taint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Taint::S => write!(f, "S"),
            Taint::U => write!(f, "U"),
        }
    }
}

impl FromStr for Taint {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "S" => Ok(Taint::S),
            "U" => Ok(Taint::U),
            other => Err(format!("invalid taint {other:?}: expected \"S\" or \"U\"")),
        }
    }
}

/// Language flavour selector.
///
/// `Strong`: private reads produce value-free `rd(-n)` actions in every
/// context. `Weak`: a *non-speculative* private read produces a
/// value-carrying `rd(-n=v)` action; speculative private reads stay
/// value-free.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Strong,
    Weak,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Strong => write!(f, "strong"),
            Mode::Weak => write!(f, "weak"),
        }
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "strong" => Ok(Mode::Strong),
            "weak" => Ok(Mode::Weak),
            other => Err(format!(
                "invalid mode {other:?}: expected \"strong\" or \"weak\""
            )),
        }
    }
}
