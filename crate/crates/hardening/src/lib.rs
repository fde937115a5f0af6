//! Compiler passes that harden components against speculative leaks.
//!
//! Every pass maps a [`Component`] to a [`Component`] in the same surface
//! grammar and changes only its speculative behavior; architectural runs
//! are preserved (up to the bookkeeping described below). The passes:
//!
//! - [`Pass::Identity`] — no change; the baseline for relation checks.
//! - [`Pass::LfenceICC`] — a fence at the head of both branches of every
//!   `if0`, so any mis-speculated branch rolls back before doing work.
//! - [`Pass::SlhWeak`] — load hardening with the mis-speculation predicate
//!   kept in private cell `-1` (the declared private heap shifts down one
//!   cell to make room, and private address expressions gain `+1`).
//!   Branch guards, call arguments and store operands are masked to `0`
//!   while speculating; loads are masked on their *output*, so a load's
//!   address can still leak.
//! - [`Pass::SslhStrong`] — as [`Pass::SlhWeak`] but loads are masked on
//!   their *input*: the address itself is forced to `0` while speculating,
//!   which also kills address leaks.
//! - [`Pass::NislhWeak`] — non-interprocedural variant: the predicate
//!   lives in a local `$pr` initialised at function entry, an `lfence`
//!   opens every function (blocking speculation from crossing calls), and
//!   only private-load outputs are masked.
//! - [`Pass::UnsafeSlh`] — [`Pass::NislhWeak`] without the entry fence;
//!   deliberately unsound across function boundaries (a caller can
//!   speculate into a callee whose fresh `$pr = 1` claims architectural
//!   execution). Kept as an explicit pass so the verdict table can compute
//!   its row.
//! - [`Pass::MsvcModel`] — a behavioral model of a pattern-matching
//!   mitigation: a branch body gets a fence only when a load result
//!   syntactically flows into a later memory address in the same body, so
//!   leaks through control flow or hoisted loads stay unfenced.
//!
//! Compiler-generated temporaries use a reserved `$` prefix. Inputs that
//! already contain `$`-identifiers are rejected ([`CompileError`]), which
//! both guarantees freshness and turns accidental double application into
//! an error instead of silent corruption.

use lang_core::{Component, FnDef, Ident, Stmt};
use security::PrivDomain;
use trace_model::{Action, TaintedAction, Trace};

mod fences;
mod nislh;
mod slh;

pub use fences::dataflow_reaches_load;

/// A hardening pass. See the crate docs for what each one does.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pass {
    Identity,
    LfenceICC,
    SlhWeak,
    SslhStrong,
    NislhWeak,
    UnsafeSlh,
    MsvcModel,
}

impl Pass {
    /// All passes, in declaration order.
    pub const ALL: [Pass; 7] = [
        Pass::Identity,
        Pass::LfenceICC,
        Pass::SlhWeak,
        Pass::SslhStrong,
        Pass::NislhWeak,
        Pass::UnsafeSlh,
        Pass::MsvcModel,
    ];

    /// Short name used by the CLI `--pass` flag.
    pub fn cli_name(self) -> &'static str {
        match self {
            Pass::Identity => "id",
            Pass::LfenceICC => "lfence",
            Pass::SlhWeak => "slh",
            Pass::SslhStrong => "sslh",
            Pass::NislhWeak => "nislh",
            Pass::UnsafeSlh => "slh-noint",
            Pass::MsvcModel => "msvc",
        }
    }

    /// Human-readable label used in reports and the verdict table.
    pub fn label(self) -> &'static str {
        match self {
            Pass::Identity => "identity",
            Pass::LfenceICC => "lfence (ICC)",
            Pass::SlhWeak => "SLH (Clang)",
            Pass::SslhStrong => "SSLH",
            Pass::NislhWeak => "NISLH",
            Pass::UnsafeSlh => "SLH-no-interp",
            Pass::MsvcModel => "lfence (MSVC)",
        }
    }

    /// Whether the pass relocates the private heap (one cell down) to
    /// reserve cell `-1` for the predicate bit.
    pub fn shifts_heap(self) -> bool {
        matches!(self, Pass::SlhWeak | Pass::SslhStrong)
    }

    /// Map a private-cell domain through the pass so checks on compiled
    /// code vary the same secrets the source declares. The predicate cell
    /// is never part of the result: it is `S`-tainted bookkeeping, not a
    /// secret.
    pub fn shift_domain(self, dom: &PrivDomain) -> PrivDomain {
        if self.shifts_heap() {
            PrivDomain::new(
                dom.locations.iter().map(|a| a - 1).collect(),
                dom.values.clone(),
            )
        } else {
            dom.clone()
        }
    }

    /// Undo the pass's observable bookkeeping on a trace so it can be
    /// compared against a run of the source component: predicate-cell
    /// accesses (`-1`) disappear and relocated private addresses shift
    /// back up one cell. Identity for passes that don't move the heap.
    pub fn normalize_trace(self, trace: &[TaintedAction]) -> Trace {
        if !self.shifts_heap() {
            return trace.to_vec();
        }
        trace
            .iter()
            .filter_map(|ta| {
                let action = match ta.action {
                    Action::Read { addr: -1, .. } | Action::Write { addr: -1, .. } => return None,
                    Action::Read { addr, value } if addr < -1 => Action::Read {
                        addr: addr + 1,
                        value,
                    },
                    Action::Write { addr, value } if addr < -1 => Action::Write {
                        addr: addr + 1,
                        value,
                    },
                    ref other => other.clone(),
                };
                Some(TaintedAction::new(action, ta.taint))
            })
            .collect()
    }
}

impl std::fmt::Display for Pass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.cli_name())
    }
}

impl std::str::FromStr for Pass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Pass::ALL
            .into_iter()
            .find(|p| p.cli_name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Pass::ALL.iter().map(|p| p.cli_name()).collect();
                format!("unknown pass `{s}` (expected one of {})", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CompileError {
    /// The input already uses a `$`-prefixed identifier, which the passes
    /// reserve for their own temporaries. Also the guard against applying
    /// a pass twice.
    #[error("function `{function}` uses reserved identifier `{ident}`")]
    ReservedNameClash { function: Ident, ident: Ident },
}

/// Apply `pass` to a component. Total on well-formed components that stay
/// clear of the reserved `$` namespace.
pub fn compile(pass: Pass, c: &Component) -> Result<Component, CompileError> {
    reject_reserved_names(c)?;
    Ok(match pass {
        Pass::Identity => c.clone(),
        Pass::LfenceICC => map_bodies(c, fences::fence_both_branches),
        Pass::MsvcModel => map_bodies(c, fences::fence_load_feeding_branches),
        Pass::SlhWeak => slh::compile_slh(c, slh::ReadMask::Output),
        Pass::SslhStrong => slh::compile_slh(c, slh::ReadMask::Input),
        Pass::NislhWeak => nislh::compile_nislh(c, true),
        Pass::UnsafeSlh => nislh::compile_nislh(c, false),
    })
}

fn reject_reserved_names(c: &Component) -> Result<(), CompileError> {
    for f in &c.fns {
        let clash = if f.param.starts_with('$') {
            Some(f.param.clone())
        } else {
            f.body.idents().into_iter().find(|x| x.starts_with('$'))
        };
        if let Some(ident) = clash {
            return Err(CompileError::ReservedNameClash {
                function: f.name.clone(),
                ident,
            });
        }
    }
    Ok(())
}

/// Rewrite every function body, keeping heap and imports. The result is
/// re-normalized so it prints in (and round-trips through) the surface
/// grammar.
fn map_bodies(c: &Component, tx: impl Fn(&Stmt) -> Stmt) -> Component {
    Component {
        privates: c.privates.clone(),
        imports: c.imports.clone(),
        fns: c
            .fns
            .iter()
            .map(|f| FnDef {
                name: f.name.clone(),
                param: f.param.clone(),
                body: tx(&f.body).normalized(),
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_names_roundtrip() {
        for pass in Pass::ALL {
            assert_eq!(pass.cli_name().parse::<Pass>().unwrap(), pass);
        }
        assert!("slhx".parse::<Pass>().is_err());
    }

    #[test]
    fn domain_shift_follows_the_heap_relocation() {
        let dom = PrivDomain::new(vec![-2, -10], vec![0, 1]);
        let shifted = Pass::SlhWeak.shift_domain(&dom);
        assert_eq!(shifted.locations, vec![-11, -3]);
        assert_eq!(shifted.values, vec![0, 1]);
        assert_eq!(Pass::NislhWeak.shift_domain(&dom), dom);
    }

    #[test]
    fn trace_normalization_hides_the_predicate_cell_and_shift() {
        use lang_core::Taint;
        let trace: Trace = vec![
            TaintedAction::new(
                Action::Read {
                    addr: -1,
                    value: None,
                },
                Taint::S,
            ),
            TaintedAction::new(
                Action::Write {
                    addr: -1,
                    value: None,
                },
                Taint::S,
            ),
            TaintedAction::new(
                Action::Read {
                    addr: -3,
                    value: None,
                },
                Taint::S,
            ),
            TaintedAction::new(
                Action::Read {
                    addr: 12,
                    value: Some(0),
                },
                Taint::U,
            ),
        ];
        let norm = Pass::SlhWeak.normalize_trace(&trace);
        assert_eq!(
            trace_model::format_trace(&norm),
            "rd(-2)#S\nrd(12=0)#U\n"
        );
        assert_eq!(Pass::MsvcModel.normalize_trace(&trace), trace);
    }
}
