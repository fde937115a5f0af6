//! Source-level reconstruction of target attackers, and the per-run trace
//! relation it underwrites.
//!
//! A hardened component faces attackers written in the target syntax, which
//! has two constructs the source syntax lacks: `lfence` and `cmov`. Both are
//! architecturally expressible at source level — a fence is a no-op and a
//! conditional move is a branch around a binding — so every target attacker
//! can be rewritten, shape-for-shape, into a source attacker with the same
//! architectural behavior ([`backtranslate_attacker`]).
//!
//! That rewrite makes a per-run security statement checkable: run the
//! hardened component under its target attacker *speculatively*, run the
//! original component under the backtranslated attacker *architecturally*,
//! and require the source trace to embed into the target trace with every
//! unmatched target action safe ([`rssc_witness`]). A hardening pass that
//! keeps this relation for all attackers never lets speculation reveal more
//! than some architectural source run already reveals.

use hardening::{compile, CompileError, Pass};
use lang_core::{
    plug, Attacker, Component, FnDef, Mode, PlugError, Stmt, ValidityError, WholeProgram,
};
use security::Verdict;
use trace_model::{format_trace, trace_related_witness, RelationFailure, Trace};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BacktranslateError {
    #[error("attacker is not valid: {0}")]
    InvalidAttacker(ValidityError),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error("attacker and component do not compose: {0}")]
    Plug(#[from] PlugError),
}

fn translate_stmt(s: &Stmt) -> Stmt {
    match s {
        // A fence constrains speculation only; architecturally it is a no-op.
        Stmt::Lfence => Stmt::Skip,
        // A conditional move is a branch around a binding. Bindings are
        // function-scoped, so hoisting the binding out of the conditional's
        // body keeps it visible to the translated continuation.
        Stmt::CMov(x, value, guard, body) => Stmt::seq(
            Stmt::IfZ(
                guard.clone(),
                Box::new(Stmt::Let(x.clone(), value.clone(), Box::new(Stmt::Skip))),
                Box::new(Stmt::Skip),
            ),
            translate_stmt(body),
        ),
        Stmt::Seq(a, b) => Stmt::seq(translate_stmt(a), translate_stmt(b)),
        Stmt::Let(x, e, body) => {
            Stmt::Let(x.clone(), e.clone(), Box::new(translate_stmt(body)))
        }
        Stmt::IfZ(e, a, b) => Stmt::IfZ(
            e.clone(),
            Box::new(translate_stmt(a)),
            Box::new(translate_stmt(b)),
        ),
        Stmt::LetRead(x, e, body) => {
            Stmt::LetRead(x.clone(), e.clone(), Box::new(translate_stmt(body)))
        }
        Stmt::LetReadP(x, e, body) => {
            Stmt::LetReadP(x.clone(), e.clone(), Box::new(translate_stmt(body)))
        }
        Stmt::Skip
        | Stmt::Call(_, _)
        | Stmt::Write(_, _)
        | Stmt::WriteP(_, _)
        | Stmt::Ret => s.clone(),
    }
}

/// Rewrites a target-syntax attacker into a source-syntax attacker with the
/// same architectural behavior: `lfence` becomes `skip`, `cmov` becomes a
/// branch around a binding, everything else keeps its shape. Heap
/// declarations are copied unchanged.
pub fn backtranslate_attacker(a: &Attacker) -> Result<Attacker, BacktranslateError> {
    a.validate().map_err(BacktranslateError::InvalidAttacker)?;
    Ok(Attacker {
        publics: a.publics.clone(),
        fns: a
            .fns
            .iter()
            .map(|f| FnDef {
                name: f.name.clone(),
                param: f.param.clone(),
                body: translate_stmt(&f.body),
            })
            .collect(),
    })
}

/// The two whole programs whose runs [`rssc_witness`] compares.
pub fn witness_programs(
    p: &Component,
    a: &Attacker,
    pass: Pass,
) -> Result<(WholeProgram, WholeProgram), BacktranslateError> {
    let source = plug(backtranslate_attacker(a)?, p.clone())?;
    let target = plug(a.clone(), compile(pass, p)?)?;
    Ok((target, source))
}

fn run_status_note(which: &str, status: &exec_nonspec::RunStatus) -> Option<String> {
    use exec_nonspec::RunStatus;
    match status {
        RunStatus::Terminated => None,
        RunStatus::BudgetExhausted => Some(format!("{which} run exhausted its step budget")),
        RunStatus::Stuck(r) => Some(format!("{which} run got stuck: {r:?}")),
    }
}

/// Checks one compilation instance of relative secure compilation: the
/// speculative run of the hardened component under its target attacker must
/// be explained, action for action, by the architectural run of the original
/// component under the backtranslated attacker. Target actions without a
/// source counterpart must be safe; the pass's address normalization (heap
/// shift and predicate-cell traffic) is applied before matching.
pub fn rssc_witness(
    p: &Component,
    a: &Attacker,
    pass: Pass,
    mode: Mode,
    omega: u64,
    budget: u64,
) -> Result<Verdict, BacktranslateError> {
    let (target_w, source_w) = witness_programs(p, a, pass)?;
    let target = exec_spec::run_spec_trace(&target_w, mode, omega, budget);
    let source = exec_nonspec::run_trace(&source_w, mode, budget);
    if let Some(note) = run_status_note("target", &target.status)
        .or_else(|| run_status_note("source", &source.status))
    {
        return Ok(Verdict::inconclusive(note));
    }
    let normalized: Trace = pass.normalize_trace(&target.trace);
    Ok(relate(&source.trace, &normalized))
}

/// Relates an architectural source trace to an (already normalized)
/// speculative target trace, reporting the first relation failure.
pub fn relate(source: &Trace, target: &Trace) -> Verdict {
    match trace_related_witness(source, target) {
        Ok(()) => Verdict::holds_note(format!(
            "source run ({} actions) explains target run ({} actions)",
            source.len(),
            target.len()
        )),
        Err(RelationFailure::UnmatchedUnsafeTarget { tgt_index }) => Verdict::violated_note(
            security::Witness::UnsafeAction {
                trace: target.clone(),
                index: tgt_index,
            },
            format!(
                "target action {} has no source counterpart and is not safe",
                target[tgt_index]
            ),
        ),
        Err(RelationFailure::SourceRemainder { src_index }) => Verdict::violated_note(
            security::Witness::TraceDivergence {
                base: source.clone(),
                variant: target.clone(),
                index: src_index,
            },
            format!(
                "source run continues past the related target prefix at {}; source: {}",
                source[src_index],
                format_trace(source).trim_end()
            ),
        ),
    }
}
