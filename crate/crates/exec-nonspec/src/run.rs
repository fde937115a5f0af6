//! Whole-program non-speculative runs and trace collection.

use crate::machine::{initial_config, step, NSConfig, StepOutcome, StuckReason};
use lang_core::{Mode, Taint, WholeProgram};
use taint::attenuate;
use trace_model::{Action, TaintedAction, Trace};

/// Default step budget for whole-program runs.
pub const DEFAULT_BUDGET: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunStatus {
    Terminated,
    BudgetExhausted,
    Stuck(StuckReason),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunResult {
    pub trace: Trace,
    pub status: RunStatus,
}

/// Trace filtering: microarchitectural actions (reads, writes, branches)
/// performed by attacker-side code are not observations — the attacker
/// already knows what its own code does — so they are dropped. Boundary
/// calls and returns are always kept, as are rollbacks.
pub fn keep_action(w: &WholeProgram, emitting_func: &str, action: &Action) -> bool {
    match action {
        Action::Read { .. } | Action::Write { .. } | Action::Branch { .. } => {
            !w.is_attacker_side(emitting_func)
        }
        Action::CallIn { .. }
        | Action::CallOut { .. }
        | Action::RetOut
        | Action::RetBack
        | Action::Rollback => true,
    }
}

/// Run the linked program non-speculatively for at most `budget` steps and
/// collect its trace. Every emitted label is attenuated with the safe pc,
/// so non-speculative traces are entirely `S`-labelled.
pub fn run_trace(w: &WholeProgram, mode: Mode, budget: u64) -> RunResult {
    let (trace, status) = run_trace_from(w, initial_config(w), mode, budget);
    RunResult { trace, status }
}

/// Like [`run_trace`] but starting from an explicit configuration.
pub fn run_trace_from(
    w: &WholeProgram,
    mut cfg: NSConfig,
    mode: Mode,
    budget: u64,
) -> (Trace, RunStatus) {
    let mut trace = Vec::new();
    for _ in 0..budget {
        let emitting_func = cfg.frames.last().expect("frame").func.clone();
        match step(w, &cfg, mode, Taint::S) {
            StepOutcome::Terminal => return (trace, RunStatus::Terminated),
            StepOutcome::Stuck(reason) => return (trace, RunStatus::Stuck(reason)),
            StepOutcome::Stepped { next, emitted, .. } => {
                if let Some((action, raw)) = emitted {
                    if keep_action(w, &emitting_func, &action) {
                        trace.push(TaintedAction::new(action, attenuate(raw, Taint::S)));
                    }
                }
                cfg = next;
            }
        }
    }
    (trace, RunStatus::BudgetExhausted)
}
