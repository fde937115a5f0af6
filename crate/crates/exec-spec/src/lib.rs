//! Speculative execution with an always-mispredict branch discipline.
//!
//! A speculative state is a stack of *instances*. Each instance is a full
//! non-speculative machine configuration (frames and heap) plus two pieces
//! of bookkeeping:
//!
//! - a *speculation window*: how many more steps the instance may run
//!   before it is rolled back (`None` means unbounded — only the bottom,
//!   architectural instance is unbounded);
//! - a *pc taint*: `S` for the architectural instance, `U` for every
//!   mispredicted instance. Emitted labels are attenuated with the pc of
//!   the instance that performed the step, so architectural actions are
//!   always `S`-labelled and only speculation can surface `U` labels.
//!
//! Stepping always runs the top (innermost) instance:
//!
//! - if its window is exhausted, it is popped and `rollback` is emitted;
//! - when component code branches, the *correct* branch continues in the
//!   current instance (which emits the branch label) and a mispredicted
//!   instance executing the *wrong* branch with the same continuation is
//!   pushed on top with window `min(ω, remaining window of the parent)`;
//! - attacker-side branches do not speculate: the attacker models code the
//!   adversary controls, and mispredictions there add no adversary power;
//! - `lfence` forces the executing instance's window shut, so a
//!   mispredicted instance rolls back on its next step (an architectural
//!   `lfence` is a no-op: the unbounded window stays unbounded);
//! - an instance that terminates or gets stuck above the bottom rolls
//!   back exactly like window exhaustion: mispredicted execution never
//!   commits, and its dead end is invisible apart from the rollback.
//!
//! Rollback steps cost no budget; every other step costs one unit.

use exec_nonspec::{initial_config, keep_action, step, NSConfig, StepOutcome, StuckReason};
pub use exec_nonspec::{RunResult, RunStatus};
use lang_core::{Mode, Taint, WholeProgram};
use taint::attenuate;
use trace_model::{Action, TaintedAction};

/// Default speculation window.
pub const DEFAULT_OMEGA: u64 = 16;

/// One level of the speculation stack.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub cfg: NSConfig,
    /// Steps left before forced rollback; `None` is unbounded (bottom only).
    pub window: Option<u64>,
    /// Pc taint: `S` architectural, `U` mispredicted.
    pub pc: Taint,
}

/// Speculative machine state: a non-empty stack of instances, innermost
/// (most speculative) last.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecState {
    pub instances: Vec<Instance>,
}

impl SpecState {
    pub fn depth(&self) -> usize {
        self.instances.len()
    }

    pub fn top(&self) -> &Instance {
        self.instances.last().expect("speculation stack is non-empty")
    }
}

/// The architectural starting state over the program's declared heap.
pub fn initial_spec_state(w: &WholeProgram) -> SpecState {
    SpecState {
        instances: vec![Instance {
            cfg: initial_config(w),
            window: None,
            pc: Taint::S,
        }],
    }
}

/// Result of one speculative step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpecOutcome {
    Stepped {
        next: SpecState,
        /// Emitted label, already attenuated with the stepping instance's
        /// pc taint.
        emitted: Option<TaintedAction>,
        /// Budget cost: `0` for rollbacks, `1` otherwise.
        cost: u64,
    },
    /// The architectural instance finished.
    Terminal,
    /// The architectural instance is stuck (every mispredicted instance
    /// above it has already rolled back).
    Stuck(StuckReason),
}

fn rollback(state: &SpecState) -> SpecOutcome {
    let mut instances = state.instances.clone();
    instances.pop();
    SpecOutcome::Stepped {
        next: SpecState { instances },
        emitted: Some(TaintedAction::new(Action::Rollback, Taint::S)),
        cost: 0,
    }
}

/// Perform one speculative step under window bound `omega`.
pub fn spec_step(w: &WholeProgram, state: &SpecState, mode: Mode, omega: u64) -> SpecOutcome {
    let depth = state.depth();
    let top = state.top();

    // Window exhausted: the mispredicted instance is squashed before it
    // can take another step. (The bottom instance never has a window.)
    if depth > 1 && top.window == Some(0) {
        return rollback(state);
    }

    match step(w, &top.cfg, mode, top.pc) {
        StepOutcome::Terminal => {
            if depth == 1 {
                SpecOutcome::Terminal
            } else {
                rollback(state)
            }
        }
        StepOutcome::Stuck(reason) => {
            if depth == 1 {
                SpecOutcome::Stuck(reason)
            } else {
                rollback(state)
            }
        }
        StepOutcome::Stepped {
            next,
            emitted,
            wrong_branch,
            fence,
        } => {
            let mut instances = state.instances.clone();
            let top = instances.last_mut().expect("instance");
            top.cfg = next;
            // Every non-rollback step spends one unit of the window.
            if let Some(n) = &mut top.window {
                *n = n.saturating_sub(1);
            }
            // A fence forces the window shut; the unbounded architectural
            // window stays unbounded.
            if fence && top.window.is_some() {
                top.window = Some(0);
            }
            let label = emitted.map(|(a, raw)| TaintedAction::new(a, attenuate(raw, top.pc)));
            if let Some(wrong_cfg) = wrong_branch {
                // A nested misprediction cannot outlive its parent: its
                // window is capped by what the parent has left.
                let j = top.window.unwrap_or(omega).min(omega);
                instances.push(Instance {
                    cfg: wrong_cfg,
                    window: Some(j),
                    pc: Taint::U,
                });
            }
            SpecOutcome::Stepped {
                next: SpecState { instances },
                emitted: label,
                cost: 1,
            }
        }
    }
}

/// Run the linked program speculatively and collect its filtered trace.
pub fn run_spec_trace(w: &WholeProgram, mode: Mode, omega: u64, budget: u64) -> RunResult {
    let mut state = initial_spec_state(w);
    let mut trace = Vec::new();
    let mut remaining = budget;
    loop {
        let emitting_func = state.top().cfg.frames.last().expect("frame").func.clone();
        match spec_step(w, &state, mode, omega) {
            SpecOutcome::Terminal => {
                return RunResult {
                    trace,
                    status: RunStatus::Terminated,
                }
            }
            SpecOutcome::Stuck(reason) => {
                return RunResult {
                    trace,
                    status: RunStatus::Stuck(reason),
                }
            }
            SpecOutcome::Stepped {
                next,
                emitted,
                cost,
            } => {
                if cost > remaining {
                    return RunResult {
                        trace,
                        status: RunStatus::BudgetExhausted,
                    };
                }
                remaining -= cost;
                if let Some(ta) = emitted {
                    if keep_action(w, &emitting_func, &ta.action) {
                        trace.push(ta);
                    }
                }
                state = next;
            }
        }
    }
}
