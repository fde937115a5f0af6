//! Non-speculative labelled small-step execution.
//!
//! A machine configuration is a frame stack plus a tainted heap. Each step
//! reduces one redex in the top frame and may emit one raw action (an
//! [`trace_model::Action`] paired with its un-attenuated inner taint).
//! Collectors attenuate that raw taint with the program-counter taint of
//! the context: this crate's [`run_trace`] always attenuates with `S`
//! (non-speculative execution is safe control flow, so every collected
//! label is `S`), while the speculative engine attenuates with the taint
//! of the speculation instance that performed the step.
//!
//! The single-step relation [`step`] is shared with the speculative
//! engine, which is why it takes an explicit `pc` taint: the pc decides
//! the binding taint of weak-mode private reads and whether a weak-mode
//! private read action carries the value read.
//!
//! Calls and returns are classified by which side of the
//! attacker/component boundary they cross:
//!
//! - attacker code calling a component function emits `call?(f,v)`, and
//!   the matching return emits `ret!`;
//! - component code calling one of its declared imports emits `call!(f,v)`,
//!   and the matching return emits `ret?`;
//! - same-side calls and returns are silent.
//!
//! A function returns either through an explicit `ret` or by exhausting
//! its body; both produce the same (possibly silent) return transition.
//! Exhausting the entry frame terminates the machine.

mod eval;
mod machine;
mod run;

pub use eval::{eval_expr, Bindings, UnboundVar};
pub use machine::{initial_config, step, Frame, NSConfig, StepOutcome, StuckReason};
pub use run::{keep_action, run_trace, run_trace_from, RunResult, RunStatus, DEFAULT_BUDGET};
