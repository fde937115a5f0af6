//! Speculative safety: no unsafe labels anywhere in the trace.

use crate::verdict::{Verdict, Witness};
use exec_nonspec::{run_trace, RunResult, RunStatus};
use exec_spec::run_spec_trace;
use lang_core::{Mode, Taint, WholeProgram};
use trace_model::TaintedAction;

/// Which semantics to run a program under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Semantics {
    NonSpec,
    Spec { omega: u64 },
}

/// Run the program under the chosen semantics.
pub fn run_with(w: &WholeProgram, sem: Semantics, mode: Mode, budget: u64) -> RunResult {
    match sem {
        Semantics::NonSpec => run_trace(w, mode, budget),
        Semantics::Spec { omega } => run_spec_trace(w, mode, omega, budget),
    }
}

/// A trace is safe when every action is labelled `S`. The witness is the
/// first unsafe action.
pub fn check_ss_trace(trace: &[TaintedAction]) -> Verdict {
    match trace.iter().position(|ta| ta.taint == Taint::U) {
        Some(index) => Verdict::violated(Witness::UnsafeAction {
            trace: trace.to_vec(),
            index,
        }),
        None => Verdict::holds(),
    }
}

/// Run the program and check its trace for unsafe labels.
///
/// An unsafe action in a partial trace is already conclusive — the action
/// was emitted — so `Violated` takes precedence even when the run did not
/// terminate. Otherwise a non-terminated run is `Inconclusive`.
pub fn check_ss_program(w: &WholeProgram, sem: Semantics, mode: Mode, budget: u64) -> Verdict {
    let result = run_with(w, sem, mode, budget);
    let verdict = check_ss_trace(&result.trace);
    match (&verdict.status, &result.status) {
        (crate::Status::Violated, _) => verdict,
        (_, RunStatus::Terminated) => verdict,
        (_, RunStatus::BudgetExhausted) => {
            Verdict::inconclusive("run did not terminate within the step budget")
        }
        (_, RunStatus::Stuck(reason)) => Verdict::inconclusive(format!("run got stuck: {reason}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Status;
    use trace_model::parse_trace;

    #[test]
    fn all_safe_trace_holds() {
        let t = parse_trace("call?(f,1)#S rd(-2)#S ret!#S").unwrap();
        assert_eq!(check_ss_trace(&t).status, Status::Holds);
    }

    #[test]
    fn empty_trace_holds() {
        assert_eq!(check_ss_trace(&[]).status, Status::Holds);
    }

    #[test]
    fn first_unsafe_action_is_the_witness() {
        let t = parse_trace("call?(f,1)#S rd(12=0)#U wr(3=1)#U").unwrap();
        let v = check_ss_trace(&t);
        assert_eq!(v.status, Status::Violated);
        match v.witness {
            Some(Witness::UnsafeAction { index, .. }) => assert_eq!(index, 1),
            other => panic!("unexpected witness {other:?}"),
        }
    }
}
