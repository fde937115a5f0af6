use crate::action::{Action, TaintedAction, Trace};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MalformedTrace {
    #[error("rollback at position {index} closes no open branch")]
    RollbackAtDepthZero { index: usize },
}

/// Removes every mis-speculated segment from a trace: a branch observation
/// that is later closed by a rollback opens a segment, everything strictly
/// between them (including the rollback itself and any nested segments) is
/// dropped, and the opening branch is kept. Branch observations that no
/// rollback ever closes are ordinary actions — a trace with no rollback
/// projects to itself. A rollback with no open branch to close is malformed.
pub fn nonspec_projection(trace: &[TaintedAction]) -> Result<Trace, MalformedTrace> {
    // First pass: bracket matching. A rollback always closes the most recent
    // still-open branch, so the matched pairs are properly nested and every
    // branch inside a matched segment is itself matched.
    let mut open: Vec<usize> = Vec::new();
    let mut matched = vec![false; trace.len()];
    for (i, a) in trace.iter().enumerate() {
        match a.action {
            Action::Branch { .. } => open.push(i),
            Action::Rollback => match open.pop() {
                Some(j) => matched[j] = true,
                None => return Err(MalformedTrace::RollbackAtDepthZero { index: i }),
            },
            _ => {}
        }
    }

    // Second pass: depth-counting filter over the matched brackets.
    let mut out = Vec::new();
    let mut depth: usize = 0;
    for (i, a) in trace.iter().enumerate() {
        if depth > 0 {
            match a.action {
                Action::Branch { .. } => depth += 1,
                Action::Rollback => depth -= 1,
                _ => {}
            }
            continue;
        }
        match a.action {
            Action::Branch { .. } if matched[i] => {
                out.push(a.clone());
                depth = 1;
            }
            _ => out.push(a.clone()),
        }
    }
    Ok(out)
}
