//! Pairwise and bounded-enumeration non-interference checks.
//!
//! A program satisfies the non-interference property when varying its
//! private heap values never changes more of the trace than it changes of
//! the non-speculative projection: secrets may flow into architectural
//! observations only where the non-speculative semantics already reveals
//! them, and speculation must add nothing on top.

use crate::domain::{base_with_domain, format_assignment, with_private_values, PrivDomain};
use crate::loweq::low_equivalent;
use crate::ss::{run_with, Semantics};
use crate::verdict::{Status, Verdict, Witness};
use exec_nonspec::RunStatus;
use lang_core::{Mode, WholeProgram};
use trace_model::nonspec_projection;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SniError {
    #[error("programs are not low-equivalent")]
    NotLowEquivalent,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SniBoundedError {
    #[error("enumeration of {size} assignments exceeds the cap of {cap}")]
    EnumerationTooLarge { size: u64, cap: u64 },
}

/// Maximum number of private-heap assignments a bounded check enumerates.
pub const ENUMERATION_CAP: u64 = 1 << 16;

/// Compare one low-equivalent pair.
///
/// If the two non-speculative projections already differ, the secrets are
/// distinguishable architecturally and the property holds vacuously for
/// this pair. Otherwise the full traces must be equal, action for action,
/// taints included.
pub fn check_sni_pair(
    w1: &WholeProgram,
    w2: &WholeProgram,
    sem: Semantics,
    mode: Mode,
    budget: u64,
) -> Result<Verdict, SniError> {
    if !low_equivalent(w1, w2) {
        return Err(SniError::NotLowEquivalent);
    }
    let r1 = run_with(w1, sem, mode, budget);
    let r2 = run_with(w2, sem, mode, budget);
    if r1.status != RunStatus::Terminated || r2.status != RunStatus::Terminated {
        return Ok(Verdict::inconclusive(format!(
            "runs did not both terminate ({:?} / {:?})",
            r1.status, r2.status
        )));
    }
    let (Ok(p1), Ok(p2)) = (nonspec_projection(&r1.trace), nonspec_projection(&r2.trace)) else {
        return Ok(Verdict::inconclusive("trace projection failed"));
    };
    if p1 != p2 {
        return Ok(Verdict::holds_note(
            "vacuous: non-speculative projections differ",
        ));
    }
    if r1.trace == r2.trace {
        return Ok(Verdict::holds());
    }
    let index = r1
        .trace
        .iter()
        .zip(&r2.trace)
        .position(|(a, b)| a != b)
        .unwrap_or_else(|| r1.trace.len().min(r2.trace.len()));
    Ok(Verdict::violated(Witness::TraceDivergence {
        base: r1.trace,
        variant: r2.trace,
        index,
    }))
}

fn check_one_assignment(
    base: &WholeProgram,
    dom: &PrivDomain,
    idx: u64,
    sem: Semantics,
    mode: Mode,
    budget: u64,
) -> Verdict {
    let assignment = dom.assignment(idx);
    let variant = with_private_values(base, &assignment);
    let verdict = check_sni_pair(base, &variant, sem, mode, budget)
        .expect("domain variants are low-equivalent by construction");
    match verdict.status {
        Status::Violated => Verdict {
            note: Some(format!(
                "private assignment {}",
                format_assignment(&assignment)
            )),
            ..verdict
        },
        _ => verdict,
    }
}

fn settle(first_violated: Option<Verdict>, first_inconclusive: Option<Verdict>) -> Verdict {
    if let Some(v) = first_violated {
        return v;
    }
    if let Some(v) = first_inconclusive {
        return v;
    }
    Verdict::holds()
}

/// Enumerate every private-heap assignment over `dom` and compare each
/// variant against the base program. The base is the program as given,
/// with all domain locations declared explicitly. Verdicts: `Violated` on
/// the lexicographically first counterexample, `Holds` if every pair holds
/// and every run terminated, `Inconclusive` otherwise.
pub fn check_sni_bounded_seq(
    w: &WholeProgram,
    dom: &PrivDomain,
    sem: Semantics,
    mode: Mode,
    budget: u64,
) -> Result<Verdict, SniBoundedError> {
    let count = checked_count(dom)?;
    let base = base_with_domain(w, dom);
    let mut first_inconclusive = None;
    for idx in 0..count {
        let verdict = check_one_assignment(&base, dom, idx, sem, mode, budget);
        match verdict.status {
            Status::Violated => return Ok(verdict),
            Status::Inconclusive if first_inconclusive.is_none() => {
                first_inconclusive = Some(verdict)
            }
            _ => {}
        }
    }
    Ok(settle(None, first_inconclusive))
}

/// Parallel twin of [`check_sni_bounded_seq`]: assignments are evaluated
/// across workers and the verdict is settled by assignment index, so the
/// result is identical to the sequential scan.
#[cfg(feature = "parallel")]
pub fn check_sni_bounded_par(
    w: &WholeProgram,
    dom: &PrivDomain,
    sem: Semantics,
    mode: Mode,
    budget: u64,
) -> Result<Verdict, SniBoundedError> {
    use rayon::prelude::*;

    let count = checked_count(dom)?;
    let base = base_with_domain(w, dom);
    let verdicts: Vec<Verdict> = (0..count)
        .into_par_iter()
        .map(|idx| check_one_assignment(&base, dom, idx, sem, mode, budget))
        .collect();
    let first_violated = verdicts
        .iter()
        .find(|v| v.status == Status::Violated)
        .cloned();
    let first_inconclusive = verdicts
        .iter()
        .find(|v| v.status == Status::Inconclusive)
        .cloned();
    Ok(settle(first_violated, first_inconclusive))
}

/// Bounded non-interference check; uses the parallel backend when built
/// with the `parallel` feature (the default), the sequential one otherwise.
pub fn check_sni_bounded(
    w: &WholeProgram,
    dom: &PrivDomain,
    sem: Semantics,
    mode: Mode,
    budget: u64,
) -> Result<Verdict, SniBoundedError> {
    #[cfg(feature = "parallel")]
    {
        check_sni_bounded_par(w, dom, sem, mode, budget)
    }
    #[cfg(not(feature = "parallel"))]
    {
        check_sni_bounded_seq(w, dom, sem, mode, budget)
    }
}

fn checked_count(dom: &PrivDomain) -> Result<u64, SniBoundedError> {
    match dom.assignment_count() {
        Some(count) if count <= ENUMERATION_CAP => Ok(count),
        Some(count) => Err(SniBoundedError::EnumerationTooLarge {
            size: count,
            cap: ENUMERATION_CAP,
        }),
        None => Err(SniBoundedError::EnumerationTooLarge {
            size: u64::MAX,
            cap: ENUMERATION_CAP,
        }),
    }
}
