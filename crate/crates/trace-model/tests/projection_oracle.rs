//! Exhaustive cross-check of the projection automaton against an independent
//! brute-force implementation: repeatedly locate the leftmost rollback,
//! delete the segment it closes (keeping but retiring the opening branch),
//! and fail if no open branch precedes it. Every trace over a three-symbol
//! alphabet up to length 8 is checked.

use lang_core::Taint;
use trace_model::{nonspec_projection, Action, TaintedAction};

fn oracle_projection(trace: &[TaintedAction]) -> Result<Vec<TaintedAction>, ()> {
    // `true` marks a branch whose segment was already deleted; it can no
    // longer be closed by a later rollback.
    let mut work: Vec<(TaintedAction, bool)> =
        trace.iter().map(|a| (a.clone(), false)).collect();
    loop {
        let Some(r) = work
            .iter()
            .position(|(a, _)| matches!(a.action, Action::Rollback))
        else {
            break;
        };
        let Some(b) = work[..r]
            .iter()
            .rposition(|(a, closed)| matches!(a.action, Action::Branch { .. }) && !closed)
        else {
            return Err(());
        };
        work[b].1 = true;
        work.drain(b + 1..=r);
    }
    Ok(work.into_iter().map(|(a, _)| a).collect())
}

fn symbol(i: usize) -> TaintedAction {
    match i {
        0 => TaintedAction::new(
            Action::Read {
                addr: 0,
                value: None,
            },
            Taint::S,
        ),
        1 => TaintedAction::new(Action::Branch { value: 1 }, Taint::S),
        _ => TaintedAction::new(Action::Rollback, Taint::S),
    }
}

#[test]
fn automaton_agrees_with_brute_force_oracle_exhaustively() {
    let started = std::time::Instant::now();
    let mut checked = 0u64;
    for len in 0..=8usize {
        let total = 3usize.pow(len as u32);
        for code in 0..total {
            let mut trace = Vec::with_capacity(len);
            let mut c = code;
            for _ in 0..len {
                trace.push(symbol(c % 3));
                c /= 3;
            }
            let fast = nonspec_projection(&trace);
            let slow = oracle_projection(&trace);
            match (&fast, &slow) {
                (Ok(a), Ok(b)) => assert_eq!(a, b, "mismatch on {trace:?}"),
                (Err(_), Err(_)) => {}
                _ => panic!("disagreement on {trace:?}: {fast:?} vs {slow:?}"),
            }
            checked += 1;
        }
    }
    assert_eq!(checked, 9841); // (3^9 - 1) / 2
    assert!(
        started.elapsed().as_secs() < 10,
        "exhaustive oracle check exceeded its time budget"
    );
}

#[test]
fn projection_is_idempotent_and_rollback_free() {
    for len in 0..=8usize {
        let total = 3usize.pow(len as u32);
        for code in 0..total {
            let mut trace = Vec::with_capacity(len);
            let mut c = code;
            for _ in 0..len {
                trace.push(symbol(c % 3));
                c /= 3;
            }
            if let Ok(once) = nonspec_projection(&trace) {
                assert!(!once
                    .iter()
                    .any(|a| matches!(a.action, Action::Rollback)));
                let twice = nonspec_projection(&once).expect("projection output is well-formed");
                assert_eq!(once, twice);
            }
        }
    }
}
