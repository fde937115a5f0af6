//! Robust checks: a property quantified over a supplied attacker set.

use crate::domain::PrivDomain;
use crate::sni::{check_sni_bounded_seq, SniBoundedError};
use crate::ss::{check_ss_program, Semantics};
use crate::verdict::{Status, Verdict, Witness};
use lang_core::{plug, Attacker, Component, Mode, WholeProgram};

/// Which property to check per attacker.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RobustProperty {
    Ss,
    Sni(PrivDomain),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RobustError {
    #[error("attacker {index} is invalid: {reason}")]
    InvalidAttacker { index: usize, reason: String },
    #[error(transparent)]
    Enumeration(#[from] SniBoundedError),
}

/// Per-attacker verdict, in supplied order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttackerVerdict {
    pub index: usize,
    pub verdict: Verdict,
}

fn link_all(
    component: &Component,
    attackers: &[Attacker],
) -> Result<Vec<WholeProgram>, RobustError> {
    attackers
        .iter()
        .enumerate()
        .map(|(index, a)| {
            plug(a.clone(), component.clone()).map_err(|e| RobustError::InvalidAttacker {
                index,
                reason: e.to_string(),
            })
        })
        .collect()
}

fn check_one(
    w: &WholeProgram,
    property: &RobustProperty,
    sem: Semantics,
    mode: Mode,
    budget: u64,
) -> Result<Verdict, RobustError> {
    match property {
        RobustProperty::Ss => Ok(check_ss_program(w, sem, mode, budget)),
        // The per-attacker work unit stays sequential; parallel robust
        // checks distribute over attackers.
        RobustProperty::Sni(dom) => Ok(check_sni_bounded_seq(w, dom, sem, mode, budget)?),
    }
}

/// Check the property for every attacker; verdicts come back in supplied
/// order regardless of backend.
pub fn check_robust_detailed_seq(
    component: &Component,
    attackers: &[Attacker],
    property: &RobustProperty,
    sem: Semantics,
    mode: Mode,
    budget: u64,
) -> Result<Vec<AttackerVerdict>, RobustError> {
    let linked = link_all(component, attackers)?;
    linked
        .iter()
        .enumerate()
        .map(|(index, w)| {
            Ok(AttackerVerdict {
                index,
                verdict: check_one(w, property, sem, mode, budget)?,
            })
        })
        .collect()
}

/// Parallel twin of [`check_robust_detailed_seq`], distributing attackers
/// across workers.
#[cfg(feature = "parallel")]
pub fn check_robust_detailed_par(
    component: &Component,
    attackers: &[Attacker],
    property: &RobustProperty,
    sem: Semantics,
    mode: Mode,
    budget: u64,
) -> Result<Vec<AttackerVerdict>, RobustError> {
    use rayon::prelude::*;

    let linked = link_all(component, attackers)?;
    linked
        .par_iter()
        .enumerate()
        .map(|(index, w)| {
            Ok(AttackerVerdict {
                index,
                verdict: check_one(w, property, sem, mode, budget)?,
            })
        })
        .collect()
}

/// Per-attacker verdicts; backend chosen by the `parallel` feature.
pub fn check_robust_detailed(
    component: &Component,
    attackers: &[Attacker],
    property: &RobustProperty,
    sem: Semantics,
    mode: Mode,
    budget: u64,
) -> Result<Vec<AttackerVerdict>, RobustError> {
    #[cfg(feature = "parallel")]
    {
        check_robust_detailed_par(component, attackers, property, sem, mode, budget)
    }
    #[cfg(not(feature = "parallel"))]
    {
        check_robust_detailed_seq(component, attackers, property, sem, mode, budget)
    }
}

/// Aggregate to the worst verdict over the attacker set (severity order
/// `Violated > Inconclusive > Holds`), witnessed by the first attacker
/// that attains it. An empty attacker set holds vacuously.
pub fn check_robust(
    component: &Component,
    attackers: &[Attacker],
    property: &RobustProperty,
    sem: Semantics,
    mode: Mode,
    budget: u64,
) -> Result<Verdict, RobustError> {
    if attackers.is_empty() {
        return Ok(Verdict::holds_note(
            "vacuous: no attackers supplied, nothing was checked",
        ));
    }
    let details = check_robust_detailed(component, attackers, property, sem, mode, budget)?;
    let worst = details
        .iter()
        .reduce(|best, d| {
            if d.verdict.status > best.verdict.status {
                d
            } else {
                best
            }
        })
        .expect("attacker set is non-empty");
    let mut verdict = worst.verdict.clone();
    if verdict.status != Status::Holds {
        verdict.note = Some(match verdict.note {
            Some(note) => format!("attacker {}: {note}", worst.index),
            None => format!("attacker {}", worst.index),
        });
    }
    verdict.witness = verdict.witness.map(|w| Witness::Attacker {
        index: worst.index,
        witness: Box::new(w),
    });
    Ok(verdict)
}
