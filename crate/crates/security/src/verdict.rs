//! Check results: a three-valued status plus an optional witness.

use std::fmt;
use trace_model::Trace;

/// Outcome of a security check. The derived order ranks severity:
/// `Holds < Inconclusive < Violated`, so "worst verdict" is `max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Status {
    Holds,
    Inconclusive,
    Violated,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Holds => write!(f, "holds"),
            Status::Inconclusive => write!(f, "inconclusive"),
            Status::Violated => write!(f, "violated"),
        }
    }
}

/// Evidence attached to a `Violated` verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// First unsafe action in a single trace.
    UnsafeAction { trace: Trace, index: usize },
    /// First diverging position between the traces of two low-equivalent
    /// programs. `index` may equal the length of the shorter trace when
    /// one trace is a strict prefix of the other.
    TraceDivergence {
        base: Trace,
        variant: Trace,
        index: usize,
    },
    /// A per-attacker witness from a robustness check.
    Attacker {
        index: usize,
        witness: Box<Witness>,
    },
}

/// A status plus its evidence. `Violated` verdicts always carry a witness;
/// `Inconclusive` verdicts carry a note explaining why the check could not
/// decide (budget exhaustion or a stuck run).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub status: Status,
    pub witness: Option<Witness>,
    pub note: Option<String>,
}

impl Verdict {
    pub fn holds() -> Verdict {
        Verdict {
            status: Status::Holds,
            witness: None,
            note: None,
        }
    }

    pub fn holds_note(note: impl Into<String>) -> Verdict {
        Verdict {
            status: Status::Holds,
            witness: None,
            note: Some(note.into()),
        }
    }

    pub fn violated(witness: Witness) -> Verdict {
        Verdict {
            status: Status::Violated,
            witness: Some(witness),
            note: None,
        }
    }

    pub fn violated_note(witness: Witness, note: impl Into<String>) -> Verdict {
        Verdict {
            status: Status::Violated,
            witness: Some(witness),
            note: Some(note.into()),
        }
    }

    pub fn inconclusive(note: impl Into<String>) -> Verdict {
        Verdict {
            status: Status::Inconclusive,
            witness: None,
            note: Some(note.into()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn severity_order() {
        assert!(Status::Holds < Status::Inconclusive);
        assert!(Status::Inconclusive < Status::Violated);
        assert_eq!(
            [Status::Inconclusive, Status::Violated, Status::Holds]
                .into_iter()
                .max(),
            Some(Status::Violated)
        );
    }
}
