//! Observation traces shared by the execution engines and the security
//! checkers: the action data model with its line-oriented serialization, the
//! non-speculative projection, and the subsequence relation used by the
//! compilation-witness checker.

mod action;
mod projection;
mod relation;

pub use action::{format_trace, parse_trace, Action, ParseActionError, TaintedAction, Trace};
pub use projection::{nonspec_projection, MalformedTrace};
pub use relation::{action_related, trace_related, trace_related_witness, RelationFailure};
