//! Command-line laboratory for speculative execution security: run the
//! built-in victim/attacker corpus under architectural or always-mispredict
//! semantics, apply hardening passes, check speculative safety and bounded
//! non-interference, relate hardened runs back to source runs, and
//! reproduce the hardening-pass verdict table.
//!
//! The library half hosts everything the binary does, so integration tests
//! drive the same code paths in-process.

pub mod corpus;
pub mod ops;
pub mod report;
pub mod table;

pub use corpus::Corpus;
pub use ops::{Outcome, UsageError};
