//! Taint lattice operations.
//!
//! The lattice is `S ≤ U` (safe below unsafe). Two different combinators
//! are used in the semantics, and naming them by behaviour avoids the
//! easy mistake of using one where the other belongs:
//!
//! - [`join`] is the data-flow combinator (least upper bound): a value
//!   computed from several inputs is unsafe if *any* input is unsafe.
//!   Used for expression evaluation and value bindings.
//! - [`attenuate`] is the label combinator (greatest lower bound with the
//!   program-counter taint): an emitted action label is unsafe only if the
//!   action itself is unsafe *and* it was produced under unsafe (i.e.
//!   speculative) control flow. Non-speculative code therefore only ever
//!   emits safe labels, and rolled-back speculation is where unsafe labels
//!   can appear.

use lang_core::{Mode, Taint};

/// Least upper bound: `U` if either argument is `U`. Data flowing together.
pub fn join(a: Taint, b: Taint) -> Taint {
    match (a, b) {
        (Taint::S, Taint::S) => Taint::S,
        _ => Taint::U,
    }
}

/// Greatest lower bound of an action taint and the pc taint: the emitted
/// label is `U` only when both are `U`. With a safe pc (non-speculative
/// execution) every label is safe; with an unsafe pc (speculation) the
/// inner action taint passes through.
pub fn attenuate(action: Taint, pc: Taint) -> Taint {
    match (action, pc) {
        (Taint::U, Taint::U) => Taint::U,
        _ => Taint::S,
    }
}

/// Taint bound to `x` by `let x = readp(e) in …`, given the taint of the
/// address expression, the taint stored at the heap cell, and the pc taint.
///
/// - `Strong`: the private read is always treated as sensitive data flow:
///   the binding joins the address and cell taints (a safe-declared cell
///   read through a safe address stays safe, which is what lets hardened
///   code read its own safe predicate bit without poisoning every mask).
/// - `Weak`: as `Strong`, but attenuated by the pc: non-speculatively the
///   value itself is already exposed in the trace (value-carrying read
///   action), so the binding only counts as unsafe when obtained under
///   speculation.
pub fn read_priv_result_taint(mode: Mode, addr_taint: Taint, cell_taint: Taint, pc: Taint) -> Taint {
    let data = join(addr_taint, cell_taint);
    match mode {
        Mode::Strong => data,
        Mode::Weak => attenuate(data, pc),
    }
}
