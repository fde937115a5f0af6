use crate::action::TaintedAction;
use lang_core::Taint;

/// A source action relates to a target action when they are structurally
/// identical with identical taints; an absent source action relates to a
/// target action only when that action is safe (interleaved safe actions and
/// rollbacks need no source counterpart).
pub fn action_related(src: Option<&TaintedAction>, tgt: &TaintedAction) -> bool {
    match src {
        Some(s) => s == tgt,
        None => tgt.taint == Taint::S,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RelationFailure {
    /// A target action was neither the next source action nor safe.
    UnmatchedUnsafeTarget { tgt_index: usize },
    /// The target trace ended with source actions still unconsumed.
    SourceRemainder { src_index: usize },
}

/// Checks that `src` embeds into `tgt` as a subsequence of exactly-equal
/// actions, with every skipped target action safe. Matching is greedy
/// left-to-right: because a match requires equality, consuming an equal
/// action never forecloses a solution (any later candidate is an identical
/// action, and the skipped copy would itself have to be safe), so greediness
/// is complete.
pub fn trace_related_witness(
    src: &[TaintedAction],
    tgt: &[TaintedAction],
) -> Result<(), RelationFailure> {
    let mut i = 0;
    for (j, t) in tgt.iter().enumerate() {
        if i < src.len() && action_related(Some(&src[i]), t) {
            i += 1;
        } else if !action_related(None, t) {
            return Err(RelationFailure::UnmatchedUnsafeTarget { tgt_index: j });
        }
    }
    if i < src.len() {
        return Err(RelationFailure::SourceRemainder { src_index: i });
    }
    Ok(())
}

pub fn trace_related(src: &[TaintedAction], tgt: &[TaintedAction]) -> bool {
    trace_related_witness(src, tgt).is_ok()
}
