//! Fence-insertion passes: the exhaustive one and the heuristic model.

use lang_core::{Expr, Ident, Stmt};
use std::collections::BTreeSet;

/// Prepend a fence to both branches of every `if0`, recursively.
pub(crate) fn fence_both_branches(s: &Stmt) -> Stmt {
    map_branches(s, &|arm| fenced(arm, true))
}

/// Prepend a fence to a branch body only when a load result feeds a later
/// memory address inside it; the heuristic that catches the classic
/// bounds-check gadget but misses control-flow and hoisted-load leaks.
pub(crate) fn fence_load_feeding_branches(s: &Stmt) -> Stmt {
    map_branches(s, &|arm| fenced(arm, dataflow_reaches_load(arm)))
}

fn fenced(arm: &Stmt, fence: bool) -> Stmt {
    if fence {
        Stmt::seq(Stmt::Lfence, arm.clone())
    } else {
        arm.clone()
    }
}

/// Rewrite every `if0` arm with `fence_arm` (applied to the already
/// recursed arm), leaving everything else untouched.
fn map_branches(s: &Stmt, fence_arm: &dyn Fn(&Stmt) -> Stmt) -> Stmt {
    match s {
        Stmt::IfZ(g, a, b) => {
            let a = map_branches(a, fence_arm);
            let b = map_branches(b, fence_arm);
            Stmt::IfZ(g.clone(), Box::new(fence_arm(&a)), Box::new(fence_arm(&b)))
        }
        Stmt::Seq(a, b) => Stmt::seq(map_branches(a, fence_arm), map_branches(b, fence_arm)),
        Stmt::Let(x, e, body) => Stmt::Let(
            x.clone(),
            e.clone(),
            Box::new(map_branches(body, fence_arm)),
        ),
        Stmt::LetRead(x, e, body) => Stmt::LetRead(
            x.clone(),
            e.clone(),
            Box::new(map_branches(body, fence_arm)),
        ),
        Stmt::LetReadP(x, e, body) => Stmt::LetReadP(
            x.clone(),
            e.clone(),
            Box::new(map_branches(body, fence_arm)),
        ),
        Stmt::CMov(x, e, g, body) => Stmt::CMov(
            x.clone(),
            e.clone(),
            g.clone(),
            Box::new(map_branches(body, fence_arm)),
        ),
        other => other.clone(),
    }
}

/// True iff a variable bound from a heap read syntactically reaches the
/// address expression of a later heap access within `body`, tracked
/// through `let`/read bindings only (no interprocedural flow, no flow
/// through the heap itself).
pub fn dataflow_reaches_load(body: &Stmt) -> bool {
    walk(body, &mut BTreeSet::new())
}

fn mentions(e: &Expr, tracked: &BTreeSet<Ident>) -> bool {
    e.vars().iter().any(|v| tracked.contains(v))
}

fn walk(s: &Stmt, tracked: &mut BTreeSet<Ident>) -> bool {
    match s {
        Stmt::Skip | Stmt::Lfence | Stmt::Ret | Stmt::Call(..) => false,
        Stmt::Seq(a, b) => walk(a, tracked) || walk(b, tracked),
        Stmt::Let(x, e, body) => {
            if mentions(e, tracked) {
                tracked.insert(x.clone());
            } else {
                tracked.remove(x);
            }
            walk(body, tracked)
        }
        Stmt::LetRead(x, e, body) | Stmt::LetReadP(x, e, body) => {
            if mentions(e, tracked) {
                return true;
            }
            tracked.insert(x.clone());
            walk(body, tracked)
        }
        Stmt::Write(addr, _) | Stmt::WriteP(addr, _) => mentions(addr, tracked),
        Stmt::IfZ(_, a, b) => {
            // A guard is not an address sink; each arm sees the bindings
            // made so far.
            walk(a, &mut tracked.clone()) || walk(b, &mut tracked.clone())
        }
        Stmt::CMov(x, e, _, body) => {
            if mentions(e, tracked) {
                tracked.insert(x.clone());
            }
            walk(body, tracked)
        }
    }
}
