//! Machine configurations and the single-step relation.

use crate::eval::{eval_expr, Bindings};
use lang_core::program::{entry_stmt, ENTRY_PARAM};
use lang_core::{Heap, Ident, Mode, Stmt, Taint, WholeProgram, ENTRY_SENTINEL};
use taint::{join, read_priv_result_taint};
use trace_model::Action;

/// One activation record: the function whose body is running, its
/// function-scoped bindings, and the remaining statement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub func: Ident,
    pub bindings: Bindings,
    pub stmt: Stmt,
}

/// A non-speculative machine state: a non-empty frame stack (last element
/// is the running frame) and the tainted heap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NSConfig {
    pub frames: Vec<Frame>,
    pub heap: Heap,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StuckReason {
    #[error("unbound variable {var:?} in {func:?}")]
    UnboundVariable { func: Ident, var: Ident },
    #[error("cmov target {var:?} is not bound in {func:?}")]
    CmovUnbound { func: Ident, var: Ident },
    #[error("call to undefined function {callee:?} from {caller:?}")]
    UndefinedFunction { caller: Ident, callee: Ident },
    #[error("component function {caller:?} calls attacker function {callee:?} without importing it")]
    CallNotImported { caller: Ident, callee: Ident },
}

/// Result of one machine step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepOutcome {
    Stepped {
        next: NSConfig,
        /// Emitted action with its raw inner taint, not yet attenuated by
        /// the pc taint of the executing context.
        emitted: Option<(Action, Taint)>,
        /// When a component-side branch executed: the configuration that
        /// takes the *other* branch with the same continuation, used by
        /// the speculative engine as the mispredicted instance. `None` for
        /// attacker-side branches and for every other statement.
        wrong_branch: Option<NSConfig>,
        /// Whether the step executed an `lfence`.
        fence: bool,
    },
    /// The entry frame finished; the machine halted normally.
    Terminal,
    Stuck(StuckReason),
}

/// The initial configuration: a single entry frame (attacker-side) whose
/// body calls `main` with the entry binding, over the declared heap.
pub fn initial_config(w: &WholeProgram) -> NSConfig {
    NSConfig {
        frames: vec![Frame {
            func: ENTRY_SENTINEL.to_string(),
            bindings: Bindings::from([(ENTRY_PARAM.to_string(), (0, Taint::S))]),
            stmt: entry_stmt(),
        }],
        heap: w.initial_heap(),
    }
}

/// Public heap address denoted by the evaluated operand of `read`/`write`.
fn pub_addr(n: u64) -> i64 {
    i64::try_from(n).unwrap_or(i64::MAX)
}

/// Private heap address denoted by the evaluated operand of
/// `readp`/`writep`: the negation of the operand, so `0` lands on the
/// public cell `0`.
fn priv_addr(n: u64) -> i64 {
    -pub_addr(n)
}

/// What reducing one redex in the top frame did.
enum Reduced {
    /// The frame's statement stepped in place.
    Local {
        stmt: Stmt,
        emitted: Option<(Action, Taint)>,
        /// Other branch of an `if0`, wrapped in the same continuation.
        wrong: Option<Stmt>,
        fence: bool,
    },
    /// A call: the caller resumes at `stmt` after the callee returns.
    Call {
        stmt: Stmt,
        callee: Ident,
        param: Ident,
        body: Stmt,
        arg: (u64, Taint),
        emitted: Option<(Action, Taint)>,
    },
    /// The frame returned (explicit `ret` or exhausted body).
    Return,
}

/// Perform one step of `cfg` under language flavour `mode` with
/// program-counter taint `pc`.
///
/// The pc is `S` for architectural (non-speculative) execution and `U`
/// inside a mispredicted speculation instance. It only influences
/// weak-mode private reads: their binding taint attenuates with the pc,
/// and their action carries the value read only under a safe pc.
pub fn step(w: &WholeProgram, cfg: &NSConfig, mode: Mode, pc: Taint) -> StepOutcome {
    let mut next = cfg.clone();
    let NSConfig { frames, heap } = &mut next;
    let top = frames.last_mut().expect("configuration has a frame");
    let func = top.func.clone();
    let stmt = std::mem::replace(&mut top.stmt, Stmt::Skip);

    match reduce(w, mode, pc, &func, &mut top.bindings, heap, stmt) {
        Err(reason) => StepOutcome::Stuck(reason),
        Ok(Reduced::Local {
            stmt,
            emitted,
            wrong,
            fence,
        }) => {
            top.stmt = stmt;
            let wrong_branch = match wrong {
                Some(ws) if !w.is_attacker_side(&func) => {
                    // Branch evaluation does not touch bindings or the
                    // heap, so the mispredicted state is the stepped state
                    // with the other branch substituted.
                    let mut alt = next.clone();
                    alt.frames.last_mut().expect("frame").stmt = ws;
                    Some(alt)
                }
                _ => None,
            };
            StepOutcome::Stepped {
                next,
                emitted,
                wrong_branch,
                fence,
            }
        }
        Ok(Reduced::Call {
            stmt,
            callee,
            param,
            body,
            arg,
            emitted,
        }) => {
            top.stmt = stmt;
            frames.push(Frame {
                func: callee,
                bindings: Bindings::from([(param, arg)]),
                stmt: body,
            });
            StepOutcome::Stepped {
                next,
                emitted,
                wrong_branch: None,
                fence: false,
            }
        }
        Ok(Reduced::Return) => {
            if frames.len() == 1 {
                return StepOutcome::Terminal;
            }
            let popped = frames.pop().expect("frame");
            let ret_to = &frames.last().expect("caller frame").func;
            let emitted = match (w.is_attacker_side(&popped.func), w.is_attacker_side(ret_to)) {
                (false, true) => Some((Action::RetOut, Taint::S)),
                (true, false) => Some((Action::RetBack, Taint::S)),
                _ => None,
            };
            StepOutcome::Stepped {
                next,
                emitted,
                wrong_branch: None,
                fence: false,
            }
        }
    }
}

fn reduce(
    w: &WholeProgram,
    mode: Mode,
    pc: Taint,
    func: &str,
    bindings: &mut Bindings,
    heap: &mut Heap,
    stmt: Stmt,
) -> Result<Reduced, StuckReason> {
    let unbound = |var: lang_core::Ident| StuckReason::UnboundVariable {
        func: func.to_string(),
        var,
    };
    match stmt {
        // An exhausted body returns, exactly like an explicit `ret`.
        Stmt::Skip | Stmt::Ret => Ok(Reduced::Return),
        Stmt::Seq(a, b) => {
            if *a == Stmt::Skip {
                return Ok(Reduced::Local {
                    stmt: *b,
                    emitted: None,
                    wrong: None,
                    fence: false,
                });
            }
            match reduce(w, mode, pc, func, bindings, heap, *a)? {
                Reduced::Local {
                    stmt,
                    emitted,
                    wrong,
                    fence,
                } => Ok(Reduced::Local {
                    stmt: Stmt::seq(stmt, *b.clone()),
                    emitted,
                    wrong: wrong.map(|ws| Stmt::seq(ws, *b)),
                    fence,
                }),
                Reduced::Call {
                    stmt,
                    callee,
                    param,
                    body,
                    arg,
                    emitted,
                } => Ok(Reduced::Call {
                    stmt: Stmt::seq(stmt, *b),
                    callee,
                    param,
                    body,
                    arg,
                    emitted,
                }),
                // A `ret` in the left of a sequence discards the rest.
                Reduced::Return => Ok(Reduced::Return),
            }
        }
        Stmt::Let(x, e, s) => {
            let (v, t) = eval_expr(bindings, &e).map_err(|u| unbound(u.0))?;
            bindings.insert(x, (v, t));
            Ok(Reduced::Local {
                stmt: *s,
                emitted: None,
                wrong: None,
                fence: false,
            })
        }
        Stmt::LetRead(x, e, s) => {
            let (n, addr_taint) = eval_expr(bindings, &e).map_err(|u| unbound(u.0))?;
            let addr = pub_addr(n);
            let (hv, ht) = heap.get(addr);
            bindings.insert(x, (hv, join(ht, addr_taint)));
            Ok(Reduced::Local {
                stmt: *s,
                emitted: Some((
                    Action::Read {
                        addr,
                        value: Some(hv),
                    },
                    addr_taint,
                )),
                wrong: None,
                fence: false,
            })
        }
        Stmt::LetReadP(x, e, s) => {
            let (n, addr_taint) = eval_expr(bindings, &e).map_err(|u| unbound(u.0))?;
            let addr = priv_addr(n);
            let (hv, ht) = heap.get(addr);
            bindings.insert(x, (hv, read_priv_result_taint(mode, addr_taint, ht, pc)));
            // Private reads never expose the value in the strong flavour.
            // In the weak flavour they expose it only non-speculatively
            // (safe pc); mispredicted instances run with an unsafe pc.
            let value = match mode {
                Mode::Strong => None,
                Mode::Weak if pc == Taint::U => None,
                Mode::Weak => Some(hv),
            };
            Ok(Reduced::Local {
                stmt: *s,
                emitted: Some((Action::Read { addr, value }, addr_taint)),
                wrong: None,
                fence: false,
            })
        }
        Stmt::Write(e1, e2) => {
            let (n, addr_taint) = eval_expr(bindings, &e1).map_err(|u| unbound(u.0))?;
            let (v, val_taint) = eval_expr(bindings, &e2).map_err(|u| unbound(u.0))?;
            let addr = pub_addr(n);
            // Values stored publicly are observable, hence safe thereafter.
            heap.set(addr, v, Taint::S);
            Ok(Reduced::Local {
                stmt: Stmt::Skip,
                emitted: Some((
                    Action::Write {
                        addr,
                        value: Some(v),
                    },
                    join(addr_taint, val_taint),
                )),
                wrong: None,
                fence: false,
            })
        }
        Stmt::WriteP(e1, e2) => {
            let (n, addr_taint) = eval_expr(bindings, &e1).map_err(|u| unbound(u.0))?;
            let (v, val_taint) = eval_expr(bindings, &e2).map_err(|u| unbound(u.0))?;
            let addr = priv_addr(n);
            heap.set(addr, v, val_taint);
            // Private writes expose the address only, and the label taint
            // is the address expression's taint.
            Ok(Reduced::Local {
                stmt: Stmt::Skip,
                emitted: Some((Action::Write { addr, value: None }, addr_taint)),
                wrong: None,
                fence: false,
            })
        }
        Stmt::IfZ(e, s1, s2) => {
            let (v, guard_taint) = eval_expr(bindings, &e).map_err(|u| unbound(u.0))?;
            let (taken, wrong) = if v == 0 { (s1, s2) } else { (s2, s1) };
            Ok(Reduced::Local {
                stmt: *taken,
                emitted: Some((Action::Branch { value: v }, guard_taint)),
                wrong: Some(*wrong),
                fence: false,
            })
        }
        Stmt::Call(f, e) => {
            let (v, arg_taint) = eval_expr(bindings, &e).map_err(|u| unbound(u.0))?;
            let caller_attacker = w.is_attacker_side(func);
            let callee_def;
            let emitted;
            let param_taint;
            if caller_attacker {
                if let Some(def) = w.attacker.lookup_fn(&f) {
                    // Same-side call: silent, argument keeps its taint.
                    callee_def = def;
                    emitted = None;
                    param_taint = arg_taint;
                } else if let Some(def) = w.component.lookup_fn(&f) {
                    callee_def = def;
                    emitted = Some((
                        Action::CallIn {
                            func: f.clone(),
                            arg: v,
                        },
                        arg_taint,
                    ));
                    // Values crossing the boundary are observable: safe.
                    param_taint = Taint::S;
                } else {
                    return Err(StuckReason::UndefinedFunction {
                        caller: func.to_string(),
                        callee: f,
                    });
                }
            } else if let Some(def) = w.component.lookup_fn(&f) {
                callee_def = def;
                emitted = None;
                param_taint = arg_taint;
            } else if w.component.imports.iter().any(|i| i == &f) {
                let Some(def) = w.attacker.lookup_fn(&f) else {
                    return Err(StuckReason::UndefinedFunction {
                        caller: func.to_string(),
                        callee: f,
                    });
                };
                callee_def = def;
                emitted = Some((
                    Action::CallOut {
                        func: f.clone(),
                        arg: v,
                    },
                    arg_taint,
                ));
                param_taint = Taint::S;
            } else if w.attacker.lookup_fn(&f).is_some() {
                return Err(StuckReason::CallNotImported {
                    caller: func.to_string(),
                    callee: f,
                });
            } else {
                return Err(StuckReason::UndefinedFunction {
                    caller: func.to_string(),
                    callee: f,
                });
            }
            Ok(Reduced::Call {
                stmt: Stmt::Skip,
                callee: callee_def.name.clone(),
                param: callee_def.param.clone(),
                body: callee_def.body.clone(),
                arg: (v, param_taint),
                emitted,
            })
        }
        Stmt::Lfence => Ok(Reduced::Local {
            stmt: Stmt::Skip,
            emitted: None,
            wrong: None,
            fence: true,
        }),
        Stmt::CMov(x, e_val, e_guard, s) => {
            let Some(&(old_v, old_t)) = bindings.get(&x) else {
                return Err(StuckReason::CmovUnbound {
                    func: func.to_string(),
                    var: x,
                });
            };
            let (gv, gt) = eval_expr(bindings, &e_guard).map_err(|u| unbound(u.0))?;
            // A taken move binds exactly the moved value, taint included:
            // masking a register to a constant must yield a safe binding
            // even when the mask condition itself is tainted, or masks
            // could never launder speculatively-reachable secrets. A kept
            // value joins the guard taint, recording that it survived a
            // tainted condition. The moved expression is only evaluated
            // when the move happens.
            let new_binding = if gv == 0 {
                eval_expr(bindings, &e_val).map_err(|u| unbound(u.0))?
            } else {
                (old_v, join(old_t, gt))
            };
            bindings.insert(x, new_binding);
            Ok(Reduced::Local {
                stmt: *s,
                emitted: None,
                wrong: None,
                fence: false,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use lang_core::ast::Expr;
    use lang_core::{parse_attacker, parse_component, plug};
    use Taint::{S, U};

    fn tiny_program() -> WholeProgram {
        let c = parse_component(
            "component {
                private { -2 = 7 :U; }
                fn f(y) { skip }
            }",
        )
        .unwrap();
        let a = parse_attacker("attacker { fn main(x) { call f 1; ret } }").unwrap();
        plug(a, c).unwrap()
    }

    fn frame_with(stmt: Stmt, bindings: &[(&str, u64, Taint)]) -> NSConfig {
        NSConfig {
            frames: vec![Frame {
                func: "f".to_string(),
                bindings: bindings
                    .iter()
                    .map(|&(x, v, t)| (x.to_string(), (v, t)))
                    .collect(),
                stmt,
            }],
            heap: Heap::new(),
        }
    }

    fn stepped(out: StepOutcome) -> NSConfig {
        match out {
            StepOutcome::Stepped { next, .. } => next,
            other => panic!("expected a step, got {other:?}"),
        }
    }

    #[test]
    fn cmov_launders_taint_when_taken_and_joins_guard_taint_when_kept() {
        let w = tiny_program();
        let cfg = frame_with(
            Stmt::CMov(
                "a".into(),
                Expr::Nat(9),
                Expr::var("g"),
                Box::new(Stmt::Skip),
            ),
            &[("a", 1, S), ("g", 0, U)],
        );
        let next = stepped(step(&w, &cfg, Mode::Strong, S));
        // The moved constant is safe even though the condition is not.
        assert_eq!(next.frames[0].bindings["a"], (9, S));

        let cfg = frame_with(
            Stmt::CMov(
                "a".into(),
                Expr::Nat(9),
                Expr::var("g"),
                Box::new(Stmt::Skip),
            ),
            &[("a", 1, S), ("g", 3, U)],
        );
        let next = stepped(step(&w, &cfg, Mode::Strong, S));
        // Kept value, but the guard taint still joins in.
        assert_eq!(next.frames[0].bindings["a"], (1, U));
    }

    #[test]
    fn cmov_skips_value_evaluation_when_not_taken() {
        let w = tiny_program();
        // `q` is unbound, but the guard is non-zero so `q` is never read.
        let cfg = frame_with(
            Stmt::CMov(
                "a".into(),
                Expr::var("q"),
                Expr::Nat(5),
                Box::new(Stmt::Skip),
            ),
            &[("a", 2, S)],
        );
        let next = stepped(step(&w, &cfg, Mode::Strong, S));
        assert_eq!(next.frames[0].bindings["a"], (2, S));
    }

    #[test]
    fn cmov_requires_bound_target() {
        let w = tiny_program();
        let cfg = frame_with(
            Stmt::CMov("a".into(), Expr::Nat(1), Expr::Nat(0), Box::new(Stmt::Skip)),
            &[],
        );
        assert_eq!(
            step(&w, &cfg, Mode::Strong, S),
            StepOutcome::Stuck(StuckReason::CmovUnbound {
                func: "f".into(),
                var: "a".into()
            })
        );
    }

    #[test]
    fn weak_private_read_exposes_value_only_under_safe_pc() {
        let w = tiny_program();
        let read = Stmt::LetReadP("v".into(), Expr::Nat(2), Box::new(Stmt::Skip));
        let mut cfg = frame_with(read, &[]);
        cfg.heap = w.initial_heap();

        for (mode, pc, want_action, want_binding) in [
            // Strong: value-free action; data flow joins address and cell.
            (
                Mode::Strong,
                S,
                Action::Read {
                    addr: -2,
                    value: None,
                },
                (7, U),
            ),
            (
                Mode::Strong,
                U,
                Action::Read {
                    addr: -2,
                    value: None,
                },
                (7, U),
            ),
            // Weak, safe pc: the value is printed, so the binding is safe.
            (
                Mode::Weak,
                S,
                Action::Read {
                    addr: -2,
                    value: Some(7),
                },
                (7, S),
            ),
            // Weak, unsafe pc (speculation): value suppressed, binding unsafe.
            (
                Mode::Weak,
                U,
                Action::Read {
                    addr: -2,
                    value: None,
                },
                (7, U),
            ),
        ] {
            let out = step(&w, &cfg, mode, pc);
            let StepOutcome::Stepped { next, emitted, .. } = out else {
                panic!("expected step");
            };
            let (action, raw) = emitted.unwrap();
            assert_eq!(action, want_action, "mode {mode:?} pc {pc:?}");
            assert_eq!(raw, S, "address expression is a literal");
            assert_eq!(next.frames[0].bindings["v"], want_binding);
        }
    }

    #[test]
    fn wrong_branch_only_for_component_frames() {
        let w = tiny_program();
        let branch = Stmt::IfZ(Expr::Nat(0), Box::new(Stmt::Lfence), Box::new(Stmt::Ret));

        // Component frame: mispredicted state offered.
        let cfg = frame_with(branch.clone(), &[]);
        let StepOutcome::Stepped {
            next,
            wrong_branch,
            emitted,
            ..
        } = step(&w, &cfg, Mode::Strong, S)
        else {
            panic!("expected step");
        };
        assert_eq!(next.frames[0].stmt, Stmt::Lfence);
        assert_eq!(wrong_branch.unwrap().frames[0].stmt, Stmt::Ret);
        assert_eq!(emitted, Some((Action::Branch { value: 0 }, S)));

        // Attacker frame: no mispredicted state.
        let mut cfg = frame_with(branch, &[]);
        cfg.frames[0].func = "main".to_string();
        let StepOutcome::Stepped { wrong_branch, .. } = step(&w, &cfg, Mode::Strong, S) else {
            panic!("expected step");
        };
        assert!(wrong_branch.is_none());
    }

    #[test]
    fn wrong_branch_keeps_continuation() {
        let w = tiny_program();
        let stmt = Stmt::seq(
            Stmt::IfZ(Expr::Nat(1), Box::new(Stmt::Skip), Box::new(Stmt::Lfence)),
            Stmt::Ret,
        );
        let cfg = frame_with(stmt, &[]);
        let StepOutcome::Stepped {
            next, wrong_branch, ..
        } = step(&w, &cfg, Mode::Strong, S)
        else {
            panic!("expected step");
        };
        // Guard is non-zero: the else branch is correct, then is wrong.
        assert_eq!(next.frames[0].stmt, Stmt::seq(Stmt::Lfence, Stmt::Ret));
        assert_eq!(
            wrong_branch.unwrap().frames[0].stmt,
            Stmt::seq(Stmt::Skip, Stmt::Ret)
        );
    }

    #[test]
    fn lfence_flags_the_step() {
        let w = tiny_program();
        let cfg = frame_with(Stmt::seq(Stmt::Lfence, Stmt::Ret), &[]);
        let StepOutcome::Stepped { fence, .. } = step(&w, &cfg, Mode::Strong, S) else {
            panic!("expected step");
        };
        assert!(fence);
    }

    #[test]
    fn public_write_stores_safe_private_write_keeps_value_taint() {
        let w = tiny_program();
        let mut cfg = frame_with(
            Stmt::seq(
                Stmt::Write(Expr::Nat(3), Expr::var("u")),
                Stmt::WriteP(Expr::Nat(4), Expr::var("u")),
            ),
            &[("u", 9, U)],
        );
        cfg.heap = w.initial_heap();

        let StepOutcome::Stepped { next, emitted, .. } = step(&w, &cfg, Mode::Strong, S) else {
            panic!("expected step");
        };
        assert_eq!(
            emitted,
            Some((
                Action::Write {
                    addr: 3,
                    value: Some(9)
                },
                U
            ))
        );
        assert_eq!(next.heap.get(3), (9, S));

        // Step through the silent sequence-skip reduction.
        let next = stepped(step(&w, &next, Mode::Strong, S));
        let StepOutcome::Stepped { next, emitted, .. } = step(&w, &next, Mode::Strong, S) else {
            panic!("expected step");
        };
        assert_eq!(
            emitted,
            Some((
                Action::Write {
                    addr: -4,
                    value: None
                },
                S
            ))
        );
        assert_eq!(next.heap.get(-4), (9, U));
    }
}
