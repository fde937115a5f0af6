//! Expression evaluation over tainted naturals.
//!
//! Values are `u64` naturals with saturating arithmetic. Comparisons and
//! `or` use the boolean encoding where `0` is true and any non-zero value
//! is false. The taint of a compound expression is the join of the taints
//! of its leaves: literals are `S`, variables carry their binding taint.

use lang_core::{BinOp, Expr, Ident, Taint};
use std::collections::BTreeMap;
use taint::join;

/// Per-frame variable environment. Bindings are function-scoped: a binder
/// updates or inserts into the frame that executes it.
pub type Bindings = BTreeMap<Ident, (u64, Taint)>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unbound variable {0:?}")]
pub struct UnboundVar(pub Ident);

fn bool_nat(b: bool) -> u64 {
    if b {
        0
    } else {
        1
    }
}

pub fn eval_expr(bindings: &Bindings, e: &Expr) -> Result<(u64, Taint), UnboundVar> {
    match e {
        Expr::Nat(n) => Ok((*n, Taint::S)),
        Expr::Var(x) => bindings
            .get(x)
            .copied()
            .ok_or_else(|| UnboundVar(x.clone())),
        Expr::Bin(op, lhs, rhs) => {
            let (a, ta) = eval_expr(bindings, lhs)?;
            let (b, tb) = eval_expr(bindings, rhs)?;
            let v = match op {
                BinOp::Add => a.saturating_add(b),
                BinOp::Sub => a.saturating_sub(b),
                BinOp::Mul => a.saturating_mul(b),
                BinOp::Lt => bool_nat(a < b),
                BinOp::Gt => bool_nat(a > b),
                BinOp::Eq => bool_nat(a == b),
                BinOp::Or => bool_nat(a == 0 || b == 0),
            };
            Ok((v, join(ta, tb)))
        }
        Expr::Not(inner) => {
            let (v, t) = eval_expr(bindings, inner)?;
            Ok((bool_nat(v != 0), t))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use lang_core::Expr as E;
    use lang_core::Taint::*;

    fn env(pairs: &[(&str, u64, Taint)]) -> Bindings {
        pairs
            .iter()
            .map(|&(x, v, t)| (x.to_string(), (v, t)))
            .collect()
    }

    fn ev(b: &Bindings, e: E) -> (u64, Taint) {
        eval_expr(b, &e).unwrap()
    }

    #[test]
    fn boolean_encoding() {
        let b = env(&[]);
        // 0 is true, non-zero is false.
        assert_eq!(ev(&b, E::bin(BinOp::Lt, E::Nat(1), E::Nat(2))), (0, S));
        assert_eq!(ev(&b, E::bin(BinOp::Lt, E::Nat(2), E::Nat(2))), (1, S));
        assert_eq!(ev(&b, E::bin(BinOp::Gt, E::Nat(3), E::Nat(2))), (0, S));
        assert_eq!(ev(&b, E::bin(BinOp::Eq, E::Nat(7), E::Nat(7))), (0, S));
        assert_eq!(ev(&b, E::bin(BinOp::Eq, E::Nat(7), E::Nat(8))), (1, S));
        // or is true when either side is true.
        assert_eq!(ev(&b, E::bin(BinOp::Or, E::Nat(0), E::Nat(9))), (0, S));
        assert_eq!(ev(&b, E::bin(BinOp::Or, E::Nat(9), E::Nat(0))), (0, S));
        assert_eq!(ev(&b, E::bin(BinOp::Or, E::Nat(9), E::Nat(9))), (1, S));
        // not flips the encoding.
        assert_eq!(ev(&b, E::not(E::Nat(0))), (1, S));
        assert_eq!(ev(&b, E::not(E::Nat(3))), (0, S));
    }

    #[test]
    fn saturating_arithmetic() {
        let b = env(&[]);
        assert_eq!(ev(&b, E::bin(BinOp::Sub, E::Nat(3), E::Nat(5))), (0, S));
        assert_eq!(
            ev(&b, E::bin(BinOp::Add, E::Nat(u64::MAX), E::Nat(1))),
            (u64::MAX, S)
        );
        assert_eq!(
            ev(&b, E::bin(BinOp::Mul, E::Nat(u64::MAX), E::Nat(2))),
            (u64::MAX, S)
        );
    }

    #[test]
    fn taint_joins_over_leaves() {
        let b = env(&[("x", 2, U), ("y", 3, S)]);
        assert_eq!(ev(&b, E::var("x")), (2, U));
        assert_eq!(ev(&b, E::add(E::var("y"), E::Nat(1))), (4, S));
        assert_eq!(ev(&b, E::add(E::var("x"), E::var("y"))), (5, U));
        assert_eq!(ev(&b, E::not(E::var("x"))), (0, U));
    }

    #[test]
    fn unbound_variable_reported() {
        let b = env(&[]);
        assert_eq!(
            eval_expr(&b, &E::var("q")),
            Err(UnboundVar("q".to_string()))
        );
    }
}
