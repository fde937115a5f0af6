use lang_core::ast::{BinOp, Expr, Stmt};
use lang_core::{
    is_valid_attacker, parse_attacker, parse_component, parse_program, plug, ParseError,
    PlugError, Program, Taint,
};

const LISTING_LIKE: &str = r#"
// Bounds-checked array lookup with an out-of-bounds speculation leak.
component {
  private {
    -2 = 1;
    -3 = 0;
    -10 = 2;
  }
  fn get(y) {
    let size = read(1) in
    if0 y < size {
      let x = readp(2 + y) in
      let temp = read(10 + x) in
      skip
    } else {
      skip
    }
  }
}
"#;

const ATTACKER_8: &str = r#"
attacker {
  public {
    1 = 4;
  }
  fn main(x) {
    call get 8;
    ret
  }
}
"#;

#[test]
fn parses_component_structure() {
    let c = parse_component(LISTING_LIKE).unwrap();
    assert_eq!(c.privates.len(), 3);
    assert_eq!(c.privates[0].addr, -2);
    assert_eq!(c.privates[0].value, 1);
    assert_eq!(c.privates[0].taint, Taint::U);
    assert_eq!(c.fns.len(), 1);
    let get = &c.fns[0];
    assert_eq!(get.name, "get");
    assert_eq!(get.param, "y");
    // Body: let size = read(1) in if0 (y < size) { ... } else { skip }
    let Stmt::LetRead(size, addr, body) = &get.body else {
        panic!("expected let-read at top, got {:?}", get.body);
    };
    assert_eq!(size, "size");
    assert_eq!(addr, &Expr::Nat(1));
    let Stmt::IfZ(guard, then_b, else_b) = body.as_ref() else {
        panic!("expected if0, got {body:?}");
    };
    assert_eq!(
        guard,
        &Expr::bin(BinOp::Lt, Expr::var("y"), Expr::var("size"))
    );
    assert!(matches!(then_b.as_ref(), Stmt::LetReadP(..)));
    assert_eq!(else_b.as_ref(), &Stmt::Skip);
}

#[test]
fn parses_attacker_and_links() {
    let a = parse_attacker(ATTACKER_8).unwrap();
    assert!(is_valid_attacker(&a));
    let c = parse_component(LISTING_LIKE).unwrap();
    let w = plug(a, c).unwrap();
    assert!(w.is_attacker_side("main"));
    assert!(!w.is_attacker_side("get"));
    assert_eq!(w.initial_heap().get(1), (4, Taint::S));
    assert_eq!(w.initial_heap().get(-10), (2, Taint::U));
    // Undeclared cells default by sign.
    assert_eq!(w.initial_heap().get(12), (0, Taint::S));
    assert_eq!(w.initial_heap().get(-7), (0, Taint::U));
}

#[test]
fn whole_program_file_with_both_blocks() {
    let merged = format!("{ATTACKER_8}\n{LISTING_LIKE}");
    let Program::Whole(w) = parse_program(&merged).unwrap() else {
        panic!("expected whole program");
    };
    w.validate().unwrap();
    assert_eq!(w.attacker.fns[0].name, "main");
    assert_eq!(w.component.fns[0].name, "get");
}

#[test]
fn binder_scopes_over_rest_of_block() {
    let src = "attacker { fn main(x) { let a = 1 in skip; call f a } }";
    let a = parse_attacker(src).unwrap();
    let Stmt::Let(_, _, body) = &a.fns[0].body else {
        panic!("let should absorb the rest of the block");
    };
    assert!(matches!(body.as_ref(), Stmt::Seq(..)));
}

#[test]
fn taint_annotations_on_private_entries() {
    let src = "component { private { -1 = 1 :S; -2 = 3 :U; -3 = 0; } fn f(x) { skip } }";
    let c = parse_component(src).unwrap();
    assert_eq!(c.privates[0].taint, Taint::S);
    assert_eq!(c.privates[1].taint, Taint::U);
    assert_eq!(c.privates[2].taint, Taint::U);
}

#[test]
fn attacker_entries_must_be_safe_and_public() {
    let negative = "attacker { public { -1 = 0; } fn main(x) { skip } }";
    assert!(parse_program(negative).is_err());
    let unsafe_taint = "attacker { public { 1 = 0 :U; } fn main(x) { skip } }";
    assert!(parse_program(unsafe_taint).is_err());
}

#[test]
fn component_entries_must_be_private() {
    let src = "component { private { 1 = 0; } fn f(x) { skip } }";
    assert!(parse_program(src).is_err());
}

#[test]
fn ret_only_in_tail_position() {
    let ok = "attacker { fn main(x) { skip; ret } }";
    assert!(parse_program(ok).is_ok());
    let ok_after_binder = "attacker { fn main(x) { let a = 1 in ret } }";
    assert!(parse_program(ok_after_binder).is_ok());
    let bad_mid = "attacker { fn main(x) { ret; skip } }";
    assert!(matches!(
        parse_program(bad_mid),
        Err(ParseError::Invalid { .. })
    ));
    let bad_branch = "attacker { fn main(x) { if0 x { ret } else { skip } } }";
    assert!(matches!(
        parse_program(bad_branch),
        Err(ParseError::Invalid { .. })
    ));
}

#[test]
fn dollar_identifiers_parse() {
    let src = "component { fn f(x) { let $pr = 1 in cmov $pr, 0 if0 x in skip } }";
    let c = parse_component(src).unwrap();
    let Stmt::Let(name, _, _) = &c.fns[0].body else {
        panic!("expected let");
    };
    assert_eq!(name, "$pr");
}

#[test]
fn expression_precedence() {
    // or < comparisons < additive < multiplicative
    let src = "attacker { fn main(x) { call f 1 + 2 * 3 < 4 or not(x) } }";
    let a = parse_attacker(src).unwrap();
    let Stmt::Call(_, arg) = &a.fns[0].body else {
        panic!("expected call");
    };
    let expected = Expr::bin(
        BinOp::Or,
        Expr::bin(
            BinOp::Lt,
            Expr::add(Expr::Nat(1), Expr::bin(BinOp::Mul, Expr::Nat(2), Expr::Nat(3))),
            Expr::Nat(4),
        ),
        Expr::not(Expr::var("x")),
    );
    assert_eq!(arg, &expected);
}

#[test]
fn plug_rejects_unsatisfied_import() {
    let a = parse_attacker("attacker { fn main(x) { skip } }").unwrap();
    let c = parse_component("component { import helper; fn f(x) { call helper x } }").unwrap();
    assert!(matches!(plug(a, c), Err(PlugError::NotWhole(_))));
}

#[test]
fn plug_rejects_function_name_clash() {
    let a = parse_attacker("attacker { fn main(x) { skip } fn f(x) { skip } }").unwrap();
    let c = parse_component("component { fn f(x) { skip } }").unwrap();
    assert!(matches!(plug(a, c), Err(PlugError::NotWhole(_))));
}

#[test]
fn plug_rejects_attacker_without_main() {
    let a = parse_attacker("attacker { fn helper(x) { skip } }").unwrap();
    assert!(!is_valid_attacker(&a));
    let c = parse_component("component { fn f(x) { skip } }").unwrap();
    assert!(matches!(plug(a, c), Err(PlugError::InvalidAttacker(_))));
}

#[test]
fn attacker_may_not_touch_private_heap() {
    // readp/writep are lexically valid but rejected by attacker validity.
    let src = "attacker { fn main(x) { let a = readp(1) in skip } }";
    let a = parse_attacker(src).unwrap();
    assert!(!is_valid_attacker(&a));
}

#[test]
fn comments_and_whitespace_are_ignored() {
    let src = "component {\n // nothing here\n fn f(x) { skip // trailing\n } }";
    assert!(parse_component(src).is_ok());
}
