mod common;

use common::{parse_err, sig, VOCAB};
use lctrs_core::constraints::{Backend, FiniteDomain};
use lctrs_core::syntax::{cterm_decl, parse_source, print_cterm, print_rule, rule_decl};
use lctrs_core::Error;

#[test]
fn parse_errors_carry_locations() {
    let src = "(sort T :term)\n(fun f (Int) T :term)\n(cterm a :logical (x:Int) (f x) :guard (> x y))\n";
    match parse_err(src) {
        Some(Error::Parse { line, col, msg }) => {
            assert_eq!(line, 3);
            assert_eq!(col, 45);
            assert!(msg.contains("`y`"), "{msg}");
        }
        other => panic!("{other:?}"),
    }
    match parse_err("(sort T :term)\n  (cterm") {
        Some(Error::Parse { line, col, .. }) => assert_eq!((line, col), (2, 3)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn unknown_symbols_and_sorts() {
    let e = cterm_decl(&sig(), "(cterm :logical () (zz 1))").unwrap_err();
    assert!(e.to_string().contains("zz"), "{e}");
    let e = cterm_decl(&sig(), "(cterm :logical (x:Nat) (f x))").unwrap_err();
    assert!(e.to_string().contains("unknown sort `Nat`"), "{e}");
    assert!(parse_err("(frobnicate)").is_some());
}

#[test]
fn ill_formed_declarations_are_rejected() {
    // y is logical but does not occur in the term
    assert!(cterm_decl(&sig(), "(cterm :logical (x:Int y:Int) (f x) :guard (> x 0))").is_err());
    // sort mismatch between the sides
    assert!(rule_decl(&sig(), "(rule r :lvars () (f x:Int) x)").is_err());
    // conflicting sort annotations
    assert!(cterm_decl(&sig(), "(cterm :logical (x:Int) (b x:Bool))").is_err());
}

#[test]
fn printing_is_canonical_and_round_trips() {
    let src = "(cterm :logical (y:Int x:Int) (h x y) :exists (z:Int) :guard (and (< x z) (< z y)))";
    let d = cterm_decl(&sig(), src).unwrap();
    let printed = print_cterm(&d.ecterm().unwrap(), Some("t"));
    assert_eq!(
        printed,
        "(cterm t :logical (x:Int y:Int) (h x y) :exists (z:Int) :guard (and (< x z) (< z y)))"
    );
    let again = cterm_decl(&sig(), &printed).unwrap();
    assert_eq!(again.ecterm().unwrap(), d.ecterm().unwrap());
    assert_eq!(again.label.as_deref(), Some("t"));

    let r = rule_decl(&sig(), "(rule r :lvars (x:Int y:Int) (f x) (g y) :guard (>= x y))").unwrap();
    assert_eq!(rule_decl(&sig(), &print_rule(&r)).unwrap(), r);
}

#[test]
fn model_declaration_selects_backend() {
    let file = parse_source(&format!("{VOCAB}(model finite:-2:3)\n")).unwrap();
    assert_eq!(file.model, Some(Backend::Finite(FiniteDomain::new(-2, 3))));
    let file = parse_source(VOCAB).unwrap();
    assert_eq!(file.model, None);
}

#[test]
fn comments_and_lookup() {
    let src = format!(
        "; leading comment\n{VOCAB}(rule r :lvars (x:Int) (f x) (g x) :guard (> x 0)) ; trailing\n(cterm s :logical (x:Int) (f x) :guard (> x 1))\n"
    );
    let file = parse_source(&src).unwrap();
    assert!(file.rule("r").is_some());
    assert!(file.cterm("s").is_some());
    assert!(file.rule("s").is_none());
    assert!(file.resolve_cterm("s").is_ok());
    assert!(file.resolve_cterm("(cterm :logical () (f 1))").is_ok());
    assert!(matches!(file.resolve_cterm("nope"), Err(Error::UnknownSymbol(_))));
}

#[test]
fn bool_theory_terms() {
    let d = cterm_decl(&sig(), "(cterm :logical (p:Bool) (b p) :guard (or p (not p)))").unwrap();
    assert!(d.ecterm().unwrap().is_well_formed());
    let printed = print_cterm(&d.ecterm().unwrap(), None);
    assert_eq!(printed, "(cterm :logical (p:Bool) (b p) :guard (or p (not p)))");
}
