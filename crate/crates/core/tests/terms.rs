mod common;

use std::collections::BTreeSet;

use common::{int, sig, term};
use lctrs_core::terms::{match_general, match_linear, NameGen, Position, Sort, Subst, Term, Var};
use lctrs_core::Error;

fn pos(s: &str) -> Position {
    s.parse().unwrap()
}

#[test]
fn root_position_prints_as_e() {
    assert_eq!(Position::root().to_string(), "e");
    assert_eq!(pos("e"), Position::root());
    assert_eq!(pos("2.1").to_string(), "2.1");
    assert!(matches!("0".parse::<Position>(), Err(Error::InvalidPosition(_))));
    assert!(matches!("1.x".parse::<Position>(), Err(Error::InvalidPosition(_))));
}

#[test]
fn positions_prefix_and_parallel() {
    let p = pos("1");
    let q = pos("1.2");
    assert!(p.is_prefix_of(&q));
    assert!(!q.is_prefix_of(&p));
    assert!(pos("1.1").parallel(&q));
    assert!(!p.parallel(&q));
    assert_eq!(p.concat(&pos("2")), q);
    assert_eq!(p.child(2), q);
}

#[test]
fn subterm_access_and_replacement() {
    let t = term("(h x:Int (+ y:Int 1))");
    assert_eq!(t.positions().len(), 5);
    assert_eq!(t.at(&pos("2.2")), Some(&Term::int(1)));
    assert_eq!(t.at(&pos("3")), None);
    let u = t.replace_at(&pos("2"), Term::int(7)).unwrap();
    assert_eq!(u, term("(h x:Int 7)"));
    assert_eq!(t.value_positions(), vec![pos("2.2")]);
    assert_eq!(t.vars(), [int("x"), int("y")].into_iter().collect());
}

#[test]
fn linearity() {
    assert!(term("(h x:Int y:Int)").is_linear());
    let t = term("(h x:Int x)");
    assert!(!t.is_linear());
    assert_eq!(t.repeated_var(), Some(int("x")));
    let ys: BTreeSet<Var> = [int("y")].into_iter().collect();
    assert!(t.is_linear_in(&ys));
}

#[test]
fn linear_matching() {
    let m = match_linear(&term("(h x:Int y:Int)"), &term("(h 1 (+ z:Int 2))")).unwrap().unwrap();
    assert_eq!(m.apply_var(&int("x")), Term::int(1));
    assert_eq!(m.apply_var(&int("y")), term("(+ z:Int 2)"));
    assert_eq!(m.apply(&term("(h x:Int y:Int)")), term("(h 1 (+ z:Int 2))"));
    assert!(match_linear(&term("(f 0)"), &term("(f x:Int)")).unwrap().is_none());
    assert!(match_linear(&term("(k (f x:Int))"), &term("(k (g 1))")).unwrap().is_none());
}

#[test]
fn nonlinear_pattern_is_rejected_by_linear_matching() {
    let r = match_linear(&term("(h x:Int x)"), &term("(h 1 1)"));
    assert!(matches!(r, Err(Error::NonlinearPattern(_))));
}

#[test]
fn general_matching_handles_repeated_variables() {
    let p = term("(h x:Int x)");
    assert!(match_general(&p, &term("(h 1 1)")).is_some());
    assert!(match_general(&p, &term("(h 1 2)")).is_none());
}

#[test]
fn substitution_composition_and_renaming() {
    let s = Subst::singleton(int("x"), Term::var(&int("y")));
    let t = Subst::singleton(int("y"), Term::int(3));
    let ts = t.compose(&s);
    assert_eq!(ts.apply(&term("(f x:Int)")), term("(f 3)"));
    assert!(s.is_renaming());
    assert!(!t.is_renaming());
    let inv = s.inverse().unwrap();
    assert_eq!(inv.apply_var(&int("y")), Term::var(&int("x")));
}

#[test]
fn name_generator_suffixes_and_never_repeats() {
    let mut g = NameGen::new();
    let avoid: BTreeSet<Var> = [int("x")].into_iter().collect();
    let a = g.fresh("x", &Sort::int(), &avoid);
    let b = g.fresh("x", &Sort::int(), &avoid);
    let c = g.fresh("x#1", &Sort::int(), &BTreeSet::new());
    assert_eq!(a.name(), "x#1");
    assert_eq!(b.name(), "x#2");
    assert_eq!(c.name(), "x");
}

#[test]
fn fresh_renaming_is_disjoint_from_avoid_and_domain() {
    let mut g = NameGen::new();
    let vars: BTreeSet<Var> = [int("x"), int("y")].into_iter().collect();
    let avoid: BTreeSet<Var> = [int("x#1")].into_iter().collect();
    let r = g.fresh_renaming(&vars, &avoid);
    assert!(r.is_renaming());
    let image = r.range_vars();
    assert!(image.is_disjoint(&vars));
    assert!(image.is_disjoint(&avoid));
    assert_eq!(image.len(), 2);
}

#[test]
fn signature_errors() {
    let s = sig();
    assert!(matches!(s.app("nope", vec![]), Err(Error::UnknownSymbol(_))));
    assert!(s.app("h", vec![Term::int(1)]).is_err());
    assert!(s.app("f", vec![Term::boolean(true)]).is_err());
    assert!(common::parse_err("(sort T :term)\n(sort T :term)").is_none());
    assert!(matches!(
        common::parse_err("(sort T :term)\n(sort T :theory)"),
        Some(Error::SortMismatch(_) | Error::Parse { .. })
    ));
    assert!(common::parse_err("(sort T :term)\n(fun f (Int) T :term)\n(fun f (Int) Int :term)").is_some());
    assert!(common::parse_err("(fun 3 () Int :theory)").is_some());
}

#[test]
fn theory_terms() {
    assert!(term("(+ x:Int 1)").is_theory_term());
    assert!(!term("(f x:Int)").is_theory_term());
    assert_eq!(term("(f (+ 1 2))").size(), 4);
}
