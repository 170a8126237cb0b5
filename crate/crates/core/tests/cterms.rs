mod common;

use std::collections::BTreeSet;

use common::{ec, int, nq, term};
use lctrs_core::constraints::{ExistentialConstraint, Solver};
use lctrs_core::cterms::{bullet, bullet_subst_at, ext, pg, rmv, ECTerm, NQTerm};
use lctrs_core::equivalence::equiv_general;
use lctrs_core::syntax::print_cterm;
use lctrs_core::terms::{match_linear, NameGen, Position, Term, Var};
use lctrs_core::Error;

fn set(names: &[&str]) -> BTreeSet<Var> {
    names.iter().map(|n| int(n)).collect()
}

#[test]
fn well_formedness_clauses() {
    let c = common::con("(> x:Int y:Int)");
    let free_not_logical = ECTerm::from_parts(set(&["x"]), term("(f x:Int)"), c.clone().into());
    assert!(free_not_logical.diagnostics().iter().any(|d| d.contains("FVar")));

    let logical_not_in_term = ECTerm::from_parts(set(&["x", "y"]), term("(f x:Int)"), c.clone().into());
    assert!(logical_not_in_term.diagnostics().iter().any(|d| d.contains("X ⊆ Var(s)")));

    let bound_in_term = ECTerm::from_parts(
        set(&["x"]),
        term("(h x:Int y:Int)"),
        ExistentialConstraint::new([int("y")], c.clone()),
    );
    assert!(bound_in_term.diagnostics().iter().any(|d| d.contains("BVar")));

    let ok = ECTerm::new(set(&["x"]), term("(f x:Int)"), ExistentialConstraint::new([int("y")], c));
    assert!(ok.unwrap().is_well_formed());

    let bad = ECTerm::new(set(&["z"]), term("(f x:Int)"), common::con("true").into());
    assert!(matches!(bad, Err(Error::IllFormed(_))));
}

#[test]
fn nonquantified_well_formedness() {
    let ok = NQTerm::new(set(&["x", "y"]), term("(f x:Int)"), common::con("(> x:Int y:Int)"));
    assert!(ok.is_ok());
    let bad = NQTerm::new(set(&["x"]), term("(f x:Int)"), common::con("(> x:Int y:Int)"));
    assert!(bad.is_err());
    let lifted = NQTerm::lift(term("(f x:Int)"), common::con("(> y:Int 0)"));
    assert_eq!(lifted.logical(), &set(&["y"]));
    assert!(lifted.is_well_formed());
}

#[test]
fn ext_binds_constraint_only_variables() {
    let n = nq("(cterm :logical (x:Int z:Int) (f x) :guard (< x z))");
    let e = ext(&n);
    assert_eq!(e.logical(), &set(&["x"]));
    assert_eq!(e.constraint().bound(), &[int("z")]);
    assert!(e.is_well_formed());
    assert_eq!(rmv(&e), n);
}

#[test]
fn rmv_then_ext_is_identity_on_well_formed_terms() {
    for src in [
        "(cterm :logical (x:Int) (f x) :exists (y:Int) :guard (and (> y 0) (= x (+ y y))))",
        "(cterm :logical () (f 3) :exists (x:Int) :guard (> x 2))",
        "(cterm :logical (x:Int y:Int) (h x y) :guard (< x y))",
    ] {
        let e = ec(src);
        assert_eq!(ext(&rmv(&e)), e, "{src}");
    }
}

#[test]
fn pattern_general_form() {
    let e = ec("(cterm :logical (x:Int) (h x x) :guard (> x 0))");
    assert!(!e.is_pattern_general());
    let p = pg(&e, &mut NameGen::new());
    assert!(p.is_well_formed());
    assert!(p.is_pattern_general());
    assert_eq!(
        print_cterm(&p, None),
        "(cterm :logical (w:Int w#1:Int) (h w w#1) :exists (x:Int) :guard (and (and (> x 0) (= x w)) (= x w#1)))"
    );
    assert!(equiv_general(&e, &p, &Solver::builtin()).unwrap().equal);

    let v = ec("(cterm :logical () (h 1 y:Int) :guard true)");
    let pv = pg(&v, &mut NameGen::new());
    assert!(pv.is_pattern_general());
    assert_eq!(pv.term().vars().len(), 2);
}

#[test]
fn bullet_abstracts_logical_and_value_positions() {
    let xs = set(&["x"]);
    let s = term("(k (h x:Int 2))");
    let br = bullet(&xs, &s, &BTreeSet::new(), &mut NameGen::new());
    let p11: Position = "1.1".parse().unwrap();
    let p12: Position = "1.2".parse().unwrap();
    assert_eq!(br.positions, vec![p11.clone(), p12.clone()]);
    assert_eq!(br.fresh_vars.len(), 2);
    assert!(br.fresh_vars.iter().all(|v| !xs.contains(v)));
    assert_eq!(br.subterm_map.apply(&br.abstracted), s);
    assert_eq!(br.at(&p11), Some(&Term::var(&br.fresh_vars[0])));

    // γ^• for the matcher of h(a, b) at position 1
    let lhs = term("(h a:Int b:Int)");
    let p1: Position = "1".parse().unwrap();
    let gamma = match_linear(&lhs, s.at(&p1).unwrap()).unwrap().unwrap();
    let gb = bullet_subst_at(&br, &lhs, &p1, &gamma).unwrap();
    assert_eq!(gb.apply(&lhs), *br.at(&p1).unwrap());
}

#[test]
fn bullet_leaves_non_logical_variables_alone() {
    let s = term("(h x:Int y:Int)");
    let br = bullet(&set(&["x"]), &s, &BTreeSet::new(), &mut NameGen::new());
    assert_eq!(br.positions.len(), 1);
    assert!(br.abstracted.vars().contains(&int("y")));
}
