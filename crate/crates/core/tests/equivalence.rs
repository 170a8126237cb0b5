mod common;

use common::{ec, int};
use lctrs_core::constraints::{FiniteDomain, Solver};
use lctrs_core::equivalence::{
    equiv_by_mapping, equiv_general, equiv_oracle, subsumes_oracle, subsumption_counterexample,
};
use lctrs_core::terms::{Subst, Term};
use lctrs_core::Error;

/// Thresholds stay well inside the oracle domain, so no verdict depends on
/// its bounds.
const DOMAIN: (i64, i64) = (-6, 6);

const CORPUS: [&str; 14] = [
    "(cterm :logical (x:Int) (f x) :guard (> x 2))",
    "(cterm :logical (y:Int) (f y) :guard (>= y 3))",
    "(cterm :logical (x:Int) (f x) :guard (>= x 0))",
    "(cterm :logical () (f 0) :guard true)",
    "(cterm :logical (x:Int) (f x) :guard (= x 0))",
    "(cterm :logical (x:Int) (f x) :exists (y:Int) :guard (and (= x (+ y 1)) (>= y 2)))",
    "(cterm :logical (x:Int y:Int) (h x y) :guard (= x y))",
    "(cterm :logical (x:Int) (h x x) :guard true)",
    "(cterm :logical (x:Int y:Int) (h x y) :guard (< x y))",
    "(cterm :logical (x:Int) (h x 1) :guard (= x 1))",
    "(cterm :logical () (h 1 1) :guard true)",
    "(cterm :logical () (g 3) :exists (x:Int) :guard (> x 2))",
    "(cterm :logical (x:Int) (g x) :guard (> x 2))",
    "(cterm :logical (x:Int y:Int) (h x y) :guard (and (= x 1) (= y 1)))",
];

#[test]
fn general_check_matches_oracle_on_corpus() {
    let solver = Solver::builtin();
    let domain = FiniteDomain::new(DOMAIN.0, DOMAIN.1);
    let terms: Vec<_> = CORPUS.iter().map(|s| ec(s)).collect();
    let mut equal = 0;
    for (i, a) in terms.iter().enumerate() {
        for (j, b) in terms.iter().enumerate() {
            let g = equiv_general(a, b, &solver).unwrap();
            let o = equiv_oracle(a, b, &domain, &solver).unwrap();
            assert_eq!(g.equal, o, "{} vs {}", CORPUS[i], CORPUS[j]);
            assert_eq!(g.equal, g.reason.is_none());
            if g.equal {
                equal += 1;
            }
        }
    }
    // diagonal, {0,1,5}, {3,4}, {6,7}, {9,10,13}
    assert_eq!(equal, 14 + 6 + 2 + 2 + 6);
}

#[test]
fn constant_and_variable_reducts_differ() {
    let solver = Solver::builtin();
    let g3 = ec(CORPUS[11]);
    let gx = ec(CORPUS[12]);
    let v = equiv_general(&g3, &gx, &solver).unwrap();
    assert!(!v.equal);
    assert!(v.reason.is_some());
    let domain = FiniteDomain::new(-1, 5);
    assert_eq!(
        subsumption_counterexample(&gx, &g3, &domain, &solver).unwrap(),
        Some(common::term("(g 4)"))
    );
    assert!(subsumes_oracle(&g3, &gx, &domain, &solver).unwrap());
}

#[test]
fn mapping_requires_values_to_be_forced() {
    let solver = Solver::builtin();
    let a = ec(CORPUS[2]);
    let b = ec(CORPUS[3]);
    let sigma = Subst::singleton(int("x"), Term::int(0));
    assert!(!equiv_by_mapping(&a, &b, &sigma, &solver).unwrap());
    let forced = ec(CORPUS[4]);
    assert!(equiv_by_mapping(&forced, &b, &sigma, &solver).unwrap());
}

#[test]
fn mapping_renames_logical_variables() {
    let solver = Solver::builtin();
    let a = ec(CORPUS[0]);
    let b = ec(CORPUS[1]);
    let sigma = Subst::singleton(int("x"), Term::var(&int("y")));
    assert!(equiv_by_mapping(&a, &b, &sigma, &solver).unwrap());
    let mut merge = Subst::singleton(int("y"), Term::var(&int("x")));
    merge.insert(int("x"), Term::var(&int("x")));
    // sufficient only: x = x keeps x free while `true` does not
    assert!(!equiv_by_mapping(&ec(CORPUS[6]), &ec(CORPUS[7]), &merge, &solver).unwrap());
    assert!(equiv_general(&ec(CORPUS[6]), &ec(CORPUS[7]), &solver).unwrap().equal);
    let hxx = ec("(cterm :logical (x:Int) (h x x) :guard (= x x))");
    assert!(equiv_by_mapping(&ec(CORPUS[6]), &hxx, &merge, &solver).unwrap());
    assert!(!equiv_by_mapping(&ec(CORPUS[8]), &ec(CORPUS[7]), &merge, &solver).unwrap());
}

#[test]
fn witness_is_reported() {
    let solver = Solver::builtin();
    let v = equiv_general(&ec(CORPUS[0]), &ec(CORPUS[1]), &solver).unwrap();
    assert!(v.equal);
    assert!(v.witness.is_some());
}

#[test]
fn unsatisfiable_input_is_rejected() {
    let solver = Solver::builtin();
    let bad = ec("(cterm :logical (x:Int) (f x) :guard (and (> x 0) (< x 0)))");
    let r = equiv_general(&bad, &ec(CORPUS[0]), &solver);
    assert_eq!(r, Err(Error::UnsatisfiableInput));
}
