mod common;

use common::{ec, rule, sig};
use lctrs_core::constraints::{FiniteDomain, Solver};
use lctrs_core::equivalence::{equiv_general, subsumes_oracle};
use lctrs_core::rewriting::{
    all_successors, all_successors_with, derive, describe_step, find_redexes, reachable_deferred, redex_at,
    DeriveOptions, Mutation, StepOptions, Strategy,
};
use lctrs_core::rules::calc_rules;
use lctrs_core::terms::Position;
use lctrs_core::Error;

const START: &str = "(cterm :logical (x:Int) (f x) :guard (> x 2))";
const RHO: &str = "(rule rho :lvars (x:Int y:Int) (f x) (g y) :guard (and (>= x 1) (>= (+ x 1) y)))";

#[test]
fn calculation_step_moves_arithmetic_into_the_constraint() {
    let start = ec("(cterm :logical (x:Int) (f (+ x 1)) :guard (> x 0))");
    let solver = Solver::builtin();
    let steps = all_successors(&start, &calc_rules(&sig()), &solver).unwrap();
    assert_eq!(steps.len(), 1);
    assert_eq!(steps[0].redex.position, "1".parse::<Position>().unwrap());
    let expected = ec("(cterm :logical (y:Int) (f y) :guard (> y 1))");
    assert!(equiv_general(&steps[0].target, &expected, &solver).unwrap().equal);
}

#[test]
fn guard_must_be_entailed() {
    let solver = Solver::builtin();
    let start = ec("(cterm :logical (x:Int) (f x) :guard (> x -5))");
    assert!(find_redexes(&start, &rule(RHO), &solver).unwrap().is_empty());
    let root = Position::root();
    assert!(redex_at(&start, &rule(RHO), &root, &solver, StepOptions::default()).unwrap().is_none());
}

#[test]
fn left_variables_must_match_logical_positions() {
    // x is matched against a non-logical variable
    let solver = Solver::builtin();
    let start = ec("(cterm :logical () (f x:Int) :guard true)");
    let r = rule("(rule r :lvars (x:Int) (f x) (g x) :guard (> x 0))");
    assert!(find_redexes(&start, &r, &solver).unwrap().is_empty());
    let unguarded = rule("(rule r :lvars () (f x:Int) (g x))");
    assert_eq!(find_redexes(&start, &unguarded, &solver).unwrap().len(), 1);
}

#[test]
fn most_general_reduct_subsumes_legacy_instances() {
    let solver = Solver::builtin();
    let steps = all_successors(&ec(START), &[rule(RHO)], &solver).unwrap();
    assert_eq!(steps.len(), 1);
    let reduct = &steps[0].target;
    let domain = FiniteDomain::new(-1, 6);
    for legacy in [
        "(cterm :logical () (g 3) :exists (x:Int) :guard (> x 2))",
        "(cterm :logical (x:Int) (g x) :guard (> x 2))",
        "(cterm :logical () (g 4) :guard true)",
    ] {
        assert!(subsumes_oracle(&ec(legacy), reduct, &domain, &solver).unwrap(), "{legacy}");
    }
    let too_big = ec("(cterm :logical () (g 5) :guard true)");
    assert!(subsumes_oracle(&too_big, reduct, &domain, &solver).unwrap());
    assert!(describe_step(&steps[0]).contains("→[rho @ e]"));
}

#[test]
fn skipping_freshening_captures_variables() {
    let solver = Solver::builtin();
    let clash = rule("(rule rho :lvars (x:Int y:Int) (f x) (g y) :guard (and (>= x 1) (>= (+ x 1) y)))");
    let start = ec("(cterm :logical (y:Int) (f y) :guard (> y 2))");
    let good = all_successors(&start, std::slice::from_ref(&clash), &solver).unwrap();
    let bad = all_successors_with(
        &start,
        std::slice::from_ref(&clash),
        &solver,
        StepOptions::mutated(Mutation::SkipFreshening),
    )
    .unwrap();
    assert_eq!(good.len(), 1);
    let expected = ec("(cterm :logical (z:Int) (g z) :exists (y:Int) :guard (and (> y 2) (>= (+ y 1) z)))");
    assert!(equiv_general(&good[0].target, &expected, &solver).unwrap().equal);
    assert!(bad.iter().all(|s| !s.target.is_well_formed()
        || !equiv_general(&s.target, &expected, &solver).unwrap().equal));
}

#[test]
fn mutation_names_round_trip() {
    for m in Mutation::ALL {
        assert_eq!(m.name().parse::<Mutation>().unwrap(), m);
    }
    assert_eq!(
        Mutation::ALL.map(Mutation::name),
        ["drop-cond3", "skip-freshening", "y-without-exvar"]
    );
}

#[test]
fn derive_strategies_and_limits() {
    let solver = Solver::builtin();
    let rules = vec![
        rule("(rule a :lvars (x:Int) (f x) (g x) :guard (> x 0))"),
        rule("(rule b :lvars (x:Int) (g x) (f (+ x 1)) :guard (> x 0))"),
    ];
    let start = ec("(cterm :logical (x:Int) (f x) :guard (> x 0))");
    let opts = |strategy, max_depth, max_steps| DeriveOptions {
        max_depth,
        strategy,
        max_steps,
    };
    let all = derive(&start, &rules, opts(Strategy::All, 3, 1000), &solver).unwrap();
    // f(x+1) has no logical variable at the argument, so `a` stops there
    assert_eq!(all.derivations.len(), 3);
    assert!(!all.truncated);
    assert!(all.derivations.windows(2).all(|w| w[0].steps.len() <= w[1].steps.len()));
    let bfs = derive(&start, &rules, opts(Strategy::Bfs, 3, 1000), &solver).unwrap();
    assert!(bfs.derivations.len() <= all.derivations.len());
    let looping = vec![
        rule("(rule a :lvars (x:Int) (f x) (g x) :guard (> x 0))"),
        rule("(rule c :lvars (x:Int) (g x) (f x) :guard (> x 0))"),
    ];
    let cut = derive(&start, &looping, opts(Strategy::Dfs, 10, 2), &solver).unwrap();
    assert!(cut.truncated);
    assert!("sideways".parse::<Strategy>().is_err());

    let broke = Solver::builtin().with_budget(1);
    let r = derive(&start, &rules, opts(Strategy::Bfs, 3, 1000), &broke).unwrap();
    assert!(r.truncated);
}

#[test]
fn derivation_json() {
    let solver = Solver::builtin();
    let d = derive(&ec(START), &[rule(RHO)], DeriveOptions::default(), &solver).unwrap();
    let last = d.derivations.last().unwrap();
    let j = last.to_json();
    assert_eq!(j["steps"].as_array().unwrap().len(), 1);
    assert_eq!(j["steps"][0]["position"], "e");
    assert!(j["end"].as_str().unwrap().starts_with("(cterm"));
}

#[test]
fn deferred_search_checks_each_endpoint_once() {
    let solver = Solver::builtin();
    let rules = vec![
        rule("(rule a :lvars (x:Int) (f x) (g x) :guard (> x 0))"),
        rule("(rule b :lvars (x:Int y:Int) (g x) (h x y) :guard (= y (+ x x)))"),
    ];
    let start = ec("(cterm :logical (x:Int) (f x) :guard (= x 2))");
    let goal = ec("(cterm :logical () (h 2 4) :guard true)");
    let r = reachable_deferred(&start, &goal, &rules, 4, 100, &solver).unwrap();
    let d = r.derivation.unwrap();
    assert_eq!(d.steps.len(), 2);
    assert!(d.final_equiv.unwrap().equal);
    assert_eq!(r.equivalence_checks, r.endpoints_explored);
    assert_eq!(r.endpoints_explored, 3);

    let unreachable = ec("(cterm :logical () (h 2 5) :guard true)");
    let r = reachable_deferred(&start, &unreachable, &rules, 4, 100, &solver).unwrap();
    assert!(r.derivation.is_none());
    assert!(!r.truncated);

    let valued = vec![rule("(rule c :lvars () (f 2) (g 2))")];
    assert!(matches!(
        reachable_deferred(&start, &goal, &valued, 4, 100, &solver),
        Err(Error::NotLeftValueFree)
    ));
}
