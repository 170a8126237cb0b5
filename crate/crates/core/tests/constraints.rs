mod common;

use std::collections::{BTreeSet, HashMap};

use common::{con, int};
use lctrs_core::constraints::{
    lia, parse_range, Backend, Constraint, ExistentialConstraint, FiniteDomain, Formula, Solver,
};
use lctrs_core::terms::{builtins, Term, Value, Var};
use lctrs_core::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ec(bound: &[&str], body: &str) -> ExistentialConstraint {
    ExistentialConstraint::new(bound.iter().map(|b| int(b)), con(body))
}

#[test]
fn bound_variables_follow_first_occurrence_and_unused_are_dropped() {
    let e = ec(&["z", "y", "w"], "(and (> y:Int 0) (< z:Int y))");
    let names: Vec<&str> = e.bound().iter().map(Var::name).collect();
    assert_eq!(names, ["y", "z"]);
    assert!(e.free_vars().is_empty());
    assert_eq!(e.to_string(), "∃y,z. (and (> y 0) (< z y))");
}

#[test]
fn substitution_avoids_capture() {
    // ∃y. x < y with x ↦ y must not capture
    let e = ec(&["y"], "(< x:Int y:Int)");
    let s = lctrs_core::terms::Subst::singleton(int("x"), Term::var(&int("y")));
    let applied = e.apply(&s);
    assert_eq!(applied.free_vars(), [int("y")].into_iter().collect());
    assert_eq!(applied.bound().len(), 1);
    assert_ne!(applied.bound()[0], int("y"));
    let solver = Solver::builtin();
    assert!(solver.is_valid(&applied).unwrap());
}

#[test]
fn basic_queries() {
    let s = Solver::builtin();
    assert!(s.is_valid(&con("(or (> x:Int 0) (<= x 0))").into()).unwrap());
    assert!(!s.is_valid(&con("(> x:Int 0)").into()).unwrap());
    assert!(s.is_satisfiable(&con("(> x:Int 0)").into()).unwrap());
    assert!(!s.is_satisfiable(&con("(and (> x:Int 0) (< x 1))").into()).unwrap());
    assert!(s.implies(&con("(> x:Int 2)").into(), &con("(>= x:Int 1)").into()).unwrap());
    assert!(s.implies(&con("(> x:Int 2)").into(), &ec(&["y"], "(< x:Int y:Int)")).unwrap());
    assert!(s
        .entails_eq(&con("(= (+ x:Int 1) 4)").into(), &Term::var(&int("x")), &Term::int(3))
        .unwrap());
    assert!(s.calls() > 0);
}

#[test]
fn determined_values() {
    let s = Solver::builtin();
    let e: ExistentialConstraint = con("(and (>= (* 2 x:Int) 6) (<= x 3))").into();
    assert_eq!(s.determined_value(&e, &int("x")).unwrap(), Some(Value::Int(3)));
    let e: ExistentialConstraint = con("(> x:Int 2)").into();
    assert_eq!(s.determined_value(&e, &int("x")).unwrap(), None);
    let e = ec(&["y"], "(and (= x:Int (+ y:Int 1)) (= y 4))");
    assert_eq!(s.determined_value(&e, &int("x")).unwrap(), Some(Value::Int(5)));
}

#[test]
fn out_of_range_determined_value_overflows() {
    let s = Solver::builtin();
    let e: ExistentialConstraint = con("(= x:Int (+ 9223372036854775807 1))").into();
    assert_eq!(s.determined_value(&e, &int("x")), Err(Error::Overflow));
}

#[test]
fn budget_is_enforced() {
    let s = Solver::builtin().with_budget(2);
    let c: ExistentialConstraint = con("(> x:Int 0)").into();
    s.is_satisfiable(&c).unwrap();
    s.is_satisfiable(&c).unwrap();
    assert!(matches!(s.is_satisfiable(&c), Err(Error::BudgetExhausted(_))));
}

#[test]
fn elimination_introduces_divisibility() {
    let x = int("x");
    let even = Formula::exists(vec![int("y")], Formula::Atom(con("(= x:Int (* 2 y:Int))")));
    let q = lia::eliminate(&even).unwrap();
    for (n, want) in [(4, true), (3, false), (-6, true), (0, true), (-1, false)] {
        let env: HashMap<Var, Value> = [(x.clone(), Value::Int(n))].into_iter().collect();
        assert_eq!(q.eval_values(&env).unwrap(), want, "x = {n}");
    }
    let parity = Formula::forall(
        vec![x.clone()],
        Formula::Or(vec![
            even.clone(),
            Formula::exists(vec![int("y")], Formula::Atom(con("(= x:Int (+ (* 2 y:Int) 1))"))),
        ]),
    );
    assert!(lia::valid(&parity).unwrap());
    assert!(!lia::valid(&Formula::forall(vec![x], even)).unwrap());
}

#[test]
fn nonlinear_arithmetic_is_unsupported() {
    let s = Solver::builtin();
    let r = s.is_satisfiable(&con("(= (* x:Int y:Int) 2)").into());
    assert!(matches!(r, Err(Error::UnsupportedTheory(_))));
}

#[test]
fn backend_parsing() {
    assert_eq!("builtin".parse::<Backend>().unwrap(), Backend::Builtin);
    assert_eq!(
        "finite:-2:3".parse::<Backend>().unwrap(),
        Backend::Finite(FiniteDomain::new(-2, 3))
    );
    assert_eq!("smtlib:z3 -in".parse::<Backend>().unwrap(), Backend::SmtLib("z3 -in".into()));
    assert!("smtlib:".parse::<Backend>().is_err());
    assert!("cvc".parse::<Backend>().is_err());
    assert_eq!(parse_range("-1:5"), Some((-1, 5)));
    assert_eq!(parse_range("3"), None);
}

#[test]
fn missing_external_solver_is_an_error() {
    let s = Solver::new(Backend::SmtLib("/nonexistent/solver-binary".into()));
    let r = s.is_valid(&con("(> x:Int 0)").into());
    assert!(r.is_err());
}

#[test]
fn finite_backend_sees_only_its_domain() {
    let s = Solver::new(Backend::Finite(FiniteDomain::new(0, 4)));
    assert!(s.is_valid(&con("(<= x:Int 4)").into()).unwrap());
    assert!(!Solver::builtin().is_valid(&con("(<= x:Int 4)").into()).unwrap());
}

// Independent evaluator over constraint terms.

#[derive(Clone, Copy, Debug, PartialEq)]
enum V {
    I(i64),
    B(bool),
}

fn eval(t: &Term, env: &HashMap<Var, i64>) -> V {
    match t {
        Term::Var(x) => V::I(env[x]),
        Term::Val(Value::Int(n)) => V::I(*n),
        Term::Val(Value::Bool(b)) => V::B(*b),
        Term::App(f, args) => {
            let a: Vec<V> = args.iter().map(|u| eval(u, env)).collect();
            let i = |k: usize| match a[k] {
                V::I(n) => n,
                V::B(_) => panic!("int expected"),
            };
            let b = |k: usize| match a[k] {
                V::B(v) => v,
                V::I(_) => panic!("bool expected"),
            };
            match (&*f.name, a.len()) {
                ("+", 2) => V::I(i(0) + i(1)),
                ("-", 2) => V::I(i(0) - i(1)),
                ("-", 1) => V::I(-i(0)),
                ("*", 2) => V::I(i(0) * i(1)),
                ("<", 2) => V::B(i(0) < i(1)),
                ("<=", 2) => V::B(i(0) <= i(1)),
                (">", 2) => V::B(i(0) > i(1)),
                (">=", 2) => V::B(i(0) >= i(1)),
                ("=", 2) => V::B(a[0] == a[1]),
                ("and", 2) => V::B(b(0) && b(1)),
                ("or", 2) => V::B(b(0) || b(1)),
                ("not", 1) => V::B(!b(0)),
                ("=>", 2) => V::B(!b(0) || b(1)),
                (op, _) => panic!("unexpected `{op}`"),
            }
        }
    }
}

fn random_int(rng: &mut ChaCha8Rng, vars: &[Var], depth: usize) -> Term {
    if depth == 0 || rng.gen_bool(0.4) {
        return if rng.gen_bool(0.6) {
            Term::var(&vars[rng.gen_range(0..vars.len())])
        } else {
            Term::int(rng.gen_range(-3..=3))
        };
    }
    match rng.gen_range(0..4) {
        0 => Term::app(&builtins::add(), vec![random_int(rng, vars, depth - 1), random_int(rng, vars, depth - 1)]),
        1 => Term::app(&builtins::sub(), vec![random_int(rng, vars, depth - 1), random_int(rng, vars, depth - 1)]),
        2 => Term::app(&builtins::neg(), vec![random_int(rng, vars, depth - 1)]),
        _ => Term::app(&builtins::mul(), vec![Term::int(rng.gen_range(-3..=3)), random_int(rng, vars, depth - 1)]),
    }
}

fn random_bool(rng: &mut ChaCha8Rng, vars: &[Var], depth: usize) -> Term {
    if depth == 0 || rng.gen_bool(0.3) {
        let ops = [builtins::lt(), builtins::le(), builtins::gt(), builtins::ge(), builtins::eq(&lctrs_core::terms::Sort::int())];
        let op = &ops[rng.gen_range(0..ops.len())];
        return Term::app(op, vec![random_int(rng, vars, 2), random_int(rng, vars, 2)]);
    }
    let ops = [builtins::and(), builtins::or(), builtins::implies()];
    if rng.gen_bool(0.2) {
        return Term::app(&builtins::not(), vec![random_bool(rng, vars, depth - 1)]);
    }
    let op = &ops[rng.gen_range(0..ops.len())];
    Term::app(op, vec![random_bool(rng, vars, depth - 1), random_bool(rng, vars, depth - 1)])
}

const LO: i64 = -4;
const HI: i64 = 4;

fn box_assignments(vars: &[Var]) -> Vec<HashMap<Var, i64>> {
    let mut out = vec![HashMap::new()];
    for x in vars {
        out = out
            .into_iter()
            .flat_map(|m| {
                (LO..=HI).map(move |n| {
                    let mut m = m.clone();
                    m.insert(x.clone(), n);
                    m
                })
            })
            .collect();
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn solvers_agree_with_independent_evaluation(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vars = vec![int("x"), int("y")];
        let t = random_bool(&mut rng, &vars, 3);
        let c = Constraint::new(t.clone()).unwrap();
        let used: BTreeSet<Var> = c.vars();
        let used: Vec<Var> = vars.into_iter().filter(|v| used.contains(v)).collect();
        let truth: Vec<bool> = box_assignments(&used)
            .iter()
            .map(|env| eval(&t, env) == V::B(true))
            .collect();
        let e: ExistentialConstraint = c.into();

        let finite = Solver::new(Backend::Finite(FiniteDomain::new(LO, HI)));
        prop_assert_eq!(finite.is_valid(&e).unwrap(), truth.iter().all(|b| *b));
        prop_assert_eq!(finite.is_satisfiable(&e).unwrap(), truth.iter().any(|b| *b));

        // the box is a subset of ℤ: witnesses and counterexamples transfer
        let builtin = Solver::builtin();
        if truth.iter().any(|b| *b) {
            prop_assert!(builtin.is_satisfiable(&e).unwrap());
        }
        if truth.iter().any(|b| !*b) {
            prop_assert!(!builtin.is_valid(&e).unwrap());
        }
        if used.is_empty() {
            prop_assert_eq!(builtin.is_valid(&e).unwrap(), truth[0]);
        }
    }
}
