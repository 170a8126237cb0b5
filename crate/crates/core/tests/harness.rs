use lctrs_core::constraints::{FiniteDomain, Solver};
use lctrs_core::equivalence::{equiv_general, equiv_oracle};
use lctrs_core::harness::checks::{check, Ctx, Instance, Verdict};
use lctrs_core::harness::{
    check_theorem, fixed_pairs, gen_ecterm, gen_equiv_pair, gen_lctrs, run_suite, GenConfig, TheoremId,
};
use lctrs_core::rewriting::{Mutation, StepOptions};
use lctrs_core::syntax::parse_source;
use lctrs_core::Error;

fn cfg(seed: u64, count: usize, theorems: &[TheoremId]) -> GenConfig {
    GenConfig {
        seed,
        count,
        theorems: theorems.to_vec(),
        ..GenConfig::default()
    }
}

#[test]
fn theorem_ids_parse() {
    assert_eq!(TheoremId::parse_list("all").unwrap().len(), 17);
    let bullets = TheoremId::parse_list("BULLET-*").unwrap();
    assert_eq!(bullets.len(), 3);
    assert!(bullets.iter().all(|t| t.name().starts_with("BULLET-")));
    let two = TheoremId::parse_list("WD, UNIQ,WD").unwrap();
    assert_eq!(two, vec![TheoremId::Wd, TheoremId::Uniq]);
    assert!(matches!(TheoremId::parse_list("WD,NOPE"), Err(Error::UnknownTheorem(_))));
    for t in TheoremId::ALL {
        assert_eq!(t.name().parse::<TheoremId>().unwrap(), t);
        assert!(!t.statement().is_empty());
    }
}

#[test]
fn generators_are_deterministic() {
    let c = GenConfig::default();
    assert_eq!(gen_lctrs(&c, false).1, gen_lctrs(&c, false).1);
    assert_eq!(gen_ecterm(&c, false).unwrap(), gen_ecterm(&c, false).unwrap());
    let other = GenConfig { seed: 43, ..GenConfig::default() };
    let many: Vec<_> = (0..5u64)
        .map(|s| gen_ecterm(&GenConfig { seed: s, ..GenConfig::default() }, false).unwrap())
        .collect();
    assert!(many.windows(2).any(|w| w[0] != w[1]));
    let _ = gen_lctrs(&other, true);
}

#[test]
fn generated_objects_have_their_properties() {
    let solver = Solver::builtin();
    let domain = FiniteDomain::new(-3, 4);
    for seed in 0..20 {
        let c = GenConfig { seed, ..GenConfig::default() };
        let (_, rules) = gen_lctrs(&c, true);
        assert!(rules.iter().all(|r| r.is_well_formed() && r.is_left_value_free() && r.is_left_linear()));
        let t = gen_ecterm(&c, false).unwrap();
        assert!(t.is_well_formed());
        assert!(solver.is_satisfiable(t.constraint()).unwrap());
        let p = gen_ecterm(&c, true).unwrap();
        assert!(p.is_well_formed() && p.is_pattern_general());
        let (a, b) = gen_equiv_pair(&c).unwrap();
        assert!(equiv_general(&a, &b, &solver).unwrap().equal, "seed {seed}");
        assert!(equiv_oracle(&a, &b, &domain, &solver).unwrap(), "seed {seed}");
    }
}

#[test]
fn fixed_pairs_have_expected_verdicts() {
    let solver = Solver::builtin();
    for (a, b, want) in fixed_pairs() {
        assert_eq!(equiv_general(&a, &b, &solver).unwrap().equal, want);
    }
}

#[test]
fn suite_runs_are_reproducible() {
    let c = cfg(3, 20, &[TheoremId::Wd, TheoremId::Eqmap]);
    let a = run_suite(&c).unwrap();
    let b = run_suite(&c).unwrap();
    assert!(a.success());
    for (x, y) in a.reports.iter().zip(&b.reports) {
        assert_eq!(x.id, y.id);
        assert_eq!(x.instances, y.instances);
        assert_eq!(x.vacuous, y.vacuous);
        assert_eq!(x.solver_calls, y.solver_calls);
    }
    let j = a.to_json();
    assert_eq!(j["seed"], 3);
    assert!(a.table().contains("EQMAP"));
}

#[test]
fn uniqueness_holds_on_another_seed() {
    let r = check_theorem(TheoremId::Uniq, &cfg(7, 200, &[])).unwrap();
    assert!(r.passed(), "{:?}", r.failures);
    assert!(r.vacuous < r.instances);
}

#[test]
fn lvf_commutation_holds_on_another_seed() {
    let r = check_theorem(TheoremId::CommLvf, &cfg(7, 100, &[])).unwrap();
    assert!(r.passed(), "{:?}", r.failures);
}

#[test]
fn budget_exhaustion_is_reported_not_failed() {
    let c = GenConfig {
        budget: Some(3),
        ..cfg(1, 10, &[])
    };
    let r = check_theorem(TheoremId::Wd, &c).unwrap();
    assert!(r.budget_exhausted);
    assert!(r.failures.is_empty());
    assert!(!r.passed());
}

#[test]
fn skipped_freshening_yields_a_replayable_counterexample() {
    let c = GenConfig {
        mutation: Some(Mutation::SkipFreshening),
        ..cfg(42, 200, &[])
    };
    let r = check_theorem(TheoremId::Uniq, &c).unwrap();
    assert_eq!(r.mutation, Some("skip-freshening"));
    let f = r.failures.first().expect("mutation must be caught");

    let file = parse_source(&f.counterexample).unwrap();
    let inst = Instance {
        rules: file.rules.clone(),
        terms: file.cterms.iter().map(|d| d.ecterm().unwrap()).collect(),
        ..Instance::default()
    };
    let solver = Solver::builtin();
    let mut ctx = Ctx {
        solver: &solver,
        oracle: &solver,
        domain: FiniteDomain::new(c.domain.0, c.domain.1),
        opts: StepOptions::mutated(Mutation::SkipFreshening),
    };
    assert!(matches!(check(TheoremId::Uniq, &inst, &ctx).unwrap(), Verdict::Fail(_)));
    ctx.opts = StepOptions::default();
    assert!(!matches!(check(TheoremId::Uniq, &inst, &ctx).unwrap(), Verdict::Fail(_)));
}
