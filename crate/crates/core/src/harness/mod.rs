//! Seeded property suite: one executable check per metatheorem, with
//! generators, shrinking and reports.

pub mod checks;
pub mod defer;
pub mod differential;
pub mod gen;
mod shrink;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Serialize, Serializer};

use crate::constraints::{Backend, Constraint, ExistentialConstraint, FiniteDomain, Solver};
use crate::cterms::{pg, ECTerm, NQTerm};
use crate::error::{Error, Result};
use crate::rewriting::{all_successors, Mutation, StepOptions};
use crate::rules::CRule;
use crate::terms::{NameGen, Signature, Subst, Term, Var};

pub use checks::{check, Ctx, Instance, Verdict};
pub use gen::{equiv_pair, Gen};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TheoremId {
    Wd,
    Fvar,
    Bvar,
    Rmv,
    Ext,
    Uniq,
    CommPg,
    LvfGen,
    PgStep,
    CommLvf,
    Defer,
    BulletBack,
    BulletSubst,
    BulletValid,
    Eqmap,
    ExtrmvId,
    Nqeq,
}

impl TheoremId {
    pub const ALL: [TheoremId; 17] = [
        TheoremId::Wd,
        TheoremId::Fvar,
        TheoremId::Bvar,
        TheoremId::Rmv,
        TheoremId::Ext,
        TheoremId::Uniq,
        TheoremId::CommPg,
        TheoremId::LvfGen,
        TheoremId::PgStep,
        TheoremId::CommLvf,
        TheoremId::Defer,
        TheoremId::BulletBack,
        TheoremId::BulletSubst,
        TheoremId::BulletValid,
        TheoremId::Eqmap,
        TheoremId::ExtrmvId,
        TheoremId::Nqeq,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TheoremId::Wd => "WD",
            TheoremId::Fvar => "FVAR",
            TheoremId::Bvar => "BVAR",
            TheoremId::Rmv => "RMV",
            TheoremId::Ext => "EXT",
            TheoremId::Uniq => "UNIQ",
            TheoremId::CommPg => "COMM-PG",
            TheoremId::LvfGen => "LVF-GEN",
            TheoremId::PgStep => "PG-STEP",
            TheoremId::CommLvf => "COMM-LVF",
            TheoremId::Defer => "DEFER",
            TheoremId::BulletBack => "BULLET-BACK",
            TheoremId::BulletSubst => "BULLET-SUBST",
            TheoremId::BulletValid => "BULLET-VALID",
            TheoremId::Eqmap => "EQMAP",
            TheoremId::ExtrmvId => "EXTRMV-ID",
            TheoremId::Nqeq => "NQEQ",
        }
    }

    pub fn statement(self) -> &'static str {
        match self {
            TheoremId::Wd => "every reduct of a well-formed satisfiable term is well-formed and satisfiable",
            TheoremId::Fvar => "FVar(∃y⃗.ψ) ⊆ ExVar(ρ) ∪ (X ∩ Var(t))",
            TheoremId::Bvar => "BVar grows, avoids the instantiated rule, and Y ∪ BVar = ExVar ∪ (X ∩ Var(t)) ∪ Var(ψ)",
            TheoremId::Rmv => "a step on an existentially constrained term is simulated on rmv(·) by ∼ · →legacy · ∼",
            TheoremId::Ext => "a legacy step is simulated on ext(·) by a step whose reduct subsumes ext of the legacy reduct",
            TheoremId::Uniq => "reducts by different fresh variants are equivalent",
            TheoremId::CommPg => "steps commute with ∼ on pattern-general terms",
            TheoremId::LvfGen => "replacing ρ by lvf(ρ) preserves steps and reducts up to ∼",
            TheoremId::PgStep => "with left-value-free rules, PG(s) has a step with an equivalent reduct",
            TheoremId::CommLvf => "steps by left-value-free rules commute with ∼",
            TheoremId::Defer => "a goal reachable by ∼·→ steps is reachable by → steps and one final ∼ check",
            TheoremId::BulletBack => "s• σ = s for the •-translation",
            TheoremId::BulletSubst => "s•|p = ℓγ• when s|p = ℓγ with ℓ linear and value-free",
            TheoremId::BulletValid => "⊨ ⋀ s(pᵢ) = xᵢ ⇒ u = u• for theory subterms u",
            TheoremId::Eqmap => "a mapping σ : V → 𝒱 ∪ Val with entailed identifications gives an equivalent term",
            TheoremId::ExtrmvId => "rmv ∘ ext and ext ∘ rmv are identities",
            TheoremId::Nqeq => "⟨X,s,φ⟩ ∼ ⟨X ∪ Var(π), s, φ ∧ π⟩ when ⊨ φ ⇒ ∃z⃗.π",
        }
    }

    fn index(self) -> u64 {
        TheoremId::ALL.iter().position(|t| *t == self).unwrap() as u64
    }

    /// Parse a comma-separated list; `all` and `BULLET-*` are accepted.
    pub fn parse_list(s: &str) -> Result<Vec<TheoremId>> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if part.eq_ignore_ascii_case("all") {
                out.extend(TheoremId::ALL);
            } else if part.eq_ignore_ascii_case("BULLET-*") {
                out.extend([TheoremId::BulletBack, TheoremId::BulletSubst, TheoremId::BulletValid]);
            } else {
                out.push(part.parse()?);
            }
        }
        let mut seen = BTreeSet::new();
        out.retain(|t| seen.insert(*t));
        Ok(out)
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownTheorem(s.to_string()))
    }
}

impl Serialize for TheoremId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

#[derive(Clone, Debug)]
pub struct GenConfig {
    pub seed: u64,
    /// Instances per theorem.
    pub count: usize,
    pub max_term_depth: usize,
    pub max_rule_count: usize,
    /// Theory sorts used by generated terms: `Int`, optionally `Bool`.
    pub sort_palette: Vec<String>,
    /// Bounds of the finite-model oracle.
    pub domain: (i64, i64),
    pub theorems: Vec<TheoremId>,
    pub mutation: Option<Mutation>,
    pub shrink: bool,
    /// Backend of the solver used by the code under test.
    pub backend: Backend,
    pub budget: Option<u64>,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 42,
            count: 100,
            max_term_depth: 2,
            max_rule_count: 3,
            sort_palette: vec!["Int".into()],
            domain: (-2, 3),
            theorems: TheoremId::ALL.to_vec(),
            mutation: None,
            shrink: true,
            backend: Backend::Builtin,
            budget: None,
        }
    }
}

impl GenConfig {
    fn opts(&self) -> StepOptions {
        StepOptions {
            mutation: self.mutation,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    /// Index of the failing instance.
    pub instance: usize,
    pub message: String,
    /// The shrunken instance as a source file.
    pub counterexample: String,
    pub shrink_steps: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct TheoremReport {
    pub id: TheoremId,
    pub statement: &'static str,
    pub instances: usize,
    pub vacuous: usize,
    pub generator_errors: Vec<String>,
    pub failures: Vec<Failure>,
    pub budget_exhausted: bool,
    pub solver_calls: u64,
    pub oracle_calls: u64,
    pub generator_calls: u64,
    pub wall_ms: u128,
    pub mutation: Option<&'static str>,
}

impl TheoremReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && !self.budget_exhausted && self.generator_errors.is_empty()
    }

    pub fn total_calls(&self) -> u64 {
        self.solver_calls + self.oracle_calls + self.generator_calls
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub count: usize,
    pub reports: Vec<TheoremReport>,
    /// Requested ids without a checker (always empty; kept so the suite can
    /// refuse success otherwise).
    pub unimplemented: Vec<String>,
}

impl SuiteReport {
    pub fn success(&self) -> bool {
        self.unimplemented.is_empty() && !self.reports.is_empty() && self.reports.iter().all(TheoremReport::passed)
    }

    pub fn failures(&self) -> usize {
        self.reports.iter().map(|r| r.failures.len()).sum()
    }

    pub fn total_calls(&self) -> u64 {
        self.reports.iter().map(TheoremReport::total_calls).sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("serializable")
    }

    /// Plain-text summary table followed by failure details.
    pub fn table(&self) -> String {
        let mut out = format!(
            "{:<13} {:>5} {:>7} {:>6} {:>9} {:>9} {:>9} {:>8}\n",
            "theorem", "inst", "vacuous", "fail", "calls", "oracle", "gen", "ms"
        );
        for r in &self.reports {
            let fail = if r.budget_exhausted {
                "budget".to_string()
            } else {
                (r.failures.len() + r.generator_errors.len()).to_string()
            };
            out += &format!(
                "{:<13} {:>5} {:>7} {:>6} {:>9} {:>9} {:>9} {:>8}\n",
                r.id.name(),
                r.instances,
                r.vacuous,
                fail,
                r.solver_calls,
                r.oracle_calls,
                r.generator_calls,
                r.wall_ms
            );
        }
        out += &format!("total solver calls: {}\n", self.total_calls());
        for r in &self.reports {
            for f in &r.failures {
                out += &format!(
                    "\n{} failed on instance {} (implementation defect; shrunk in {} steps): {}\n{}",
                    r.id, f.instance, f.shrink_steps, f.message, f.counterexample
                );
            }
            for e in &r.generator_errors {
                out += &format!("\n{} generator error: {e}\n", r.id);
            }
        }
        out
    }
}

/// A system of `max_rule_count` rules over the generator vocabulary.
pub fn gen_lctrs(cfg: &GenConfig, lvf_only: bool) -> (Signature, Vec<CRule>) {
    let mut g = Gen::new(cfg, u64::MAX);
    let rules = g.rules(lvf_only);
    (g.voc.sig.clone(), rules)
}

/// A well-formed satisfiable term; with `pattern_general` it is also PG.
pub fn gen_ecterm(cfg: &GenConfig, pattern_general: bool) -> Result<ECTerm> {
    let mut g = Gen::new(cfg, u64::MAX - 1);
    let solver = Solver::builtin();
    if pattern_general {
        g.pg_ecterm(&solver)
    } else {
        g.ecterm(&solver)
    }
}

/// A pair that is equivalent by construction.
pub fn gen_equiv_pair(cfg: &GenConfig) -> Result<(ECTerm, ECTerm)> {
    let mut g = Gen::new(cfg, u64::MAX - 2);
    let solver = Solver::builtin();
    let steps = 1 + g.below(3);
    equiv_pair(&mut g, &[], &solver, steps)
}

/// Fixed corpus members with their expected verdicts: the two legacy
/// reducts `g(3)` and `g(x)` under `x > 2` are not equivalent.
pub fn fixed_pairs() -> Vec<(ECTerm, ECTerm, bool)> {
    let voc = gen::vocabulary();
    let x = Var::int("x");
    let gt2 = Constraint::new(Term::app(
        &crate::terms::builtins::gt(),
        vec![Term::var(&x), Term::int(2)],
    ))
    .expect("bool");
    let g3 = ECTerm::from_parts(
        BTreeSet::new(),
        Term::app(&voc.g, vec![Term::int(3)]),
        ExistentialConstraint::new([x.clone()], gt2.clone()),
    );
    let gx = ECTerm::from_parts(
        [x.clone()].into(),
        Term::app(&voc.g, vec![Term::var(&x)]),
        ExistentialConstraint::quantifier_free(gt2),
    );
    vec![(g3, gx, false)]
}

fn generate(id: TheoremId, g: &mut Gen, solver: &Solver) -> Result<Instance> {
    let mut inst = Instance::default();
    match id {
        TheoremId::Wd
        | TheoremId::Fvar
        | TheoremId::Bvar
        | TheoremId::Rmv
        | TheoremId::Uniq
        | TheoremId::LvfGen => {
            inst.rules = g.rules(false);
            let ct = if inst.rules.is_empty() || g.chance(0.1) {
                g.ecterm(solver)?
            } else {
                g.redex_term(&inst.rules, solver)?
            };
            inst.terms.push(ct);
        }
        TheoremId::PgStep | TheoremId::BulletSubst => {
            inst.rules = g.rules(true);
            let ct = if inst.rules.is_empty() {
                g.ecterm(solver)?
            } else {
                g.redex_term(&inst.rules, solver)?
            };
            inst.terms.push(ct);
        }
        TheoremId::Ext => {
            inst.rules = g.rules(false);
            inst.nq = Some(g.nqterm(&inst.rules, solver)?);
        }
        TheoremId::CommPg => {
            inst.rules = g.rules(false);
            let steps = 1 + g.below(3);
            let (a, b) = equiv_pair(g, &inst.rules, solver, steps)?;
            let mut names = NameGen::new();
            inst.terms = vec![pg(&a, &mut names), pg(&b, &mut names)];
        }
        TheoremId::CommLvf => {
            inst.rules = g.rules(true);
            let steps = 1 + g.below(3);
            let (a, b) = equiv_pair(g, &inst.rules, solver, steps)?;
            inst.terms = vec![a, b];
        }
        TheoremId::Defer => {
            inst.rules = g.rules(true);
            let iterations = 1 + g.below(4);
            let (start, goal, depth) = defer::walk(g, &inst.rules, iterations, solver)?;
            inst.terms = vec![start, goal];
            inst.depth = depth;
        }
        TheoremId::BulletBack | TheoremId::BulletValid => {
            let rules = g.rules(false);
            let ct = if rules.is_empty() || g.chance(0.5) {
                g.ecterm(solver)?
            } else {
                g.redex_term(&rules, solver)?
            };
            inst.terms.push(ct);
        }
        TheoremId::Eqmap => {
            let rules = g.rules(false);
            let a = if rules.is_empty() || g.chance(0.3) {
                g.ecterm(solver)?
            } else {
                g.redex_term(&rules, solver)?
            };
            let a = pin_value(g, a, solver)?;
            inst.map = Some(mapping(g, &a, solver)?);
            inst.terms.push(a);
        }
        TheoremId::ExtrmvId => {
            let rules = g.rules(false);
            inst.nq = Some(g.nqterm(&rules, solver)?);
            inst.terms.push(g.ecterm(solver)?);
        }
        TheoremId::Nqeq => {
            let rules = g.rules(false);
            let n = g.nqterm(&rules, solver)?;
            inst.extra = Some(side_constraint(g, &n, solver)?);
            inst.nq = Some(n);
        }
    }
    Ok(inst)
}

/// Sometimes conjoin `x = v` for a logical x, so that values get forced.
fn pin_value(g: &mut Gen, a: ECTerm, solver: &Solver) -> Result<ECTerm> {
    let xs: Vec<Var> = a.logical().iter().filter(|x| x.sort().is_int()).cloned().collect();
    if xs.is_empty() || !g.chance(0.4) {
        return Ok(a);
    }
    let x = &xs[g.below(xs.len())];
    let v = Term::int(g.below(3) as i64 - 1);
    let body = a.constraint().body().and(&Constraint::eq(&Term::var(x), &v));
    let b = ECTerm::from_parts(
        a.logical().clone(),
        a.term().clone(),
        ExistentialConstraint::new(a.constraint().bound().to_vec(), body),
    );
    Ok(if solver.is_satisfiable(b.constraint())? { b } else { a })
}

/// σ : V → 𝒱 ∪ Val with V ⊆ X: determined values, merges of entailed-equal
/// variables, fresh names and identities.
fn mapping(g: &mut Gen, a: &ECTerm, solver: &Solver) -> Result<Subst> {
    let mut sigma = Subst::new();
    let mut fixed: BTreeSet<Var> = BTreeSet::new();
    let mut avoid = a.all_vars();
    avoid.extend(a.constraint().bound().iter().cloned());
    let mut names = NameGen::new();
    for x in a.logical().iter().cloned().collect::<Vec<_>>() {
        if fixed.contains(&x) || !g.chance(0.6) {
            continue;
        }
        let mut options: Vec<Term> = vec![Term::var(&x)];
        let fresh = names.fresh("m", x.sort(), &avoid);
        avoid.insert(fresh.clone());
        options.push(Term::var(&fresh));
        if let Some(v) = solver.determined_value(a.constraint(), &x)? {
            options.push(Term::from(v.clone()));
            options.push(Term::from(v));
        }
        for y in a.logical() {
            if *y != x && y.sort() == x.sort() && solver.entails_eq(a.constraint(), &Term::var(&x), &Term::var(y))? {
                let img = match sigma.get(y) {
                    Some(t) => t.clone(),
                    None => Term::var(y),
                };
                options.push(img.clone());
                options.push(img);
            }
        }
        let img = options[g.below(options.len())].clone();
        if let Some(y) = img.as_var() {
            if a.logical().contains(y) {
                fixed.insert(y.clone());
            }
        }
        fixed.insert(x.clone());
        sigma.insert(x, img);
    }
    Ok(sigma)
}

/// π over X ∪ Var(φ) and fresh z⃗ with ⊨ φ ⇒ ∃z⃗.π.
fn side_constraint(g: &mut Gen, n: &NQTerm, solver: &Solver) -> Result<Constraint> {
    let mut known = n.logical().clone();
    known.extend(n.term().vars());
    known.extend(n.constraint().vars());
    let z: Vec<Var> = gen::POOL
        .iter()
        .map(|x| Var::int(x))
        .chain((0..2).map(|i| Var::int(&format!("z{i}"))))
        .filter(|v| !known.contains(v))
        .collect();
    let mut scope: Vec<Var> = n.logical().iter().filter(|x| x.sort().is_int()).cloned().collect();
    scope.extend(z.iter().cloned());
    let premise: ExistentialConstraint = n.constraint().clone().into();
    for _ in 0..10 {
        let k = 1 + g.below(2);
        let pi = Constraint::conj((0..k).map(|_| g.int_atom(&scope))).expect("nonempty");
        let zs: Vec<Var> = pi.vars().into_iter().filter(|v| !n.logical().contains(v)).collect();
        if solver.implies(&premise, &ExistentialConstraint::new(zs, pi.clone()))? {
            return Ok(pi);
        }
    }
    // ∃z. z = x + c always holds
    let zv = z.first().cloned().unwrap_or_else(|| Var::int("z0"));
    let rhs = match n.logical().iter().find(|x| x.sort().is_int()) {
        Some(x) => Term::app(&crate::terms::builtins::add(), vec![Term::var(x), Term::int(1)]),
        None => Term::int(1),
    };
    Ok(Constraint::eq(&Term::var(&zv), &rhs))
}

/// Run one property over `cfg.count` generated instances.
pub fn check_theorem(id: TheoremId, cfg: &GenConfig) -> Result<TheoremReport> {
    let started = Instant::now();
    let mut solver = Solver::new(cfg.backend.clone());
    if let Some(b) = cfg.budget {
        solver = solver.with_budget(b);
    }
    let oracle = Solver::builtin();
    let gen_solver = Solver::builtin();
    let ctx = Ctx {
        solver: &solver,
        oracle: &oracle,
        domain: FiniteDomain::new(cfg.domain.0, cfg.domain.1),
        opts: cfg.opts(),
    };
    let mut report = TheoremReport {
        id,
        statement: id.statement(),
        instances: 0,
        vacuous: 0,
        generator_errors: Vec::new(),
        failures: Vec::new(),
        budget_exhausted: false,
        solver_calls: 0,
        oracle_calls: 0,
        generator_calls: 0,
        wall_ms: 0,
        mutation: cfg.mutation.map(Mutation::name),
    };
    for i in 0..cfg.count {
        let mut g = Gen::new(cfg, id.index() * 1_000_003 + i as u64);
        let inst = match generate(id, &mut g, &gen_solver) {
            Ok(inst) => inst,
            Err(e) => {
                report.generator_errors.push(format!("instance {i}: {e}"));
                continue;
            }
        };
        report.instances += 1;
        match check(id, &inst, &ctx) {
            Ok(Verdict::Pass) => {}
            Ok(Verdict::Vacuous) => report.vacuous += 1,
            Ok(Verdict::Fail(message)) => {
                let (small, message, shrink_steps) = if cfg.shrink {
                    shrink::shrink(id, inst, message, &ctx)
                } else {
                    (inst, message, 0)
                };
                report.failures.push(Failure {
                    instance: i,
                    message,
                    counterexample: small.render(),
                    shrink_steps,
                });
                break;
            }
            Err(Error::BudgetExhausted(_)) => {
                report.budget_exhausted = true;
                break;
            }
            Err(e) => return Err(e),
        }
    }
    report.solver_calls = solver.calls();
    report.oracle_calls = oracle.calls();
    report.generator_calls = gen_solver.calls();
    report.wall_ms = started.elapsed().as_millis();
    Ok(report)
}

/// Run every selected property, one thread per id.
pub fn run_suite(cfg: &GenConfig) -> Result<SuiteReport> {
    let reports: Vec<Result<TheoremReport>> = std::thread::scope(|scope| {
        let handles: Vec<_> = cfg
            .theorems
            .iter()
            .map(|id| scope.spawn(move || check_theorem(*id, cfg)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("checker panicked")).collect()
    });
    Ok(SuiteReport {
        seed: cfg.seed,
        count: cfg.count,
        reports: reports.into_iter().collect::<Result<_>>()?,
        unimplemented: Vec::new(),
    })
}

/// Successors of `ct` with the unmutated step relation (used by generators).
pub(crate) fn successors(ct: &ECTerm, rules: &[CRule], solver: &Solver) -> Result<Vec<ECTerm>> {
    Ok(all_successors(ct, rules, solver)?.into_iter().map(|s| s.target).collect())
}
