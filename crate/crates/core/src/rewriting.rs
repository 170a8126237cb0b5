//! Most-general rewrite steps on existentially constrained terms, legacy
//! steps on non-quantified terms, and bounded derivation search.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value as Json};

use crate::constraints::{ExistentialConstraint, Solver};
use crate::cterms::{ECTerm, NQTerm};
use crate::equivalence::{equiv_general, EquivVerdict};
use crate::error::{Error, Result};
use crate::rules::CRule;
use crate::syntax::{print_cterm, print_nqterm, show_term};
use crate::terms::{match_linear, Position, Subst, Var};

/// Deliberate defects used to show that the property checks have teeth.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mutation {
    /// Skip the third redex condition: Z-variables may match arbitrary terms.
    DropRedexCondition3,
    /// Use the rule's own variables without renaming them apart.
    SkipFreshening,
    /// Compute Y as X ∩ Var(t), forgetting ExVar(ρ).
    LogicalWithoutExVar,
}

impl Mutation {
    pub const ALL: [Mutation; 3] = [
        Mutation::DropRedexCondition3,
        Mutation::SkipFreshening,
        Mutation::LogicalWithoutExVar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mutation::DropRedexCondition3 => "drop-cond3",
            Mutation::SkipFreshening => "skip-freshening",
            Mutation::LogicalWithoutExVar => "y-without-exvar",
        }
    }
}

impl fmt::Display for Mutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mutation::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::IllFormed(format!("unknown mutation `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepOptions {
    pub mutation: Option<Mutation>,
}

impl StepOptions {
    pub fn mutated(m: Mutation) -> Self {
        StepOptions { mutation: Some(m) }
    }

    fn is(&self, m: Mutation) -> bool {
        self.mutation == Some(m)
    }
}

/// A ρ-redex: position, the fresh rule variant used, and the matcher.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Redex {
    pub position: Position,
    pub rule: CRule,
    pub matcher: Subst,
    /// Renaming from the original rule to `rule`.
    pub renaming: Subst,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub source: ECTerm,
    pub target: ECTerm,
    pub redex: Redex,
}

fn subst_json(s: &Subst) -> Json {
    Json::Object(
        s.iter()
            .map(|(x, t)| (x.name().to_string(), Json::String(show_term(t))))
            .collect(),
    )
}

impl Step {
    pub fn to_json(&self) -> Json {
        json!({
            "source": print_cterm(&self.source, None),
            "target": print_cterm(&self.target, None),
            "rule_label": self.redex.rule.label,
            "position": self.redex.position.to_string(),
            "matcher": subst_json(&self.redex.matcher),
            "renaming": subst_json(&self.redex.renaming),
        })
    }
}

fn freshened(ct: &ECTerm, rule: &CRule, opts: StepOptions) -> (CRule, Subst) {
    if opts.is(Mutation::SkipFreshening) {
        return (rule.clone(), Subst::new());
    }
    let mut avoid = ct.all_vars();
    avoid.extend(ct.constraint().bound().iter().cloned());
    rule.freshen(&avoid)
}

fn check_rule(rule: &CRule) -> Result<()> {
    if !rule.is_left_linear() {
        return Err(Error::NotLeftLinear);
    }
    Ok(())
}

fn check_satisfiable(ct: &ECTerm, solver: &Solver) -> Result<()> {
    if solver.is_satisfiable(ct.constraint())? {
        Ok(())
    } else {
        Err(Error::UnsatisfiableInput)
    }
}

/// The redex conditions at `p` for an already freshened rule.
fn redex_conditions(
    ct: &ECTerm,
    rule: &CRule,
    p: &Position,
    solver: &Solver,
    opts: StepOptions,
) -> Result<Option<Subst>> {
    let Some(u) = ct.term().at(p) else {
        return Err(Error::InvalidPosition(p.to_string()));
    };
    // position in s, ℓ matches
    let Some(gamma) = match_linear(rule.lhs(), u)? else {
        return Ok(None);
    };
    // Z-variables of ℓ match logical variables or values
    if !opts.is(Mutation::DropRedexCondition3) {
        for x in rule.lhs().vars().intersection(rule.logical()) {
            let img = gamma.apply_var(x);
            let ok = img.is_value() || img.as_var().is_some_and(|v| ct.logical().contains(v));
            if !ok {
                return Ok(None);
            }
        }
    }
    // the instantiated guard is entailed
    let lv = rule.lhs().vars();
    let z: Vec<Var> = rule.guard().vars().into_iter().filter(|x| !lv.contains(x)).collect();
    let conclusion = ExistentialConstraint::new(z, rule.guard().apply(&gamma));
    if !solver.implies(ct.constraint(), &conclusion)? {
        return Ok(None);
    }
    Ok(Some(gamma))
}

/// All ρ-redexes of `ct`, in position order.
pub fn find_redexes(ct: &ECTerm, rule: &CRule, solver: &Solver) -> Result<Vec<Redex>> {
    find_redexes_with(ct, rule, solver, StepOptions::default())
}

pub fn find_redexes_with(ct: &ECTerm, rule: &CRule, solver: &Solver, opts: StepOptions) -> Result<Vec<Redex>> {
    check_rule(rule)?;
    check_satisfiable(ct, solver)?;
    redexes_unchecked(ct, rule, solver, opts)
}

fn redexes_unchecked(ct: &ECTerm, rule: &CRule, solver: &Solver, opts: StepOptions) -> Result<Vec<Redex>> {
    let (fresh, renaming) = freshened(ct, rule, opts);
    let mut out = Vec::new();
    for p in ct.term().positions() {
        if let Some(gamma) = redex_conditions(ct, &fresh, &p, solver, opts)? {
            out.push(Redex {
                position: p,
                rule: fresh.clone(),
                matcher: gamma,
                renaming: renaming.clone(),
            });
        }
    }
    Ok(out)
}

/// The ρ-redex at `p`, if there is one.
pub fn redex_at(ct: &ECTerm, rule: &CRule, p: &Position, solver: &Solver, opts: StepOptions) -> Result<Option<Redex>> {
    check_rule(rule)?;
    check_satisfiable(ct, solver)?;
    let (fresh, renaming) = freshened(ct, rule, opts);
    Ok(redex_conditions(ct, &fresh, p, solver, opts)?.map(|gamma| Redex {
        position: p.clone(),
        rule: fresh,
        matcher: gamma,
        renaming,
    }))
}

/// The most general step for a redex:
/// `⟨Y, s[rγ]_p, ∃y⃗. φ ∧ πγ⟩` with y⃗ = Var(ψ) \ Var(t) and
/// Y = ExVar(ρ) ∪ (X ∩ Var(t)).
pub fn apply_step(ct: &ECTerm, redex: &Redex) -> Result<Step> {
    apply_step_with(ct, redex, StepOptions::default())
}

pub fn apply_step_with(ct: &ECTerm, redex: &Redex, opts: StepOptions) -> Result<Step> {
    let rule = &redex.rule;
    let gamma = &redex.matcher;
    let p = &redex.position;
    let u = ct
        .term()
        .at(p)
        .ok_or_else(|| Error::InvalidPosition(p.to_string()))?;
    if gamma.domain() != rule.lhs().vars() || gamma.apply(rule.lhs()) != *u {
        return Err(Error::NotARedex(format!("ℓγ ≠ s|{p}")));
    }
    let t = ct
        .term()
        .replace_at(p, gamma.apply(rule.rhs()))
        .expect("position checked");
    let psi = ct.constraint().body().and(&rule.guard().apply(gamma));
    let tv = t.vars();
    let bound: Vec<Var> = psi.vars().into_iter().filter(|x| !tv.contains(x)).collect();
    let mut logical: BTreeSet<Var> = ct.logical().intersection(&tv).cloned().collect();
    if !opts.is(Mutation::LogicalWithoutExVar) {
        logical.extend(rule.exvar());
    }
    let target = ECTerm::from_parts(logical, t, ExistentialConstraint::new(bound, psi));
    Ok(Step {
        source: ct.clone(),
        target,
        redex: redex.clone(),
    })
}

/// Rewrite at `p` if there is a redex there.
pub fn rewrite_at(ct: &ECTerm, rule: &CRule, p: &Position, solver: &Solver) -> Result<Option<Step>> {
    match redex_at(ct, rule, p, solver, StepOptions::default())? {
        Some(r) => apply_step(ct, &r).map(Some),
        None => Ok(None),
    }
}

/// Every step from `ct`, ordered by rule and then by position.
pub fn all_successors(ct: &ECTerm, rules: &[CRule], solver: &Solver) -> Result<Vec<Step>> {
    all_successors_with(ct, rules, solver, StepOptions::default())
}

pub fn all_successors_with(ct: &ECTerm, rules: &[CRule], solver: &Solver, opts: StepOptions) -> Result<Vec<Step>> {
    for r in rules {
        check_rule(r)?;
    }
    check_satisfiable(ct, solver)?;
    let mut out = Vec::new();
    for r in rules {
        for redex in redexes_unchecked(ct, r, solver, opts)? {
            out.push(apply_step_with(ct, &redex, opts)?);
        }
    }
    Ok(out)
}

/// A legacy step on a non-quantified term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NQStep {
    pub source: NQTerm,
    pub target: NQTerm,
    pub position: Position,
    pub rule: CRule,
    pub matcher: Subst,
}

impl NQStep {
    pub fn to_json(&self) -> Json {
        json!({
            "source": print_nqterm(&self.source, None),
            "target": print_nqterm(&self.target, None),
            "rule_label": self.rule.label,
            "position": self.position.to_string(),
            "matcher": subst_json(&self.matcher),
        })
    }
}

/// The legacy step with the given matcher σ at `p ∈ Pos_F(s)`; the target
/// is `⟨X ∩ Var(t, φ), s[rσ]_p, φ⟩`.
pub fn step_nonquantified(nq: &NQTerm, rule: &CRule, p: &Position, sigma: &Subst, solver: &Solver) -> Result<NQStep> {
    let s = nq.term();
    let u = s.at(p).ok_or_else(|| Error::InvalidPosition(p.to_string()))?;
    if u.is_var() {
        return Err(Error::NotARedex(format!("{p} ∉ Pos_F(s)")));
    }
    let dom = sigma.domain();
    if let Some(x) = rule.vars().iter().find(|x| !dom.contains(*x)) {
        return Err(Error::NotARedex(format!("Dom(σ) = Var(ℓ, r, π) violated: `{x}` unmapped")));
    }
    if sigma.apply(rule.lhs()) != *u {
        return Err(Error::NotARedex(format!("ℓσ ≠ s|{p}")));
    }
    for x in rule.logical() {
        let img = sigma.apply_var(x);
        let ok = img.is_value() || img.as_var().is_some_and(|v| nq.logical().contains(v));
        if !ok {
            return Err(Error::NotARedex(format!("σ({x}) = {img} ∉ Val ∪ X")));
        }
    }
    if !solver.implies(&nq.constraint().clone().into(), &rule.guard().apply(sigma).into())? {
        return Err(Error::NotARedex("⊨ φ ⇒ πσ does not hold".into()));
    }
    let t = s.replace_at(p, sigma.apply(rule.rhs())).expect("position checked");
    let mut keep = t.vars();
    keep.extend(nq.constraint().vars());
    let logical = nq.logical().intersection(&keep).cloned().collect();
    Ok(NQStep {
        source: nq.clone(),
        target: NQTerm::from_parts(logical, t, nq.constraint().clone()),
        position: p.clone(),
        rule: rule.clone(),
        matcher: sigma.clone(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Breadth-first; endpoints equivalent to an earlier one are dropped.
    Bfs,
    /// Depth-first, keeping duplicates.
    Dfs,
    /// Every derivation, shortest first, keeping duplicates.
    All,
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bfs" => Ok(Strategy::Bfs),
            "dfs" => Ok(Strategy::Dfs),
            "all" => Ok(Strategy::All),
            _ => Err(Error::IllFormed(format!("unknown strategy `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub start: ECTerm,
    pub steps: Vec<Step>,
    pub final_equiv: Option<EquivVerdict>,
}

impl Derivation {
    pub fn empty(start: ECTerm) -> Self {
        Derivation {
            start,
            steps: Vec::new(),
            final_equiv: None,
        }
    }

    pub fn end(&self) -> &ECTerm {
        self.steps.last().map(|s| &s.target).unwrap_or(&self.start)
    }

    fn extended(&self, step: Step) -> Self {
        let mut d = self.clone();
        d.steps.push(step);
        d
    }

    pub fn to_json(&self) -> Json {
        json!({
            "start": print_cterm(&self.start, None),
            "steps": self.steps.iter().map(Step::to_json).collect::<Vec<_>>(),
            "end": print_cterm(self.end(), None),
            "final_equiv": self.final_equiv.as_ref().map(|v| json!({
                "equal": v.equal,
                "reason": v.reason,
                "witness": v.witness.as_ref().map(subst_json),
            })),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DeriveOptions {
    pub max_depth: usize,
    pub strategy: Strategy,
    /// Upper bound on the number of steps computed.
    pub max_steps: usize,
}

impl Default for DeriveOptions {
    fn default() -> Self {
        DeriveOptions {
            max_depth: 8,
            strategy: Strategy::Bfs,
            max_steps: 10_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct DeriveResult {
    pub derivations: Vec<Derivation>,
    /// A step or solver budget ran out; `derivations` is partial.
    pub truncated: bool,
}

fn budget_hit<T>(r: Result<T>, truncated: &mut bool) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::BudgetExhausted(_)) => {
            *truncated = true;
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

/// Derivations of length at most `max_depth`, including the empty one.
pub fn derive(start: &ECTerm, rules: &[CRule], opts: DeriveOptions, solver: &Solver) -> Result<DeriveResult> {
    let mut truncated = false;
    let mut steps_done = 0usize;
    let mut out = Vec::new();
    match opts.strategy {
        Strategy::Dfs => {
            let mut stack = vec![Derivation::empty(start.clone())];
            while let Some(d) = stack.pop() {
                let end = d.end().clone();
                let depth = d.steps.len();
                out.push(d.clone());
                if depth == opts.max_depth {
                    continue;
                }
                let Some(succ) = budget_hit(all_successors(&end, rules, solver), &mut truncated)? else {
                    break;
                };
                steps_done += succ.len();
                for st in succ.into_iter().rev() {
                    stack.push(d.extended(st));
                }
                if steps_done > opts.max_steps {
                    truncated = true;
                    break;
                }
            }
        }
        Strategy::All | Strategy::Bfs => {
            let dedup = opts.strategy == Strategy::Bfs;
            let mut queue = VecDeque::from([Derivation::empty(start.clone())]);
            out.push(queue[0].clone());
            'outer: while let Some(d) = queue.pop_front() {
                if d.steps.len() == opts.max_depth {
                    continue;
                }
                let Some(succ) = budget_hit(all_successors(d.end(), rules, solver), &mut truncated)? else {
                    break;
                };
                steps_done += succ.len();
                for st in succ {
                    let nd = d.extended(st);
                    if dedup {
                        let mut seen = false;
                        for old in &out {
                            match budget_hit(equiv_general(old.end(), nd.end(), solver), &mut truncated)? {
                                Some(v) if v.equal => {
                                    seen = true;
                                    break;
                                }
                                Some(_) => {}
                                None => break 'outer,
                            }
                        }
                        if seen {
                            continue;
                        }
                    }
                    out.push(nd.clone());
                    queue.push_back(nd);
                }
                if steps_done > opts.max_steps {
                    truncated = true;
                    break;
                }
            }
        }
    }
    Ok(DeriveResult {
        derivations: out,
        truncated,
    })
}

/// Outcome of [`reachable_deferred`].
#[derive(Clone, Debug)]
pub struct DeferredResult {
    pub derivation: Option<Derivation>,
    pub endpoints_explored: usize,
    /// Exactly one per explored endpoint.
    pub equivalence_checks: usize,
    pub step_solver_calls: u64,
    pub check_solver_calls: u64,
    pub truncated: bool,
}

/// Breadth-first search for `start →* u ∼ goal` that only ever compares
/// endpoints with the goal; no equivalence transformation happens between
/// steps. All rules must be left-value-free.
pub fn reachable_deferred(
    start: &ECTerm,
    goal: &ECTerm,
    rules: &[CRule],
    max_depth: usize,
    max_endpoints: usize,
    solver: &Solver,
) -> Result<DeferredResult> {
    reachable_deferred_with(start, goal, rules, max_depth, max_endpoints, solver, StepOptions::default())
}

pub fn reachable_deferred_with(
    start: &ECTerm,
    goal: &ECTerm,
    rules: &[CRule],
    max_depth: usize,
    max_endpoints: usize,
    solver: &Solver,
    opts: StepOptions,
) -> Result<DeferredResult> {
    if rules.iter().any(|r| !r.is_left_value_free()) {
        return Err(Error::NotLeftValueFree);
    }
    let mut res = DeferredResult {
        derivation: None,
        endpoints_explored: 0,
        equivalence_checks: 0,
        step_solver_calls: 0,
        check_solver_calls: 0,
        truncated: false,
    };
    let mut seen: HashSet<ECTerm> = HashSet::new();
    let mut queue = VecDeque::from([Derivation::empty(start.clone())]);
    seen.insert(start.clone());
    while let Some(mut d) = queue.pop_front() {
        if res.endpoints_explored >= max_endpoints {
            res.truncated = true;
            break;
        }
        res.endpoints_explored += 1;
        res.equivalence_checks += 1;
        let before = solver.calls();
        let verdict = equiv_general(d.end(), goal, solver);
        res.check_solver_calls += solver.calls() - before;
        let verdict = match verdict {
            Ok(v) => v,
            Err(Error::BudgetExhausted(_)) => {
                res.truncated = true;
                break;
            }
            Err(e) => return Err(e),
        };
        if verdict.equal {
            d.final_equiv = Some(verdict);
            res.derivation = Some(d);
            return Ok(res);
        }
        if d.steps.len() == max_depth {
            continue;
        }
        let before = solver.calls();
        let succ = all_successors_with(d.end(), rules, solver, opts);
        res.step_solver_calls += solver.calls() - before;
        let succ = match succ {
            Ok(v) => v,
            Err(Error::BudgetExhausted(_)) => {
                res.truncated = true;
                break;
            }
            Err(e) => return Err(e),
        };
        for st in succ {
            if seen.insert(st.target.clone()) {
                queue.push_back(d.extended(st));
            }
        }
    }
    Ok(res)
}

/// Term-level view of a step for compact display.
pub fn describe_step(step: &Step) -> String {
    let label = step.redex.rule.label.as_deref().unwrap_or("ρ");
    format!(
        "{} →[{label} @ {}] {}",
        print_cterm(&step.source, None),
        step.redex.position,
        print_cterm(&step.target, None)
    )
}
