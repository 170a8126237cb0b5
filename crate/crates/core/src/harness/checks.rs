//! One executable property per theorem id.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::constraints::{Constraint, ExistentialConstraint, FiniteDomain, Solver};
use crate::cterms::{bullet, bullet_subst_at, ext, pg, rmv, ECTerm, NQTerm};
use crate::equivalence::{equiv_by_mapping, equiv_general, equiv_oracle, subsumes_oracle};
use crate::error::{Error, Result};
use crate::rewriting::{
    all_successors_with, apply_step_with, reachable_deferred_with, redex_at, step_nonquantified, Step, StepOptions,
};
use crate::rules::{lvf, CRule};
use crate::syntax::{print_cterm, print_nqterm, print_rule};
use crate::terms::{match_linear, NameGen, Subst, Term, Var};

use super::TheoremId;

/// A generated input for one property. Fields a property does not use
/// stay empty.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Instance {
    pub rules: Vec<CRule>,
    pub terms: Vec<ECTerm>,
    pub nq: Option<NQTerm>,
    /// π for NQEQ
    pub extra: Option<Constraint>,
    /// σ for EQMAP
    pub map: Option<Subst>,
    /// length of the ∼·→ walk for DEFER
    pub depth: usize,
}

pub(crate) const PREAMBLE: &str = "(sort T :term)\n(fun f (Int) T :term)\n(fun g (Int) T :term)\n(fun h (Int Int) T :term)\n(fun k (T) T :term)\n(fun b (Bool) T :term)\n(fun c () T :term)\n";

impl Instance {
    /// The instance as a source file (with σ, π and the depth as comments).
    pub fn render(&self) -> String {
        let mut out = String::from(PREAMBLE);
        for r in &self.rules {
            let _ = writeln!(out, "{}", print_rule(r));
        }
        for (i, t) in self.terms.iter().enumerate() {
            let label = ["a", "b", "c", "d"].get(i).copied().unwrap_or("t");
            let _ = writeln!(out, "{}", print_cterm(t, Some(label)));
        }
        if let Some(n) = &self.nq {
            let _ = writeln!(out, "{}", print_nqterm(n, Some("nq")));
        }
        if let Some(e) = &self.extra {
            let _ = writeln!(out, "; pi = {e}");
        }
        if let Some(m) = &self.map {
            let _ = writeln!(out, "; sigma = {m}");
        }
        if self.depth > 0 {
            let _ = writeln!(out, "; depth = {}", self.depth);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    /// The premise did not apply (no step, pair not equivalent, ...).
    Vacuous,
    Fail(String),
}

pub struct Ctx<'a> {
    pub solver: &'a Solver,
    pub oracle: &'a Solver,
    pub domain: FiniteDomain,
    pub opts: StepOptions,
}

/// Run the property `id` on `inst`. Library errors count as failures, except
/// an exhausted budget, which is passed on.
pub fn check(id: TheoremId, inst: &Instance, ctx: &Ctx) -> Result<Verdict> {
    let r = match id {
        TheoremId::Wd => wd(inst, ctx),
        TheoremId::Fvar => fvar(inst, ctx),
        TheoremId::Bvar => bvar(inst, ctx),
        TheoremId::Rmv => rmv_sim(inst, ctx),
        TheoremId::Ext => ext_sim(inst, ctx),
        TheoremId::Uniq => uniq(inst, ctx),
        TheoremId::CommPg => comm(inst, ctx, true),
        TheoremId::LvfGen => lvf_gen(inst, ctx),
        TheoremId::PgStep => pg_step(inst, ctx),
        TheoremId::CommLvf => comm(inst, ctx, false),
        TheoremId::Defer => defer(inst, ctx),
        TheoremId::BulletBack => bullet_back(inst),
        TheoremId::BulletSubst => bullet_subst(inst),
        TheoremId::BulletValid => bullet_valid(inst, ctx),
        TheoremId::Eqmap => eqmap(inst, ctx),
        TheoremId::ExtrmvId => extrmv_id(inst),
        TheoremId::Nqeq => nqeq(inst, ctx),
    };
    match r {
        Ok(v) => Ok(v),
        Err(e @ Error::BudgetExhausted(_)) => Err(e),
        Err(e) => Ok(Verdict::Fail(format!("error: {e}"))),
    }
}

macro_rules! fail {
    ($($arg:tt)*) => {
        return Ok(Verdict::Fail(format!($($arg)*)))
    };
}

fn first(inst: &Instance) -> Result<&ECTerm> {
    inst.terms
        .first()
        .ok_or_else(|| Error::IllFormed("instance without a term".into()))
}

fn steps(inst: &Instance, ctx: &Ctx) -> Result<Vec<Step>> {
    let ct = first(inst)?;
    all_successors_with(ct, &inst.rules, ctx.solver, ctx.opts)
}

fn equiv(a: &ECTerm, b: &ECTerm, ctx: &Ctx) -> Result<bool> {
    Ok(equiv_general(a, b, ctx.solver)?.equal)
}

fn nq_equiv(a: &NQTerm, b: &NQTerm, ctx: &Ctx) -> Result<bool> {
    equiv(&ext(a), &ext(b), ctx)
}

fn show_step(st: &Step) -> String {
    format!(
        "{} at {} by {} with γ = {} gives {}",
        print_cterm(&st.source, None),
        st.redex.position,
        print_rule(&st.redex.rule),
        st.redex.matcher,
        print_cterm(&st.target, None)
    )
}

fn original<'a>(inst: &'a Instance, st: &Step) -> Result<&'a CRule> {
    inst.rules
        .iter()
        .find(|r| r.label == st.redex.rule.label)
        .ok_or_else(|| Error::IllFormed("step by an unknown rule".into()))
}

fn all_vars_with_bound(ct: &ECTerm) -> BTreeSet<Var> {
    let mut vs = ct.all_vars();
    vs.extend(ct.constraint().bound().iter().cloned());
    vs
}

// WD: every reduct is well-formed and satisfiable.
fn wd(inst: &Instance, ctx: &Ctx) -> Result<Verdict> {
    let steps = steps(inst, ctx)?;
    if steps.is_empty() {
        return Ok(Verdict::Vacuous);
    }
    for st in &steps {
        let diags = st.target.diagnostics();
        if !diags.is_empty() {
            fail!("ill-formed reduct ({}): {}", diags.join("; "), show_step(st));
        }
        if !ctx.solver.is_satisfiable(st.target.constraint())? {
            fail!("unsatisfiable reduct: {}", show_step(st));
        }
    }
    Ok(Verdict::Pass)
}

fn expected_free(st: &Step) -> BTreeSet<Var> {
    let tv = st.target.term().vars();
    let mut out = st.redex.rule.exvar();
    out.extend(st.source.logical().iter().filter(|x| tv.contains(*x)).cloned());
    out
}

// FVAR: FVar(∃y⃗.ψ) ⊆ ExVar(ρ) ∪ (X ∩ Var(t)).
fn fvar(inst: &Instance, ctx: &Ctx) -> Result<Verdict> {
    let steps = steps(inst, ctx)?;
    if steps.is_empty() {
        return Ok(Verdict::Vacuous);
    }
    for st in &steps {
        let allowed = expected_free(st);
        if let Some(x) = st.target.constraint().free_vars().iter().find(|x| !allowed.contains(*x)) {
            fail!("free variable {x} of the reduct constraint is neither extra nor logical: {}", show_step(st));
        }
    }
    Ok(Verdict::Pass)
}

// BVAR: the three bound-variable identities.
fn bvar(inst: &Instance, ctx: &Ctx) -> Result<Verdict> {
    let steps = steps(inst, ctx)?;
    if steps.is_empty() {
        return Ok(Verdict::Vacuous);
    }
    for st in &steps {
        let src_b = st.source.constraint().bound_set();
        let tgt_b = st.target.constraint().bound_set();
        if !src_b.is_subset(&tgt_b) {
            fail!("(i) bound variables of the source are not bound in the reduct: {}", show_step(st));
        }
        let rule = &st.redex.rule;
        let gamma = &st.redex.matcher;
        let mut inst_vars = gamma.apply(rule.lhs()).vars();
        inst_vars.extend(gamma.apply(rule.rhs()).vars());
        inst_vars.extend(rule.guard().apply(gamma).vars());
        if let Some(x) = src_b.intersection(&inst_vars).next() {
            fail!("(ii) bound variable {x} occurs in the instantiated rule: {}", show_step(st));
        }
        let mut lhs: BTreeSet<Var> = st.target.logical().clone();
        lhs.extend(tgt_b);
        let mut rhs = expected_free(st);
        rhs.extend(st.target.constraint().body().vars());
        if lhs != rhs {
            fail!("(iii) Y ∪ BVar differs from ExVar ∪ (X ∩ Var(t)) ∪ Var(ψ): {}", show_step(st));
        }
    }
    Ok(Verdict::Pass)
}

// RMV: rmv(source) ∼ M₁ →legacy M₂ ∼ rmv(target), M₁ and M₂ built as in
// the simulation proof.
fn rmv_sim(inst: &Instance, ctx: &Ctx) -> Result<Verdict> {
    let steps = steps(inst, ctx)?;
    if steps.is_empty() {
        return Ok(Verdict::Vacuous);
    }
    for st in &steps {
        let rule = &st.redex.rule;
        let gamma = &st.redex.matcher;
        let src = &st.source;
        let m0 = rmv(src);
        let exvar = rule.exvar();
        let pig = rule.guard().apply(gamma);
        let mut x1: BTreeSet<Var> = m0.logical().clone();
        x1.extend(pig.vars());
        x1.extend(exvar.iter().cloned());
        let mut parts = vec![m0.constraint().clone(), pig];
        parts.extend(exvar.iter().map(|z| Constraint::eq(&Term::var(z), &Term::var(z))));
        let m1 = NQTerm::from_parts(x1, src.term().clone(), Constraint::conj(parts).expect("nonempty"));
        if !m1.is_well_formed() {
            fail!("intermediate term {} is ill-formed: {}", print_nqterm(&m1, None), show_step(st));
        }
        if !nq_equiv(&m0, &m1, ctx)? {
            fail!("rmv(source) ≁ {}: {}", print_nqterm(&m1, None), show_step(st));
        }
        let mut avoid = rule.vars();
        avoid.extend(m1.logical().iter().cloned());
        avoid.extend(m1.term().vars());
        avoid.extend(m1.constraint().vars());
        let ren = NameGen::new().fresh_renaming(&rule.vars(), &avoid);
        let variant = rule.rename(&ren);
        let mut delta = Subst::new();
        for x in rule.vars() {
            let y = ren.apply_var(&x).as_var().cloned().expect("renaming");
            delta.insert(y, gamma.apply_var(&x));
        }
        let legacy = match step_nonquantified(&m1, &variant, &st.redex.position, &delta, ctx.solver) {
            Ok(l) => l,
            Err(Error::NotARedex(why)) => fail!("no legacy step from {} ({why}): {}", print_nqterm(&m1, None), show_step(st)),
            Err(e) => return Err(e),
        };
        let want = rmv(&st.target);
        if !nq_equiv(&legacy.target, &want, ctx)? {
            fail!(
                "legacy reduct {} ≁ rmv(target) {}: {}",
                print_nqterm(&legacy.target, None),
                print_nqterm(&want, None),
                show_step(st)
            );
        }
    }
    Ok(Verdict::Pass)
}

/// All legacy steps from `nq` whose matcher sends extra variables to
/// logical variables or small values (at most `limit`).
pub fn legacy_steps(
    nq: &NQTerm,
    rules: &[CRule],
    solver: &Solver,
    limit: usize,
) -> Result<Vec<crate::rewriting::NQStep>> {
    let mut avoid = nq.logical().clone();
    avoid.extend(nq.term().vars());
    avoid.extend(nq.constraint().vars());
    let mut out = Vec::new();
    for rule in rules {
        let (rho, _) = rule.freshen(&avoid);
        let lv = rho.lhs().vars();
        let extras: Vec<Var> = rho.vars().into_iter().filter(|x| !lv.contains(x)).collect();
        for (p, u) in nq.term().subterms() {
            if u.is_var() {
                continue;
            }
            let Some(gamma) = match_linear(rho.lhs(), u)? else {
                continue;
            };
            let options: Vec<Vec<Term>> = extras
                .iter()
                .map(|x| {
                    let mut c: Vec<Term> = nq
                        .logical()
                        .iter()
                        .filter(|y| y.sort() == x.sort())
                        .map(Term::var)
                        .collect();
                    if x.sort().is_int() {
                        c.extend([-1, 0, 1].map(Term::int));
                    } else if x.sort().is_bool() {
                        c.extend([false, true].map(Term::boolean));
                    }
                    c
                })
                .collect();
            if options.iter().any(Vec::is_empty) {
                continue;
            }
            let mut idx = vec![0usize; extras.len()];
            for _ in 0..64 {
                let mut sigma = gamma.clone();
                for (i, x) in extras.iter().enumerate() {
                    sigma.insert(x.clone(), options[i][idx[i]].clone());
                }
                match step_nonquantified(nq, &rho, &p, &sigma, solver) {
                    Ok(s) => {
                        out.push(s);
                        if out.len() >= limit {
                            return Ok(out);
                        }
                    }
                    Err(Error::NotARedex(_)) => {}
                    Err(e) => return Err(e),
                }
                let mut k = 0;
                while k < idx.len() {
                    idx[k] += 1;
                    if idx[k] < options[k].len() {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                }
                if k == idx.len() {
                    break;
                }
            }
        }
    }
    Ok(out)
}

// EXT: ext(source) → · ⊒~ ext(target) for each legacy step, on the finite model.
fn ext_sim(inst: &Instance, ctx: &Ctx) -> Result<Verdict> {
    let Some(nq) = &inst.nq else {
        return Ok(Verdict::Vacuous);
    };
    let legacy = legacy_steps(nq, &inst.rules, ctx.solver, 4)?;
    if legacy.is_empty() {
        return Ok(Verdict::Vacuous);
    }
    let src = ext(nq);
    for ls in &legacy {
        let Some(redex) = redex_at(&src, &ls.rule, &ls.position, ctx.solver, ctx.opts)? else {
            fail!(
                "ext(source) {} has no step by {} at {} although the legacy step gives {}",
                print_cterm(&src, None),
                print_rule(&ls.rule),
                ls.position,
                print_nqterm(&ls.target, None)
            );
        };
        let mg = apply_step_with(&src, &redex, ctx.opts)?.target;
        let legacy_ext = ext(&ls.target);
        if !subsumes_oracle(&legacy_ext, &mg, &ctx.domain, ctx.oracle)? {
            fail!(
                "most general reduct {} does not subsume ext(legacy reduct) {} on {}..{}",
                print_cterm(&mg, None),
                print_cterm(&legacy_ext, None),
                ctx.domain.lo,
                ctx.domain.hi
            );
        }
    }
    Ok(Verdict::Pass)
}

fn fresh_variant(rule: &CRule, avoid: &BTreeSet<Var>) -> CRule {
    let mut block = avoid.clone();
    block.extend(rule.vars());
    rule.rename(&NameGen::new().fresh_renaming(&rule.vars(), &block))
}

// UNIQ: two independently freshened variants give equivalent reducts.
fn uniq(inst: &Instance, ctx: &Ctx) -> Result<Verdict> {
    let steps = steps(inst, ctx)?;
    if steps.is_empty() {
        return Ok(Verdict::Vacuous);
    }
    let ct = first(inst)?;
    for st in &steps {
        let mut avoid = all_vars_with_bound(ct);
        avoid.extend(original(inst, st)?.vars());
        let other = fresh_variant(&st.redex.rule, &avoid);
        let Some(redex) = redex_at(ct, &other, &st.redex.position, ctx.solver, ctx.opts)? else {
            fail!("variant {} has no redex at {}: {}", print_rule(&other), st.redex.position, show_step(st));
        };
        let t2 = apply_step_with(ct, &redex, ctx.opts)?.target;
        if !equiv(&st.target, &t2, ctx)? {
            fail!("reducts {} and {} are not equivalent: {}", print_cterm(&st.target, None), print_cterm(&t2, None), show_step(st));
        }
    }
    Ok(Verdict::Pass)
}

// COMM-PG / COMM-LVF: a step from one side of a ∼ pair is matched by a
// step with the same rule from the other side, with equivalent reducts.
fn comm(inst: &Instance, ctx: &Ctx, pattern_general: bool) -> Result<Verdict> {
    let [a, b] = inst.terms.as_slice() else {
        return Ok(Verdict::Vacuous);
    };
    if pattern_general && !(a.is_pattern_general() && b.is_pattern_general()) {
        return Ok(Verdict::Vacuous);
    }
    if !pattern_general && inst.rules.iter().any(|r| !r.is_left_value_free()) {
        return Ok(Verdict::Vacuous);
    }
    if !a.is_well_formed() || !b.is_well_formed() || !equiv(a, b, ctx)? {
        return Ok(Verdict::Vacuous);
    }
    let from_a = all_successors_with(a, &inst.rules, ctx.solver, ctx.opts)?;
    if from_a.is_empty() {
        return Ok(Verdict::Vacuous);
    }
    let from_b = all_successors_with(b, &inst.rules, ctx.solver, ctx.opts)?;
    for sa in &from_a {
        let mut closed = false;
        for sb in from_b.iter().filter(|sb| sb.redex.rule.label == sa.redex.rule.label) {
            if equiv(&sa.target, &sb.target, ctx)? {
                closed = true;
                break;
            }
        }
        if !closed {
            fail!(
                "no step from {} closes the square for {}",
                print_cterm(b, None),
                show_step(sa)
            );
        }
    }
    Ok(Verdict::Pass)
}

// LVF-GEN: a step by ρ is matched by a step by lvf(ρ) at the same position.
fn lvf_gen(inst: &Instance, ctx: &Ctx) -> Result<Verdict> {
    let steps = steps(inst, ctx)?;
    if steps.is_empty() {
        return Ok(Verdict::Vacuous);
    }
    let ct = first(inst)?;
    for st in &steps {
        let hat = lvf(original(inst, st)?, &mut NameGen::new())?;
        let Some(redex) = redex_at(ct, &hat, &st.redex.position, ctx.solver, ctx.opts)? else {
            fail!("lvf(ρ) = {} has no redex at {}: {}", print_rule(&hat), st.redex.position, show_step(st));
        };
        let t2 = apply_step_with(ct, &redex, ctx.opts)?.target;
        if !equiv(&st.target, &t2, ctx)? {
            fail!("lvf reduct {} ≁ {}: {}", print_cterm(&t2, None), print_cterm(&st.target, None), show_step(st));
        }
    }
    Ok(Verdict::Pass)
}

// PG-STEP: with left-value-free rules, PG(source) has a step at the same
// position whose reduct is equivalent.
fn pg_step(inst: &Instance, ctx: &Ctx) -> Result<Verdict> {
    if inst.rules.iter().any(|r| !r.is_left_value_free()) {
        return Ok(Verdict::Vacuous);
    }
    let steps = steps(inst, ctx)?;
    if steps.is_empty() {
        return Ok(Verdict::Vacuous);
    }
    let ct = first(inst)?;
    let p = pg(ct, &mut NameGen::new());
    for st in &steps {
        let rule = original(inst, st)?;
        let Some(redex) = redex_at(&p, rule, &st.redex.position, ctx.solver, ctx.opts)? else {
            fail!("PG(source) {} has no redex at {}: {}", print_cterm(&p, None), st.redex.position, show_step(st));
        };
        let t2 = apply_step_with(&p, &redex, ctx.opts)?.target;
        if !equiv(&t2, &st.target, ctx)? {
            fail!("PG reduct {} ≁ {}: {}", print_cterm(&t2, None), print_cterm(&st.target, None), show_step(st));
        }
    }
    Ok(Verdict::Pass)
}

// DEFER: a goal reached by a ∼·→ walk is reached by plain steps followed by
// a single equivalence check.
fn defer(inst: &Instance, ctx: &Ctx) -> Result<Verdict> {
    let [start, goal] = inst.terms.as_slice() else {
        return Ok(Verdict::Vacuous);
    };
    if inst.rules.iter().any(|r| !r.is_left_value_free()) {
        return Ok(Verdict::Vacuous);
    }
    let res = reachable_deferred_with(start, goal, &inst.rules, inst.depth, 5000, ctx.solver, ctx.opts)?;
    if res.equivalence_checks > res.endpoints_explored {
        fail!(
            "{} equivalence checks for {} endpoints",
            res.equivalence_checks,
            res.endpoints_explored
        );
    }
    match res.derivation {
        Some(_) => Ok(Verdict::Pass),
        None if res.truncated => fail!("search truncated after {} endpoints", res.endpoints_explored),
        None => fail!(
            "goal {} not reached from {} within {} steps",
            print_cterm(goal, None),
            print_cterm(start, None),
            inst.depth
        ),
    }
}

// BULLET-BACK: u•σ = u for every subterm u, σ = {xᵢ ↦ s|pᵢ}.
fn bullet_back(inst: &Instance) -> Result<Verdict> {
    let ct = first(inst)?;
    let br = bullet(ct.logical(), ct.term(), &all_vars_with_bound(ct), &mut NameGen::new());
    for (p, u) in ct.term().subterms() {
        let back = br.subterm_map.apply(br.at(&p).expect("same positions"));
        if back != *u {
            fail!("at {p}: {} · σ = {back} ≠ {u}", br.at(&p).unwrap());
        }
    }
    Ok(Verdict::Pass)
}

// BULLET-SUBST: s•|p = ℓγ• for value-free linear ℓ with s|p = ℓγ.
fn bullet_subst(inst: &Instance) -> Result<Verdict> {
    let ct = first(inst)?;
    let avoid = all_vars_with_bound(ct);
    let br = bullet(ct.logical(), ct.term(), &avoid, &mut NameGen::new());
    let mut matched = false;
    for rule in &inst.rules {
        if rule.lhs().has_values() || !rule.is_left_linear() {
            continue;
        }
        let mut block = avoid.clone();
        block.extend(br.fresh_vars.iter().cloned());
        let (rho, _) = rule.freshen(&block);
        for (p, u) in ct.term().subterms() {
            let Some(gamma) = match_linear(rho.lhs(), u)? else {
                continue;
            };
            matched = true;
            let gb = bullet_subst_at(&br, rho.lhs(), &p, &gamma)?;
            let lhs = gb.apply(rho.lhs());
            if br.at(&p) != Some(&lhs) {
                fail!("at {p}: s•|p = {} but ℓγ• = {lhs} for {}", br.at(&p).unwrap(), print_rule(&rho));
            }
        }
    }
    Ok(if matched { Verdict::Pass } else { Verdict::Vacuous })
}

// BULLET-VALID: ⊨ ⋀ (s(pᵢ) = xᵢ) ⇒ u = u• for every theory subterm u.
fn bullet_valid(inst: &Instance, ctx: &Ctx) -> Result<Verdict> {
    let ct = first(inst)?;
    let br = bullet(ct.logical(), ct.term(), &all_vars_with_bound(ct), &mut NameGen::new());
    let premise = Constraint::conj(
        br.positions
            .iter()
            .zip(&br.fresh_vars)
            .map(|(p, x)| Constraint::eq(ct.term().at(p).unwrap(), &Term::var(x))),
    )
    .unwrap_or_else(Constraint::tt);
    let goals: Vec<Constraint> = ct
        .term()
        .subterms()
        .into_iter()
        .filter(|(_, u)| u.sort().is_theory())
        .map(|(p, u)| Constraint::eq(u, br.at(&p).unwrap()))
        .collect();
    let Some(goal) = Constraint::conj(goals) else {
        return Ok(Verdict::Vacuous);
    };
    if !ctx.solver.implies(&premise.clone().into(), &goal.clone().into())? {
        fail!("⊭ {premise} ⇒ {goal}");
    }
    Ok(Verdict::Pass)
}

/// ⟨(X \ V) ∪ (σ(V) ∩ 𝒱), sσ, (∃x⃗.φ)σ⟩ for σ: V → 𝒱 ∪ Val.
pub fn mapped(a: &ECTerm, sigma: &Subst) -> ECTerm {
    let v = sigma.domain();
    let mut y: BTreeSet<Var> = a.logical().difference(&v).cloned().collect();
    y.extend(sigma.iter().filter_map(|(_, t)| t.as_var().cloned()));
    ECTerm::from_parts(y, sigma.apply(a.term()), a.constraint().apply(sigma))
}

// EQMAP: σ satisfying the side conditions yields an equivalent term.
fn eqmap(inst: &Instance, ctx: &Ctx) -> Result<Verdict> {
    let a = first(inst)?;
    let Some(sigma) = &inst.map else {
        return Ok(Verdict::Vacuous);
    };
    if !sigma.domain().is_subset(a.logical()) {
        return Ok(Verdict::Vacuous);
    }
    let entries: Vec<(&Var, &Term)> = sigma.iter().collect();
    for (i, (x, u)) in entries.iter().enumerate() {
        if u.is_value() && !ctx.solver.entails_eq(a.constraint(), &Term::var(x), u)? {
            return Ok(Verdict::Vacuous);
        }
        for (y, w) in &entries[i + 1..] {
            if u == w && !ctx.solver.entails_eq(a.constraint(), &Term::var(x), &Term::var(y))? {
                return Ok(Verdict::Vacuous);
            }
        }
    }
    let b = mapped(a, sigma);
    if !b.is_well_formed() {
        return Ok(Verdict::Vacuous);
    }
    if !equiv_by_mapping(a, &b, sigma, ctx.solver)? {
        fail!("side conditions rejected for σ = {sigma} and {}", print_cterm(&b, None));
    }
    if !equiv(a, &b, ctx)? {
        fail!("equiv_general rejects {} ∼ {}", print_cterm(a, None), print_cterm(&b, None));
    }
    if !equiv_oracle(a, &b, &ctx.domain, ctx.oracle)? {
        fail!("oracle rejects {} ∼ {}", print_cterm(a, None), print_cterm(&b, None));
    }
    Ok(Verdict::Pass)
}

// EXTRMV-ID: rmv ∘ ext and ext ∘ rmv are identities.
fn extrmv_id(inst: &Instance) -> Result<Verdict> {
    if let Some(n) = &inst.nq {
        let back = rmv(&ext(n));
        if back != *n {
            fail!("rmv(ext({})) = {}", print_nqterm(n, None), print_nqterm(&back, None));
        }
    }
    if let Some(ct) = inst.terms.first() {
        let back = ext(&rmv(ct));
        if back != *ct {
            fail!("ext(rmv({})) = {}", print_cterm(ct, None), print_cterm(&back, None));
        }
    }
    Ok(Verdict::Pass)
}

// NQEQ: ⟨X,s,φ⟩ ∼ ⟨X ∪ Var(π), s, φ ∧ π⟩ when ⊨ φ ⇒ ∃z⃗.π.
fn nqeq(inst: &Instance, ctx: &Ctx) -> Result<Verdict> {
    let (Some(n), Some(pi)) = (&inst.nq, &inst.extra) else {
        return Ok(Verdict::Vacuous);
    };
    let mut known = n.logical().clone();
    known.extend(n.constraint().vars());
    let z: Vec<Var> = pi.vars().into_iter().filter(|v| !known.contains(v)).collect();
    if z.iter().any(|v| n.term().contains_var(v)) {
        return Ok(Verdict::Vacuous);
    }
    let premise: ExistentialConstraint = n.constraint().clone().into();
    if !ctx.solver.implies(&premise, &ExistentialConstraint::new(z, pi.clone()))? {
        return Ok(Verdict::Vacuous);
    }
    let mut x2 = n.logical().clone();
    x2.extend(pi.vars());
    let n2 = NQTerm::from_parts(x2, n.term().clone(), n.constraint().and(pi));
    let (a, b) = (ext(n), ext(&n2));
    if !equiv_oracle(&a, &b, &ctx.domain, ctx.oracle)? {
        fail!("oracle: {} ≁ {}", print_nqterm(n, None), print_nqterm(&n2, None));
    }
    if !equiv(&a, &b, ctx)? {
        fail!("equiv_general: {} ≁ {}", print_nqterm(n, None), print_nqterm(&n2, None));
    }
    Ok(Verdict::Pass)
}
