//! Existentially constrained terms, legacy non-quantified constrained terms,
//! and the translations between them (ext, rmv, PG, •).

use std::collections::BTreeSet;
use std::fmt;

use crate::constraints::{Constraint, ExistentialConstraint};
use crate::error::{Error, Result};
use crate::terms::{NameGen, Position, Subst, Term, Var};

/// `Π X. s [∃x⃗. φ]`
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ECTerm {
    logical: BTreeSet<Var>,
    term: Term,
    ec: ExistentialConstraint,
}

impl ECTerm {
    /// Checked constructor.
    pub fn new(logical: BTreeSet<Var>, term: Term, ec: ExistentialConstraint) -> Result<Self> {
        let ct = ECTerm::from_parts(logical, term, ec);
        let diags = ct.diagnostics();
        if diags.is_empty() {
            Ok(ct)
        } else {
            Err(Error::IllFormed(diags.join("; ")))
        }
    }

    /// Unchecked constructor; see [`ECTerm::diagnostics`].
    pub fn from_parts(logical: BTreeSet<Var>, term: Term, ec: ExistentialConstraint) -> Self {
        ECTerm { logical, term, ec }
    }

    pub fn logical(&self) -> &BTreeSet<Var> {
        &self.logical
    }

    pub fn term(&self) -> &Term {
        &self.term
    }

    pub fn constraint(&self) -> &ExistentialConstraint {
        &self.ec
    }

    /// Violated well-formedness clauses; empty when well-formed.
    pub fn diagnostics(&self) -> Vec<String> {
        let mut out = Vec::new();
        let vs = self.term.vars();
        let fv = self.ec.free_vars();
        if let Some(x) = fv.iter().find(|x| !self.logical.contains(*x)) {
            out.push(format!("FVar ⊆ X violated: free variable `{x}` is not logical"));
        }
        if let Some(x) = self.logical.iter().find(|x| !vs.contains(*x)) {
            out.push(format!("X ⊆ Var(s) violated: `{x}` does not occur in the term"));
        }
        if let Some(x) = self.ec.bound().iter().find(|x| vs.contains(*x)) {
            out.push(format!("BVar ∩ Var(s) = ∅ violated: bound `{x}` occurs in the term"));
        }
        if let Some(x) = self.logical.iter().find(|x| !x.is_theory()) {
            out.push(format!("logical variable `{x}` has non-theory sort {}", x.sort()));
        }
        out
    }

    pub fn is_well_formed(&self) -> bool {
        self.diagnostics().is_empty()
    }

    /// X-linear and value-free.
    pub fn is_pattern_general(&self) -> bool {
        self.term.is_linear_in(&self.logical) && !self.term.has_values()
    }

    /// Pos_{X∪Val}(s) in canonical order.
    pub fn logical_positions(&self) -> Vec<Position> {
        self.term.positions_of_vars_or_values(&self.logical)
    }

    /// Var(s) ∪ Var(φ) ∪ X ∪ BVar
    pub fn all_vars(&self) -> BTreeSet<Var> {
        let mut out = self.term.vars();
        out.extend(self.ec.body().vars());
        out.extend(self.logical.iter().cloned());
        out
    }
}

impl fmt::Display for ECTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::print_cterm(self, None))
    }
}

/// Legacy `Π X. s [φ]` with Var(φ) ⊆ X ⊆ Var(φ, s).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NQTerm {
    logical: BTreeSet<Var>,
    term: Term,
    constraint: Constraint,
}

impl NQTerm {
    pub fn new(logical: BTreeSet<Var>, term: Term, constraint: Constraint) -> Result<Self> {
        let nq = NQTerm::from_parts(logical, term, constraint);
        let diags = nq.diagnostics();
        if diags.is_empty() {
            Ok(nq)
        } else {
            Err(Error::IllFormed(diags.join("; ")))
        }
    }

    /// The legacy form `s [φ]`, lifted with X = Var(φ).
    pub fn lift(term: Term, constraint: Constraint) -> Self {
        NQTerm {
            logical: constraint.vars(),
            term,
            constraint,
        }
    }

    pub fn from_parts(logical: BTreeSet<Var>, term: Term, constraint: Constraint) -> Self {
        NQTerm {
            logical,
            term,
            constraint,
        }
    }

    pub fn logical(&self) -> &BTreeSet<Var> {
        &self.logical
    }

    pub fn term(&self) -> &Term {
        &self.term
    }

    pub fn constraint(&self) -> &Constraint {
        &self.constraint
    }

    pub fn diagnostics(&self) -> Vec<String> {
        let mut out = Vec::new();
        let cv = self.constraint.vars();
        if let Some(x) = cv.iter().find(|x| !self.logical.contains(*x)) {
            out.push(format!("Var(φ) ⊆ X violated: `{x}` is not logical"));
        }
        let mut both = cv;
        both.extend(self.term.vars());
        if let Some(x) = self.logical.iter().find(|x| !both.contains(*x)) {
            out.push(format!("X ⊆ Var(φ, s) violated: `{x}` occurs nowhere"));
        }
        if let Some(x) = self.logical.iter().find(|x| !x.is_theory()) {
            out.push(format!("logical variable `{x}` has non-theory sort {}", x.sort()));
        }
        out
    }

    pub fn is_well_formed(&self) -> bool {
        self.diagnostics().is_empty()
    }
}

impl fmt::Display for NQTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::print_nqterm(self, None))
    }
}

/// ⟨X \ x⃗, s, ∃x⃗. φ⟩ with x⃗ = Var(φ) \ Var(s).
pub fn ext(nq: &NQTerm) -> ECTerm {
    let sv = nq.term.vars();
    let bound: Vec<Var> = nq
        .constraint
        .vars()
        .into_iter()
        .filter(|x| !sv.contains(x))
        .collect();
    let logical = nq
        .logical
        .iter()
        .filter(|x| !bound.contains(x))
        .cloned()
        .collect();
    ECTerm::from_parts(
        logical,
        nq.term.clone(),
        ExistentialConstraint::new(bound, nq.constraint.clone()),
    )
}

/// ⟨X ∪ x⃗, s, φ⟩
pub fn rmv(ct: &ECTerm) -> NQTerm {
    let mut logical = ct.logical.clone();
    logical.extend(ct.ec.bound().iter().cloned());
    NQTerm::from_parts(logical, ct.term.clone(), ct.ec.body().clone())
}

/// The pattern-general form: every position of Pos_{X∪Val}(s) is replaced
/// by a fresh `wᵢ`, and `s|pᵢ = wᵢ` is conjoined to the constraint.
pub fn pg(ct: &ECTerm, names: &mut NameGen) -> ECTerm {
    let positions = ct.logical_positions();
    let avoid = ct.all_vars();
    let mut t = ct.term.clone();
    let mut ws = BTreeSet::new();
    let mut eqs = Vec::new();
    for p in &positions {
        let u = ct.term.at(p).expect("position of term");
        let w = names.fresh("w", &u.sort(), &avoid);
        t = t.replace_at(p, Term::Var(w.clone())).expect("position of term");
        eqs.push(Constraint::eq(u, &Term::Var(w.clone())));
        ws.insert(w);
    }
    let body = Constraint::conj(std::iter::once(ct.ec.body().clone()).chain(eqs)).expect("nonempty");
    let bound = ct.ec.bound().iter().chain(&ct.logical).cloned();
    ECTerm::from_parts(ws, t, ExistentialConstraint::new(bound, body))
}

/// Result of the •-translation of a term relative to X.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BulletResult {
    pub original: Term,
    /// s^{•X}
    pub abstracted: Term,
    pub fresh_vars: Vec<Var>,
    /// Pos_{X∪Val}(s), canonical order; `fresh_vars[i]` sits at `positions[i]`.
    pub positions: Vec<Position>,
    /// {xᵢ ↦ s|pᵢ}
    pub subterm_map: Subst,
}

impl BulletResult {
    /// u^• for the subterm u = s|_p, i.e. s^•|_p.
    pub fn at(&self, p: &Position) -> Option<&Term> {
        self.abstracted.at(p)
    }
}

/// s^{•X}: fresh variables at every position of Pos_{X∪Val}(s).
pub fn bullet(xs: &BTreeSet<Var>, s: &Term, avoid: &BTreeSet<Var>, names: &mut NameGen) -> BulletResult {
    let positions = s.positions_of_vars_or_values(xs);
    let mut block = s.vars();
    block.extend(avoid.iter().cloned());
    block.extend(xs.iter().cloned());
    let mut abstracted = s.clone();
    let mut fresh_vars = Vec::new();
    let mut subterm_map = Subst::new();
    for p in &positions {
        let u = s.at(p).expect("position of term");
        let x = names.fresh("x", &u.sort(), &block);
        block.insert(x.clone());
        abstracted = abstracted.replace_at(p, Term::Var(x.clone())).expect("position of term");
        subterm_map.insert(x.clone(), u.clone());
        fresh_vars.push(x);
    }
    BulletResult {
        original: s.clone(),
        abstracted,
        fresh_vars,
        positions,
        subterm_map,
    }
}

/// γ^{•X} for a matcher γ of `lhs` at position `p` of the original term:
/// each variable is sent to the •-image of the subterm it matched.
pub fn bullet_subst_at(br: &BulletResult, lhs: &Term, p: &Position, gamma: &Subst) -> Result<Subst> {
    let mut out = Subst::new();
    for (q, u) in lhs.subterms() {
        if let Term::Var(x) = u {
            if !gamma.contains(x) || out.contains(x) {
                continue;
            }
            let pos = p.concat(&q);
            if br.original.at(&pos) != gamma.get(x) {
                return Err(Error::IllFormed(format!("`{x}` is not matched at {pos}")));
            }
            let img = br
                .at(&pos)
                .ok_or_else(|| Error::InvalidPosition(pos.to_string()))?;
            out.insert(x.clone(), img.clone());
        }
    }
    Ok(out)
}

/// γ^{•X} where each γ(x) is located at its first occurrence in s.
pub fn bullet_subst(br: &BulletResult, gamma: &Subst) -> Result<Subst> {
    let subterms = br.original.subterms();
    let mut out = Subst::new();
    for (x, u) in gamma.iter() {
        let (p, _) = subterms
            .iter()
            .find(|(_, v)| *v == u)
            .ok_or_else(|| Error::IllFormed(format!("`{u}` is not a subterm of `{}`", br.original)))?;
        out.insert(x.clone(), br.at(p).expect("position of term").clone());
    }
    Ok(out)
}
