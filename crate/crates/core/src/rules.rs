//! Constrained rewrite rules `Π Z. ℓ → r [π]`.

use std::collections::BTreeSet;
use std::fmt;

use crate::constraints::Constraint;
use crate::error::{Error, Result};
use crate::terms::{NameGen, Signature, Subst, Term, Var};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CRule {
    pub label: Option<String>,
    logical: BTreeSet<Var>,
    lhs: Term,
    rhs: Term,
    guard: Constraint,
}

impl CRule {
    /// Checked constructor.
    pub fn new(
        label: Option<String>,
        logical: BTreeSet<Var>,
        lhs: Term,
        rhs: Term,
        guard: Constraint,
    ) -> Result<Self> {
        let r = CRule::from_parts(label, logical, lhs, rhs, guard);
        let diags = r.diagnostics();
        if diags.is_empty() {
            Ok(r)
        } else {
            Err(Error::IllFormed(diags.join("; ")))
        }
    }

    pub fn from_parts(
        label: Option<String>,
        logical: BTreeSet<Var>,
        lhs: Term,
        rhs: Term,
        guard: Constraint,
    ) -> Self {
        CRule {
            label,
            logical,
            lhs,
            rhs,
            guard,
        }
    }

    /// `ℓ → r [φ]` with Z = Var(φ) ∪ (Var(r) \ Var(ℓ)).
    pub fn from_legacy(label: Option<String>, lhs: Term, rhs: Term, guard: Constraint) -> Result<Self> {
        if lhs.sort() != rhs.sort() {
            return Err(Error::SortMismatch(format!(
                "lhs has sort {} but rhs has sort {}",
                lhs.sort(),
                rhs.sort()
            )));
        }
        let mut z = guard.vars();
        let lv = lhs.vars();
        z.extend(rhs.vars().into_iter().filter(|x| !lv.contains(x)));
        CRule::new(label, z, lhs, rhs, guard)
    }

    pub fn logical(&self) -> &BTreeSet<Var> {
        &self.logical
    }

    pub fn lhs(&self) -> &Term {
        &self.lhs
    }

    pub fn rhs(&self) -> &Term {
        &self.rhs
    }

    pub fn guard(&self) -> &Constraint {
        &self.guard
    }

    pub fn with_label(mut self, label: Option<String>) -> Self {
        self.label = label;
        self
    }

    /// Var(ℓ, r, π)
    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = self.lhs.vars();
        out.extend(self.rhs.vars());
        out.extend(self.guard.vars());
        out
    }

    pub fn diagnostics(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.lhs.sort() != self.rhs.sort() {
            out.push(format!(
                "sort(ℓ) = sort(r) violated: {} vs {}",
                self.lhs.sort(),
                self.rhs.sort()
            ));
        }
        let lv = self.lhs.vars();
        let needed = self
            .rhs
            .vars()
            .into_iter()
            .filter(|x| !lv.contains(x))
            .chain(self.guard.vars());
        for x in needed {
            if !self.logical.contains(&x) {
                out.push(format!("(Var(r) \\ Var(ℓ)) ∪ Var(π) ⊆ Z violated: `{x}` is not in Z"));
                break;
            }
        }
        let all = self.vars();
        if let Some(x) = self.logical.iter().find(|x| !all.contains(*x)) {
            out.push(format!("Z ⊆ Var(ℓ, r, π) violated: `{x}` does not appear in the rule"));
        }
        if let Some(x) = self.logical.iter().find(|x| !x.is_theory()) {
            out.push(format!("logical variable `{x}` has non-theory sort {}", x.sort()));
        }
        out
    }

    pub fn is_well_formed(&self) -> bool {
        self.diagnostics().is_empty()
    }

    pub fn is_left_linear(&self) -> bool {
        self.lhs.is_linear()
    }

    /// ExVar(ρ) = Var(r) \ Var(ℓ)
    pub fn exvar(&self) -> BTreeSet<Var> {
        let lv = self.lhs.vars();
        self.rhs.vars().into_iter().filter(|x| !lv.contains(x)).collect()
    }

    pub fn is_left_value_free(&self) -> bool {
        !self.lhs.has_values()
    }

    /// Apply a renaming to every component.
    pub fn rename(&self, ren: &Subst) -> CRule {
        CRule {
            label: self.label.clone(),
            logical: self
                .logical
                .iter()
                .map(|x| ren.apply_var(x).as_var().expect("renaming").clone())
                .collect(),
            lhs: ren.apply(&self.lhs),
            rhs: ren.apply(&self.rhs),
            guard: self.guard.apply(ren),
        }
    }

    /// A variant sharing no variable with `avoid`. Only clashing variables
    /// are renamed; the renaming is returned alongside.
    pub fn freshen(&self, avoid: &BTreeSet<Var>) -> (CRule, Subst) {
        let vs = self.vars();
        let clash: BTreeSet<Var> = vs.intersection(avoid).cloned().collect();
        if clash.is_empty() {
            return (self.clone(), Subst::new());
        }
        let mut block = avoid.clone();
        block.extend(vs);
        let ren = NameGen::new().fresh_renaming(&clash, &block);
        (self.rename(&ren), ren)
    }
}

impl fmt::Display for CRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::print_rule(self))
    }
}

/// The left-value-free transformation: values in ℓ become fresh logical
/// variables `yᵢ` and `yᵢ = vᵢ` is conjoined to the guard. Rules without
/// values in ℓ are returned unchanged.
pub fn lvf(rule: &CRule, names: &mut NameGen) -> Result<CRule> {
    if !rule.is_left_linear() {
        return Err(Error::NotLeftLinear);
    }
    let positions = rule.lhs.value_positions();
    if positions.is_empty() {
        return Ok(rule.clone());
    }
    let mut block = rule.vars();
    let mut lhs = rule.lhs.clone();
    let mut logical = rule.logical.clone();
    let mut eqs = Vec::new();
    for p in &positions {
        let v = rule.lhs.at(p).expect("position of lhs");
        let y = names.fresh("y", &v.sort(), &block);
        block.insert(y.clone());
        lhs = lhs.replace_at(p, Term::Var(y.clone())).expect("position of lhs");
        eqs.push(Constraint::eq(&Term::Var(y.clone()), v));
        logical.insert(y);
    }
    let guard = Constraint::conj(std::iter::once(rule.guard.clone()).chain(eqs)).expect("nonempty");
    Ok(CRule {
        label: rule.label.clone(),
        logical,
        lhs,
        rhs: rule.rhs.clone(),
        guard,
    })
}

/// R_ca: `Π{x₁…xₙ,y}. f(x₁…xₙ) → y [y = f(x₁…xₙ)]` for every non-value
/// theory symbol f.
pub fn calc_rules(sig: &Signature) -> Vec<CRule> {
    let mut out = Vec::new();
    for f in sig.funs() {
        if !f.is_theory() || f.is_value {
            continue;
        }
        let xs: Vec<Var> = f
            .args
            .iter()
            .enumerate()
            .map(|(i, s)| Var::new(&format!("x{}", i + 1), s.clone()))
            .collect();
        let y = Var::new("y", f.result.clone());
        let lhs = Term::app(&f, xs.iter().map(Term::var).collect());
        let guard = Constraint::eq(&Term::var(&y), &lhs);
        let mut z: BTreeSet<Var> = xs.into_iter().collect();
        z.insert(y.clone());
        let sorts: Vec<&str> = f.args.iter().map(|s| s.name()).collect();
        let label = format!("calc:{}/{}", f.name, sorts.join(","));
        out.push(CRule::from_parts(Some(label), z, lhs, Term::Var(y), guard));
    }
    out
}
