//! Deciding equivalence of existentially constrained terms.
//!
//! Three characterizations are offered: by a given renaming
//! ([`equiv_variant`]), for pattern-general terms ([`equiv_pattern_general`]),
//! and in general via position classes and representative substitutions
//! ([`equiv_general`]). [`subsumes_oracle`] and [`equiv_oracle`] decide
//! subsumption by enumeration over a finite domain and serve as test oracles.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::constraints::{enumerate_respecting, Constraint, FiniteDomain, Solver};
use crate::cterms::ECTerm;
use crate::error::{Error, Result};
use crate::terms::{match_general, Position, Subst, Term, Var};

/// The partition of Pos_{X∪Val}(s) induced by entailed equality.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PosClasses {
    pub positions: Vec<Position>,
    /// Each class is sorted; its first member is the representative p̂.
    pub classes: Vec<Vec<Position>>,
}

impl PosClasses {
    pub fn class_of(&self, p: &Position) -> Option<usize> {
        self.classes.iter().position(|c| c.contains(p))
    }

    pub fn representative(&self, p: &Position) -> Option<&Position> {
        self.class_of(p).map(|i| &self.classes[i][0])
    }

    pub fn representatives(&self) -> impl Iterator<Item = &Position> {
        self.classes.iter().map(|c| &c[0])
    }
}

/// Pos_{Val!}(s) with the forced value at each position.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValDetermined {
    pub determined: BTreeMap<Position, Term>,
}

impl ValDetermined {
    pub fn get(&self, p: &Position) -> Option<&Term> {
        self.determined.get(p)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivVerdict {
    pub equal: bool,
    /// Why the terms are not equivalent (the failing condition).
    pub reason: Option<String>,
    /// On success: the variable correspondence used.
    pub witness: Option<Subst>,
}

impl EquivVerdict {
    fn yes(witness: Subst) -> Self {
        EquivVerdict {
            equal: true,
            reason: None,
            witness: Some(witness),
        }
    }

    fn no(reason: impl Into<String>) -> Self {
        EquivVerdict {
            equal: false,
            reason: Some(reason.into()),
            witness: None,
        }
    }
}

fn check_input(ct: &ECTerm, solver: &Solver) -> Result<()> {
    let diags = ct.diagnostics();
    if !diags.is_empty() {
        return Err(Error::IllFormed(diags.join("; ")));
    }
    if !solver.is_satisfiable(ct.constraint())? {
        return Err(Error::UnsatisfiableInput);
    }
    Ok(())
}

/// Val! for every position of Pos_{X∪Val}(s). Assumes `ct` is satisfiable.
pub fn val_determined(ct: &ECTerm, solver: &Solver) -> Result<ValDetermined> {
    let fv = ct.constraint().free_vars();
    let mut per_var: HashMap<Var, Option<Term>> = HashMap::new();
    let mut out = ValDetermined::default();
    for p in ct.logical_positions() {
        let u = ct.term().at(&p).expect("position of term");
        if u.is_value() {
            out.determined.insert(p, u.clone());
            continue;
        }
        let z = u.as_var().expect("logical position holds a variable or value");
        let v = match per_var.get(z) {
            Some(v) => v.clone(),
            None => {
                let v = if fv.contains(z) {
                    solver.determined_value(ct.constraint(), z)?.map(Term::Val)
                } else {
                    None
                };
                per_var.insert(z.clone(), v.clone());
                v
            }
        };
        if let Some(v) = v {
            out.determined.insert(p, v);
        }
    }
    Ok(out)
}

/// The ~ partition by pairwise entailment queries. Assumes `ct` is satisfiable.
pub fn pos_classes(ct: &ECTerm, solver: &Solver) -> Result<PosClasses> {
    pos_classes_with(ct, None, solver)
}

/// As [`pos_classes`], skipping queries already answered by `vd`.
pub fn pos_classes_with(ct: &ECTerm, vd: Option<&ValDetermined>, solver: &Solver) -> Result<PosClasses> {
    let positions = ct.logical_positions();
    let s = ct.term();
    let mut classes: Vec<Vec<Position>> = Vec::new();
    for p in &positions {
        let u = s.at(p).expect("position of term");
        let mut joined = false;
        for class in classes.iter_mut() {
            let q = &class[0];
            let w = s.at(q).expect("position of term");
            if u.sort() != w.sort() {
                continue;
            }
            let same = if u == w {
                true
            } else if let Some(vd) = vd {
                match (vd.get(p), vd.get(q)) {
                    (Some(a), Some(b)) => a == b,
                    (None, None) => solver.entails_eq(ct.constraint(), u, w)?,
                    _ => false,
                }
            } else {
                solver.entails_eq(ct.constraint(), u, w)?
            };
            if same {
                class.push(p.clone());
                joined = true;
                break;
            }
        }
        if !joined {
            classes.push(vec![p.clone()]);
        }
    }
    Ok(PosClasses { positions, classes })
}

/// μ_X: each z ∈ X goes to its forced value, or else to the variable at its
/// class representative.
pub fn rep_subst(ct: &ECTerm, classes: &PosClasses, vd: &ValDetermined) -> Subst {
    let s = ct.term();
    let mut mu = Subst::new();
    for p in &classes.positions {
        let Some(z) = s.at(p).and_then(Term::as_var) else {
            continue;
        };
        if mu.contains(z) {
            continue;
        }
        let img = match vd.get(p) {
            Some(v) => v.clone(),
            None => {
                let rep = classes.representative(p).expect("classified position");
                s.at(rep).expect("position of term").clone()
            }
        };
        mu.insert(z.clone(), img);
    }
    mu
}

/// Equivalence under a given renaming δ with sδ = t.
pub fn equiv_variant(a: &ECTerm, b: &ECTerm, delta: &Subst, solver: &Solver) -> Result<bool> {
    check_input(a, solver)?;
    check_input(b, solver)?;
    if !delta.is_renaming() {
        return Err(Error::IllFormed("precondition: δ is not a renaming".into()));
    }
    if delta.apply(a.term()) != *b.term() {
        return Err(Error::IllFormed("precondition: sδ ≠ t".into()));
    }
    let image: BTreeSet<Var> = a
        .logical()
        .iter()
        .map(|x| delta.apply_var(x).as_var().expect("renaming").clone())
        .collect();
    if image != *b.logical() {
        return Ok(false);
    }
    solver.equivalent(&a.constraint().apply(delta), b.constraint())
}

/// Bijective variable correspondence from a simultaneous walk of `s` and
/// `t`, skipping `skip` positions.
fn walk_renaming(
    s: &Term,
    t: &Term,
    p: &Position,
    skip: &dyn Fn(&Position, &Var, &Var) -> Option<bool>,
    fw: &mut BTreeMap<Var, Var>,
    bw: &mut BTreeMap<Var, Var>,
) -> bool {
    match (s, t) {
        (Term::Var(u), Term::Var(v)) => {
            if let Some(ok) = skip(p, u, v) {
                if !ok {
                    return false;
                }
            }
            if u.sort() != v.sort() {
                return false;
            }
            match (fw.get(u), bw.get(v)) {
                (Some(v2), _) if v2 != v => false,
                (_, Some(u2)) if u2 != u => false,
                _ => {
                    fw.insert(u.clone(), v.clone());
                    bw.insert(v.clone(), u.clone());
                    true
                }
            }
        }
        (Term::App(f, xs), Term::App(g, ys)) => {
            f == g
                && xs
                    .iter()
                    .zip(ys.iter())
                    .enumerate()
                    .all(|(i, (x, y))| walk_renaming(x, y, &p.child(i as u32 + 1), skip, fw, bw))
        }
        (Term::Val(a), Term::Val(b)) => a == b,
        _ => false,
    }
}

/// Equivalence of pattern-general terms: a renaming ρ with sρ = t and
/// ρ(X) = Y is read off the term structure, then the constraints are
/// compared.
pub fn equiv_pattern_general(a: &ECTerm, b: &ECTerm, solver: &Solver) -> Result<EquivVerdict> {
    for ct in [a, b] {
        if !ct.is_pattern_general() {
            return Err(Error::NotPatternGeneral(ct.to_string()));
        }
    }
    check_input(a, solver)?;
    check_input(b, solver)?;
    let (xs, ys) = (a.logical(), b.logical());
    let mut fw = BTreeMap::new();
    let mut bw = BTreeMap::new();
    let logical_agrees = |_: &Position, u: &Var, v: &Var| Some(xs.contains(u) == ys.contains(v));
    if !walk_renaming(a.term(), b.term(), &Position::root(), &logical_agrees, &mut fw, &mut bw) {
        return Ok(EquivVerdict::no("no renaming maps s to t with ρ(X) = Y"));
    }
    let rho: Subst = fw.into_iter().map(|(u, v)| (u, Term::Var(v))).collect();
    if solver.equivalent(&a.constraint().apply(&rho), b.constraint())? {
        Ok(EquivVerdict::yes(rho))
    } else {
        Ok(EquivVerdict::no("the renamed constraints are not equivalent"))
    }
}

/// The full characterization: equal logical positions, a renaming of the
/// non-logical skeleton, equal position classes, equal forced values, and
/// equivalence of the representative-instantiated constraints.
pub fn equiv_general(a: &ECTerm, b: &ECTerm, solver: &Solver) -> Result<EquivVerdict> {
    check_input(a, solver)?;
    check_input(b, solver)?;
    let (s, t) = (a.term(), b.term());

    let positions = a.logical_positions();
    if positions != b.logical_positions() {
        return Ok(EquivVerdict::no("Pos_{X∪Val}(s) ≠ Pos_{Y∪Val}(t)"));
    }

    let logical: BTreeSet<&Position> = positions.iter().collect();
    let mut fw = BTreeMap::new();
    let mut bw = BTreeMap::new();
    if !skeleton(s, t, &Position::root(), &logical, &mut fw, &mut bw) {
        return Ok(EquivVerdict::no("no renaming of the non-logical skeleton"));
    }

    let vd_a = val_determined(a, solver)?;
    let vd_b = val_determined(b, solver)?;
    let cl_a = pos_classes_with(a, Some(&vd_a), solver)?;
    let cl_b = pos_classes_with(b, Some(&vd_b), solver)?;
    if cl_a.classes != cl_b.classes {
        return Ok(EquivVerdict::no("the position classes differ"));
    }

    if vd_a != vd_b {
        return Ok(EquivVerdict::no("the value-determined positions differ"));
    }

    let mu_a = rep_subst(a, &cl_a, &vd_a);
    let mu_b = rep_subst(b, &cl_b, &vd_b);
    let mut theta = Subst::new();
    for rep in cl_a.representatives() {
        if vd_a.get(rep).is_some() {
            continue;
        }
        let (Some(x), Some(y)) = (
            s.at(rep).and_then(Term::as_var),
            t.at(rep).and_then(Term::as_var),
        ) else {
            return Err(Error::IllFormed(format!(
                "internal inconsistency: representative {rep} is neither a variable nor value-determined"
            )));
        };
        if let Some(old) = theta.insert(x.clone(), Term::Var(y.clone())) {
            if old.as_var() != Some(y) {
                return Err(Error::IllFormed(format!(
                    "internal inconsistency: θ is not well defined on `{x}`"
                )));
            }
        }
    }
    let lhs = a.constraint().apply(&theta.compose(&mu_a));
    let rhs = b.constraint().apply(&mu_b);
    if !solver.equivalent(&lhs, &rhs)? {
        return Ok(EquivVerdict::no("the representative constraints are not equivalent"));
    }
    let mut witness = theta;
    for (u, v) in fw {
        witness.insert(u, Term::Var(v));
    }
    Ok(EquivVerdict::yes(witness))
}

fn skeleton(
    s: &Term,
    t: &Term,
    p: &Position,
    logical: &BTreeSet<&Position>,
    fw: &mut BTreeMap<Var, Var>,
    bw: &mut BTreeMap<Var, Var>,
) -> bool {
    if logical.contains(p) {
        return s.sort() == t.sort();
    }
    match (s, t) {
        (Term::App(f, xs), Term::App(g, ys)) => {
            f == g
                && xs
                    .iter()
                    .zip(ys.iter())
                    .enumerate()
                    .all(|(i, (x, y))| skeleton(x, y, &p.child(i as u32 + 1), logical, fw, bw))
        }
        (Term::Var(_), Term::Var(_)) => walk_renaming(s, t, p, &|_, _, _| None, fw, bw),
        _ => false,
    }
}

/// Equivalence from a map σ: V → 𝒱 ∪ Val with V ⊆ X satisfying the mapping
/// side conditions, plus ⊨ (∃x⃗.φ) ⇒ x = σ(x) whenever σ(x) is a value
/// (without it the conditions hold for f(x) [x ≥ 0] and f(0) [true]).
/// A sound sufficient condition.
pub fn equiv_by_mapping(a: &ECTerm, b: &ECTerm, sigma: &Subst, solver: &Solver) -> Result<bool> {
    check_input(a, solver)?;
    check_input(b, solver)?;
    let v = sigma.domain();
    // domain within X, images are variables or values
    if !v.is_subset(a.logical()) || sigma.iter().any(|(_, u)| !(u.is_var() || u.is_value())) {
        return Ok(false);
    }
    // sσ = t
    if sigma.apply(a.term()) != *b.term() {
        return Ok(false);
    }
    // variable images within Y, untouched variables agree
    let image: BTreeSet<Var> = sigma.iter().filter_map(|(_, u)| u.as_var().cloned()).collect();
    if !image.is_subset(b.logical()) {
        return Ok(false);
    }
    let x_rest: BTreeSet<Var> = a.logical().difference(&v).cloned().collect();
    let y_rest: BTreeSet<Var> = b.logical().difference(&image).cloned().collect();
    if x_rest != y_rest {
        return Ok(false);
    }
    // same free variables after σ
    let lhs = a.constraint().apply(sigma);
    if lhs.free_vars() != b.constraint().free_vars() {
        return Ok(false);
    }
    // merged variables must be entailed equal
    let vs: Vec<&Var> = v.iter().collect();
    for (i, x) in vs.iter().enumerate() {
        for y in &vs[i + 1..] {
            if sigma.get(x) == sigma.get(y)
                && !solver.entails_eq(a.constraint(), &Term::var(x), &Term::var(y))?
            {
                return Ok(false);
            }
        }
    }
    // values must be forced by the constraint
    for (x, u) in sigma.iter() {
        if u.is_value() && !solver.entails_eq(a.constraint(), &Term::var(x), u)? {
            return Ok(false);
        }
    }
    // constraints equivalent after σ
    solver.equivalent(&lhs, b.constraint())
}

/// An instance sσ of `a` that is not an instance of `b`, if any, over the
/// finite domain. Instances of `a` use σ valued on X and the identity
/// elsewhere; `b` must match with values on Y and respect its constraint.
pub fn subsumption_counterexample(
    a: &ECTerm,
    b: &ECTerm,
    domain: &FiniteDomain,
    solver: &Solver,
) -> Result<Option<Term>> {
    for sigma in enumerate_respecting(a.constraint(), a.logical(), domain, solver)? {
        let inst = sigma.apply(a.term());
        if !is_instance(&inst, b, solver)? {
            return Ok(Some(inst));
        }
    }
    Ok(None)
}

fn is_instance(u: &Term, b: &ECTerm, solver: &Solver) -> Result<bool> {
    let Some(gamma) = match_general(b.term(), u) else {
        return Ok(false);
    };
    if !gamma.is_valued_on(b.logical()) {
        return Ok(false);
    }
    solver.is_valid(&b.constraint().apply(&gamma))
}

/// a ⊑~ b, decided by enumeration over `domain`.
pub fn subsumes_oracle(a: &ECTerm, b: &ECTerm, domain: &FiniteDomain, solver: &Solver) -> Result<bool> {
    Ok(subsumption_counterexample(a, b, domain, solver)?.is_none())
}

/// a ~ b, decided by enumeration over `domain`.
pub fn equiv_oracle(a: &ECTerm, b: &ECTerm, domain: &FiniteDomain, solver: &Solver) -> Result<bool> {
    Ok(subsumes_oracle(a, b, domain, solver)? && subsumes_oracle(b, a, domain, solver)?)
}

/// ⊨ (∃x⃗.φ) ⇒ s|p = s|q for the two subterms (helper for callers that
/// inspect single position pairs).
pub fn positions_equal(ct: &ECTerm, p: &Position, q: &Position, solver: &Solver) -> Result<bool> {
    let s = ct.term();
    let (u, w) = match (s.at(p), s.at(q)) {
        (Some(u), Some(w)) => (u, w),
        _ => return Err(Error::InvalidPosition(format!("{p} or {q}"))),
    };
    if u.sort() != w.sort() {
        return Ok(false);
    }
    solver.implies(ct.constraint(), &Constraint::eq(u, w).into())
}
