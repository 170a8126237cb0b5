//! Logical constraints, existential constraints and the decision layer.

mod eval;
mod finite;
pub mod lia;
mod smtlib;
mod solver;

pub use finite::{enumerate_respecting, FiniteDomain};
pub use solver::{parse_range, Backend, Solver};

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::terms::{builtins, NameGen, Signature, Subst, Term, Var};

/// A Bool-sorted term built from theory symbols only.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Constraint(Term);

impl Constraint {
    pub fn new(t: Term) -> Result<Self> {
        if !t.sort().is_bool() {
            return Err(Error::SortMismatch(format!("constraint `{t}` is not of sort Bool")));
        }
        if !t.is_theory_term() {
            return Err(Error::IllFormed(format!(
                "constraint `{t}` contains non-theory symbols or variables"
            )));
        }
        Signature::check_term(&t)?;
        Ok(Constraint(t))
    }

    pub fn tt() -> Self {
        Constraint(Term::boolean(true))
    }

    pub fn ff() -> Self {
        Constraint(Term::boolean(false))
    }

    pub fn term(&self) -> &Term {
        &self.0
    }

    pub fn into_term(self) -> Term {
        self.0
    }

    pub fn is_true(&self) -> bool {
        self.0 == Term::boolean(true)
    }

    /// `self ∧ other`, syntactically.
    pub fn and(&self, other: &Constraint) -> Constraint {
        Constraint(Term::app(&builtins::and(), vec![self.0.clone(), other.0.clone()]))
    }

    /// `c₀ ∧ c₁ ∧ … ∧ cₙ`, left-nested; `None` for an empty list.
    pub fn conj(cs: impl IntoIterator<Item = Constraint>) -> Option<Constraint> {
        cs.into_iter().reduce(|a, b| a.and(&b))
    }

    /// `a = b` at the (theory) sort of `a`.
    pub fn eq(a: &Term, b: &Term) -> Constraint {
        Constraint(Term::app(&builtins::eq(&a.sort()), vec![a.clone(), b.clone()]))
    }

    pub fn not(&self) -> Constraint {
        Constraint(Term::app(&builtins::not(), vec![self.0.clone()]))
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.0.vars()
    }

    /// Apply a substitution whose relevant range consists of theory terms.
    pub fn apply(&self, s: &Subst) -> Constraint {
        let t = s.apply(&self.0);
        debug_assert!(t.is_theory_term(), "substitution introduced non-theory terms into {t}");
        Constraint(t)
    }

    /// Top-level conjuncts (flattening nested `and`).
    pub fn conjuncts(&self) -> Vec<Constraint> {
        fn go(t: &Term, out: &mut Vec<Constraint>) {
            if let Term::App(f, args) = t {
                if *f == builtins::and() {
                    go(&args[0], out);
                    go(&args[1], out);
                    return;
                }
            }
            out.push(Constraint(t.clone()));
        }
        let mut out = Vec::new();
        go(&self.0, &mut out);
        out
    }

    /// Flatten conjunctions, drop duplicate and `true` conjuncts and fold
    /// constants. Never applied implicitly by rewriting.
    pub fn simplify(&self) -> Constraint {
        let mut seen = BTreeSet::new();
        let mut parts = Vec::new();
        for c in self.conjuncts() {
            let c = Constraint(eval::fold_constants(&c.0));
            if c.is_true() {
                continue;
            }
            if c.0 == Term::boolean(false) {
                return Constraint::ff();
            }
            if seen.insert(c.clone()) {
                parts.push(c);
            }
        }
        Constraint::conj(parts).unwrap_or_else(Constraint::tt)
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `∃x⃗. φ`. Bound variables are kept in order of first occurrence in the
/// body; bound variables not occurring in the body are dropped.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExistentialConstraint {
    bound: Vec<Var>,
    body: Constraint,
}

impl ExistentialConstraint {
    pub fn new(bound: impl IntoIterator<Item = Var>, body: Constraint) -> Self {
        let wanted: BTreeSet<Var> = bound.into_iter().collect();
        let bound = body
            .term()
            .vars_ordered()
            .into_iter()
            .filter(|v| wanted.contains(v))
            .collect();
        ExistentialConstraint { bound, body }
    }

    pub fn quantifier_free(body: Constraint) -> Self {
        ExistentialConstraint {
            bound: Vec::new(),
            body,
        }
    }

    pub fn bound(&self) -> &[Var] {
        &self.bound
    }

    pub fn bound_set(&self) -> BTreeSet<Var> {
        self.bound.iter().cloned().collect()
    }

    pub fn body(&self) -> &Constraint {
        &self.body
    }

    /// FVar = Var(φ) \ x⃗
    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut vs = self.body.vars();
        for b in &self.bound {
            vs.remove(b);
        }
        vs
    }

    /// Rename the bound variables that occur in `avoid` to fresh names.
    pub fn rename_bound_apart(&self, avoid: &BTreeSet<Var>) -> ExistentialConstraint {
        let clash: BTreeSet<Var> = self.bound.iter().filter(|b| avoid.contains(*b)).cloned().collect();
        if clash.is_empty() {
            return self.clone();
        }
        let mut block = avoid.clone();
        block.extend(self.body.vars());
        let mut gen = NameGen::new();
        let ren = gen.fresh_renaming(&clash, &block);
        ExistentialConstraint::new(
            self.bound.iter().map(|b| ren.apply_var(b).as_var().unwrap().clone()),
            self.body.apply(&ren),
        )
    }

    /// Capture-avoiding application to the free variables.
    pub fn apply(&self, s: &Subst) -> ExistentialConstraint {
        let fv = self.free_vars();
        let s = s.restrict(&fv);
        let mut avoid = s.range_vars();
        avoid.extend(fv);
        let fresh = self.rename_bound_apart(&avoid);
        ExistentialConstraint::new(fresh.bound.clone(), fresh.body.apply(&s))
    }

    pub fn is_quantifier_free(&self) -> bool {
        self.bound.is_empty()
    }
}

impl From<Constraint> for ExistentialConstraint {
    fn from(c: Constraint) -> Self {
        ExistentialConstraint::quantifier_free(c)
    }
}

impl fmt::Display for ExistentialConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bound.is_empty() {
            return self.body.fmt(f);
        }
        f.write_str("∃")?;
        for (i, b) in self.bound.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, ". {}", self.body)
    }
}

/// A first-order formula over constraints, used to pose queries.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Constraint),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Exists(Vec<Var>, Box<Formula>),
    Forall(Vec<Var>, Box<Formula>),
}

impl Formula {
    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn not(a: Formula) -> Formula {
        Formula::Not(Box::new(a))
    }

    pub fn exists(vs: Vec<Var>, a: Formula) -> Formula {
        if vs.is_empty() {
            a
        } else {
            Formula::Exists(vs, Box::new(a))
        }
    }

    pub fn forall(vs: Vec<Var>, a: Formula) -> Formula {
        if vs.is_empty() {
            a
        } else {
            Formula::Forall(vs, Box::new(a))
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut BTreeSet::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut BTreeSet<Var>, out: &mut BTreeSet<Var>) {
        match self {
            Formula::Atom(c) => out.extend(c.vars().into_iter().filter(|v| !bound.contains(v))),
            Formula::Not(a) => a.collect_free(bound, out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_free(bound, out)),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(vs, a) | Formula::Forall(vs, a) => {
                let added: Vec<Var> = vs.iter().filter(|v| bound.insert((*v).clone())).cloned().collect();
                a.collect_free(bound, out);
                for v in added {
                    bound.remove(&v);
                }
            }
        }
    }
}

impl From<&ExistentialConstraint> for Formula {
    fn from(ec: &ExistentialConstraint) -> Self {
        Formula::exists(ec.bound.clone(), Formula::Atom(ec.body.clone()))
    }
}

impl From<&Constraint> for Formula {
    fn from(c: &Constraint) -> Self {
        Formula::Atom(c.clone())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, op: &str, fs: &[Formula]| -> fmt::Result {
            write!(f, "({op}")?;
            for g in fs {
                write!(f, " {g}")?;
            }
            f.write_str(")")
        };
        let binder = |f: &mut fmt::Formatter<'_>, q: &str, vs: &[Var], a: &Formula| -> fmt::Result {
            write!(f, "({q} (")?;
            for (i, v) in vs.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{}:{}", v.name(), v.sort())?;
            }
            write!(f, ") {a})")
        };
        match self {
            Formula::Atom(c) => c.fmt(f),
            Formula::Not(a) => write!(f, "(not {a})"),
            Formula::And(fs) => list(f, "and", fs),
            Formula::Or(fs) => list(f, "or", fs),
            Formula::Implies(a, b) => write!(f, "(=> {a} {b})"),
            Formula::Iff(a, b) => write!(f, "(<=> {a} {b})"),
            Formula::Exists(vs, a) => binder(f, "exists", vs, a),
            Formula::Forall(vs, a) => binder(f, "forall", vs, a),
        }
    }
}
