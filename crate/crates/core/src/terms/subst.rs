use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{Term, Var};
use crate::error::{Error, Result};

/// A finite substitution, applied simultaneously.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subst {
    map: BTreeMap<Var, Term>,
}

impl Subst {
    pub fn new() -> Self {
        Subst::default()
    }

    pub fn singleton(x: Var, t: Term) -> Self {
        let mut s = Subst::new();
        s.insert(x, t);
        s
    }

    /// Panics in debug builds on a sort mismatch.
    pub fn insert(&mut self, x: Var, t: Term) -> Option<Term> {
        debug_assert_eq!(x.sort(), &t.sort(), "ill-sorted binding for {x}");
        self.map.insert(x, t)
    }

    pub fn get(&self, x: &Var) -> Option<&Term> {
        self.map.get(x)
    }

    pub fn contains(&self, x: &Var) -> bool {
        self.map.contains_key(x)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.map.iter()
    }

    pub fn domain(&self) -> BTreeSet<Var> {
        self.map.keys().cloned().collect()
    }

    /// Variables occurring in the range.
    pub fn range_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for t in self.map.values() {
            t.collect_vars(&mut out);
        }
        out
    }

    pub fn apply_var(&self, x: &Var) -> Term {
        self.map.get(x).cloned().unwrap_or_else(|| Term::Var(x.clone()))
    }

    pub fn apply(&self, t: &Term) -> Term {
        if self.map.is_empty() {
            return t.clone();
        }
        match t {
            Term::Var(x) => self.apply_var(x),
            Term::Val(_) => t.clone(),
            Term::App(f, args) => {
                Term::App(f.clone(), args.iter().map(|a| self.apply(a)).collect())
            }
        }
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn compose(&self, first: &Subst) -> Subst {
        let mut out = Subst::new();
        for (x, t) in &first.map {
            out.map.insert(x.clone(), self.apply(t));
        }
        for (x, t) in &self.map {
            out.map.entry(x.clone()).or_insert_with(|| t.clone());
        }
        out.map.retain(|x, t| t.as_var() != Some(x));
        out
    }

    pub fn restrict(&self, vars: &BTreeSet<Var>) -> Subst {
        Subst {
            map: self
                .map
                .iter()
                .filter(|(x, _)| vars.contains(*x))
                .map(|(x, t)| (x.clone(), t.clone()))
                .collect(),
        }
    }

    /// Drop bindings `x ↦ x`.
    pub fn without_identities(mut self) -> Subst {
        self.map.retain(|x, t| t.as_var() != Some(x));
        self
    }

    /// Injective variable-to-variable map.
    pub fn is_renaming(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.map
            .values()
            .all(|t| t.as_var().is_some_and(|v| seen.insert(v.clone())))
    }

    /// Inverse of a renaming.
    pub fn inverse(&self) -> Option<Subst> {
        if !self.is_renaming() {
            return None;
        }
        let mut out = Subst::new();
        for (x, t) in &self.map {
            out.insert(t.as_var()?.clone(), Term::Var(x.clone()));
        }
        Some(out)
    }

    /// Every variable of `vars` is mapped to a value.
    pub fn is_valued_on(&self, vars: &BTreeSet<Var>) -> bool {
        vars.iter()
            .all(|x| self.map.get(x).is_some_and(Term::is_value))
    }
}

impl FromIterator<(Var, Term)> for Subst {
    fn from_iter<I: IntoIterator<Item = (Var, Term)>>(iter: I) -> Self {
        let mut s = Subst::new();
        for (x, t) in iter {
            s.insert(x, t);
        }
        s
    }
}

impl fmt::Display for Subst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (x, t)) in self.map.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x} ↦ {t}")?;
        }
        f.write_str("}")
    }
}

/// Match a linear pattern: the unique γ with Dom(γ) = Var(pattern) and
/// pattern·γ = subject.
pub fn match_linear(pattern: &Term, subject: &Term) -> Result<Option<Subst>> {
    if let Some(x) = pattern.repeated_var() {
        return Err(Error::NonlinearPattern(x.to_string()));
    }
    Ok(match_general(pattern, subject))
}

/// Syntactic matching, consistent on repeated variables.
pub fn match_general(pattern: &Term, subject: &Term) -> Option<Subst> {
    let mut out = Subst::new();
    match_into(pattern, subject, &mut out).then_some(out)
}

/// Extend `acc` so that pattern·acc = subject.
pub fn match_into(pattern: &Term, subject: &Term, acc: &mut Subst) -> bool {
    match (pattern, subject) {
        (Term::Var(x), _) => {
            if x.sort() != &subject.sort() {
                return false;
            }
            match acc.get(x) {
                Some(t) => t == subject,
                None => {
                    acc.insert(x.clone(), subject.clone());
                    true
                }
            }
        }
        (Term::Val(a), Term::Val(b)) => a == b,
        (Term::App(f, xs), Term::App(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys.iter()).all(|(p, s)| match_into(p, s, acc))
        }
        _ => false,
    }
}
