use std::collections::{BTreeSet, HashSet};

use super::{Sort, Subst, Term, Var};

/// Fresh-name generator: candidates `x`, `x#1`, `x#2`, ...
///
/// Names handed out once are never handed out again by the same generator.
#[derive(Clone, Debug, Default)]
pub struct NameGen {
    issued: HashSet<String>,
}

/// The name with any `#k` counter suffix stripped.
pub fn base_name(name: &str) -> &str {
    match name.rsplit_once('#') {
        Some((b, k)) if !b.is_empty() && k.chars().all(|c| c.is_ascii_digit()) => b,
        _ => name,
    }
}

impl NameGen {
    pub fn new() -> Self {
        NameGen::default()
    }

    /// Record names that must never be produced.
    pub fn reserve<'a>(&mut self, names: impl IntoIterator<Item = &'a str>) {
        self.issued.extend(names.into_iter().map(str::to_string));
    }

    /// A fresh variable of `sort` whose name is based on `base` and is not
    /// the name of any variable in `avoid`.
    pub fn fresh(&mut self, base: &str, sort: &Sort, avoid: &BTreeSet<Var>) -> Var {
        let taken: HashSet<&str> = avoid.iter().map(Var::name).collect();
        let base = base_name(base);
        let mut k = 0u64;
        loop {
            let cand = if k == 0 {
                base.to_string()
            } else {
                format!("{base}#{k}")
            };
            if !taken.contains(cand.as_str()) && !self.issued.contains(&cand) {
                self.issued.insert(cand.clone());
                return Var::new(&cand, sort.clone());
            }
            k += 1;
        }
    }

    /// An injective, sort-preserving renaming of `vars` whose image is
    /// disjoint from `avoid ∪ vars`.
    pub fn fresh_renaming(&mut self, vars: &BTreeSet<Var>, avoid: &BTreeSet<Var>) -> Subst {
        let mut blocked: BTreeSet<Var> = avoid.union(vars).cloned().collect();
        let mut out = Subst::new();
        for x in vars {
            let y = self.fresh(x.name(), x.sort(), &blocked);
            blocked.insert(y.clone());
            out.insert(x.clone(), Term::Var(y));
        }
        out
    }
}
