use std::collections::BTreeMap;
use std::sync::{Arc, LazyLock};

use super::{FunSym, Sort, SortKind, Term};
use crate::error::{Error, Result};

/// Built-in theory symbols of Bool + linear integer arithmetic.
pub mod builtins {
    use super::*;

    fn theory(name: &str, args: Vec<Sort>, result: Sort) -> Arc<FunSym> {
        Arc::new(FunSym::new(name, args, result, SortKind::Theory, false))
    }

    macro_rules! sym {
        ($fn_name:ident, $static:ident, $name:literal, [$($arg:expr),*], $res:expr) => {
            static $static: LazyLock<Arc<FunSym>> =
                LazyLock::new(|| theory($name, vec![$($arg),*], $res));
            pub fn $fn_name() -> Arc<FunSym> {
                $static.clone()
            }
        };
    }

    sym!(add, ADD, "+", [Sort::int(), Sort::int()], Sort::int());
    sym!(sub, SUB, "-", [Sort::int(), Sort::int()], Sort::int());
    sym!(neg, NEG, "-", [Sort::int()], Sort::int());
    sym!(mul, MUL, "*", [Sort::int(), Sort::int()], Sort::int());
    sym!(lt, LT, "<", [Sort::int(), Sort::int()], Sort::bool());
    sym!(le, LE, "<=", [Sort::int(), Sort::int()], Sort::bool());
    sym!(gt, GT, ">", [Sort::int(), Sort::int()], Sort::bool());
    sym!(ge, GE, ">=", [Sort::int(), Sort::int()], Sort::bool());
    sym!(and, AND, "and", [Sort::bool(), Sort::bool()], Sort::bool());
    sym!(or, OR, "or", [Sort::bool(), Sort::bool()], Sort::bool());
    sym!(not, NOT, "not", [Sort::bool()], Sort::bool());
    sym!(implies, IMPLIES, "=>", [Sort::bool(), Sort::bool()], Sort::bool());
    sym!(iff, IFF, "<=>", [Sort::bool(), Sort::bool()], Sort::bool());

    /// Equality at a theory sort.
    pub fn eq(sort: &Sort) -> Arc<FunSym> {
        static EQ_INT: LazyLock<Arc<FunSym>> =
            LazyLock::new(|| theory("=", vec![Sort::int(), Sort::int()], Sort::bool()));
        static EQ_BOOL: LazyLock<Arc<FunSym>> =
            LazyLock::new(|| theory("=", vec![Sort::bool(), Sort::bool()], Sort::bool()));
        if sort.is_int() {
            EQ_INT.clone()
        } else if sort.is_bool() {
            EQ_BOOL.clone()
        } else {
            theory("=", vec![sort.clone(), sort.clone()], Sort::bool())
        }
    }

    pub fn all() -> Vec<Arc<FunSym>> {
        vec![
            add(),
            sub(),
            neg(),
            mul(),
            lt(),
            le(),
            gt(),
            ge(),
            eq(&Sort::int()),
            eq(&Sort::bool()),
            and(),
            or(),
            not(),
            implies(),
            iff(),
        ]
    }
}

/// A sorted signature: sorts plus (possibly overloaded) function symbols.
#[derive(Clone, Debug)]
pub struct Signature {
    sorts: BTreeMap<String, Sort>,
    funs: BTreeMap<String, Vec<Arc<FunSym>>>,
}

impl Default for Signature {
    fn default() -> Self {
        Self::new()
    }
}

impl Signature {
    /// A signature containing Int, Bool and the built-in theory symbols.
    pub fn new() -> Self {
        let mut sig = Signature {
            sorts: BTreeMap::new(),
            funs: BTreeMap::new(),
        };
        sig.sorts.insert("Int".into(), Sort::int());
        sig.sorts.insert("Bool".into(), Sort::bool());
        for f in builtins::all() {
            sig.funs.entry(f.name.to_string()).or_default().push(f);
        }
        sig
    }

    pub fn add_sort(&mut self, name: &str, kind: SortKind) -> Result<Sort> {
        if let Some(s) = self.sorts.get(name) {
            if s.kind() != kind {
                return Err(Error::SortMismatch(format!(
                    "sort `{name}` redeclared with a different kind"
                )));
            }
            return Ok(s.clone());
        }
        let s = Sort::new(name, kind);
        self.sorts.insert(name.to_string(), s.clone());
        Ok(s)
    }

    pub fn sort(&self, name: &str) -> Option<Sort> {
        self.sorts.get(name).cloned()
    }

    pub fn sorts(&self) -> impl Iterator<Item = &Sort> {
        self.sorts.values()
    }

    pub fn add_fun(
        &mut self,
        name: &str,
        args: Vec<Sort>,
        result: Sort,
        kind: SortKind,
        is_value: bool,
    ) -> Result<Arc<FunSym>> {
        if name.parse::<i64>().is_ok() || name == "true" || name == "false" {
            return Err(Error::IllFormed(format!("`{name}` is a reserved value")));
        }
        if is_value && !args.is_empty() {
            return Err(Error::IllFormed(format!("value `{name}` must be a constant")));
        }
        if kind == SortKind::Theory
            && (!result.is_theory() || args.iter().any(|s| !s.is_theory()))
        {
            return Err(Error::SortMismatch(format!(
                "theory symbol `{name}` must have theory sorts only"
            )));
        }
        let f = Arc::new(FunSym::new(name, args, result, kind, is_value));
        let entry = self.funs.entry(name.to_string()).or_default();
        if let Some(old) = entry.iter().find(|g| g.args == f.args) {
            if **old == *f {
                return Ok(old.clone());
            }
            return Err(Error::SortMismatch(format!(
                "symbol `{name}` redeclared with a different declaration"
            )));
        }
        entry.push(f.clone());
        Ok(f)
    }

    pub fn funs_named(&self, name: &str) -> &[Arc<FunSym>] {
        self.funs.get(name).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Every declared symbol, plus equality at each user theory sort.
    pub fn funs(&self) -> Vec<Arc<FunSym>> {
        let mut out: Vec<Arc<FunSym>> = self.funs.values().flatten().cloned().collect();
        for s in self.sorts.values() {
            if s.is_theory() && !s.is_int() && !s.is_bool() {
                out.push(builtins::eq(s));
            }
        }
        out
    }

    pub fn is_fun(&self, name: &str) -> bool {
        self.funs.contains_key(name) || name == "="
    }

    /// Resolve a (possibly overloaded) symbol by argument sorts.
    pub fn lookup(&self, name: &str, arg_sorts: &[Sort]) -> Result<Arc<FunSym>> {
        if name == "=" {
            if arg_sorts.len() != 2 {
                return Err(Error::ArityMismatch {
                    name: name.into(),
                    expected: 2,
                    got: arg_sorts.len(),
                });
            }
            if arg_sorts[0] != arg_sorts[1] || !arg_sorts[0].is_theory() {
                return Err(Error::SortMismatch(format!(
                    "`=` needs two arguments of the same theory sort, got {} and {}",
                    arg_sorts[0], arg_sorts[1]
                )));
            }
            return Ok(builtins::eq(&arg_sorts[0]));
        }
        let cands = self
            .funs
            .get(name)
            .ok_or_else(|| Error::UnknownSymbol(name.to_string()))?;
        if let Some(f) = cands.iter().find(|f| f.args.as_slice() == arg_sorts) {
            return Ok(f.clone());
        }
        match cands.iter().find(|f| f.arity() == arg_sorts.len()) {
            Some(f) => Err(Error::SortMismatch(format!(
                "`{name}` expects ({}), got ({})",
                join_sorts(&f.args),
                join_sorts(arg_sorts)
            ))),
            None => Err(Error::ArityMismatch {
                name: name.into(),
                expected: cands[0].arity(),
                got: arg_sorts.len(),
            }),
        }
    }

    /// Sort-checked application.
    pub fn app(&self, name: &str, args: Vec<Term>) -> Result<Term> {
        let sorts: Vec<Sort> = args.iter().map(Term::sort).collect();
        let f = self.lookup(name, &sorts)?;
        Ok(Term::App(f, args.into()))
    }

    /// Check that every application in `t` is well-sorted.
    pub fn check_term(t: &Term) -> Result<()> {
        if let Term::App(f, args) = t {
            if f.arity() != args.len() {
                return Err(Error::ArityMismatch {
                    name: f.name.to_string(),
                    expected: f.arity(),
                    got: args.len(),
                });
            }
            for (a, s) in args.iter().zip(&f.args) {
                if a.sort() != *s {
                    return Err(Error::SortMismatch(format!(
                        "argument `{a}` of `{}` has sort {}, expected {s}",
                        f.name,
                        a.sort()
                    )));
                }
                Self::check_term(a)?;
            }
        }
        Ok(())
    }
}

fn join_sorts(s: &[Sort]) -> String {
    s.iter().map(Sort::to_string).collect::<Vec<_>>().join(" ")
}
