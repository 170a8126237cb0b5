use std::collections::BTreeSet;
use std::fmt;
use std::sync::{Arc, LazyLock};

use super::Position;

/// Whether a sort (or symbol) belongs to the theory or to the term level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SortKind {
    Theory,
    Term,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sort {
    name: Arc<str>,
    kind: SortKind,
}

static INT: LazyLock<Sort> = LazyLock::new(|| Sort::new("Int", SortKind::Theory));
static BOOL: LazyLock<Sort> = LazyLock::new(|| Sort::new("Bool", SortKind::Theory));

impl Sort {
    pub fn new(name: &str, kind: SortKind) -> Self {
        Sort {
            name: name.into(),
            kind,
        }
    }

    pub fn int() -> Sort {
        INT.clone()
    }

    pub fn bool() -> Sort {
        BOOL.clone()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> SortKind {
        self.kind
    }

    pub fn is_theory(&self) -> bool {
        self.kind == SortKind::Theory
    }

    pub fn is_int(&self) -> bool {
        *self == *INT
    }

    pub fn is_bool(&self) -> bool {
        *self == *BOOL
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// A function symbol with its full sort declaration.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FunSym {
    pub name: Arc<str>,
    pub args: Vec<Sort>,
    pub result: Sort,
    pub kind: SortKind,
    pub is_value: bool,
}

impl FunSym {
    pub fn new(name: &str, args: Vec<Sort>, result: Sort, kind: SortKind, is_value: bool) -> Self {
        FunSym {
            name: name.into(),
            args,
            result,
            kind,
            is_value,
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_theory(&self) -> bool {
        self.kind == SortKind::Theory
    }
}

/// A variable; identity is name plus sort.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    name: Arc<str>,
    sort: Sort,
}

impl Var {
    pub fn new(name: &str, sort: Sort) -> Self {
        Var {
            name: name.into(),
            sort,
        }
    }

    pub fn int(name: &str) -> Self {
        Var::new(name, Sort::int())
    }

    pub fn boolean(name: &str) -> Self {
        Var::new(name, Sort::bool())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn sort(&self) -> &Sort {
        &self.sort
    }

    pub fn is_theory(&self) -> bool {
        self.sort.is_theory()
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Built-in values. Declared `:value` constants of other sorts are
/// represented as nullary applications of a value symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Bool(bool),
    Int(i64),
}

impl Value {
    pub fn sort(&self) -> Sort {
        match self {
            Value::Bool(_) => Sort::bool(),
            Value::Int(_) => Sort::int(),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Var),
    Val(Value),
    App(Arc<FunSym>, Arc<[Term]>),
}

impl From<Var> for Term {
    fn from(v: Var) -> Self {
        Term::Var(v)
    }
}

impl From<Value> for Term {
    fn from(v: Value) -> Self {
        Term::Val(v)
    }
}

impl Term {
    pub fn var(v: &Var) -> Term {
        Term::Var(v.clone())
    }

    pub fn int(n: i64) -> Term {
        Term::Val(Value::Int(n))
    }

    pub fn boolean(b: bool) -> Term {
        Term::Val(Value::Bool(b))
    }

    /// Unchecked application; use [`super::Signature::app`] for sort checking.
    pub fn app(f: &Arc<FunSym>, args: Vec<Term>) -> Term {
        Term::App(f.clone(), args.into())
    }

    pub fn sort(&self) -> Sort {
        match self {
            Term::Var(v) => v.sort().clone(),
            Term::Val(v) => v.sort(),
            Term::App(f, _) => f.result.clone(),
        }
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn is_value(&self) -> bool {
        match self {
            Term::Val(_) => true,
            Term::App(f, args) => f.is_value && args.is_empty(),
            Term::Var(_) => false,
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::App(_, args) => args,
            _ => &[],
        }
    }

    /// True when every symbol and variable is of theory kind.
    pub fn is_theory_term(&self) -> bool {
        match self {
            Term::Var(v) => v.is_theory(),
            Term::Val(_) => true,
            Term::App(f, args) => f.is_theory() && args.iter().all(Term::is_theory_term),
        }
    }

    pub fn size(&self) -> usize {
        1 + self.args().iter().map(Term::size).sum::<usize>()
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Val(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// Variables in order of first occurrence (left to right).
    pub fn vars_ordered(&self) -> Vec<Var> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        self.walk(&mut |t| {
            if let Term::Var(v) = t {
                if seen.insert(v.clone()) {
                    out.push(v.clone());
                }
            }
        });
        out
    }

    pub fn contains_var(&self, x: &Var) -> bool {
        match self {
            Term::Var(v) => v == x,
            Term::Val(_) => false,
            Term::App(_, args) => args.iter().any(|a| a.contains_var(x)),
        }
    }

    /// Pre-order traversal.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Term)) {
        f(self);
        for a in self.args() {
            a.walk(f);
        }
    }

    /// All positions in leftmost-outermost order.
    pub fn positions(&self) -> Vec<Position> {
        self.subterms().into_iter().map(|(p, _)| p).collect()
    }

    /// All (position, subterm) pairs in leftmost-outermost order.
    pub fn subterms(&self) -> Vec<(Position, &Term)> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        fn go<'a>(t: &'a Term, path: &mut Vec<u32>, out: &mut Vec<(Position, &'a Term)>) {
            out.push((Position::from(path.clone()), t));
            for (i, a) in t.args().iter().enumerate() {
                path.push(i as u32 + 1);
                go(a, path, out);
                path.pop();
            }
        }
        go(self, &mut path, &mut out);
        out
    }

    pub fn at(&self, p: &Position) -> Option<&Term> {
        let mut t = self;
        for &i in p.indices() {
            t = t.args().get((i as usize).checked_sub(1)?)?;
        }
        Some(t)
    }

    /// `self[u]_p`; `None` if `p` is not a position of `self`.
    pub fn replace_at(&self, p: &Position, u: Term) -> Option<Term> {
        fn go(t: &Term, idx: &[u32], u: Term) -> Option<Term> {
            let Some((&i, rest)) = idx.split_first() else {
                return Some(u);
            };
            let Term::App(f, args) = t else { return None };
            let k = (i as usize).checked_sub(1)?;
            if k >= args.len() {
                return None;
            }
            let mut new_args = args.to_vec();
            new_args[k] = go(&args[k], rest, u)?;
            Some(Term::App(f.clone(), new_args.into()))
        }
        go(self, p.indices(), u)
    }

    /// Positions whose subterm is a variable of `xs` or a value, in canonical order.
    pub fn positions_of_vars_or_values(&self, xs: &BTreeSet<Var>) -> Vec<Position> {
        self.subterms()
            .into_iter()
            .filter(|(_, t)| t.is_value() || t.as_var().is_some_and(|v| xs.contains(v)))
            .map(|(p, _)| p)
            .collect()
    }

    pub fn value_positions(&self) -> Vec<Position> {
        self.subterms()
            .into_iter()
            .filter(|(_, t)| t.is_value())
            .map(|(p, _)| p)
            .collect()
    }

    pub fn has_values(&self) -> bool {
        match self {
            t if t.is_value() => true,
            Term::App(_, args) => args.iter().any(Term::has_values),
            _ => false,
        }
    }

    fn count_vars(&self, counts: &mut std::collections::BTreeMap<Var, usize>) {
        self.walk(&mut |t| {
            if let Term::Var(v) = t {
                *counts.entry(v.clone()).or_default() += 1;
            }
        });
    }

    /// Every variable occurs at most once.
    pub fn is_linear(&self) -> bool {
        let mut counts = Default::default();
        self.count_vars(&mut counts);
        counts.values().all(|&n| n <= 1)
    }

    /// Every variable of `xs` occurs at most once.
    pub fn is_linear_in(&self, xs: &BTreeSet<Var>) -> bool {
        let mut counts = Default::default();
        self.count_vars(&mut counts);
        counts.iter().all(|(v, &n)| n <= 1 || !xs.contains(v))
    }

    /// The first variable that occurs more than once, if any.
    pub fn repeated_var(&self) -> Option<Var> {
        let mut counts = Default::default();
        self.count_vars(&mut counts);
        counts.into_iter().find(|(_, n)| *n > 1).map(|(v, _)| v)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Val(v) => write!(f, "{v}"),
            Term::App(g, args) if args.is_empty() => f.write_str(&g.name),
            Term::App(g, args) => {
                write!(f, "({}", g.name)?;
                for a in args.iter() {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
        }
    }
}
