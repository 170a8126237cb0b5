use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use super::{finite::FiniteDomain, lia, smtlib, Constraint, ExistentialConstraint, Formula};
use crate::error::{Error, Result};
use crate::terms::{Subst, Term, Value, Var};

/// Which decision procedure realises ⊨.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Backend {
    /// Bool + linear integer arithmetic by Cooper elimination.
    Builtin,
    /// An external SMT-LIB2 solver command reading a script on stdin.
    SmtLib(String),
    /// Exhaustive enumeration over a bounded integer range.
    Finite(FiniteDomain),
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Solver(format!("unknown solver `{s}`; expected builtin, smtlib:<cmd> or finite:<lo>:<hi>"));
        if s == "builtin" {
            return Ok(Backend::Builtin);
        }
        if let Some(cmd) = s.strip_prefix("smtlib:") {
            if cmd.trim().is_empty() {
                return Err(bad());
            }
            return Ok(Backend::SmtLib(cmd.to_string()));
        }
        if let Some(range) = s.strip_prefix("finite:") {
            let (lo, hi) = parse_range(range).ok_or_else(bad)?;
            return Ok(Backend::Finite(FiniteDomain::new(lo, hi)));
        }
        Err(bad())
    }
}

/// Parse `lo:hi` (either bound may be negative).
pub fn parse_range(s: &str) -> Option<(i64, i64)> {
    let bytes = s.as_bytes();
    let split = (1..bytes.len()).find(|&i| bytes[i] == b':')?;
    let lo = s[..split].parse().ok()?;
    let hi = s[split + 1..].parse().ok()?;
    (lo <= hi).then_some((lo, hi))
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Builtin => f.write_str("builtin"),
            Backend::SmtLib(c) => write!(f, "smtlib:{c}"),
            Backend::Finite(d) => write!(f, "finite:{}:{}", d.lo, d.hi),
        }
    }
}

/// A backend plus a query counter, an optional budget and a result cache.
/// Thread-safe; shared by reference.
pub struct Solver {
    backend: Backend,
    calls: AtomicU64,
    budget: Option<u64>,
    cache: Mutex<HashMap<String, bool>>,
}

impl fmt::Debug for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Solver")
            .field("backend", &self.backend)
            .field("calls", &self.calls())
            .finish()
    }
}

impl Default for Solver {
    fn default() -> Self {
        Solver::builtin()
    }
}

impl Solver {
    pub fn new(backend: Backend) -> Self {
        Solver {
            backend,
            calls: AtomicU64::new(0),
            budget: None,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn builtin() -> Self {
        Solver::new(Backend::Builtin)
    }

    pub fn with_budget(mut self, max_calls: u64) -> Self {
        self.budget = Some(max_calls);
        self
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    /// Number of queries posed so far.
    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn reset_calls(&self) {
        self.calls.store(0, Ordering::Relaxed);
    }

    fn tick(&self) -> Result<()> {
        let n = self.calls.fetch_add(1, Ordering::Relaxed) + 1;
        match self.budget {
            Some(b) if n > b => Err(Error::BudgetExhausted(format!("more than {b} solver calls"))),
            _ => Ok(()),
        }
    }

    fn cached(&self, key: String, compute: impl FnOnce() -> Result<bool>) -> Result<bool> {
        if let Some(&r) = self.cache.lock().unwrap().get(&key) {
            return Ok(r);
        }
        let r = compute()?;
        let mut cache = self.cache.lock().unwrap();
        if cache.len() > 200_000 {
            cache.clear();
        }
        cache.insert(key, r);
        Ok(r)
    }

    /// ⊨ f: true under every valuation of the free variables.
    pub fn valid(&self, f: &Formula) -> Result<bool> {
        self.tick()?;
        self.cached(format!("V{f:?}"), || match &self.backend {
            Backend::Builtin => lia::valid(f),
            Backend::SmtLib(cmd) => smtlib::check_sat(cmd, &Formula::not(f.clone())).map(|sat| !sat),
            Backend::Finite(d) => d.valid(f),
        })
    }

    /// Some valuation of the free variables satisfies `f`.
    pub fn satisfiable(&self, f: &Formula) -> Result<bool> {
        self.tick()?;
        self.cached(format!("S{f:?}"), || match &self.backend {
            Backend::Builtin => lia::satisfiable(f),
            Backend::SmtLib(cmd) => smtlib::check_sat(cmd, f),
            Backend::Finite(d) => d.satisfiable(f),
        })
    }

    pub fn is_valid(&self, ec: &ExistentialConstraint) -> Result<bool> {
        self.valid(&Formula::from(ec))
    }

    pub fn is_satisfiable(&self, ec: &ExistentialConstraint) -> Result<bool> {
        self.satisfiable(&Formula::from(ec))
    }

    /// ⊨ premise ⇒ conclusion, free variables universally quantified.
    pub fn implies(&self, premise: &ExistentialConstraint, conclusion: &ExistentialConstraint) -> Result<bool> {
        self.valid(&Formula::implies(premise.into(), conclusion.into()))
    }

    /// ⊨ a ⇔ b
    pub fn equivalent(&self, a: &ExistentialConstraint, b: &ExistentialConstraint) -> Result<bool> {
        self.valid(&Formula::iff(a.into(), b.into()))
    }

    /// ⊨ ec ⇒ (a = b)
    pub fn entails_eq(&self, ec: &ExistentialConstraint, a: &Term, b: &Term) -> Result<bool> {
        if a == b {
            return Ok(true);
        }
        if a.is_value() && b.is_value() {
            return Ok(false);
        }
        self.implies(ec, &Constraint::eq(a, b).into())
    }

    /// γ respects ec: γ(FVar(ec)) ⊆ Val and ⊨ ec·γ.
    pub fn respects(&self, gamma: &Subst, ec: &ExistentialConstraint) -> Result<bool> {
        if !gamma.is_valued_on(&ec.free_vars()) {
            return Ok(false);
        }
        self.is_valid(&ec.apply(gamma))
    }

    /// The unique value `x` takes in every valuation satisfying `ec`
    /// (`None` if several values are possible).
    pub fn determined_value(&self, ec: &ExistentialConstraint, x: &Var) -> Result<Option<Value>> {
        self.tick()?;
        match &self.backend {
            Backend::Builtin => lia::determined_value(ec, x),
            Backend::Finite(d) => d.determined_value(ec, x),
            Backend::SmtLib(_) => {
                // Candidate from the built-in procedure, confirmed externally.
                let cand = lia::determined_value(ec, x)?;
                match cand {
                    Some(v) => Ok(self
                        .implies(ec, &Constraint::eq(&Term::var(x), &Term::Val(v)).into())?
                        .then_some(v)),
                    None => Ok(None),
                }
            }
        }
    }
}
