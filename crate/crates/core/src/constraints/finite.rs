use std::collections::{BTreeSet, HashMap};

use super::eval::{eval_term, Val};
use super::{ExistentialConstraint, Formula, Solver};
use crate::error::{Error, Result};
use crate::terms::{Subst, Term, Value, Var};

/// A bounded model: Int ranges over `lo..=hi`, Bool over both truth values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FiniteDomain {
    pub lo: i64,
    pub hi: i64,
}

impl FiniteDomain {
    pub fn new(lo: i64, hi: i64) -> Self {
        FiniteDomain { lo, hi }
    }

    /// The values of the sort of `x` in this domain.
    pub fn values_of(&self, x: &Var) -> Result<Vec<Value>> {
        if x.sort().is_int() {
            Ok((self.lo..=self.hi).map(Value::Int).collect())
        } else if x.sort().is_bool() {
            Ok(vec![Value::Bool(false), Value::Bool(true)])
        } else {
            Err(Error::UnsupportedTheory(format!(
                "sort {} is not bounded in the finite model",
                x.sort()
            )))
        }
    }

    fn eval(&self, f: &Formula, env: &mut HashMap<Var, Val>) -> Result<bool> {
        Ok(match f {
            Formula::Atom(c) => eval_term(c.term(), env)?.as_bool()?,
            Formula::Not(a) => !self.eval(a, env)?,
            Formula::And(fs) => {
                for g in fs {
                    if !self.eval(g, env)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::Or(fs) => {
                for g in fs {
                    if self.eval(g, env)? {
                        return Ok(true);
                    }
                }
                false
            }
            Formula::Implies(a, b) => !self.eval(a, env)? || self.eval(b, env)?,
            Formula::Iff(a, b) => self.eval(a, env)? == self.eval(b, env)?,
            Formula::Exists(vs, a) => self.quantify(vs, a, env, true)?,
            Formula::Forall(vs, a) => self.quantify(vs, a, env, false)?,
        })
    }

    fn quantify(
        &self,
        vs: &[Var],
        body: &Formula,
        env: &mut HashMap<Var, Val>,
        existential: bool,
    ) -> Result<bool> {
        let Some((x, rest)) = vs.split_first() else {
            return self.eval(body, env);
        };
        let saved = env.get(x).copied();
        let mut result = !existential;
        for v in self.values_of(x)? {
            env.insert(x.clone(), v.into());
            let r = self.quantify(rest, body, env, existential)?;
            if r == existential {
                result = existential;
                break;
            }
        }
        match saved {
            Some(v) => env.insert(x.clone(), v),
            None => env.remove(x),
        };
        Ok(result)
    }

    /// Truth of `f` with free variables universally quantified over the domain.
    pub fn valid(&self, f: &Formula) -> Result<bool> {
        let fv: Vec<Var> = f.free_vars().into_iter().collect();
        self.quantify(&fv, f, &mut HashMap::new(), false)
    }

    pub fn satisfiable(&self, f: &Formula) -> Result<bool> {
        let fv: Vec<Var> = f.free_vars().into_iter().collect();
        self.quantify(&fv, f, &mut HashMap::new(), true)
    }

    /// The single value `x` takes over all valuations satisfying `ec`, if any.
    pub fn determined_value(&self, ec: &ExistentialConstraint, x: &Var) -> Result<Option<Value>> {
        let others: Vec<Var> = ec.free_vars().into_iter().filter(|v| v != x).collect();
        let projected = Formula::exists(others, Formula::from(ec));
        let mut found = None;
        let mut env = HashMap::new();
        for v in self.values_of(x)? {
            env.insert(x.clone(), Val::from(v));
            if self.eval(&projected, &mut env)? {
                if found.is_some() {
                    return Ok(None);
                }
                found = Some(v);
            }
        }
        Ok(found)
    }
}

/// All X-valued substitutions over `domain` that respect `ec`. The residual
/// closed constraint (∃x⃗.φ)σ is decided by `solver`.
pub fn enumerate_respecting(
    ec: &ExistentialConstraint,
    xs: &BTreeSet<Var>,
    domain: &FiniteDomain,
    solver: &Solver,
) -> Result<Vec<Subst>> {
    if !ec.free_vars().is_subset(xs) {
        return Err(Error::IllFormed("X must contain the free variables".into()));
    }
    let xs: Vec<Var> = xs.iter().cloned().collect();
    let ranges = xs
        .iter()
        .map(|x| domain.values_of(x))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    let mut idx = vec![0usize; xs.len()];
    if ranges.iter().any(Vec::is_empty) {
        return Ok(out);
    }
    loop {
        let sigma: Subst = xs
            .iter()
            .zip(&idx)
            .zip(&ranges)
            .map(|((x, &i), r)| (x.clone(), Term::Val(r[i])))
            .collect();
        if solver.is_valid(&ec.apply(&sigma))? {
            out.push(sigma);
        }
        let mut k = 0;
        loop {
            if k == xs.len() {
                return Ok(out);
            }
            idx[k] += 1;
            if idx[k] < ranges[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}
