//! Seeded random generators for systems, constrained terms and equivalent
//! pairs over LIA + Bool and one term sort `T`.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constraints::{Constraint, ExistentialConstraint, Solver};
use crate::cterms::{pg, rmv, ECTerm, NQTerm};
use crate::error::{Error, Result};
use crate::rules::{lvf, CRule};
use crate::terms::{builtins, FunSym, NameGen, Signature, Sort, SortKind, Subst, Term, Value, Var};

use super::GenConfig;

/// Names shared by terms and rules, so that rule variables regularly clash
/// with term variables and freshening matters.
pub const POOL: [&str; 5] = ["x", "y", "z", "u", "v"];
const TPOOL: [&str; 2] = ["q", "r"];
const CONSTS: [i64; 3] = [-1, 0, 1];

/// The generator signature: `f, g : Int → T`, `h : Int × Int → T`,
/// `k : T → T`, `b : Bool → T` and a constant `c : T`.
#[derive(Clone, Debug)]
pub struct Vocabulary {
    pub sig: Signature,
    pub t: Sort,
    pub f: Arc<FunSym>,
    pub g: Arc<FunSym>,
    pub h: Arc<FunSym>,
    pub k: Arc<FunSym>,
    pub b: Arc<FunSym>,
    pub c: Arc<FunSym>,
}

pub fn vocabulary() -> Vocabulary {
    let mut sig = Signature::new();
    let t = sig.add_sort("T", SortKind::Term).expect("fresh sort");
    let mut fun = |name: &str, args: Vec<Sort>| {
        sig.add_fun(name, args, t.clone(), SortKind::Term, false)
            .expect("fresh symbol")
    };
    let f = fun("f", vec![Sort::int()]);
    let g = fun("g", vec![Sort::int()]);
    let h = fun("h", vec![Sort::int(), Sort::int()]);
    let k = fun("k", vec![t.clone()]);
    let b = fun("b", vec![Sort::bool()]);
    let c = fun("c", vec![]);
    Vocabulary { sig, t, f, g, h, k, b, c }
}

fn atom(op: Arc<FunSym>, a: Term, b: Term) -> Constraint {
    Constraint::new(Term::app(&op, vec![a, b])).expect("well-sorted atom")
}

fn add(a: Term, b: Term) -> Term {
    Term::app(&builtins::add(), vec![a, b])
}

/// A deterministic random source plus the vocabulary.
pub struct Gen {
    rng: ChaCha8Rng,
    pub voc: Vocabulary,
    max_depth: usize,
    max_rules: usize,
    bools: bool,
}

impl Gen {
    pub fn new(cfg: &GenConfig, stream: u64) -> Self {
        let seed = cfg
            .seed
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(stream.wrapping_mul(0xD1B5_4A32_D192_ED03));
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            voc: vocabulary(),
            max_depth: cfg.max_term_depth.max(1),
            max_rules: cfg.max_rule_count,
            bools: cfg.sort_palette.iter().any(|s| s == "Bool"),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n.max(1))
    }

    fn value(&mut self) -> Term {
        Term::int(*CONSTS.choose(&mut self.rng).unwrap())
    }

    fn int_var(&mut self) -> Var {
        Var::int(POOL.choose(&mut self.rng).unwrap())
    }

    fn int_leaf(&mut self) -> Term {
        if self.chance(0.7) {
            Term::var(&self.int_var())
        } else {
            self.value()
        }
    }

    fn int_arg(&mut self) -> Term {
        if self.chance(0.08) {
            add(Term::var(&self.int_var()), self.value())
        } else {
            self.int_leaf()
        }
    }

    fn bool_arg(&mut self) -> Term {
        if self.chance(0.7) {
            Term::var(&Var::boolean(&format!("p{}", self.below(2))))
        } else {
            Term::boolean(self.chance(0.5))
        }
    }

    /// A random term of sort T.
    pub fn t_term(&mut self, depth: usize) -> Term {
        let voc = self.voc.clone();
        let choice = if depth == 0 { self.below(5) } else { self.below(6) };
        match choice {
            0 => Term::app(&voc.f, vec![self.int_arg()]),
            1 => Term::app(&voc.g, vec![self.int_arg()]),
            2 if self.bools => Term::app(&voc.b, vec![self.bool_arg()]),
            2 | 3 => Term::app(&voc.h, vec![self.int_arg(), self.int_arg()]),
            4 if depth == 0 => {
                if self.chance(0.5) {
                    Term::app(&voc.c, vec![])
                } else {
                    Term::var(&Var::new(TPOOL.choose(&mut self.rng).unwrap(), voc.t.clone()))
                }
            }
            _ => Term::app(&voc.k, vec![self.t_term(depth - 1)]),
        }
    }

    /// A linear integer expression over `vars`.
    fn lin(&mut self, vars: &[Var]) -> Term {
        if vars.is_empty() {
            return self.value();
        }
        let x = Term::var(vars.choose(&mut self.rng).unwrap());
        match self.below(6) {
            0 => add(x, self.value()),
            1 => add(x, Term::var(vars.choose(&mut self.rng).unwrap())),
            _ => x,
        }
    }

    /// A random atom over the given variables.
    pub fn int_atom(&mut self, vars: &[Var]) -> Constraint {
        let ints: Vec<Var> = vars.iter().filter(|v| v.sort().is_int()).cloned().collect();
        let bools: Vec<Var> = vars.iter().filter(|v| v.sort().is_bool()).cloned().collect();
        if !bools.is_empty() && self.chance(0.2) {
            let p = Term::var(bools.choose(&mut self.rng).unwrap());
            let c = Constraint::new(p).expect("bool var");
            return if self.chance(0.5) { c } else { c.not() };
        }
        let a = self.lin(&ints);
        let b = if self.chance(0.5) { self.value() } else { self.lin(&ints) };
        match self.below(7) {
            0 | 1 => Constraint::eq(&a, &b),
            2 => atom(builtins::lt(), a, b),
            3 => atom(builtins::le(), a, b),
            4 => atom(builtins::gt(), a, b),
            5 => atom(builtins::ge(), a, b),
            _ => Constraint::eq(&a, &b).not(),
        }
    }

    fn conjunction(&mut self, vars: &[Var], n: usize) -> Constraint {
        let atoms: Vec<Constraint> = (0..n).map(|_| self.int_atom(vars)).collect();
        Constraint::conj(atoms).unwrap_or_else(Constraint::tt)
    }

    /// Up to `n` pool variables of theory sort not occurring in `used`.
    fn unused_pool_vars(&mut self, used: &BTreeSet<Var>, n: usize) -> Vec<Var> {
        let names: BTreeSet<&str> = used.iter().map(Var::name).collect();
        let mut free: Vec<Var> = POOL.iter().filter(|x| !names.contains(*x)).map(|x| Var::int(x)).collect();
        free.shuffle(&mut self.rng);
        free.truncate(n);
        free
    }

    /// Wrap `s` and choose X and a satisfiable constraint. `forced` are
    /// variables that must be logical; `extra` is conjoined when it keeps
    /// the term well-formed.
    fn close(&mut self, s: Term, forced: &BTreeSet<Var>, extra: Option<Constraint>, solver: &Solver) -> Result<ECTerm> {
        let theory_vars: Vec<Var> = s.vars().into_iter().filter(Var::is_theory).collect();
        let mut logical: BTreeSet<Var> = BTreeSet::new();
        for x in &theory_vars {
            if forced.contains(x) || self.chance(0.85) {
                logical.insert(x.clone());
            }
        }
        let nbound = self.below(3);
        let bound = self.unused_pool_vars(&s.vars(), nbound);
        let mut scope: Vec<Var> = logical.iter().cloned().collect();
        scope.extend(bound.iter().cloned());
        for _ in 0..20 {
            let n = self.below(4);
            let mut body = self.conjunction(&scope, n);
            if let Some(e) = &extra {
                let ok = e.vars().iter().all(|v| logical.contains(v) || !s.vars().contains(v));
                if ok && self.chance(0.8) {
                    body = if body.is_true() { e.clone() } else { body.and(e) };
                }
            }
            let mut bvars: Vec<Var> = bound.clone();
            bvars.extend(body.vars().into_iter().filter(|v| !logical.contains(v) && !s.vars().contains(v)));
            let ec = ExistentialConstraint::new(bvars, body);
            let ct = ECTerm::from_parts(logical.clone(), s.clone(), ec);
            if ct.is_well_formed() && solver.is_satisfiable(ct.constraint())? {
                return Ok(ct);
            }
        }
        ECTerm::new(logical, s, ExistentialConstraint::quantifier_free(Constraint::tt()))
    }

    /// A well-formed, satisfiable constrained term.
    pub fn ecterm(&mut self, solver: &Solver) -> Result<ECTerm> {
        let d = self.below(self.max_depth + 1);
        let s = self.t_term(d);
        self.close(s, &BTreeSet::new(), None, solver)
    }

    /// A pattern-general constrained term.
    pub fn pg_ecterm(&mut self, solver: &Solver) -> Result<ECTerm> {
        let ct = self.ecterm(solver)?;
        Ok(pg(&ct, &mut NameGen::new()))
    }

    /// A non-quantified constrained term (every one is rmv of some ECTerm).
    pub fn nqterm(&mut self, rules: &[CRule], solver: &Solver) -> Result<NQTerm> {
        let ct = if rules.is_empty() || self.chance(0.2) {
            self.ecterm(solver)?
        } else {
            self.redex_term(rules, solver)?
        };
        Ok(rmv(&ct))
    }

    /// A left-linear rule; with `lvf` the rule is left-value-free.
    pub fn rule(&mut self, label: &str, lvf_only: bool) -> CRule {
        let voc = self.voc.clone();
        let mut names: Vec<&str> = POOL.to_vec();
        names.shuffle(&mut self.rng);
        let mut next = names.into_iter();
        let mut lhs_ints: Vec<Var> = Vec::new();
        let mut slot = |g: &mut Gen| -> Term {
            if g.chance(0.75) {
                match next.next() {
                    Some(n) => {
                        let v = Var::int(n);
                        lhs_ints.push(v.clone());
                        Term::var(&v)
                    }
                    None => g.value(),
                }
            } else {
                g.value()
            }
        };
        let lhs = match self.below(5) {
            0 => Term::app(&voc.f, vec![slot(self)]),
            1 => Term::app(&voc.g, vec![slot(self)]),
            2 => Term::app(&voc.h, vec![slot(self), slot(self)]),
            3 => Term::app(&voc.k, vec![Term::var(&Var::new("q", voc.t.clone()))]),
            _ => {
                let inner = if self.chance(0.5) {
                    Term::app(&voc.f, vec![slot(self)])
                } else {
                    Term::app(&voc.g, vec![slot(self)])
                };
                Term::app(&voc.k, vec![inner])
            }
        };
        let lhs_vars = lhs.vars();
        let mut z: BTreeSet<Var> = lhs_ints.iter().filter(|_| self.chance(0.8)).cloned().collect();
        let unused = self.unused_pool_vars(&lhs_vars, 2);
        let exvar = if self.chance(0.45) { unused.first().cloned() } else { None };
        let guard_only = if self.chance(0.2) { unused.get(1).cloned() } else { None };
        if let Some(e) = &exvar {
            z.insert(e.clone());
        }
        // rhs over lhs variables, the extra variable and values
        let mut leaves: Vec<Term> = lhs_ints.iter().map(Term::var).collect();
        if let Some(e) = &exvar {
            leaves.push(Term::var(e));
            leaves.push(Term::var(e));
        }
        let leaf = |g: &mut Gen| -> Term {
            if leaves.is_empty() || g.chance(0.2) {
                g.value()
            } else {
                leaves.choose(&mut g.rng).unwrap().clone()
            }
        };
        let tvar = lhs_vars.iter().find(|v| *v.sort() == voc.t).cloned();
        let rhs = match self.below(6) {
            0 => Term::app(&voc.f, vec![leaf(self)]),
            1 => Term::app(&voc.g, vec![leaf(self)]),
            2 => Term::app(&voc.h, vec![leaf(self), leaf(self)]),
            3 => match &tvar {
                Some(q) => Term::var(q),
                None => Term::app(&voc.c, vec![]),
            },
            4 => match &tvar {
                Some(q) => Term::app(&voc.k, vec![Term::var(q)]),
                None => Term::app(&voc.k, vec![Term::app(&voc.g, vec![leaf(self)])]),
            },
            _ => Term::app(&voc.c, vec![]),
        };
        if let Some(e) = &exvar {
            if !rhs.contains_var(e) {
                z.remove(e);
            }
        }
        let mut gvars: Vec<Var> = z.iter().cloned().collect();
        if let Some(o) = &guard_only {
            gvars.push(o.clone());
        }
        let n = if gvars.is_empty() { 0 } else { self.below(3) };
        let mut guard = self.conjunction(&gvars, n);
        if let Some(e) = z.iter().find(|v| !lhs_vars.contains(*v)).cloned() {
            // relate the extra variable to the left-hand side most of the time
            if self.chance(0.7) {
                let others: Vec<Var> = lhs_ints.iter().filter(|v| z.contains(*v)).cloned().collect();
                let bound = self.lin(&others);
                let a = match self.below(3) {
                    0 => atom(builtins::gt(), Term::var(&e), bound),
                    1 => atom(builtins::ge(), bound, Term::var(&e)),
                    _ => Constraint::eq(&Term::var(&e), &bound),
                };
                guard = if guard.is_true() { a } else { guard.and(&a) };
            }
        }
        z.extend(guard.vars());
        let rule = CRule::new(Some(label.to_string()), z, lhs, rhs, guard).expect("generated rule is well-formed");
        if lvf_only {
            lvf(&rule, &mut NameGen::new()).expect("left-linear")
        } else {
            rule
        }
    }

    /// Between one and `max_rule_count` rules (none if that is 0).
    pub fn rules(&mut self, lvf_only: bool) -> Vec<CRule> {
        if self.max_rules == 0 {
            return Vec::new();
        }
        let n = 1 + self.below(self.max_rules);
        (0..n).map(|i| self.rule(&format!("r{i}"), lvf_only)).collect()
    }

    /// A term built around an instance of some rule's left-hand side, with a
    /// constraint that usually entails the instantiated guard.
    pub fn redex_term(&mut self, rules: &[CRule], solver: &Solver) -> Result<ECTerm> {
        if rules.is_empty() {
            return self.ecterm(solver);
        }
        let rule = rules.choose(&mut self.rng).unwrap().clone();
        let mut theta = Subst::new();
        let mut forced = BTreeSet::new();
        for x in rule.lhs().vars() {
            let img = if x.sort().is_int() {
                match self.below(20) {
                    0..=11 => {
                        let v = self.int_var();
                        forced.insert(v.clone());
                        Term::var(&v)
                    }
                    12..=16 => self.value(),
                    17 | 18 => Term::var(&Var::int(&format!("n{}", self.below(2)))),
                    _ => add(Term::var(&self.int_var()), self.value()),
                }
            } else if x.sort().is_bool() {
                self.bool_arg()
            } else {
                let d = self.below(2);
                self.t_term(d)
            };
            theta.insert(x, img);
        }
        let mut s = theta.apply(rule.lhs());
        if self.chance(0.4) {
            s = Term::app(&self.voc.k, vec![s]);
        }
        // π with the non-lhs variables sent to unused names, so the
        // existential closure of the guard is implied
        let lv = rule.lhs().vars();
        let mut used = s.vars();
        let mut ext = theta.clone();
        for z in rule.guard().vars() {
            if !lv.contains(&z) {
                let w = NameGen::new().fresh("d", z.sort(), &used);
                used.insert(w.clone());
                ext.insert(z, Term::var(&w));
            }
        }
        let pi = rule.guard().apply(&ext);
        let extra = (!pi.is_true()).then_some(pi);
        self.close(s, &forced, extra, solver)
    }

    /// A random equivalence-preserving transformation of `ct`.
    pub fn equiv_transform(&mut self, ct: &ECTerm, solver: &Solver) -> Result<ECTerm> {
        for _ in 0..4 {
            let out = match self.below(8) {
                0 => Some(self.rename(ct)),
                1 => Some(self.reshuffle(ct)),
                2 => Some(pg(ct, &mut NameGen::new())),
                3 => self.value_swap(ct, solver)?,
                4 => self.unswap_value(ct),
                5 => self.merge(ct, solver)?,
                6 => self.split(ct),
                _ => Some(self.redundant_bound(ct)),
            };
            if let Some(o) = out {
                debug_assert!(o.is_well_formed(), "{o}");
                return Ok(o);
            }
        }
        Ok(self.rename(ct))
    }

    /// Bijective renaming of X ∪ BVar.
    pub fn rename(&mut self, ct: &ECTerm) -> ECTerm {
        let mut vs: BTreeSet<Var> = ct.logical().clone();
        vs.extend(ct.constraint().bound().iter().cloned());
        let keep: BTreeSet<Var> = ct.all_vars().difference(&vs).cloned().collect();
        let mut names: Vec<String> = POOL.iter().map(|s| s.to_string()).collect();
        names.extend(["m0", "m1", "m2", "m3", "m4", "m5"].map(String::from));
        names.retain(|n| !keep.iter().any(|k| k.name() == n));
        names.shuffle(&mut self.rng);
        let mut ren = Subst::new();
        let mut taken: BTreeSet<Var> = keep.clone();
        let mut gen = NameGen::new();
        for (x, n) in vs.iter().zip(names.iter().chain(std::iter::repeat(&"m".to_string()))) {
            let mut y = Var::new(n, x.sort().clone());
            if taken.contains(&y) {
                y = gen.fresh(n, x.sort(), &taken.union(&vs).cloned().collect());
            }
            taken.insert(y.clone());
            ren.insert(x.clone(), Term::var(&y));
        }
        rename_ecterm(ct, &ren)
    }

    /// Reorder and mirror conjuncts.
    pub fn reshuffle(&mut self, ct: &ECTerm) -> ECTerm {
        let mut parts = ct.constraint().body().conjuncts();
        parts.shuffle(&mut self.rng);
        let mut parts: Vec<Constraint> = parts.into_iter().map(|c| self.mirror(&c)).collect();
        if self.chance(0.3) {
            parts.push(Constraint::tt());
        }
        let body = Constraint::conj(parts).unwrap_or_else(Constraint::tt);
        ECTerm::from_parts(
            ct.logical().clone(),
            ct.term().clone(),
            ExistentialConstraint::new(ct.constraint().bound().to_vec(), body),
        )
    }

    fn mirror(&mut self, c: &Constraint) -> Constraint {
        let t = c.term();
        if let Term::App(f, args) = t {
            if args.len() == 2 && self.chance(0.5) {
                let flip = if **f == *builtins::lt() {
                    Some(builtins::gt())
                } else if **f == *builtins::gt() {
                    Some(builtins::lt())
                } else if **f == *builtins::le() {
                    Some(builtins::ge())
                } else if **f == *builtins::ge() {
                    Some(builtins::le())
                } else if &*f.name == "=" {
                    Some(f.clone())
                } else {
                    None
                };
                if let Some(g) = flip {
                    return Constraint::new(Term::app(&g, vec![args[1].clone(), args[0].clone()])).expect("mirrored atom");
                }
            }
        }
        c.clone()
    }

    /// Replace occurrences of a value-determined logical variable by its value.
    pub fn value_swap(&mut self, ct: &ECTerm, solver: &Solver) -> Result<Option<ECTerm>> {
        let mut xs: Vec<Var> = ct.logical().iter().cloned().collect();
        xs.shuffle(&mut self.rng);
        for x in xs {
            let Some(v) = solver.determined_value(ct.constraint(), &x)? else {
                continue;
            };
            let positions: Vec<_> = ct
                .term()
                .subterms()
                .into_iter()
                .filter(|(_, u)| u.as_var() == Some(&x))
                .map(|(p, _)| p)
                .collect();
            let mut s = ct.term().clone();
            for p in &positions {
                if positions.len() == 1 || self.chance(0.7) {
                    s = s.replace_at(p, Term::Val(v)).expect("position");
                }
            }
            return Ok(Some(reclose(ct, s, None)));
        }
        Ok(None)
    }

    /// Replace a value in the term by a fresh logical variable equal to it.
    pub fn unswap_value(&mut self, ct: &ECTerm) -> Option<ECTerm> {
        let ps = ct.term().value_positions();
        let p = ps.choose(&mut self.rng)?.clone();
        let v = ct.term().at(&p).unwrap().clone();
        let w = NameGen::new().fresh("w", &v.sort(), &ct.all_vars().union(&ct.constraint().bound_set()).cloned().collect());
        let s = ct.term().replace_at(&p, Term::var(&w)).unwrap();
        let extra = Constraint::eq(&Term::var(&w), &v);
        let mut x = ct.logical().clone();
        x.insert(w);
        Some(ECTerm::from_parts(
            x,
            s,
            ExistentialConstraint::new(ct.constraint().bound().to_vec(), ct.constraint().body().and(&extra)),
        ))
    }

    /// Identify two logical variables the constraint forces equal.
    pub fn merge(&mut self, ct: &ECTerm, solver: &Solver) -> Result<Option<ECTerm>> {
        let xs: Vec<Var> = ct.logical().iter().filter(|v| v.sort().is_int()).cloned().collect();
        for (i, a) in xs.iter().enumerate() {
            for b in &xs[i + 1..] {
                if solver.entails_eq(ct.constraint(), &Term::var(a), &Term::var(b))? {
                    let ren = Subst::singleton(b.clone(), Term::var(a));
                    let s = ren.apply(ct.term());
                    return Ok(Some(reclose(ct, s, None)));
                }
            }
        }
        Ok(None)
    }

    /// Replace one occurrence of a logical variable by a fresh one
    /// constrained equal to it.
    pub fn split(&mut self, ct: &ECTerm) -> Option<ECTerm> {
        let subs = ct.term().subterms();
        let occ: Vec<_> = subs
            .iter()
            .filter(|(_, u)| u.as_var().is_some_and(|v| ct.logical().contains(v)))
            .collect();
        let (p, u) = occ.choose(&mut self.rng)?;
        let avoid: BTreeSet<Var> = ct.all_vars().union(&ct.constraint().bound_set()).cloned().collect();
        let w = NameGen::new().fresh("w", &u.sort(), &avoid);
        let s = ct.term().replace_at(p, Term::var(&w)).unwrap();
        let extra = Constraint::eq(&Term::var(&w), u);
        let mut x = ct.logical().clone();
        x.insert(w);
        Some(reclose(
            &ECTerm::from_parts(x, ct.term().clone(), ct.constraint().clone()),
            s,
            Some(extra),
        ))
    }

    /// Conjoin `∃u. u = x + c` with a fresh bound u.
    pub fn redundant_bound(&mut self, ct: &ECTerm) -> ECTerm {
        let avoid: BTreeSet<Var> = ct.all_vars().union(&ct.constraint().bound_set()).cloned().collect();
        let u = NameGen::new().fresh("u", &Sort::int(), &avoid);
        let xs: Vec<Var> = ct.logical().iter().filter(|v| v.sort().is_int()).cloned().collect();
        let rhs = match xs.choose(&mut self.rng) {
            Some(x) => add(Term::var(x), self.value()),
            None => self.value(),
        };
        let extra = Constraint::eq(&Term::var(&u), &rhs);
        let mut bound = ct.constraint().bound().to_vec();
        bound.push(u);
        ECTerm::from_parts(
            ct.logical().clone(),
            ct.term().clone(),
            ExistentialConstraint::new(bound, ct.constraint().body().and(&extra)),
        )
    }

    /// A small perturbation that usually breaks equivalence.
    pub fn perturb(&mut self, ct: &ECTerm) -> ECTerm {
        let vals = ct.term().value_positions();
        if !vals.is_empty() && self.chance(0.4) {
            let p = vals.choose(&mut self.rng).unwrap();
            if let Term::Val(Value::Int(n)) = ct.term().at(p).unwrap() {
                let s = ct.term().replace_at(p, Term::int(n + 1)).unwrap();
                return ECTerm::from_parts(ct.logical().clone(), s, ct.constraint().clone());
            }
        }
        let mut parts = ct.constraint().body().conjuncts();
        let scope: Vec<Var> = ct
            .logical()
            .iter()
            .chain(ct.constraint().bound())
            .cloned()
            .collect();
        if !parts.is_empty() && self.chance(0.5) {
            let i = self.below(parts.len());
            parts.remove(i);
        } else {
            parts.push(self.int_atom(&scope));
        }
        let body = Constraint::conj(parts).unwrap_or_else(Constraint::tt);
        ECTerm::from_parts(
            ct.logical().clone(),
            ct.term().clone(),
            ExistentialConstraint::new(ct.constraint().bound().to_vec(), body),
        )
    }
}

/// Apply a renaming of X ∪ BVar to every component.
pub fn rename_ecterm(ct: &ECTerm, ren: &Subst) -> ECTerm {
    let v = |x: &Var| ren.apply_var(x).as_var().cloned().expect("renaming");
    ECTerm::from_parts(
        ct.logical().iter().map(v).collect(),
        ren.apply(ct.term()),
        ExistentialConstraint::new(
            ct.constraint().bound().iter().map(v).collect::<Vec<_>>(),
            ct.constraint().body().apply(ren),
        ),
    )
}

/// Rebuild with a new term: logical variables that left the term become bound.
fn reclose(ct: &ECTerm, s: Term, extra: Option<Constraint>) -> ECTerm {
    let sv = s.vars();
    let logical: BTreeSet<Var> = ct.logical().iter().filter(|x| sv.contains(*x)).cloned().collect();
    let mut bound: Vec<Var> = ct.constraint().bound().to_vec();
    bound.extend(ct.logical().iter().filter(|x| !sv.contains(*x)).cloned());
    let body = match extra {
        Some(e) => ct.constraint().body().and(&e),
        None => ct.constraint().body().clone(),
    };
    ECTerm::from_parts(logical, s, ExistentialConstraint::new(bound, body))
}

/// A random satisfiable term and a transformed partner.
pub fn equiv_pair(g: &mut Gen, rules: &[CRule], solver: &Solver, steps: usize) -> Result<(ECTerm, ECTerm)> {
    let a = if rules.is_empty() {
        g.ecterm(solver)?
    } else {
        g.redex_term(rules, solver)?
    };
    let mut b = a.clone();
    for _ in 0..steps.max(1) {
        b = g.equiv_transform(&b, solver)?;
    }
    if !b.is_well_formed() {
        return Err(Error::IllFormed(format!("generator produced {b}")));
    }
    Ok((a, b))
}
