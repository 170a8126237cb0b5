//! Bool + linear integer arithmetic: normal forms and Cooper's quantifier
//! elimination.
//!
//! Formulas are kept in negation normal form over the atoms `t < 0`,
//! `t = 0`, `d | t`, `¬(d | t)` and Boolean variables, where `t` is a linear
//! term with integer coefficients.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_integer::Integer;

use super::eval::Val;
use super::{ExistentialConstraint, Formula};
use crate::error::{Error, Result};
use crate::terms::{Term, Value, Var};

pub type VarId = u32;

/// `Σ cᵢ·xᵢ + k`, coefficients sorted by variable and non-zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lin {
    coeffs: Vec<(VarId, i128)>,
    konst: i128,
}

impl Lin {
    pub fn constant(k: i128) -> Lin {
        Lin {
            coeffs: Vec::new(),
            konst: k,
        }
    }

    pub fn var(v: VarId) -> Lin {
        Lin {
            coeffs: vec![(v, 1)],
            konst: 0,
        }
    }

    pub fn konst(&self) -> i128 {
        self.konst
    }

    pub fn coeffs(&self) -> &[(VarId, i128)] {
        &self.coeffs
    }

    pub fn is_const(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, v: VarId) -> i128 {
        match self.coeffs.binary_search_by_key(&v, |&(x, _)| x) {
            Ok(i) => self.coeffs[i].1,
            Err(_) => 0,
        }
    }

    pub fn add(&self, o: &Lin) -> Lin {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + o.coeffs.len());
        let (mut i, mut j) = (0, 0);
        while i < self.coeffs.len() || j < o.coeffs.len() {
            let a = self.coeffs.get(i);
            let b = o.coeffs.get(j);
            match (a, b) {
                (Some(&(x, c)), Some(&(y, d))) if x == y => {
                    if c + d != 0 {
                        coeffs.push((x, c + d));
                    }
                    i += 1;
                    j += 1;
                }
                (Some(&(x, c)), Some(&(y, _))) if x < y => {
                    coeffs.push((x, c));
                    i += 1;
                }
                (Some(&(x, c)), None) => {
                    coeffs.push((x, c));
                    i += 1;
                }
                (_, Some(&(y, d))) => {
                    coeffs.push((y, d));
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Lin {
            coeffs,
            konst: self.konst + o.konst,
        }
    }

    pub fn sub(&self, o: &Lin) -> Lin {
        self.add(&o.scale(-1))
    }

    pub fn scale(&self, k: i128) -> Lin {
        if k == 0 {
            return Lin::constant(0);
        }
        Lin {
            coeffs: self.coeffs.iter().map(|&(x, c)| (x, c * k)).collect(),
            konst: self.konst * k,
        }
    }

    pub fn add_const(&self, k: i128) -> Lin {
        Lin {
            coeffs: self.coeffs.clone(),
            konst: self.konst + k,
        }
    }

    pub fn without(&self, v: VarId) -> Lin {
        Lin {
            coeffs: self.coeffs.iter().copied().filter(|&(x, _)| x != v).collect(),
            konst: self.konst,
        }
    }

    /// Replace `v` by `by`.
    pub fn subst(&self, v: VarId, by: &Lin) -> Lin {
        let c = self.coeff(v);
        if c == 0 {
            return self.clone();
        }
        self.without(v).add(&by.scale(c))
    }

    fn eval(&self, env: &impl Fn(VarId) -> i128) -> i128 {
        self.coeffs.iter().map(|&(x, c)| c * env(x)).sum::<i128>() + self.konst
    }

    fn coeff_gcd(&self) -> i128 {
        self.coeffs.iter().fold(0i128, |g, &(_, c)| g.gcd(&c))
    }

    fn exact_div(&self, g: i128) -> Lin {
        Lin {
            coeffs: self.coeffs.iter().map(|&(x, c)| (x, c / g)).collect(),
            konst: self.konst / g,
        }
    }

    /// Sign normalisation: the first coefficient is positive.
    fn leading_positive(&self) -> bool {
        self.coeffs.first().is_none_or(|&(_, c)| c > 0)
    }
}

/// Quantifier-free formula in negation normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Qf {
    True,
    False,
    /// `t < 0`
    Lt(Lin),
    /// `t = 0`
    Eq(Lin),
    /// `d | t`
    Dvd(i128, Lin),
    /// `¬(d | t)`
    NDvd(i128, Lin),
    /// A Boolean variable or its negation.
    BVar(VarId, bool),
    And(Vec<Qf>),
    Or(Vec<Qf>),
}

fn bool_qf(b: bool) -> Qf {
    if b {
        Qf::True
    } else {
        Qf::False
    }
}

/// `t < 0`, normalised.
pub fn lt(t: Lin) -> Qf {
    if t.is_const() {
        return bool_qf(t.konst < 0);
    }
    let g = t.coeff_gcd();
    if g == 1 {
        return Qf::Lt(t);
    }
    // g·t' + c < 0  ⇔  t' ≤ ⌊-(c+1)/g⌋
    let m = Integer::div_floor(&-(t.konst + 1), &g);
    let mut t2 = t.without_const_div(g);
    t2.konst = -m - 1;
    Qf::Lt(t2)
}

impl Lin {
    fn without_const_div(&self, g: i128) -> Lin {
        Lin {
            coeffs: self.coeffs.iter().map(|&(x, c)| (x, c / g)).collect(),
            konst: 0,
        }
    }
}

/// `t ≤ 0`
pub fn le(t: Lin) -> Qf {
    lt(t.add_const(-1))
}

/// `t = 0`, normalised.
pub fn eq(t: Lin) -> Qf {
    if t.is_const() {
        return bool_qf(t.konst == 0);
    }
    let g = t.coeff_gcd();
    if t.konst % g != 0 {
        return Qf::False;
    }
    let t = t.exact_div(g);
    Qf::Eq(if t.leading_positive() { t } else { t.scale(-1) })
}

fn dvd_norm(d: i128, t: Lin) -> std::result::Result<(i128, Lin), bool> {
    let d = d.abs();
    assert!(d != 0, "divisibility by zero");
    let coeffs: Vec<(VarId, i128)> = t
        .coeffs
        .iter()
        .map(|&(x, c)| (x, c.mod_floor(&d)))
        .filter(|&(_, c)| c != 0)
        .collect();
    let konst = t.konst.mod_floor(&d);
    if coeffs.is_empty() {
        return Err(konst == 0);
    }
    let g = coeffs.iter().fold(d.gcd(&konst), |g, &(_, c)| g.gcd(&c));
    let d = d / g;
    if d == 1 {
        return Err(true);
    }
    Ok((
        d,
        Lin {
            coeffs: coeffs.into_iter().map(|(x, c)| (x, c / g)).collect(),
            konst: konst / g,
        },
    ))
}

/// `d | t`, normalised.
pub fn dvd(d: i128, t: Lin) -> Qf {
    match dvd_norm(d, t) {
        Ok((d, t)) => Qf::Dvd(d, t),
        Err(b) => bool_qf(b),
    }
}

/// `¬(d | t)`, normalised.
pub fn ndvd(d: i128, t: Lin) -> Qf {
    match dvd_norm(d, t) {
        Ok((d, t)) => Qf::NDvd(d, t),
        Err(b) => bool_qf(!b),
    }
}

/// Bounds on a primitive linear form, used to merge comparisons.
#[derive(Default)]
struct Bounds {
    lo: Option<i128>,
    hi: Option<i128>,
    points: Vec<i128>,
}

/// Split a comparison atom into (key, bound-kind, value): the key is the
/// sign-normalised variable part.
enum BoundAtom {
    /// key ≤ v
    Upper(i128),
    /// key ≥ v
    Lower(i128),
    /// key = v
    Point(i128),
}

fn as_bound(q: &Qf) -> Option<(Vec<(VarId, i128)>, BoundAtom)> {
    match q {
        Qf::Lt(t) => {
            if t.leading_positive() {
                Some((t.coeffs.clone(), BoundAtom::Upper(-t.konst - 1)))
            } else {
                let n = t.scale(-1);
                // -key + k < 0 with key = -t: key > -(-t.konst)... rewritten:
                // t = -key + c  ⇒  key > c  ⇒  key ≥ c + 1
                Some((n.coeffs, BoundAtom::Lower(t.konst + 1)))
            }
        }
        Qf::Eq(t) => Some((t.coeffs.clone(), BoundAtom::Point(-t.konst))),
        _ => None,
    }
}

fn key_upper(key: &[(VarId, i128)], v: i128) -> Qf {
    Qf::Lt(Lin {
        coeffs: key.to_vec(),
        konst: -v - 1,
    })
}

fn key_lower(key: &[(VarId, i128)], v: i128) -> Qf {
    Qf::Lt(Lin {
        coeffs: key.iter().map(|&(x, c)| (x, -c)).collect(),
        konst: v - 1,
    })
}

fn key_point(key: &[(VarId, i128)], v: i128) -> Qf {
    Qf::Eq(Lin {
        coeffs: key.to_vec(),
        konst: -v,
    })
}

fn has_complement(items: &[Qf]) -> bool {
    let set: BTreeSet<&Qf> = items.iter().collect();
    items.iter().any(|q| match q {
        Qf::BVar(v, p) => set.contains(&Qf::BVar(*v, !p)),
        Qf::Dvd(d, t) => set.contains(&Qf::NDvd(*d, t.clone())),
        _ => false,
    })
}

/// Conjunction with flattening, constant absorption and bound merging.
pub fn and(items: impl IntoIterator<Item = Qf>) -> Qf {
    let mut flat = Vec::new();
    for q in items {
        match q {
            Qf::True => {}
            Qf::False => return Qf::False,
            Qf::And(xs) => flat.extend(xs),
            q => flat.push(q),
        }
    }
    let mut bounds: BTreeMap<Vec<(VarId, i128)>, Bounds> = BTreeMap::new();
    let mut rest = Vec::new();
    for q in flat {
        match as_bound(&q) {
            Some((key, b)) => {
                let e = bounds.entry(key).or_default();
                match b {
                    BoundAtom::Upper(v) => e.hi = Some(e.hi.map_or(v, |h| h.min(v))),
                    BoundAtom::Lower(v) => e.lo = Some(e.lo.map_or(v, |l| l.max(v))),
                    BoundAtom::Point(v) => {
                        e.lo = Some(e.lo.map_or(v, |l| l.max(v)));
                        e.hi = Some(e.hi.map_or(v, |h| h.min(v)));
                    }
                }
            }
            None => rest.push(q),
        }
    }
    for (key, b) in &bounds {
        match (b.lo, b.hi) {
            (Some(l), Some(h)) if l > h => return Qf::False,
            (Some(l), Some(h)) if l == h => rest.push(key_point(key, l)),
            (lo, hi) => {
                if let Some(l) = lo {
                    rest.push(key_lower(key, l));
                }
                if let Some(h) = hi {
                    rest.push(key_upper(key, h));
                }
            }
        }
    }
    rest.sort();
    rest.dedup();
    if has_complement(&rest) {
        return Qf::False;
    }
    match rest.len() {
        0 => Qf::True,
        1 => rest.pop().unwrap(),
        _ => Qf::And(rest),
    }
}

/// Disjunction with flattening, constant absorption and bound merging.
pub fn or(items: impl IntoIterator<Item = Qf>) -> Qf {
    let mut flat = Vec::new();
    for q in items {
        match q {
            Qf::False => {}
            Qf::True => return Qf::True,
            Qf::Or(xs) => flat.extend(xs),
            q => flat.push(q),
        }
    }
    let mut bounds: BTreeMap<Vec<(VarId, i128)>, Bounds> = BTreeMap::new();
    let mut rest = Vec::new();
    for q in flat {
        match as_bound(&q) {
            Some((key, b)) => {
                let e = bounds.entry(key).or_default();
                match b {
                    BoundAtom::Upper(v) => e.hi = Some(e.hi.map_or(v, |h| h.max(v))),
                    BoundAtom::Lower(v) => e.lo = Some(e.lo.map_or(v, |l| l.min(v))),
                    BoundAtom::Point(v) => e.points.push(v),
                }
            }
            None => rest.push(q),
        }
    }
    for (key, b) in &bounds {
        if let (Some(l), Some(h)) = (b.lo, b.hi) {
            if l <= h + 1 {
                return Qf::True;
            }
        }
        if let Some(l) = b.lo {
            rest.push(key_lower(key, l));
        }
        if let Some(h) = b.hi {
            rest.push(key_upper(key, h));
        }
        for &p in &b.points {
            let covered = b.lo.is_some_and(|l| p >= l) || b.hi.is_some_and(|h| p <= h);
            if !covered {
                rest.push(key_point(key, p));
            }
        }
    }
    rest.sort();
    rest.dedup();
    if has_complement(&rest) {
        return Qf::True;
    }
    match rest.len() {
        0 => Qf::False,
        1 => rest.pop().unwrap(),
        _ => Qf::Or(rest),
    }
}

impl Qf {
    pub fn negate(&self) -> Qf {
        match self {
            Qf::True => Qf::False,
            Qf::False => Qf::True,
            // ¬(t < 0) ⇔ -t - 1 < 0
            Qf::Lt(t) => lt(t.scale(-1).add_const(-1)),
            Qf::Eq(t) => or([lt(t.clone()), lt(t.scale(-1))]),
            Qf::Dvd(d, t) => ndvd(*d, t.clone()),
            Qf::NDvd(d, t) => dvd(*d, t.clone()),
            Qf::BVar(v, p) => Qf::BVar(*v, !p),
            Qf::And(xs) => or(xs.iter().map(Qf::negate)),
            Qf::Or(xs) => and(xs.iter().map(Qf::negate)),
        }
    }

    pub fn mentions(&self, v: VarId) -> bool {
        match self {
            Qf::True | Qf::False => false,
            Qf::Lt(t) | Qf::Eq(t) | Qf::Dvd(_, t) | Qf::NDvd(_, t) => t.coeff(v) != 0,
            Qf::BVar(x, _) => *x == v,
            Qf::And(xs) | Qf::Or(xs) => xs.iter().any(|q| q.mentions(v)),
        }
    }

    /// Number of atoms mentioning `v`.
    fn occurrences(&self, v: VarId) -> usize {
        match self {
            Qf::And(xs) | Qf::Or(xs) => xs.iter().map(|q| q.occurrences(v)).sum(),
            q => usize::from(q.mentions(v)),
        }
    }

    pub fn vars(&self) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |q| match q {
            Qf::Lt(t) | Qf::Eq(t) | Qf::Dvd(_, t) | Qf::NDvd(_, t) => {
                out.extend(t.coeffs.iter().map(|&(x, _)| x))
            }
            Qf::BVar(x, _) => {
                out.insert(*x);
            }
            _ => {}
        });
        out
    }

    fn visit_atoms(&self, f: &mut impl FnMut(&Qf)) {
        match self {
            Qf::And(xs) | Qf::Or(xs) => xs.iter().for_each(|q| q.visit_atoms(f)),
            q => f(q),
        }
    }

    /// Rebuild through the normalising constructors, mapping every atom.
    fn map_atoms(&self, f: &mut impl FnMut(&Qf) -> Qf) -> Qf {
        match self {
            Qf::And(xs) => {
                let mut out = Vec::with_capacity(xs.len());
                for q in xs {
                    let r = q.map_atoms(f);
                    if r == Qf::False {
                        return Qf::False;
                    }
                    out.push(r);
                }
                and(out)
            }
            Qf::Or(xs) => {
                let mut out = Vec::with_capacity(xs.len());
                for q in xs {
                    let r = q.map_atoms(f);
                    if r == Qf::True {
                        return Qf::True;
                    }
                    out.push(r);
                }
                or(out)
            }
            q => f(q),
        }
    }

    /// Replace the integer variable `v` by `by`.
    pub fn subst(&self, v: VarId, by: &Lin) -> Qf {
        self.map_atoms(&mut |q| match q {
            Qf::Lt(t) if t.coeff(v) != 0 => lt(t.subst(v, by)),
            Qf::Eq(t) if t.coeff(v) != 0 => eq(t.subst(v, by)),
            Qf::Dvd(d, t) if t.coeff(v) != 0 => dvd(*d, t.subst(v, by)),
            Qf::NDvd(d, t) if t.coeff(v) != 0 => ndvd(*d, t.subst(v, by)),
            q => q.clone(),
        })
    }

    /// Replace the Boolean variable `v` by `b`.
    pub fn subst_bool(&self, v: VarId, b: bool) -> Qf {
        self.map_atoms(&mut |q| match q {
            Qf::BVar(x, p) if *x == v => bool_qf(*p == b),
            q => q.clone(),
        })
    }

    pub fn eval(&self, int: &impl Fn(VarId) -> i128, boolean: &impl Fn(VarId) -> bool) -> bool {
        match self {
            Qf::True => true,
            Qf::False => false,
            Qf::Lt(t) => t.eval(int) < 0,
            Qf::Eq(t) => t.eval(int) == 0,
            Qf::Dvd(d, t) => t.eval(int).mod_floor(d) == 0,
            Qf::NDvd(d, t) => t.eval(int).mod_floor(d) != 0,
            Qf::BVar(x, p) => boolean(*x) == *p,
            Qf::And(xs) => xs.iter().all(|q| q.eval(int, boolean)),
            Qf::Or(xs) => xs.iter().any(|q| q.eval(int, boolean)),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Qf::And(xs) | Qf::Or(xs) => 1 + xs.iter().map(Qf::size).sum::<usize>(),
            _ => 1,
        }
    }
}

/// `∃v. f` for an integer variable `v`.
pub fn exists_int(v: VarId, f: &Qf) -> Qf {
    if !f.mentions(v) {
        return f.clone();
    }
    match f {
        Qf::Or(xs) => {
            let mut out = Vec::with_capacity(xs.len());
            for q in xs {
                let r = exists_int(v, q);
                if r == Qf::True {
                    return Qf::True;
                }
                out.push(r);
            }
            or(out)
        }
        Qf::And(xs) => {
            let (with, without): (Vec<Qf>, Vec<Qf>) = xs.iter().cloned().partition(|q| q.mentions(v));
            let unit_eq = with.iter().position(|q| match q {
                Qf::Eq(t) => t.coeff(v).abs() == 1,
                _ => false,
            });
            let inner = match unit_eq {
                Some(i) => {
                    let Qf::Eq(t) = &with[i] else { unreachable!() };
                    // c·v + e = 0  ⇒  v = -c·e
                    let c = t.coeff(v);
                    let by = t.without(v).scale(-c);
                    and(with
                        .iter()
                        .enumerate()
                        .filter(|&(j, _)| j != i)
                        .map(|(_, q)| q.subst(v, &by)))
                }
                None => cooper(v, &and(with)),
            };
            and(without.into_iter().chain([inner]))
        }
        q => cooper(v, q),
    }
}

/// `∃v. f` for a Boolean variable `v`.
pub fn exists_bool(v: VarId, f: &Qf) -> Qf {
    if !f.mentions(v) {
        return f.clone();
    }
    let t = f.subst_bool(v, true);
    if t == Qf::True {
        return t;
    }
    or([t, f.subst_bool(v, false)])
}

fn cooper(v: VarId, f: &Qf) -> Qf {
    // Scale so that every coefficient of v is ±l, then read l·v as v.
    let mut l: i128 = 1;
    f.visit_atoms(&mut |q| {
        if let Qf::Lt(t) | Qf::Eq(t) | Qf::Dvd(_, t) | Qf::NDvd(_, t) = q {
            let c = t.coeff(v);
            if c != 0 {
                l = l.lcm(&c.abs());
            }
        }
    });
    let unit = |t: &Lin, k: i128, sign: i128| -> Lin {
        let mut s = t.scale(k);
        for e in s.coeffs.iter_mut() {
            if e.0 == v {
                e.1 = sign;
            }
        }
        s
    };
    let mut g = f.map_atoms(&mut |q| match q {
        Qf::Lt(t) if t.coeff(v) != 0 => {
            let c = t.coeff(v);
            Qf::Lt(unit(t, l / c.abs(), c.signum()))
        }
        Qf::Eq(t) if t.coeff(v) != 0 => {
            let c = t.coeff(v);
            let t = if c < 0 { t.scale(-1) } else { t.clone() };
            Qf::Eq(unit(&t, l / c.abs(), 1))
        }
        Qf::Dvd(d, t) if t.coeff(v) != 0 => {
            let k = l / t.coeff(v).abs();
            Qf::Dvd(d * k, unit(t, k, t.coeff(v).signum()))
        }
        Qf::NDvd(d, t) if t.coeff(v) != 0 => {
            let k = l / t.coeff(v).abs();
            Qf::NDvd(d * k, unit(t, k, t.coeff(v).signum()))
        }
        q => q.clone(),
    });
    if l > 1 {
        g = and([g, Qf::Dvd(l, Lin::var(v))]);
    }

    let mut lower: BTreeSet<Lin> = BTreeSet::new();
    let mut upper: BTreeSet<Lin> = BTreeSet::new();
    let mut delta: i128 = 1;
    g.visit_atoms(&mut |q| match q {
        Qf::Lt(t) => match t.coeff(v) {
            // -v + e < 0: v > e
            -1 => {
                lower.insert(t.without(v));
            }
            // v + e < 0: v < -e
            1 => {
                upper.insert(t.without(v).scale(-1));
            }
            _ => {}
        },
        Qf::Eq(t) => {
            let c = t.coeff(v);
            if c != 0 {
                let point = t.without(v).scale(-c);
                lower.insert(point.add_const(-1));
                upper.insert(point.add_const(1));
            }
        }
        Qf::Dvd(d, t) | Qf::NDvd(d, t) if t.coeff(v) != 0 => delta = delta.lcm(d),
        _ => {}
    });

    let use_lower = lower.len() <= upper.len();
    let inf = g.map_atoms(&mut |q| match q {
        Qf::Lt(t) if t.coeff(v) != 0 => bool_qf((t.coeff(v) > 0) == use_lower),
        Qf::Eq(t) if t.coeff(v) != 0 => Qf::False,
        q => q.clone(),
    });
    let mut out = Vec::new();
    for j in 1..=delta {
        let jv = if use_lower { j } else { -j };
        let r = inf.subst(v, &Lin::constant(jv));
        if r == Qf::True {
            return Qf::True;
        }
        out.push(r);
    }
    let bounds = if use_lower { &lower } else { &upper };
    for b in bounds {
        for j in 1..=delta {
            let at = b.add_const(if use_lower { j } else { -j });
            let r = g.subst(v, &at);
            if r == Qf::True {
                return Qf::True;
            }
            out.push(r);
        }
    }
    or(out)
}

/// Eliminate a block of existentially quantified variables.
pub fn exists_many(ints: &[VarId], bools: &[VarId], f: &Qf) -> Qf {
    let mut f = f.clone();
    for &b in bools {
        f = exists_bool(b, &f);
        if matches!(f, Qf::True | Qf::False) {
            return f;
        }
    }
    exists_ints(ints.iter().copied().filter(|&v| f.mentions(v)).collect(), &f)
}

fn exists_ints(mut vs: Vec<VarId>, f: &Qf) -> Qf {
    vs.retain(|&v| f.mentions(v));
    if vs.is_empty() {
        return f.clone();
    }
    if let Qf::Or(xs) = f {
        let mut out = Vec::with_capacity(xs.len());
        for q in xs {
            let r = exists_ints(vs.clone(), q);
            if r == Qf::True {
                return Qf::True;
            }
            out.push(r);
        }
        return or(out);
    }
    let pick = pick_var(&vs, f);
    vs.retain(|&v| v != pick);
    let g = exists_int(pick, f);
    exists_ints(vs, &g)
}

fn pick_var(vs: &[VarId], f: &Qf) -> VarId {
    let top: &[Qf] = match f {
        Qf::And(xs) => xs,
        q => std::slice::from_ref(q),
    };
    for &v in vs {
        if top.iter().any(|q| matches!(q, Qf::Eq(t) if t.coeff(v).abs() == 1)) {
            return v;
        }
    }
    *vs.iter().min_by_key(|&&v| f.occurrences(v)).expect("nonempty")
}

/// Maps constraint-level variables to solver variable ids.
#[derive(Default)]
pub struct Translator {
    next: VarId,
    bools: BTreeSet<VarId>,
    names: Vec<Var>,
}

#[derive(Clone, Copy)]
enum Kind {
    Int,
    Bool,
}

fn kind_of(x: &Var) -> Result<Kind> {
    if x.sort().is_int() {
        Ok(Kind::Int)
    } else if x.sort().is_bool() {
        Ok(Kind::Bool)
    } else {
        Err(Error::UnsupportedTheory(format!(
            "variable `{x}` of sort {} is outside Bool + LIA",
            x.sort()
        )))
    }
}

impl Translator {
    pub fn new() -> Self {
        Translator::default()
    }

    fn alloc(&mut self, x: &Var) -> Result<VarId> {
        let id = self.next;
        self.next += 1;
        if let Kind::Bool = kind_of(x)? {
            self.bools.insert(id);
        }
        self.names.push(x.clone());
        Ok(id)
    }

    pub fn is_bool(&self, v: VarId) -> bool {
        self.bools.contains(&v)
    }

    pub fn var(&self, v: VarId) -> &Var {
        &self.names[v as usize]
    }

    /// Allocate ids for the given free variables.
    pub fn bind(&mut self, vs: impl IntoIterator<Item = Var>) -> Result<HashMap<Var, VarId>> {
        let mut env = HashMap::new();
        for x in vs {
            let id = self.alloc(&x)?;
            env.insert(x, id);
        }
        Ok(env)
    }

    fn split(&self, ids: &[VarId]) -> (Vec<VarId>, Vec<VarId>) {
        ids.iter().partition(|v| !self.is_bool(**v))
    }

    /// Translate, eliminating every inner quantifier.
    pub fn formula(&mut self, f: &Formula, env: &HashMap<Var, VarId>) -> Result<Qf> {
        Ok(match f {
            Formula::Atom(c) => self.bool_term(c.term(), env)?,
            Formula::Not(a) => self.formula(a, env)?.negate(),
            Formula::And(fs) => {
                let mut out = Vec::new();
                for g in fs {
                    out.push(self.formula(g, env)?);
                }
                and(out)
            }
            Formula::Or(fs) => {
                let mut out = Vec::new();
                for g in fs {
                    out.push(self.formula(g, env)?);
                }
                or(out)
            }
            Formula::Implies(a, b) => or([self.formula(a, env)?.negate(), self.formula(b, env)?]),
            Formula::Iff(a, b) => {
                let a = self.formula(a, env)?;
                let b = self.formula(b, env)?;
                or([and([a.clone(), b.clone()]), and([a.negate(), b.negate()])])
            }
            Formula::Exists(vs, a) => {
                let (ids, inner) = self.scoped(vs, env)?;
                let body = self.formula(a, &inner)?;
                let (ints, bools) = self.split(&ids);
                exists_many(&ints, &bools, &body)
            }
            Formula::Forall(vs, a) => {
                let (ids, inner) = self.scoped(vs, env)?;
                let body = self.formula(a, &inner)?.negate();
                let (ints, bools) = self.split(&ids);
                exists_many(&ints, &bools, &body).negate()
            }
        })
    }

    fn scoped(&mut self, vs: &[Var], env: &HashMap<Var, VarId>) -> Result<(Vec<VarId>, HashMap<Var, VarId>)> {
        let mut inner = env.clone();
        let mut ids = Vec::new();
        for x in vs {
            let id = self.alloc(x)?;
            inner.insert(x.clone(), id);
            ids.push(id);
        }
        Ok((ids, inner))
    }

    fn lookup(&self, x: &Var, env: &HashMap<Var, VarId>) -> Result<VarId> {
        env.get(x)
            .copied()
            .ok_or_else(|| Error::IllFormed(format!("unbound variable `{x}` in query")))
    }

    fn bool_term(&mut self, t: &Term, env: &HashMap<Var, VarId>) -> Result<Qf> {
        let unsupported = || Error::UnsupportedTheory(format!("`{t}` is outside Bool + LIA"));
        match t {
            Term::Val(Value::Bool(b)) => Ok(bool_qf(*b)),
            Term::Var(x) if x.sort().is_bool() => Ok(Qf::BVar(self.lookup(x, env)?, true)),
            Term::App(f, args) => {
                let a = args;
                match (&*f.name, a.len()) {
                    ("and", 2) => Ok(and([self.bool_term(&a[0], env)?, self.bool_term(&a[1], env)?])),
                    ("or", 2) => Ok(or([self.bool_term(&a[0], env)?, self.bool_term(&a[1], env)?])),
                    ("not", 1) => Ok(self.bool_term(&a[0], env)?.negate()),
                    ("=>", 2) => Ok(or([self.bool_term(&a[0], env)?.negate(), self.bool_term(&a[1], env)?])),
                    ("<=>", 2) => self.iff(&a[0], &a[1], env),
                    ("=", 2) if a[0].sort().is_bool() => self.iff(&a[0], &a[1], env),
                    ("=", 2) if a[0].sort().is_int() => {
                        Ok(eq(self.int_term(&a[0], env)?.sub(&self.int_term(&a[1], env)?)))
                    }
                    ("<" | "<=" | ">" | ">=", 2) => {
                        let l = self.int_term(&a[0], env)?;
                        let r = self.int_term(&a[1], env)?;
                        Ok(match &*f.name {
                            "<" => lt(l.sub(&r)),
                            "<=" => le(l.sub(&r)),
                            ">" => lt(r.sub(&l)),
                            _ => le(r.sub(&l)),
                        })
                    }
                    _ => Err(unsupported()),
                }
            }
            _ => Err(unsupported()),
        }
    }

    fn iff(&mut self, a: &Term, b: &Term, env: &HashMap<Var, VarId>) -> Result<Qf> {
        let a = self.bool_term(a, env)?;
        let b = self.bool_term(b, env)?;
        Ok(or([and([a.clone(), b.clone()]), and([a.negate(), b.negate()])]))
    }

    fn int_term(&mut self, t: &Term, env: &HashMap<Var, VarId>) -> Result<Lin> {
        let unsupported = || Error::UnsupportedTheory(format!("`{t}` is outside linear integer arithmetic"));
        match t {
            Term::Val(Value::Int(n)) => Ok(Lin::constant(*n as i128)),
            Term::Var(x) if x.sort().is_int() => Ok(Lin::var(self.lookup(x, env)?)),
            Term::App(f, a) => match (&*f.name, a.len()) {
                ("+", 2) => Ok(self.int_term(&a[0], env)?.add(&self.int_term(&a[1], env)?)),
                ("-", 2) => Ok(self.int_term(&a[0], env)?.sub(&self.int_term(&a[1], env)?)),
                ("-", 1) => Ok(self.int_term(&a[0], env)?.scale(-1)),
                ("*", 2) => {
                    let l = self.int_term(&a[0], env)?;
                    let r = self.int_term(&a[1], env)?;
                    if l.is_const() {
                        Ok(r.scale(l.konst))
                    } else if r.is_const() {
                        Ok(l.scale(r.konst))
                    } else {
                        Err(Error::UnsupportedTheory(format!("nonlinear term `{t}`")))
                    }
                }
                _ => Err(unsupported()),
            },
            _ => Err(unsupported()),
        }
    }
}

fn close(f: &Formula) -> (Translator, HashMap<Var, VarId>, Vec<VarId>) {
    let mut tr = Translator::new();
    let fv: Vec<Var> = f.free_vars().into_iter().collect();
    let env = tr.bind(fv.iter().cloned()).unwrap_or_default();
    let ids = fv.iter().filter_map(|x| env.get(x).copied()).collect();
    (tr, env, ids)
}

/// Validity with free variables universally quantified.
pub fn valid(f: &Formula) -> Result<bool> {
    for x in f.free_vars() {
        kind_of(&x)?;
    }
    let (mut tr, env, ids) = close(f);
    let q = tr.formula(f, &env)?.negate();
    let (ints, bools) = tr.split(&ids);
    match exists_many(&ints, &bools, &q) {
        Qf::True => Ok(false),
        Qf::False => Ok(true),
        other => Err(Error::Solver(format!("elimination left residue {other:?}"))),
    }
}

/// Satisfiability with free variables existentially quantified.
pub fn satisfiable(f: &Formula) -> Result<bool> {
    for x in f.free_vars() {
        kind_of(&x)?;
    }
    let (mut tr, env, ids) = close(f);
    let q = tr.formula(f, &env)?;
    let (ints, bools) = tr.split(&ids);
    match exists_many(&ints, &bools, &q) {
        Qf::True => Ok(true),
        Qf::False => Ok(false),
        other => Err(Error::Solver(format!("elimination left residue {other:?}"))),
    }
}

/// Outcome of searching for an integer solution of a one-variable formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Solution1 {
    Unsat,
    UnboundedBelow,
    Least(i128),
}

/// The least solution of `f`, whose only variable is `v`.
pub fn least_solution(f: &Qf, v: VarId) -> Solution1 {
    let mut period: i128 = 1;
    let mut marks: BTreeSet<i128> = BTreeSet::new();
    f.visit_atoms(&mut |q| match q {
        Qf::Lt(t) | Qf::Eq(t) => {
            let c = t.coeff(v);
            if c != 0 {
                marks.insert(Integer::div_floor(&-t.konst, &c));
            }
        }
        Qf::Dvd(d, _) | Qf::NDvd(d, _) => period = period.lcm(d),
        _ => {}
    });
    let holds = |x: i128| f.eval(&|_| x, &|_| false);
    let lowest = marks.first().copied().unwrap_or(0) - 1;
    // Below every boundary the truth value is periodic.
    if (1..=period).any(|k| holds(lowest - k)) {
        return Solution1::UnboundedBelow;
    }
    let mut cands: BTreeSet<i128> = BTreeSet::new();
    for &m in &marks {
        for d in -1..=period + 1 {
            cands.insert(m + d);
        }
    }
    if marks.is_empty() {
        cands.extend(0..=period);
    }
    match cands.into_iter().find(|&x| holds(x)) {
        Some(x) => Solution1::Least(x),
        None => Solution1::Unsat,
    }
}

/// The unique value of `x` over all valuations satisfying `ec`, if any.
pub fn determined_value(ec: &ExistentialConstraint, x: &Var) -> Result<Option<Value>> {
    let kind = kind_of(x)?;
    let others: Vec<Var> = ec.free_vars().into_iter().filter(|v| v != x).collect();
    let projected = Formula::exists(others, Formula::from(ec));
    let mut tr = Translator::new();
    let env = tr.bind([x.clone()])?;
    for v in projected.free_vars() {
        kind_of(&v)?;
    }
    let id = env[x];
    let q = tr.formula(&projected, &env)?;
    match kind {
        Kind::Bool => {
            let t = q.subst_bool(id, true);
            let f = q.subst_bool(id, false);
            Ok(match (t, f) {
                (Qf::True, Qf::False) => Some(Value::Bool(true)),
                (Qf::False, Qf::True) => Some(Value::Bool(false)),
                _ => None,
            })
        }
        Kind::Int => {
            let Solution1::Least(v0) = least_solution(&q, id) else {
                return Ok(None);
            };
            let other = and([q.clone(), or([lt(Lin::var(id).add_const(-v0)), lt(Lin::var(id).scale(-1).add_const(v0))])]);
            if exists_int(id, &other) != Qf::False {
                return Ok(None);
            }
            Ok(Some(Value::Int(i64::try_from(v0).map_err(|_| Error::Overflow)?)))
        }
    }
}

/// Quantifier elimination result over the formula's free variables.
#[derive(Clone, Debug)]
pub struct Eliminated {
    pub formula: Qf,
    pub vars: Vec<Var>,
}

impl Eliminated {
    /// Evaluate under a valuation of the free variables.
    pub(crate) fn eval(&self, env: &HashMap<Var, Val>) -> Result<bool> {
        let get = |v: VarId| env.get(&self.vars[v as usize]).copied();
        let missing = self.formula.vars().into_iter().find(|&v| get(v).is_none());
        if let Some(v) = missing {
            return Err(Error::IllFormed(format!("unassigned `{}`", self.vars[v as usize])));
        }
        Ok(self.formula.eval(
            &|v| get(v).and_then(|x| x.as_int().ok()).unwrap_or(0),
            &|v| get(v).and_then(|x| x.as_bool().ok()).unwrap_or(false),
        ))
    }

    pub fn eval_values(&self, env: &HashMap<Var, Value>) -> Result<bool> {
        self.eval(&env.iter().map(|(k, v)| (k.clone(), Val::from(*v))).collect())
    }
}

/// Eliminate all quantifiers from `f`.
pub fn eliminate(f: &Formula) -> Result<Eliminated> {
    let mut tr = Translator::new();
    let env = tr.bind(f.free_vars())?;
    let formula = tr.formula(f, &env)?;
    Ok(Eliminated {
        formula,
        vars: tr.names,
    })
}

struct QfDisplay<'a>(&'a Qf, &'a [Var]);

impl fmt::Display for Eliminated {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        QfDisplay(&self.formula, &self.vars).fmt(f)
    }
}

impl fmt::Display for QfDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.1;
        let lin = |t: &Lin| -> String {
            let mut parts: Vec<String> = t
                .coeffs
                .iter()
                .map(|&(x, c)| {
                    let n = names[x as usize].name();
                    if c == 1 {
                        n.to_string()
                    } else {
                        format!("(* {c} {n})")
                    }
                })
                .collect();
            if t.konst != 0 || parts.is_empty() {
                parts.push(t.konst.to_string());
            }
            if parts.len() == 1 {
                parts.pop().unwrap()
            } else {
                format!("(+ {})", parts.join(" "))
            }
        };
        match self.0 {
            Qf::True => f.write_str("true"),
            Qf::False => f.write_str("false"),
            Qf::Lt(t) => write!(f, "(< {} 0)", lin(t)),
            Qf::Eq(t) => write!(f, "(= {} 0)", lin(t)),
            Qf::Dvd(d, t) => write!(f, "(divides {d} {})", lin(t)),
            Qf::NDvd(d, t) => write!(f, "(not (divides {d} {}))", lin(t)),
            Qf::BVar(x, true) => f.write_str(names[*x as usize].name()),
            Qf::BVar(x, false) => write!(f, "(not {})", names[*x as usize].name()),
            Qf::And(xs) | Qf::Or(xs) => {
                let op = if matches!(self.0, Qf::And(_)) { "and" } else { "or" };
                write!(f, "({op}")?;
                for q in xs {
                    write!(f, " {}", QfDisplay(q, names))?;
                }
                f.write_str(")")
            }
        }
    }
}
