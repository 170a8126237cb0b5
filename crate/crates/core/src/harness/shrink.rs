//! Greedy shrinking of failing instances.

use crate::constraints::{Constraint, ExistentialConstraint};
use crate::cterms::{ECTerm, NQTerm};

use super::checks::{check, Ctx, Instance, Verdict};
use super::TheoremId;

const MAX_STEPS: usize = 200;

fn without<T: Clone>(items: &[T], i: usize) -> Vec<T> {
    let mut v = items.to_vec();
    v.remove(i);
    v
}

fn drop_conjuncts(c: &Constraint) -> Vec<Constraint> {
    let parts = c.conjuncts();
    if parts.len() < 2 {
        return if c.is_true() { vec![] } else { vec![Constraint::tt()] };
    }
    (0..parts.len())
        .map(|i| Constraint::conj(without(&parts, i)).expect("nonempty"))
        .collect()
}

/// Smaller variants of `inst`, one edit each.
fn candidates(inst: &Instance) -> Vec<Instance> {
    let mut out = Vec::new();
    for i in 0..inst.rules.len() {
        out.push(Instance {
            rules: without(&inst.rules, i),
            ..inst.clone()
        });
    }
    for (j, t) in inst.terms.iter().enumerate() {
        for body in drop_conjuncts(t.constraint().body()) {
            let ct = ECTerm::from_parts(
                t.logical().clone(),
                t.term().clone(),
                ExistentialConstraint::new(t.constraint().bound().to_vec(), body),
            );
            if ct.is_well_formed() {
                let mut terms = inst.terms.clone();
                terms[j] = ct;
                out.push(Instance { terms, ..inst.clone() });
            }
        }
    }
    if let Some(n) = &inst.nq {
        for phi in drop_conjuncts(n.constraint()) {
            let mut keep = n.term().vars();
            keep.extend(phi.vars());
            let logical = n.logical().iter().filter(|x| keep.contains(*x)).cloned().collect();
            let m = NQTerm::from_parts(logical, n.term().clone(), phi);
            if m.is_well_formed() {
                out.push(Instance {
                    nq: Some(m),
                    ..inst.clone()
                });
            }
        }
    }
    if let Some(e) = &inst.extra {
        for pi in drop_conjuncts(e) {
            out.push(Instance {
                extra: Some(pi),
                ..inst.clone()
            });
        }
    }
    if let Some(m) = &inst.map {
        for x in m.domain() {
            let smaller = m.iter().filter(|(y, _)| **y != x).map(|(y, t)| (y.clone(), t.clone())).collect();
            out.push(Instance {
                map: Some(smaller),
                ..inst.clone()
            });
        }
    }
    out
}

/// Apply edits while the property still fails; returns the smallest
/// instance, its failure message and the number of accepted edits.
pub(super) fn shrink(id: TheoremId, inst: Instance, message: String, ctx: &Ctx) -> (Instance, String, usize) {
    let mut cur = inst;
    let mut msg = message;
    let mut steps = 0;
    'outer: while steps < MAX_STEPS {
        for cand in candidates(&cur) {
            if let Ok(Verdict::Fail(m)) = check(id, &cand, ctx) {
                cur = cand;
                msg = m;
                steps += 1;
                continue 'outer;
            }
        }
        break;
    }
    (cur, msg, steps)
}
