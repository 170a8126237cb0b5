//! Sorted terms, positions, substitutions and linear matching.

mod names;
mod position;
mod signature;
mod subst;
mod term;

pub use names::{base_name, NameGen};
pub use position::Position;
pub use signature::{builtins, Signature};
pub use subst::{match_general, match_into, match_linear, Subst};
pub use term::{FunSym, Sort, SortKind, Term, Value, Var};

use std::collections::BTreeSet;

/// `Var(t₁, …, tₙ)`
pub fn vars_of<'a>(ts: impl IntoIterator<Item = &'a Term>) -> BTreeSet<Var> {
    let mut out = BTreeSet::new();
    for t in ts {
        t.collect_vars(&mut out);
    }
    out
}
