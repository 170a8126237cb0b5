//! Differential test of the decision procedure: Cooper elimination against
//! exhaustive enumeration (and optionally an external SMT-LIB solver).

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::constraints::{lia, Backend, Constraint, FiniteDomain, Formula, Solver};
use crate::error::Result;
use crate::terms::{builtins, Term, Var};

/// Quantifiers range over `-BOX..=BOX`, so the sentence has the same truth
/// value over ℤ and over any domain containing the box.
pub const BOX: i64 = 3;

fn atom(op: &std::sync::Arc<crate::terms::FunSym>, a: Term, b: Term) -> Formula {
    Formula::Atom(Constraint::new(Term::app(op, vec![a, b])).expect("bool atom"))
}

fn in_box(x: &Var) -> Formula {
    let v = Term::var(x);
    Formula::And(vec![
        atom(&builtins::le(), Term::int(-BOX), v.clone()),
        atom(&builtins::le(), v, Term::int(BOX)),
    ])
}

struct SentenceGen {
    rng: ChaCha8Rng,
}

impl SentenceGen {
    fn coeff(&mut self) -> i64 {
        self.rng.gen_range(-3..=3)
    }

    fn linear(&mut self, vars: &[Var]) -> Term {
        let mut t: Option<Term> = None;
        for x in vars {
            if self.rng.gen_bool(0.6) {
                let c = self.coeff();
                if c == 0 {
                    continue;
                }
                let m = if c == 1 {
                    Term::var(x)
                } else {
                    Term::app(&builtins::mul(), vec![Term::int(c), Term::var(x)])
                };
                t = Some(match t {
                    None => m,
                    Some(s) => Term::app(&builtins::add(), vec![s, m]),
                });
            }
        }
        t.unwrap_or_else(|| Term::var(vars.choose(&mut self.rng).unwrap()))
    }

    fn atom(&mut self, vars: &[Var]) -> Formula {
        let l = self.linear(vars);
        let k = Term::int(self.coeff());
        match self.rng.gen_range(0..5) {
            0 => Formula::Atom(Constraint::eq(&l, &k)),
            1 => atom(&builtins::lt(), l, k),
            2 => atom(&builtins::le(), l, k),
            3 => atom(&builtins::gt(), l, k),
            _ => atom(&builtins::ge(), l, k),
        }
    }

    fn matrix(&mut self, vars: &[Var], depth: usize) -> Formula {
        if depth == 0 || self.rng.gen_bool(0.35) {
            return self.atom(vars);
        }
        match self.rng.gen_range(0..4) {
            0 => Formula::not(self.matrix(vars, depth - 1)),
            1 => Formula::Or(vec![self.matrix(vars, depth - 1), self.matrix(vars, depth - 1)]),
            2 => Formula::implies(self.matrix(vars, depth - 1), self.matrix(vars, depth - 1)),
            _ => Formula::And(vec![self.matrix(vars, depth - 1), self.matrix(vars, depth - 1)]),
        }
    }

    /// A closed sentence with 1 to 3 variables and at most two quantifier
    /// alternations.
    fn sentence(&mut self) -> Formula {
        let n = self.rng.gen_range(1..=3);
        let vars: Vec<Var> = (1..=n).map(|i| Var::int(&format!("x{i}"))).collect();
        let mut kinds = Vec::with_capacity(n);
        let mut alternations = 0;
        let mut cur = self.rng.gen_bool(0.5);
        for i in 0..n {
            if i > 0 && alternations < 2 && self.rng.gen_bool(0.5) {
                cur = !cur;
                alternations += 1;
            }
            kinds.push(cur);
        }
        let mut f = self.matrix(&vars, 3);
        for (x, exists) in vars.iter().zip(kinds).rev() {
            f = if exists {
                Formula::exists(vec![x.clone()], Formula::And(vec![in_box(x), f]))
            } else {
                Formula::forall(vec![x.clone()], Formula::implies(in_box(x), f))
            };
        }
        f
    }
}

/// `n` seeded sentences.
pub fn sentences(seed: u64, n: usize) -> Vec<Formula> {
    let mut g = SentenceGen {
        rng: ChaCha8Rng::seed_from_u64(seed ^ 0x5EED_D1FF),
    };
    (0..n).map(|_| g.sentence()).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct DifferentialReport {
    pub sentences: usize,
    pub valid: usize,
    /// Sentences where Cooper and enumeration differ.
    pub disagreements: Vec<String>,
    /// Agreement count with the external solver, when one was configured.
    pub smt_agreements: Option<usize>,
    pub smt_disagreements: Vec<String>,
}

impl DifferentialReport {
    pub fn holds(&self) -> bool {
        self.disagreements.is_empty() && self.smt_disagreements.is_empty()
    }
}

/// Compare both Cooper paths (validity and evaluation of the eliminated
/// sentence) with enumeration over the box; with `smt`, also compare with
/// that SMT-LIB command.
pub fn run(seed: u64, n: usize, smt: Option<&str>) -> Result<DifferentialReport> {
    let finite = FiniteDomain::new(-BOX, BOX);
    let external = smt.map(|cmd| Solver::new(Backend::SmtLib(cmd.to_string())));
    let mut report = DifferentialReport {
        sentences: n,
        valid: 0,
        disagreements: Vec::new(),
        smt_agreements: external.as_ref().map(|_| 0),
        smt_disagreements: Vec::new(),
    };
    for f in sentences(seed, n) {
        let cooper = lia::valid(&f)?;
        let eliminated = lia::eliminate(&f)?.eval_values(&Default::default())?;
        let enumerated = finite.valid(&f)?;
        if cooper {
            report.valid += 1;
        }
        if cooper != enumerated || eliminated != enumerated {
            report
                .disagreements
                .push(format!("{f}: cooper {cooper}, eliminated {eliminated}, enumeration {enumerated}"));
        }
        if let Some(s) = &external {
            let answer = s.valid(&f)?;
            if answer == cooper {
                *report.smt_agreements.as_mut().unwrap() += 1;
            } else {
                report.smt_disagreements.push(format!("{f}: cooper {cooper}, smt {answer}"));
            }
        }
    }
    Ok(report)
}

/// Extra width of the domain used to detect domain-sensitive pairs.
pub const WIDEN: i64 = 3;

#[derive(Clone, Debug, Serialize)]
pub struct PairReport {
    /// Pairs compared between `equiv_general` and the oracle.
    pub compared: usize,
    /// Pairs equivalent by construction.
    pub constructed: usize,
    pub equivalent: usize,
    /// Near misses whose oracle verdict changes when the domain is widened
    /// by [`WIDEN`]; the bounded domain cannot decide them, so they are
    /// listed but not compared.
    pub domain_sensitive: Vec<String>,
    /// Pairs where `equiv_general` and the oracle differ, or a constructed
    /// pair is rejected.
    pub disagreements: Vec<String>,
    pub solver_calls: u64,
    pub oracle_calls: u64,
}

impl PairReport {
    pub fn holds(&self, at_least: usize) -> bool {
        self.disagreements.is_empty() && self.compared >= at_least
    }
}

type Pair = (crate::cterms::ECTerm, crate::cterms::ECTerm, Option<bool>);

/// `equiv_general` against the finite-model oracle until `n` pairs have been
/// compared: constructed equivalent pairs, perturbed near misses and the
/// fixed corpus.
pub fn equivalence_pairs(cfg: &super::GenConfig, n: usize) -> Result<PairReport> {
    use crate::equivalence::{equiv_general, equiv_oracle};
    use crate::syntax::print_cterm;

    let domain = FiniteDomain::new(cfg.domain.0, cfg.domain.1);
    let wide = FiniteDomain::new(cfg.domain.0 - WIDEN, cfg.domain.1 + WIDEN);
    let solver = Solver::builtin();
    let oracle = Solver::builtin();
    let gen_solver = Solver::builtin();
    let mut report = PairReport {
        compared: 0,
        constructed: 0,
        equivalent: 0,
        domain_sensitive: Vec::new(),
        disagreements: Vec::new(),
        solver_calls: 0,
        oracle_calls: 0,
    };
    let mut pending: Vec<Pair> = super::fixed_pairs().into_iter().map(|(a, b, e)| (a, b, Some(e))).collect();
    let mut stream = 0u64;
    while report.compared < n && stream < 4 * n as u64 {
        if pending.is_empty() {
            let mut g = super::Gen::new(cfg, 9_000_000 + stream);
            stream += 1;
            let rules = g.rules(false);
            let steps = 1 + g.below(3);
            let (a, b) = super::equiv_pair(&mut g, &rules, &gen_solver, steps)?;
            let mut pair = (a.clone(), b.clone(), Some(true));
            if g.chance(0.5) {
                let c = g.perturb(&b);
                if c.is_well_formed() && gen_solver.is_satisfiable(c.constraint())? {
                    pair = (a, c, None);
                }
            }
            pending.push(pair);
        }
        let (a, b, expected) = pending.pop().unwrap();
        let finite = equiv_oracle(&a, &b, &domain, &oracle)?;
        let show = || format!("{} vs {}", print_cterm(&a, None), print_cterm(&b, None));
        if finite && expected != Some(true) && !equiv_oracle(&a, &b, &wide, &oracle)? {
            report.domain_sensitive.push(show());
            continue;
        }
        report.compared += 1;
        let general = equiv_general(&a, &b, &solver)?.equal;
        if general {
            report.equivalent += 1;
        }
        if expected == Some(true) {
            report.constructed += 1;
        }
        if general != finite || expected.is_some_and(|e| e != general) {
            report.disagreements.push(format!(
                "{}: general {general}, oracle {finite}, expected {expected:?}",
                show()
            ));
        }
    }
    report.solver_calls = solver.calls();
    report.oracle_calls = oracle.calls();
    Ok(report)
}
