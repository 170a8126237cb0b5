//! Deferred equivalence against an interleaved ∼·→ baseline.

use serde::Serialize;

use crate::constraints::Solver;
use crate::cterms::{pg, ECTerm};
use crate::equivalence::equiv_general;
use crate::error::Result;
use crate::rewriting::reachable_deferred;
use crate::rules::CRule;
use crate::terms::NameGen;

use super::{successors, Gen, GenConfig};

/// Start and goal related by up to `iterations` rounds of (∼ then →),
/// followed by a final ∼. Returns the number of steps actually taken.
pub fn walk(g: &mut Gen, rules: &[CRule], iterations: usize, solver: &Solver) -> Result<(ECTerm, ECTerm, usize)> {
    let mut last = None;
    for _ in 0..5 {
        let start = if rules.is_empty() {
            g.ecterm(solver)?
        } else {
            g.redex_term(rules, solver)?
        };
        let mut cur = start.clone();
        let mut taken = 0;
        for _ in 0..iterations {
            cur = g.equiv_transform(&cur, solver)?;
            let next = successors(&cur, rules, solver)?;
            if next.is_empty() {
                break;
            }
            cur = next[g.below(next.len())].clone();
            taken += 1;
        }
        let goal = g.equiv_transform(&cur, solver)?;
        if taken > 0 {
            return Ok((start, goal, taken));
        }
        last = Some((start, goal, taken));
    }
    Ok(last.expect("at least one attempt"))
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ModeStats {
    pub found: bool,
    /// Nodes compared with the goal.
    pub endpoints: usize,
    /// Equivalence checks against the goal.
    pub goal_checks: usize,
    /// Equivalence checks between steps (validating a ∼ transformation).
    pub intermediate_checks: usize,
    pub step_solver_calls: u64,
    pub check_solver_calls: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DeferCase {
    pub stream: u64,
    pub walk_steps: usize,
    pub baseline: ModeStats,
    pub deferred: ModeStats,
}

#[derive(Clone, Debug, Serialize)]
pub struct DeferExperiment {
    pub max_depth: usize,
    pub cases: Vec<DeferCase>,
    /// Generated systems skipped because the baseline missed the goal.
    pub skipped: usize,
}

impl DeferExperiment {
    /// Every case found by the deferred search with at most one check per
    /// endpoint and no intermediate checks.
    pub fn holds(&self) -> bool {
        self.cases.iter().all(|c| {
            c.deferred.found && c.deferred.goal_checks <= c.deferred.endpoints && c.deferred.intermediate_checks == 0
        })
    }

    pub fn summary(&self) -> String {
        let sum = |f: &dyn Fn(&DeferCase) -> u64| self.cases.iter().map(f).sum::<u64>();
        format!(
            "{} systems (depth ≤ {}, {} skipped): deferred found {}/{}; baseline {} goal + {} intermediate checks, {} step + {} check calls; deferred {} goal + 0 intermediate checks over {} endpoints, {} step + {} check calls",
            self.cases.len(),
            self.max_depth,
            self.skipped,
            self.cases.iter().filter(|c| c.deferred.found).count(),
            self.cases.len(),
            sum(&|c| c.baseline.goal_checks as u64),
            sum(&|c| c.baseline.intermediate_checks as u64),
            sum(&|c| c.baseline.step_solver_calls),
            sum(&|c| c.baseline.check_solver_calls),
            sum(&|c| c.deferred.goal_checks as u64),
            sum(&|c| c.deferred.endpoints as u64),
            sum(&|c| c.deferred.step_solver_calls),
            sum(&|c| c.deferred.check_solver_calls),
        )
    }
}

const BASELINE_NODES: usize = 2000;

/// Breadth-first ∼·→ search: each node is compared with the goal, and its
/// PG form, once validated by an equivalence query, is rewritten as well.
pub fn interleaved(start: &ECTerm, goal: &ECTerm, rules: &[CRule], max_depth: usize) -> Result<ModeStats> {
    let steps = Solver::builtin();
    let checks = Solver::builtin();
    let mut stats = ModeStats::default();
    let mut seen: Vec<ECTerm> = vec![start.clone()];
    let mut frontier = vec![start.clone()];
    'search: for depth in 0..=max_depth {
        let mut next = Vec::new();
        for n in &frontier {
            stats.endpoints += 1;
            stats.goal_checks += 1;
            if equiv_general(n, goal, &checks)?.equal {
                stats.found = true;
                break 'search;
            }
            if depth == max_depth || seen.len() > BASELINE_NODES {
                continue;
            }
            let mut variants = vec![n.clone()];
            let p = pg(n, &mut NameGen::new());
            if p != *n {
                stats.intermediate_checks += 1;
                if equiv_general(n, &p, &checks)?.equal {
                    variants.push(p);
                }
            }
            for v in &variants {
                for t in successors(v, rules, &steps)? {
                    if !seen.contains(&t) {
                        seen.push(t.clone());
                        next.push(t);
                    }
                }
            }
        }
        frontier = next;
    }
    stats.step_solver_calls = steps.calls();
    stats.check_solver_calls = checks.calls();
    Ok(stats)
}

/// Generate lvf systems until `systems` cases are found by the baseline
/// within `max_depth`, and run the deferred search on each.
pub fn experiment(cfg: &GenConfig, systems: usize, max_depth: usize) -> Result<DeferExperiment> {
    let gen_solver = Solver::builtin();
    let mut out = DeferExperiment {
        max_depth,
        cases: Vec::new(),
        skipped: 0,
    };
    let mut stream = 0u64;
    while out.cases.len() < systems && stream < 20 * systems as u64 {
        stream += 1;
        let mut g = Gen::new(cfg, 7_000_000 + stream);
        let rules = g.rules(true);
        if rules.is_empty() {
            continue;
        }
        let iterations = 1 + g.below(max_depth);
        let (start, goal, walk_steps) = walk(&mut g, &rules, iterations, &gen_solver)?;
        let baseline = interleaved(&start, &goal, &rules, max_depth)?;
        if !baseline.found {
            out.skipped += 1;
            continue;
        }
        let solver = Solver::builtin();
        let r = reachable_deferred(&start, &goal, &rules, max_depth, 5000, &solver)?;
        let deferred = ModeStats {
            found: r.derivation.is_some(),
            endpoints: r.endpoints_explored,
            goal_checks: r.equivalence_checks,
            intermediate_checks: 0,
            step_solver_calls: r.step_solver_calls,
            check_solver_calls: r.check_solver_calls,
        };
        out.cases.push(DeferCase {
            stream,
            walk_steps,
            baseline,
            deferred,
        });
    }
    Ok(out)
}
