//! Acceptance runner: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Set `LCTRS_SMT` to an SMT-LIB command to add the external solver
//! to the differential.

mod common;

use std::time::{Duration, Instant};

use lctrs_core::harness::{defer, differential, run_suite, GenConfig, TheoremId};
use lctrs_core::rewriting::Mutation;

const GOLDEN_LIMIT: Duration = Duration::from_secs(5);
const SUITE_LIMIT: Duration = Duration::from_secs(600);
const SUITE_CALLS: u64 = 100_000;
const PAIRS: usize = 500;
const PAIRS_LIMIT: Duration = Duration::from_secs(180);
const SENTENCES: usize = 500;
const MUTATION_COUNT: usize = 200;
const DEFER_SYSTEMS: usize = 50;
const DEFER_DEPTH: usize = 4;

struct Outcome {
    pass: bool,
    detail: String,
}

fn goldens() -> Outcome {
    let t = Instant::now();
    let failed: Vec<String> = common::goldens::ALL
        .iter()
        .filter_map(|(name, check)| check().err().map(|e| format!("{name}: {e}")))
        .collect();
    let elapsed = t.elapsed();
    Outcome {
        pass: failed.is_empty() && elapsed < GOLDEN_LIMIT,
        detail: if failed.is_empty() {
            format!("{} examples in {:.2?}", common::goldens::ALL.len(), elapsed)
        } else {
            failed.join("; ")
        },
    }
}

fn suite() -> Outcome {
    let t = Instant::now();
    match run_suite(&GenConfig::default()) {
        Ok(r) => {
            let elapsed = t.elapsed();
            let calls = r.total_calls();
            let failing: Vec<&str> = r.reports.iter().filter(|t| !t.passed()).map(|t| t.id.name()).collect();
            Outcome {
                pass: r.success() && calls < SUITE_CALLS && elapsed < SUITE_LIMIT,
                detail: format!(
                    "{} theorems, {} failures {:?}, {} solver calls, {:.2?}",
                    r.reports.len(),
                    r.failures(),
                    failing,
                    calls,
                    elapsed
                ),
            }
        }
        Err(e) => Outcome {
            pass: false,
            detail: e.to_string(),
        },
    }
}

fn pairs() -> Outcome {
    let t = Instant::now();
    match differential::equivalence_pairs(&GenConfig::default(), PAIRS) {
        Ok(r) => {
            let elapsed = t.elapsed();
            for d in &r.disagreements {
                eprintln!("  disagreement: {d}");
            }
            Outcome {
                pass: r.holds(PAIRS) && elapsed < PAIRS_LIMIT,
                detail: format!(
                    "{} compared ({} constructed, {} equivalent), {} domain-sensitive skipped, {} disagreements, {:.2?}",
                    r.compared,
                    r.constructed,
                    r.equivalent,
                    r.domain_sensitive.len(),
                    r.disagreements.len(),
                    elapsed
                ),
            }
        }
        Err(e) => Outcome {
            pass: false,
            detail: e.to_string(),
        },
    }
}

fn solver_differential() -> Outcome {
    let smt = std::env::var("LCTRS_SMT").ok();
    match differential::run(42, SENTENCES, smt.as_deref()) {
        Ok(r) => {
            for d in r.disagreements.iter().chain(&r.smt_disagreements) {
                eprintln!("  disagreement: {d}");
            }
            let external = match r.smt_agreements {
                Some(n) => format!("{n} agree with external solver"),
                None => "external solver skipped".to_string(),
            };
            Outcome {
                pass: r.holds() && r.sentences == SENTENCES,
                detail: format!(
                    "{} sentences, {} valid, {} disagreements, {}",
                    r.sentences,
                    r.valid,
                    r.disagreements.len(),
                    external
                ),
            }
        }
        Err(e) => Outcome {
            pass: false,
            detail: e.to_string(),
        },
    }
}

fn mutations() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for m in Mutation::ALL {
        let cfg = GenConfig {
            count: MUTATION_COUNT,
            mutation: Some(m),
            theorems: TheoremId::ALL.to_vec(),
            ..GenConfig::default()
        };
        match run_suite(&cfg) {
            Ok(r) => {
                let caught: Vec<&str> = r.reports.iter().filter(|t| !t.failures.is_empty()).map(|t| t.id.name()).collect();
                pass &= !caught.is_empty();
                parts.push(format!("{} caught by {}", m.name(), if caught.is_empty() { "none".to_string() } else { caught.join(",") }));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("{}: {e}", m.name()));
            }
        }
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn deferred() -> Outcome {
    match defer::experiment(&GenConfig::default(), DEFER_SYSTEMS, DEFER_DEPTH) {
        Ok(x) => Outcome {
            pass: x.cases.len() == DEFER_SYSTEMS && x.holds(),
            detail: x.summary(),
        },
        Err(e) => Outcome {
            pass: false,
            detail: e.to_string(),
        },
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 6] = [
        ("golden examples", goldens),
        ("theorem suite", suite),
        ("equivalence vs oracle", pairs),
        ("solver differential", solver_differential),
        ("mutation controls", mutations),
        ("deferred equivalence", deferred),
    ];
    let mut ok = true;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        ok &= o.pass;
        println!("{} criterion {}: {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    if !ok {
        std::process::exit(1);
    }
}
