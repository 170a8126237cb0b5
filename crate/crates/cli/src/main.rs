use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value as Json};

use lctrs_core::constraints::{parse_range, Backend, FiniteDomain, Solver};
use lctrs_core::cterms::{ext, pg, rmv, ECTerm};
use lctrs_core::equivalence::{equiv_general, subsumption_counterexample};
use lctrs_core::harness::{run_suite, GenConfig, TheoremId};
use lctrs_core::rewriting::{derive, describe_step, reachable_deferred, DeriveOptions, Strategy};
use lctrs_core::rules::lvf;
use lctrs_core::syntax::{parse_source, print_cterm, print_nqterm, print_rule, SourceFile};
use lctrs_core::terms::NameGen;
use lctrs_core::{Error, Result};

/// Most-general constrained rewriting on existentially constrained terms.
#[derive(Parser)]
#[command(name = "lctrs", version)]
struct Cli {
    /// builtin | smtlib:<command> | finite:<lo>:<hi> (overrides the file's model)
    #[arg(long, global = true, env = "LCTRS_SOLVER")]
    solver: Option<String>,
    /// Emit JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Maximum number of solver queries.
    #[arg(long, global = true)]
    budget: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a file and report ill-formed rules and terms.
    Check { file: PathBuf },
    /// Enumerate derivations from a term.
    Rewrite {
        file: PathBuf,
        /// Label of a cterm in the file, or an inline `(cterm ...)`.
        term: String,
        #[arg(long, default_value_t = 1)]
        depth: usize,
        #[arg(long, default_value = "bfs")]
        strategy: String,
    },
    /// Search for a derivation ending in a term equivalent to the goal.
    Derive {
        file: PathBuf,
        start: String,
        #[arg(long)]
        goal: String,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        /// Only compare endpoints with the goal; rules are replaced by their
        /// left-value-free forms.
        #[arg(long)]
        defer: bool,
    },
    /// Decide equivalence of two terms.
    Equiv { file: PathBuf, a: String, b: String },
    /// Decide a ⊑ b on a bounded domain.
    Subsume {
        file: PathBuf,
        a: String,
        b: String,
        #[arg(long, default_value = "-2:3", allow_hyphen_values = true)]
        finite: String,
    },
    /// Pattern-general form of a term.
    Pg { file: PathBuf, term: String },
    /// Left-value-free form of a rule (all rules without a label).
    Lvf { file: PathBuf, rule: Option<String> },
    /// Existential extension of a non-quantified term.
    Ext { file: PathBuf, term: String },
    /// Existential removal.
    Rmv { file: PathBuf, term: String },
    /// Run the property suite.
    Props(PropsArgs),
}

#[derive(Args)]
struct PropsArgs {
    /// Comma-separated ids, `all` or `BULLET-*`.
    #[arg(long, default_value = "all")]
    theorems: String,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    count: usize,
    /// drop-cond3 | skip-freshening | y-without-exvar
    #[arg(long)]
    mutation: Option<String>,
    #[arg(long, default_value_t = 2)]
    max_depth: usize,
    #[arg(long, default_value_t = 3)]
    max_rules: usize,
    /// Also generate Bool-sorted arguments.
    #[arg(long)]
    bools: bool,
    /// Oracle domain.
    #[arg(long, default_value = "-2:3", allow_hyphen_values = true)]
    domain: String,
    #[arg(long)]
    no_shrink: bool,
}

/// Result of a command: output text or JSON, and whether the verdict was positive.
struct Outcome {
    text: String,
    json: Json,
    positive: bool,
}

impl Outcome {
    fn ok(text: String, json: Json) -> Self {
        Outcome {
            text,
            json,
            positive: true,
        }
    }
}

struct Env {
    solver_flag: Option<String>,
    budget: Option<u64>,
}

impl Env {
    fn solver(&self, file: Option<&SourceFile>) -> Result<Solver> {
        let backend = match (&self.solver_flag, file.and_then(|f| f.model.clone())) {
            (Some(s), _) => s.parse()?,
            (None, Some(m)) => m,
            (None, None) => Backend::Builtin,
        };
        let s = Solver::new(backend);
        Ok(match self.budget {
            Some(b) => s.with_budget(b),
            None => s,
        })
    }
}

fn load(path: &Path) -> Result<SourceFile> {
    let src = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        line: 0,
        col: 0,
        msg: format!("{}: {e}", path.display()),
    })?;
    parse_source(&src)
}

fn ecterm(file: &SourceFile, name: &str) -> Result<ECTerm> {
    file.resolve_cterm(name)?.ecterm()
}

fn domain(s: &str) -> Result<FiniteDomain> {
    let (lo, hi) = parse_range(s).ok_or_else(|| Error::IllFormed(format!("bad range `{s}`; expected lo:hi")))?;
    Ok(FiniteDomain::new(lo, hi))
}

fn check(file: &SourceFile) -> Outcome {
    let mut text = String::new();
    let mut items = Vec::new();
    let mut ok = true;
    for (i, r) in file.rules.iter().enumerate() {
        let name = r.label.clone().unwrap_or_else(|| format!("rule #{}", i + 1));
        let diags = r.diagnostics();
        ok &= diags.is_empty();
        text += &format!("{name}: {}\n", if diags.is_empty() { "ok".into() } else { diags.join("; ") });
        items.push(json!({"kind": "rule", "name": name, "diagnostics": diags}));
    }
    for (i, c) in file.cterms.iter().enumerate() {
        let name = c.label.clone().unwrap_or_else(|| format!("cterm #{}", i + 1));
        let diags = match c.ecterm() {
            Ok(t) => t.diagnostics(),
            Err(e) => vec![e.to_string()],
        };
        ok &= diags.is_empty();
        text += &format!("{name}: {}\n", if diags.is_empty() { "ok".into() } else { diags.join("; ") });
        items.push(json!({"kind": "cterm", "name": name, "diagnostics": diags}));
    }
    Outcome {
        text,
        json: json!({"well_formed": ok, "items": items}),
        positive: ok,
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    let env = Env {
        solver_flag: cli.solver,
        budget: cli.budget,
    };
    match cli.cmd {
        Cmd::Check { file } => Ok(check(&load(&file)?)),
        Cmd::Rewrite {
            file,
            term,
            depth,
            strategy,
        } => {
            let f = load(&file)?;
            let solver = env.solver(Some(&f))?;
            let start = ecterm(&f, &term)?;
            let opts = DeriveOptions {
                max_depth: depth,
                strategy: strategy.parse::<Strategy>()?,
                ..DeriveOptions::default()
            };
            let res = derive(&start, &f.rules, opts, &solver)?;
            let mut text = String::new();
            for (i, d) in res.derivations.iter().filter(|d| !d.steps.is_empty()).enumerate() {
                text += &format!("derivation {}:\n", i + 1);
                for st in &d.steps {
                    text += &format!("  {}\n", describe_step(st));
                }
                text += &format!("  end: {}\n", print_cterm(d.end(), None));
            }
            if res.truncated {
                text += "(truncated)\n";
            }
            let json = json!({
                "derivations": res.derivations.iter().map(|d| d.to_json()).collect::<Vec<_>>(),
                "truncated": res.truncated,
                "solver_calls": solver.calls(),
            });
            Ok(Outcome::ok(text, json))
        }
        Cmd::Derive {
            file,
            start,
            goal,
            depth,
            defer,
        } => {
            let f = load(&file)?;
            let solver = env.solver(Some(&f))?;
            let start = ecterm(&f, &start)?;
            let goal = ecterm(&f, &goal)?;
            let (found, extra) = if defer {
                let mut names = NameGen::new();
                let rules = f.rules.iter().map(|r| lvf(r, &mut names)).collect::<Result<Vec<_>>>()?;
                let r = reachable_deferred(&start, &goal, &rules, depth, 10_000, &solver)?;
                let extra = json!({
                    "endpoints_explored": r.endpoints_explored,
                    "equivalence_checks": r.equivalence_checks,
                    "step_solver_calls": r.step_solver_calls,
                    "check_solver_calls": r.check_solver_calls,
                    "truncated": r.truncated,
                });
                (r.derivation, extra)
            } else {
                let opts = DeriveOptions {
                    max_depth: depth,
                    strategy: Strategy::Bfs,
                    ..DeriveOptions::default()
                };
                let res = derive(&start, &f.rules, opts, &solver)?;
                let mut hit = None;
                for mut d in res.derivations {
                    let v = equiv_general(d.end(), &goal, &solver)?;
                    if v.equal {
                        d.final_equiv = Some(v);
                        hit = Some(d);
                        break;
                    }
                }
                (hit, json!({"truncated": res.truncated}))
            };
            let text = match &found {
                Some(d) => {
                    let mut t = String::from("reachable\n");
                    for st in &d.steps {
                        t += &format!("  {}\n", describe_step(st));
                    }
                    t + &format!("  ∼ {}\n", print_cterm(&goal, None))
                }
                None => "not reachable within the depth bound\n".to_string(),
            };
            Ok(Outcome {
                text,
                json: json!({
                    "reachable": found.is_some(),
                    "derivation": found.as_ref().map(|d| d.to_json()),
                    "search": extra,
                    "solver_calls": solver.calls(),
                }),
                positive: found.is_some(),
            })
        }
        Cmd::Equiv { file, a, b } => {
            let f = load(&file)?;
            let solver = env.solver(Some(&f))?;
            let v = equiv_general(&ecterm(&f, &a)?, &ecterm(&f, &b)?, &solver)?;
            let text = if v.equal {
                "equivalent\n".to_string()
            } else {
                format!("not equivalent: {}\n", v.reason.clone().unwrap_or_default())
            };
            Ok(Outcome {
                text,
                json: json!({
                    "equivalent": v.equal,
                    "reason": v.reason,
                    "witness": v.witness.map(|w| w.to_string()),
                }),
                positive: v.equal,
            })
        }
        Cmd::Subsume { file, a, b, finite } => {
            let f = load(&file)?;
            let solver = env.solver(Some(&f))?;
            let dom = domain(&finite)?;
            let cex = subsumption_counterexample(&ecterm(&f, &a)?, &ecterm(&f, &b)?, &dom, &solver)?;
            let text = match &cex {
                None => format!("subsumed on {}..{}\n", dom.lo, dom.hi),
                Some(s) => format!("not subsumed: instance {s} of the first term is not an instance of the second\n"),
            };
            Ok(Outcome {
                text,
                json: json!({"subsumed": cex.is_none(), "counterexample": cex.as_ref().map(|s| s.to_string())}),
                positive: cex.is_none(),
            })
        }
        Cmd::Pg { file, term } => {
            let f = load(&file)?;
            let out = print_cterm(&pg(&ecterm(&f, &term)?, &mut NameGen::new()), None);
            Ok(Outcome::ok(format!("{out}\n"), json!({"result": out})))
        }
        Cmd::Lvf { file, rule } => {
            let f = load(&file)?;
            let rules: Vec<_> = match &rule {
                Some(l) => vec![f
                    .rule(l)
                    .ok_or_else(|| Error::UnknownSymbol(format!("no rule labelled `{l}`")))?],
                None => f.rules.iter().collect(),
            };
            let mut out = Vec::new();
            for r in rules {
                out.push(print_rule(&lvf(r, &mut NameGen::new())?));
            }
            Ok(Outcome::ok(out.iter().map(|r| format!("{r}\n")).collect(), json!({"rules": out})))
        }
        Cmd::Ext { file, term } => {
            let f = load(&file)?;
            let nq = f.resolve_cterm(&term)?.nqterm()?;
            let out = print_cterm(&ext(&nq), None);
            Ok(Outcome::ok(format!("{out}\n"), json!({"result": out})))
        }
        Cmd::Rmv { file, term } => {
            let f = load(&file)?;
            let out = print_nqterm(&rmv(&ecterm(&f, &term)?), None);
            Ok(Outcome::ok(format!("{out}\n"), json!({"result": out})))
        }
        Cmd::Props(p) => {
            let (lo, hi) =
                parse_range(&p.domain).ok_or_else(|| Error::IllFormed(format!("bad range `{}`", p.domain)))?;
            let mut sort_palette = vec!["Int".to_string()];
            if p.bools {
                sort_palette.push("Bool".into());
            }
            let cfg = GenConfig {
                seed: p.seed,
                count: p.count,
                max_term_depth: p.max_depth,
                max_rule_count: p.max_rules,
                sort_palette,
                domain: (lo, hi),
                theorems: TheoremId::parse_list(&p.theorems)?,
                mutation: p.mutation.as_deref().map(str::parse).transpose()?,
                shrink: !p.no_shrink,
                backend: env.solver(None)?.backend().clone(),
                budget: env.budget,
            };
            let report = run_suite(&cfg)?;
            Ok(Outcome {
                text: report.table(),
                json: report.to_json(),
                positive: report.success(),
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    match run(cli) {
        Ok(out) => {
            if json {
                println!("{}", out.json);
            } else {
                print!("{}", out.text);
            }
            if out.positive {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
