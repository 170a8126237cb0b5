use std::io::Write;
use std::process::{Command, Stdio};

use super::Formula;
use crate::error::{Error, Result};
use crate::terms::{Term, Value, Var};

fn symbol(name: &str) -> String {
    let simple = name
        .chars()
        .all(|c| c.is_ascii_alphanumeric() || "_.$%&!?^~".contains(c))
        && !name.starts_with(|c: char| c.is_ascii_digit());
    if simple {
        name.to_string()
    } else {
        format!("|{}|", name.replace('|', "_"))
    }
}

fn sort_name(x: &Var) -> String {
    symbol(x.sort().name())
}

fn term(t: &Term, out: &mut String) {
    match t {
        Term::Var(x) => out.push_str(&symbol(x.name())),
        Term::Val(Value::Int(n)) if *n < 0 => out.push_str(&format!("(- {})", n.unsigned_abs())),
        Term::Val(v) => out.push_str(&v.to_string()),
        Term::App(f, args) if args.is_empty() => out.push_str(&symbol(&f.name)),
        Term::App(f, args) => {
            let op = match &*f.name {
                "<=>" => "=",
                name => name,
            };
            out.push('(');
            out.push_str(op);
            for a in args.iter() {
                out.push(' ');
                term(a, out);
            }
            out.push(')');
        }
    }
}

fn formula(f: &Formula, out: &mut String) {
    let list = |op: &str, fs: &[Formula], out: &mut String| {
        if fs.is_empty() {
            out.push_str(if op == "and" { "true" } else { "false" });
            return;
        }
        out.push('(');
        out.push_str(op);
        for g in fs {
            out.push(' ');
            formula(g, out);
        }
        out.push(')');
    };
    let binder = |q: &str, vs: &[crate::terms::Var], a: &Formula, out: &mut String| {
        out.push('(');
        out.push_str(q);
        out.push_str(" (");
        for v in vs {
            out.push_str(&format!("({} {})", symbol(v.name()), sort_name(v)));
        }
        out.push_str(") ");
        formula(a, out);
        out.push(')');
    };
    match f {
        Formula::Atom(c) => term(c.term(), out),
        Formula::Not(a) => {
            out.push_str("(not ");
            formula(a, out);
            out.push(')');
        }
        Formula::And(fs) => list("and", fs, out),
        Formula::Or(fs) => list("or", fs, out),
        Formula::Implies(a, b) => {
            out.push_str("(=> ");
            formula(a, out);
            out.push(' ');
            formula(b, out);
            out.push(')');
        }
        Formula::Iff(a, b) => {
            out.push_str("(= ");
            formula(a, out);
            out.push(' ');
            formula(b, out);
            out.push(')');
        }
        Formula::Exists(vs, a) => binder("exists", vs, a, out),
        Formula::Forall(vs, a) => binder("forall", vs, a, out),
    }
}

/// SMT-LIB2 script asserting `f` (free variables declared as constants).
pub(crate) fn script(f: &Formula) -> String {
    let mut out = String::from("(set-logic LIA)\n");
    for x in f.free_vars() {
        out.push_str(&format!("(declare-const {} {})\n", symbol(x.name()), sort_name(&x)));
    }
    out.push_str("(assert ");
    formula(f, &mut out);
    out.push_str(")\n(check-sat)\n(exit)\n");
    out
}

/// Run one `check-sat` through `command` (interpreted by `sh -c`).
pub(crate) fn check_sat(command: &str, f: &Formula) -> Result<bool> {
    let mut child = Command::new("sh")
        .arg("-c")
        .arg(command)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| Error::Solver(format!("cannot start `{command}`: {e}")))?;
    child
        .stdin
        .take()
        .expect("piped stdin")
        .write_all(script(f).as_bytes())
        .map_err(|e| Error::Solver(format!("cannot write to solver: {e}")))?;
    let out = child
        .wait_with_output()
        .map_err(|e| Error::Solver(format!("solver failed: {e}")))?;
    let text = String::from_utf8_lossy(&out.stdout);
    match text.lines().map(str::trim).find(|l| !l.is_empty()) {
        Some("sat") => Ok(true),
        Some("unsat") => Ok(false),
        Some("unknown") => Err(Error::SolverUnknown),
        Some("timeout") => Err(Error::SolverTimeout),
        other => Err(Error::Solver(format!(
            "unexpected solver output {:?}{}",
            other.unwrap_or(""),
            String::from_utf8_lossy(&out.stderr)
                .lines()
                .next()
                .map(|l| format!(" ({l})"))
                .unwrap_or_default()
        ))),
    }
}
