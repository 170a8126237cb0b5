//! Textual syntax: s-expression declarations, terms and constraints, and a
//! canonical printer that round-trips with the parser.
//!
//! ```text
//! (sort <name> :theory|:term)
//! (fun <name> (<sort>*) <sort> :theory|:term [:value])
//! (rule [<label>] :lvars (<var>*) <lhs> <rhs> [:guard <constraint>])
//! (cterm [<label>] :logical (<var>*) <term> [:exists (<var>*)] [:guard <constraint>])
//! (model builtin|smtlib:<cmd>|finite:<lo>:<hi>)
//! ```
//!
//! Variables are written `name:Sort` at their first occurrence within a
//! declaration and by bare name afterwards.

mod file;
mod sexpr;

pub use file::{
    cterm_decl, parse_source, print_cterm, print_cterm_decl, print_nqterm, print_rule, rule_decl,
    CTermDecl, SourceFile,
};
pub use sexpr::{parse_all, parse_one, Loc, SExpr};

use std::collections::{BTreeMap, HashSet};

use sexpr::error_at;

use crate::constraints::{Constraint, ExistentialConstraint};
use crate::error::{Error, Result};
use crate::terms::{Signature, Term, Var};

/// Variables in scope within one declaration.
#[derive(Clone, Debug, Default)]
pub struct Scope {
    vars: BTreeMap<String, Var>,
}

impl Scope {
    pub fn new() -> Self {
        Scope::default()
    }

    pub fn get(&self, name: &str) -> Option<&Var> {
        self.vars.get(name)
    }

    pub fn insert(&mut self, v: Var) {
        self.vars.insert(v.name().to_string(), v);
    }

    /// Resolve a variable token `name` or `name:Sort`.
    pub fn var_token(&mut self, sig: &Signature, tok: &str, loc: Loc) -> Result<Var> {
        match tok.split_once(':') {
            Some((name, sort)) if !name.is_empty() => {
                check_name(name, loc)?;
                let sort = sig
                    .sort(sort)
                    .ok_or_else(|| error_at(loc, format!("unknown sort `{sort}`")))?;
                let v = Var::new(name, sort);
                if let Some(old) = self.vars.get(name) {
                    if *old != v {
                        return Err(error_at(
                            loc,
                            format!("variable `{name}` already has sort {}", old.sort()),
                        ));
                    }
                }
                self.insert(v.clone());
                Ok(v)
            }
            _ => self.vars.get(tok).cloned().ok_or_else(|| {
                error_at(loc, format!("unknown variable `{tok}` (write `{tok}:<Sort>` on first use)"))
            }),
        }
    }
}

fn check_name(name: &str, loc: Loc) -> Result<()> {
    let bad = name.parse::<i64>().is_ok()
        || name == "true"
        || name == "false"
        || name.starts_with(':')
        || name.contains(|c: char| c.is_whitespace() || "():;".contains(c));
    if bad {
        return Err(error_at(loc, format!("invalid variable name `{name}`")));
    }
    Ok(())
}

/// Parse a term, declaring annotated variables in `scope`.
pub fn parse_term(sig: &Signature, e: &SExpr, scope: &mut Scope) -> Result<Term> {
    match e {
        SExpr::Atom(tok, loc) => {
            if let Ok(n) = tok.parse::<i64>() {
                return Ok(Term::int(n));
            }
            match tok.as_str() {
                "true" => return Ok(Term::boolean(true)),
                "false" => return Ok(Term::boolean(false)),
                _ => {}
            }
            if tok.contains(':') || scope.get(tok).is_some() {
                return Ok(Term::Var(scope.var_token(sig, tok, *loc)?));
            }
            if let Some(f) = sig.funs_named(tok).iter().find(|f| f.arity() == 0) {
                return Ok(Term::App(f.clone(), Vec::new().into()));
            }
            Err(error_at(*loc, format!("unknown variable or constant `{tok}` (write `{tok}:<Sort>` on first use)")))
        }
        SExpr::List(items, loc) => {
            let (head, rest) = items
                .split_first()
                .ok_or_else(|| error_at(*loc, "empty application"))?;
            let name = head
                .atom()
                .ok_or_else(|| error_at(head.loc(), "expected a function symbol"))?;
            let args = rest
                .iter()
                .map(|a| parse_term(sig, a, scope))
                .collect::<Result<Vec<_>>>()?;
            let at = |err: Error| match err {
                Error::Parse { .. } => err,
                other => error_at(*loc, other.to_string()),
            };
            // n-ary sugar for associative built-ins, folded to the left
            if matches!(name, "and" | "or" | "+") && args.len() > 2 {
                let mut it = args.into_iter();
                let mut acc = it.next().unwrap();
                for a in it {
                    acc = sig.app(name, vec![acc, a]).map_err(at)?;
                }
                return Ok(acc);
            }
            sig.app(name, args).map_err(at)
        }
    }
}

pub fn parse_constraint(sig: &Signature, e: &SExpr, scope: &mut Scope) -> Result<Constraint> {
    let t = parse_term(sig, e, scope)?;
    Constraint::new(t).map_err(|err| error_at(e.loc(), err.to_string()))
}

/// Parse a parenthesised list of variable tokens.
pub fn parse_var_list(sig: &Signature, e: &SExpr, scope: &mut Scope) -> Result<Vec<Var>> {
    let items = e
        .list()
        .ok_or_else(|| error_at(e.loc(), "expected a variable list"))?;
    items
        .iter()
        .map(|it| match it {
            SExpr::Atom(tok, loc) => scope.var_token(sig, tok, *loc),
            other => Err(error_at(other.loc(), "expected a variable")),
        })
        .collect()
}

/// Convenience: parse a standalone term in a fresh scope.
pub fn term(sig: &Signature, src: &str) -> Result<Term> {
    parse_term(sig, &parse_one(src)?, &mut Scope::new())
}

/// Convenience: parse a standalone constraint in a fresh scope.
pub fn constraint(sig: &Signature, src: &str) -> Result<Constraint> {
    parse_constraint(sig, &parse_one(src)?, &mut Scope::new())
}

/// Canonical printer: a variable is annotated with its sort at its first
/// printed occurrence.
#[derive(Clone, Debug, Default)]
pub struct Printer {
    declared: HashSet<Var>,
}

impl Printer {
    pub fn new() -> Self {
        Printer::default()
    }

    pub fn var(&mut self, v: &Var) -> String {
        if self.declared.insert(v.clone()) {
            format!("{}:{}", v.name(), v.sort())
        } else {
            v.name().to_string()
        }
    }

    pub fn vars<'a>(&mut self, vs: impl IntoIterator<Item = &'a Var>) -> String {
        let parts: Vec<String> = vs.into_iter().map(|v| self.var(v)).collect();
        format!("({})", parts.join(" "))
    }

    pub fn term(&mut self, t: &Term) -> String {
        let mut out = String::new();
        self.write_term(t, &mut out);
        out
    }

    fn write_term(&mut self, t: &Term, out: &mut String) {
        match t {
            Term::Var(v) => out.push_str(&self.var(v)),
            Term::Val(v) => out.push_str(&v.to_string()),
            Term::App(f, args) if args.is_empty() => out.push_str(&f.name),
            Term::App(f, args) => {
                out.push('(');
                out.push_str(&f.name);
                for a in args.iter() {
                    out.push(' ');
                    self.write_term(a, out);
                }
                out.push(')');
            }
        }
    }

    pub fn constraint(&mut self, c: &Constraint) -> String {
        self.term(c.term())
    }

    /// `:exists (..) :guard φ` suffix; empty parts are omitted.
    pub fn ec_suffix(&mut self, ec: &ExistentialConstraint) -> String {
        let mut out = String::new();
        if !ec.bound().is_empty() {
            out.push_str(" :exists ");
            out.push_str(&self.vars(ec.bound()));
        }
        if !ec.body().is_true() {
            out.push_str(" :guard ");
            out.push_str(&self.constraint(ec.body()));
        }
        out
    }
}

/// Print a term with sort annotations on first occurrences.
pub fn show_term(t: &Term) -> String {
    Printer::new().term(t)
}
