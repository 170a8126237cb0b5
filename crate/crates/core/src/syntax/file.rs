use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use super::sexpr::{error_at, parse_all, parse_one, SExpr};
use super::{parse_constraint, parse_term, parse_var_list, Printer, Scope};
use crate::constraints::{Backend, Constraint, ExistentialConstraint};
use crate::cterms::{ext, rmv, ECTerm, NQTerm};
use crate::error::{Error, Result};
use crate::rules::CRule;
use crate::terms::{FunSym, Signature, Sort, SortKind, Term, Var};

/// A `(cterm ...)` declaration as written. Without `:exists` it may be read
/// either as an existentially constrained term or as a legacy one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CTermDecl {
    pub label: Option<String>,
    pub logical: BTreeSet<Var>,
    pub term: Term,
    pub exists: Vec<Var>,
    pub guard: Constraint,
}

impl CTermDecl {
    /// The existentially constrained reading. A declaration without
    /// `:exists` is read as a legacy term and translated by `ext`.
    pub fn ecterm(&self) -> Result<ECTerm> {
        if self.exists.is_empty() {
            let nq = NQTerm::from_parts(self.logical.clone(), self.term.clone(), self.guard.clone());
            if nq.is_well_formed() {
                return Ok(ext(&nq));
            }
        }
        ECTerm::new(
            self.logical.clone(),
            self.term.clone(),
            ExistentialConstraint::new(self.exists.clone(), self.guard.clone()),
        )
    }

    /// The legacy reading; declarations with `:exists` go through `rmv`.
    pub fn nqterm(&self) -> Result<NQTerm> {
        if !self.exists.is_empty() {
            return Ok(rmv(&self.ecterm()?));
        }
        NQTerm::new(self.logical.clone(), self.term.clone(), self.guard.clone())
    }
}

/// A parsed source file.
#[derive(Clone, Debug)]
pub struct SourceFile {
    pub signature: Signature,
    /// User sorts in declaration order.
    pub sorts: Vec<Sort>,
    /// User function symbols in declaration order.
    pub funs: Vec<Arc<FunSym>>,
    pub rules: Vec<CRule>,
    pub cterms: Vec<CTermDecl>,
    pub model: Option<Backend>,
}

impl SourceFile {
    pub fn new(signature: Signature) -> Self {
        SourceFile {
            signature,
            sorts: Vec::new(),
            funs: Vec::new(),
            rules: Vec::new(),
            cterms: Vec::new(),
            model: None,
        }
    }

    pub fn cterm(&self, label: &str) -> Option<&CTermDecl> {
        self.cterms.iter().find(|c| c.label.as_deref() == Some(label))
    }

    pub fn rule(&self, label: &str) -> Option<&CRule> {
        self.rules.iter().find(|r| r.label.as_deref() == Some(label))
    }

    /// A cterm given by label, or inline as `(cterm ...)` text.
    pub fn resolve_cterm(&self, name: &str) -> Result<CTermDecl> {
        if let Some(c) = self.cterm(name) {
            return Ok(c.clone());
        }
        if name.trim_start().starts_with('(') {
            return cterm_decl(&self.signature, name);
        }
        Err(Error::UnknownSymbol(format!("no cterm labelled `{name}`")))
    }
}

impl fmt::Display for SourceFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.sorts {
            let kind = if s.is_theory() { ":theory" } else { ":term" };
            writeln!(f, "(sort {} {kind})", s.name())?;
        }
        for g in &self.funs {
            let args: Vec<&str> = g.args.iter().map(Sort::name).collect();
            let kind = if g.is_theory() { ":theory" } else { ":term" };
            let value = if g.is_value { " :value" } else { "" };
            writeln!(f, "(fun {} ({}) {} {kind}{value})", g.name, args.join(" "), g.result)?;
        }
        if let Some(m) = &self.model {
            writeln!(f, "(model {m})")?;
        }
        for r in &self.rules {
            writeln!(f, "{}", print_rule(r))?;
        }
        for c in &self.cterms {
            writeln!(f, "{}", print_cterm_decl(c))?;
        }
        Ok(())
    }
}

fn kind_flag(e: &SExpr) -> Result<SortKind> {
    match e.atom() {
        Some(":theory") => Ok(SortKind::Theory),
        Some(":term") => Ok(SortKind::Term),
        _ => Err(error_at(e.loc(), "expected :theory or :term")),
    }
}

fn sort_ref(sig: &Signature, e: &SExpr) -> Result<Sort> {
    let name = e.atom().ok_or_else(|| error_at(e.loc(), "expected a sort name"))?;
    sig.sort(name)
        .ok_or_else(|| error_at(e.loc(), format!("unknown sort `{name}`")))
}

fn located(e: &SExpr) -> impl Fn(Error) -> Error + '_ {
    move |err| match err {
        Error::Parse { .. } => err,
        other => error_at(e.loc(), other.to_string()),
    }
}

/// Optional label: an atom that is not a keyword.
fn take_label(items: &[SExpr]) -> (Option<String>, &[SExpr]) {
    match items.first() {
        Some(SExpr::Atom(a, _)) if !a.starts_with(':') => (Some(a.clone()), &items[1..]),
        _ => (None, items),
    }
}

fn expect_kw<'a>(items: &'a [SExpr], kw: &str, at: &SExpr) -> Result<(&'a SExpr, &'a [SExpr])> {
    match items {
        [k, v, rest @ ..] if k.atom() == Some(kw) => Ok((v, rest)),
        [k, ..] => Err(error_at(k.loc(), format!("expected `{kw}`"))),
        [] => Err(error_at(at.loc(), format!("missing `{kw}`"))),
    }
}

fn parse_rule(sig: &Signature, e: &SExpr, items: &[SExpr]) -> Result<CRule> {
    let (label, rest) = take_label(items);
    let (lvars, rest) = expect_kw(rest, ":lvars", e)?;
    let mut scope = Scope::new();
    let z = parse_var_list(sig, lvars, &mut scope)?;
    let (lhs_e, rhs_e, rest) = match rest {
        [l, r, rest @ ..] => (l, r, rest),
        _ => return Err(error_at(e.loc(), "a rule needs a lhs and a rhs")),
    };
    let lhs = parse_term(sig, lhs_e, &mut scope)?;
    let rhs = parse_term(sig, rhs_e, &mut scope)?;
    let guard = match rest {
        [] => Constraint::tt(),
        [k, g] if k.atom() == Some(":guard") => parse_constraint(sig, g, &mut scope)?,
        [k, ..] => return Err(error_at(k.loc(), "unexpected input; expected `:guard <constraint>`")),
    };
    CRule::new(label, z.into_iter().collect(), lhs, rhs, guard).map_err(located(e))
}

fn parse_cterm_items(sig: &Signature, e: &SExpr, items: &[SExpr]) -> Result<CTermDecl> {
    let (label, rest) = take_label(items);
    let (logical, rest) = expect_kw(rest, ":logical", e)?;
    let mut scope = Scope::new();
    let logical = parse_var_list(sig, logical, &mut scope)?;
    let (term_e, mut rest) = rest
        .split_first()
        .ok_or_else(|| error_at(e.loc(), "a cterm needs a term"))?;
    let term = parse_term(sig, term_e, &mut scope)?;
    let mut exists = Vec::new();
    if rest.first().and_then(SExpr::atom) == Some(":exists") {
        let (vs, r) = expect_kw(rest, ":exists", e)?;
        exists = parse_var_list(sig, vs, &mut scope)?;
        rest = r;
    }
    let guard = match rest {
        [] => Constraint::tt(),
        [k, g] if k.atom() == Some(":guard") => parse_constraint(sig, g, &mut scope)?,
        [k, ..] => return Err(error_at(k.loc(), "unexpected input; expected `:guard <constraint>`")),
    };
    let decl = CTermDecl {
        label,
        logical: logical.into_iter().collect(),
        term,
        exists,
        guard,
    };
    decl.ecterm().map_err(located(e))?;
    Ok(decl)
}

/// Parse a standalone `(cterm ...)` against a signature.
pub fn cterm_decl(sig: &Signature, src: &str) -> Result<CTermDecl> {
    let e = parse_one(src)?;
    let items = e
        .list()
        .ok_or_else(|| error_at(e.loc(), "expected `(cterm ...)`"))?;
    match items.split_first() {
        Some((h, rest)) if h.atom() == Some("cterm") => parse_cterm_items(sig, &e, rest),
        _ => Err(error_at(e.loc(), "expected `(cterm ...)`")),
    }
}

/// Parse a standalone `(rule ...)` against a signature.
pub fn rule_decl(sig: &Signature, src: &str) -> Result<CRule> {
    let e = parse_one(src)?;
    let items = e
        .list()
        .ok_or_else(|| error_at(e.loc(), "expected `(rule ...)`"))?;
    match items.split_first() {
        Some((h, rest)) if h.atom() == Some("rule") => parse_rule(sig, &e, rest),
        _ => Err(error_at(e.loc(), "expected `(rule ...)`")),
    }
}

/// Parse a whole source file.
pub fn parse_source(src: &str) -> Result<SourceFile> {
    let mut file = SourceFile::new(Signature::new());
    for e in parse_all(src)? {
        let items = e
            .list()
            .ok_or_else(|| error_at(e.loc(), "expected a declaration"))?;
        let (head, rest) = items
            .split_first()
            .ok_or_else(|| error_at(e.loc(), "empty declaration"))?;
        match head.atom() {
            Some("sort") => {
                let [name, kind] = rest else {
                    return Err(error_at(e.loc(), "expected `(sort <name> :theory|:term)`"));
                };
                let n = name
                    .atom()
                    .ok_or_else(|| error_at(name.loc(), "expected a sort name"))?;
                let fresh = file.signature.sort(n).is_none();
                let s = file
                    .signature
                    .add_sort(n, kind_flag(kind)?)
                    .map_err(located(&e))?;
                if fresh {
                    file.sorts.push(s);
                }
            }
            Some("fun") => {
                let (name, args, result, kind, flags) = match rest {
                    [n, a, r, k, flags @ ..] => (n, a, r, k, flags),
                    _ => {
                        return Err(error_at(
                            e.loc(),
                            "expected `(fun <name> (<sort>*) <sort> :theory|:term [:value])`",
                        ))
                    }
                };
                let n = name
                    .atom()
                    .ok_or_else(|| error_at(name.loc(), "expected a symbol name"))?;
                let arg_list = args
                    .list()
                    .ok_or_else(|| error_at(args.loc(), "expected an argument sort list"))?;
                let arg_sorts = arg_list
                    .iter()
                    .map(|a| sort_ref(&file.signature, a))
                    .collect::<Result<Vec<_>>>()?;
                let result = sort_ref(&file.signature, result)?;
                let is_value = match flags {
                    [] => false,
                    [v] if v.atom() == Some(":value") => true,
                    [v, ..] => return Err(error_at(v.loc(), "expected `:value` or `)`")),
                };
                let f = file
                    .signature
                    .add_fun(n, arg_sorts, result, kind_flag(kind)?, is_value)
                    .map_err(located(&e))?;
                if !file.funs.contains(&f) {
                    file.funs.push(f);
                }
            }
            Some("rule") => {
                let r = parse_rule(&file.signature, &e, rest)?;
                file.rules.push(r);
            }
            Some("cterm") => {
                let c = parse_cterm_items(&file.signature, &e, rest)?;
                file.cterms.push(c);
            }
            Some("model") => {
                let [solver] = rest else {
                    return Err(error_at(e.loc(), "expected `(model <solver>)`"));
                };
                let s = solver
                    .atom()
                    .ok_or_else(|| error_at(solver.loc(), "expected a solver name"))?;
                file.model = Some(s.parse().map_err(located(&e))?);
            }
            _ => {
                return Err(error_at(
                    head.loc(),
                    "expected one of sort, fun, rule, cterm, model",
                ))
            }
        }
    }
    Ok(file)
}

fn label_part(label: Option<&str>) -> String {
    label.map(|l| format!(" {l}")).unwrap_or_default()
}

/// `(rule [label] :lvars (Z) ℓ r [:guard π])`
pub fn print_rule(r: &CRule) -> String {
    let mut p = Printer::new();
    let z = p.vars(r.logical());
    let lhs = p.term(r.lhs());
    let rhs = p.term(r.rhs());
    let mut out = format!("(rule{} :lvars {z} {lhs} {rhs}", label_part(r.label.as_deref()));
    if !r.guard().is_true() {
        out.push_str(" :guard ");
        out.push_str(&p.constraint(r.guard()));
    }
    out.push(')');
    out
}

/// `(cterm [label] :logical (X) s [:exists (x⃗)] [:guard φ])`
pub fn print_cterm(ct: &ECTerm, label: Option<&str>) -> String {
    let mut p = Printer::new();
    let xs = p.vars(ct.logical());
    let s = p.term(ct.term());
    let suffix = p.ec_suffix(ct.constraint());
    format!("(cterm{} :logical {xs} {s}{suffix})", label_part(label))
}

/// Legacy terms print without `:exists`.
pub fn print_nqterm(nq: &NQTerm, label: Option<&str>) -> String {
    let mut p = Printer::new();
    let xs = p.vars(nq.logical());
    let s = p.term(nq.term());
    let mut out = format!("(cterm{} :logical {xs} {s}", label_part(label));
    if !nq.constraint().is_true() {
        out.push_str(" :guard ");
        out.push_str(&p.constraint(nq.constraint()));
    }
    out.push(')');
    out
}

pub fn print_cterm_decl(c: &CTermDecl) -> String {
    let mut p = Printer::new();
    let xs = p.vars(&c.logical);
    let s = p.term(&c.term);
    let mut out = format!("(cterm{} :logical {xs} {s}", label_part(c.label.as_deref()));
    if !c.exists.is_empty() {
        out.push_str(" :exists ");
        out.push_str(&p.vars(&c.exists));
    }
    if !c.guard.is_true() {
        out.push_str(" :guard ");
        out.push_str(&p.constraint(&c.guard));
    }
    out.push(')');
    out
}
