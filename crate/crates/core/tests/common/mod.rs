#![allow(dead_code)]

pub mod goldens;

use std::path::PathBuf;

use lctrs_core::constraints::Constraint;
use lctrs_core::cterms::{ECTerm, NQTerm};
use lctrs_core::rules::CRule;
use lctrs_core::syntax::{self, cterm_decl, parse_source, rule_decl, SourceFile};
use lctrs_core::terms::{Signature, Term, Var};

pub const VOCAB: &str = "(sort T :term)
(fun f (Int) T :term)
(fun g (Int) T :term)
(fun h (Int Int) T :term)
(fun k (T) T :term)
(fun b (Bool) T :term)
(fun c () T :term)
";

pub fn sig() -> Signature {
    parse_source(VOCAB).unwrap().signature
}

pub fn term(src: &str) -> Term {
    syntax::term(&sig(), src).unwrap()
}

pub fn con(src: &str) -> Constraint {
    syntax::constraint(&sig(), src).unwrap()
}

pub fn ec(src: &str) -> ECTerm {
    cterm_decl(&sig(), src).unwrap().ecterm().unwrap()
}

pub fn nq(src: &str) -> NQTerm {
    cterm_decl(&sig(), src).unwrap().nqterm().unwrap()
}

pub fn rule(src: &str) -> CRule {
    rule_decl(&sig(), src).unwrap()
}

pub fn int(x: &str) -> Var {
    Var::int(x)
}

pub fn golden(name: &str) -> SourceFile {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    parse_source(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// The error of parsing `src` as a source file, if any.
pub fn parse_err(src: &str) -> Option<lctrs_core::Error> {
    parse_source(src).err()
}
