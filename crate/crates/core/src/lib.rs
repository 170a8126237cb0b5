//! Most-general constrained rewriting on existentially constrained terms.
//!
//! The crate is organised bottom-up: [`terms`] (sorted terms, positions,
//! substitutions), [`constraints`] (existential constraints and the decision
//! layer), [`cterms`] (constrained terms and their translations),
//! [`equivalence`], [`rules`], [`rewriting`], the property [`harness`], and
//! the textual [`syntax`].

pub mod constraints;
pub mod cterms;
pub mod equivalence;
pub mod error;
pub mod harness;
pub mod rewriting;
pub mod rules;
pub mod syntax;
pub mod terms;

pub use error::{Error, Result};
