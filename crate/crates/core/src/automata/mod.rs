//! Compilation of discrete temporal formulas into fair transition systems,
//! and an explicit-state emptiness check for finite ones.

mod explicit;
mod fts;
mod sere;
mod tableau;

pub use explicit::{language_empty_explicit, language_empty_explicit_with_limit, ExplicitError, ExplicitResult, DEFAULT_STATE_LIMIT};
pub use fts::{mentions_next, prime, Domain, Fts, FtsVar, VarRole};
pub use sere::{compile_sere, Edge, Nfa};
pub use tableau::compile_ltl;
