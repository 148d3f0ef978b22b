//! Formal validation of requirements written in a first-order temporal
//! logic with hybrid (continuous-time) semantics.
//!
//! Pipeline: [`lang`] parses and typechecks constraints, [`ground`]
//! instantiates quantifiers over a bounded population, [`discretize`]
//! reduces hybrid traces to discrete steps, [`automata`] compiles the
//! temporal formula to a fair transition system and [`solve`] decides its
//! emptiness with an SMT solver ([`smt`]). [`checks`] wires this into the
//! consistency, scenario and property checks.

pub mod automata;
pub mod checks;
pub mod discretize;
pub mod expr;
pub mod ground;
pub mod lang;
pub mod ltl;
pub mod project;
pub mod rational;
pub mod smt;
pub mod solve;

pub use checks::{CheckConfig, CheckError, CheckKind, CheckResult, CheckStats, Verdict};
pub use discretize::{HybridStep, HybridTrace, Lasso, StepKind, TraceValue};
pub use expr::{CmpOp, Expr, Lin, Value};
pub use project::{Category, Project, Requirement, Signature};
pub use rational::Q;
pub use smt::SmtConfig;
pub use solve::{BmcConfig, CegarConfig, SolveConfig, SolveVerdict, Strategy};
