//! Bounded search for lasso-shaped traces.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, Ordering};

use crate::automata::{Domain, Fts, FtsVar};
use crate::discretize::{Lasso, SVar};
use crate::expr::{CmpOp, Expr, Lin, Value};
use crate::rational::int;
use crate::smt::{solve, SmtConfig, SmtError, SmtOutcome, SmtProblem, Sort};

use super::SolveVerdict;

pub const DEFAULT_SCHEDULE: [usize; 5] = [2, 4, 6, 8, 10];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BmcConfig {
    /// Strictly increasing, positive bounds; the last one is the maximum.
    pub schedule: Vec<usize>,
}

impl Default for BmcConfig {
    fn default() -> Self {
        BmcConfig { schedule: DEFAULT_SCHEDULE.to_vec() }
    }
}

impl BmcConfig {
    pub fn new(schedule: Vec<usize>) -> Result<Self, String> {
        if schedule.is_empty() {
            return Err("bound schedule is empty".into());
        }
        if schedule[0] == 0 {
            return Err("bounds must be positive".into());
        }
        if schedule.windows(2).any(|w| w[0] >= w[1]) {
            return Err("bounds must be strictly increasing".into());
        }
        Ok(BmcConfig { schedule })
    }

    pub fn k_max(&self) -> usize {
        self.schedule.last().copied().unwrap_or(0)
    }
}

pub(crate) fn sort_of(v: &FtsVar) -> Sort {
    match &v.domain {
        Domain::Boolean => Sort::Bool,
        Domain::Enumeration(labels) => Sort::Int { lo: Some(0), hi: Some(labels.len() as i64 - 1) },
        Domain::Integer { lo, hi } => Sort::Int { lo: *lo, hi: *hi },
        Domain::Real(_) => Sort::Real,
    }
}

pub(crate) fn at(name: &str, step: usize) -> String {
    format!("{name}@{step}")
}

/// Instance of a one- or two-state expression at `step`.
pub(crate) fn at_step(e: &Expr<SVar>, step: usize) -> Expr<String> {
    e.map_vars(&mut |v| at(&v.name, step + usize::from(v.next)))
}

pub(crate) fn declare_steps(p: &mut SmtProblem, fts: &Fts, steps: usize) {
    for j in 0..=steps {
        for v in &fts.vars {
            p.declare(at(&v.name, j), sort_of(v));
        }
    }
}

/// `state_a = state_b` over every variable of the system.
pub(crate) fn states_equal(fts: &Fts, a: usize, b: usize) -> Expr<String> {
    Expr::and(fts.vars.iter().map(|v| {
        let (x, y) = (at(&v.name, a), at(&v.name, b));
        match v.domain {
            Domain::Boolean => Expr::iff(Expr::Var(x), Expr::Var(y)),
            _ => Expr::compare(Lin::var(x), CmpOp::Eq, &Lin::var(y)),
        }
    }))
}

pub(crate) fn selector(i: usize) -> String {
    format!("@l{i}")
}

/// Lassos with exactly `k` steps: `state_k` equals the loop-start state.
pub fn bmc_encode(fts: &Fts, k: usize) -> SmtProblem {
    assert!(k >= 1, "bound must be positive");
    let mut p = SmtProblem::default();
    declare_steps(&mut p, fts, k);
    for i in 0..k {
        p.declare(selector(i), Sort::Bool);
    }
    p.assert(at_step(&fts.init, 0));
    for j in 0..k {
        p.assert(at_step(&fts.trans, j));
    }
    p.assert(Expr::or((0..k).map(|i| Expr::Var(selector(i)))));
    for i in 0..k {
        for j in i + 1..k {
            p.assert(Expr::not(Expr::and([Expr::Var(selector(i)), Expr::Var(selector(j))])));
        }
    }
    for i in 0..k {
        let l = Expr::Var(selector(i));
        p.assert(Expr::implies(l.clone(), states_equal(fts, k, i)));
        for c in &fts.fairness {
            p.assert(Expr::implies(l.clone(), Expr::or((i..k).map(|j| at_step(c, j)))));
        }
    }
    p
}

pub(crate) fn decode_states(fts: &Fts, model: &BTreeMap<String, Value>, steps: usize) -> Vec<BTreeMap<String, Value>> {
    (0..=steps)
        .map(|j| {
            fts.vars
                .iter()
                .map(|v| {
                    let default = if v.domain == Domain::Boolean { Value::Bool(false) } else { Value::Num(int(0)) };
                    (v.name.clone(), model.get(&at(&v.name, j)).cloned().unwrap_or(default))
                })
                .collect()
        })
        .collect()
}

pub fn bmc_search(fts: &Fts, cfg: &BmcConfig, smt: &SmtConfig) -> Result<SolveVerdict, SmtError> {
    bmc_search_cancellable(fts, cfg, smt, None)
}

pub(crate) fn bmc_search_cancellable(
    fts: &Fts,
    cfg: &BmcConfig,
    smt: &SmtConfig,
    cancel: Option<&AtomicBool>,
) -> Result<SolveVerdict, SmtError> {
    let mut undecided = false;
    for &k in &cfg.schedule {
        if cancel.is_some_and(|c| c.load(Ordering::Relaxed)) {
            return Ok(SolveVerdict::Unknown("cancelled".into()));
        }
        let p = bmc_encode(fts, k);
        match solve(&p, smt)? {
            SmtOutcome::Sat(model) => {
                let loop_start = (0..k)
                    .find(|&i| model.get(&selector(i)).and_then(Value::as_bool) == Some(true))
                    .ok_or_else(|| SmtError::Protocol("model selects no loop".into()))?;
                tracing::debug!(k, loop_start, "bmc found a lasso");
                return Ok(SolveVerdict::Sat(Lasso { states: decode_states(fts, &model, k), loop_start }));
            }
            SmtOutcome::Unsat(_) => tracing::debug!(k, "no lasso at this bound"),
            SmtOutcome::Unknown(reason) => {
                tracing::debug!(k, %reason, "solver undecided");
                undecided = true;
            }
        }
    }
    Ok(SolveVerdict::Unknown(if undecided { "solver-unknown" } else { "bound-exhausted" }.into()))
}
