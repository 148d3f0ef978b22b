//! Satisfiability of fair transition systems: bounded lasso search (good at
//! finding witnesses) and predicate-abstraction refinement (able to prove
//! emptiness).

mod abstraction;
mod bmc;
mod cegar;

use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{Duration, Instant};

use crate::automata::Fts;
use crate::discretize::Lasso;
use crate::expr::{Expr, Value};
use crate::smt::{SmtConfig, SmtError};

pub use abstraction::{abstract_build, canonical_atom, initial_predicates, pred_bit, trans_bit, Abstraction};
pub use bmc::{bmc_encode, bmc_search, BmcConfig, DEFAULT_SCHEDULE};
pub use cegar::{cegar, CegarConfig, CegarStats, DEFAULT_CEGAR_ITERATIONS};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveVerdict {
    /// A lasso over all system variables; `states[k] == states[loop_start]`.
    Sat(Lasso),
    /// The language is empty (proved on an abstraction).
    Unsat,
    Unknown(String),
}

impl SolveVerdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveVerdict::Sat(_))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, SolveVerdict::Unsat)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Lasso search first, then refinement.
    #[default]
    Sequential,
    BmcOnly,
    CegarOnly,
    /// Both engines concurrently; the first conclusive verdict wins.
    Portfolio,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SolveConfig {
    pub bmc: BmcConfig,
    pub cegar: CegarConfig,
    pub smt: SmtConfig,
    pub strategy: Strategy,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub bmc_time: Duration,
    pub cegar_time: Duration,
    /// Length of the witness, when one was found.
    pub witness_steps: Option<usize>,
    pub cegar: CegarStats,
    pub bmc_verdict: Option<String>,
    pub cegar_verdict: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveOutcome {
    pub verdict: SolveVerdict,
    pub stats: SolveStats,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolveError {
    #[error(transparent)]
    Smt(#[from] SmtError),
    #[error("witness fails replay: {0}")]
    Replay(String),
    #[error("engines disagree: lasso search found a witness, refinement proved emptiness")]
    Disagreement,
}

/// Checks a lasso against the system by direct evaluation: init at the
/// first state, every transition, loop-back equality and every fairness
/// constraint somewhere in the loop.
pub fn replay_lasso(fts: &Fts, lasso: &Lasso) -> Result<(), String> {
    let k = lasso.states.len().checked_sub(1).ok_or("empty lasso")?;
    let l = lasso.loop_start;
    if l >= k {
        return Err(format!("loop start {l} not before last state {k}"));
    }
    let holds = |e: &Expr<crate::discretize::SVar>, j: usize| {
        e.eval(&|v| {
            let s = if v.next { lasso.states.get(j + 1)? } else { &lasso.states[j] };
            s.get(&v.name).cloned()
        })
    };
    if holds(&fts.init, 0) != Some(true) {
        return Err("initial condition fails".into());
    }
    for j in 0..k {
        if holds(&fts.trans, j) != Some(true) {
            return Err(format!("transition {j} fails"));
        }
    }
    for v in &fts.vars {
        let (a, b) = (lasso.states[k].get(&v.name), lasso.states[l].get(&v.name));
        let same = match (a, b) {
            (Some(Value::Num(x)), Some(Value::Num(y))) => x == y,
            (a, b) => a == b,
        };
        if !same {
            return Err(format!("loop-back differs on {}", v.name));
        }
    }
    for (i, c) in fts.fairness.iter().enumerate() {
        if !(l..k).any(|j| holds(c, j) == Some(true)) {
            return Err(format!("fairness constraint {i} never holds in the loop"));
        }
    }
    Ok(())
}

fn describe(v: &SolveVerdict) -> String {
    match v {
        SolveVerdict::Sat(_) => "sat".into(),
        SolveVerdict::Unsat => "unsat".into(),
        SolveVerdict::Unknown(r) => format!("unknown({r})"),
    }
}

fn run_bmc(fts: &Fts, cfg: &SolveConfig, cancel: Option<&AtomicBool>) -> Result<(SolveVerdict, Duration), SmtError> {
    let t = Instant::now();
    let v = bmc::bmc_search_cancellable(fts, &cfg.bmc, &cfg.smt, cancel)?;
    Ok((v, t.elapsed()))
}

fn run_cegar(fts: &Fts, cfg: &SolveConfig, cancel: Option<&AtomicBool>) -> Result<(SolveVerdict, CegarStats, Duration), SmtError> {
    let t = Instant::now();
    let preds = initial_predicates(fts);
    let (v, s) = cegar::cegar_cancellable(fts, &preds, &cfg.cegar, &cfg.smt, cancel)?;
    Ok((v, s, t.elapsed()))
}

fn combine(bmc: Option<&SolveVerdict>, cegar: Option<&SolveVerdict>) -> Result<SolveVerdict, SolveError> {
    let sat = |v: Option<&SolveVerdict>| v.is_some_and(SolveVerdict::is_sat);
    let unsat = |v: Option<&SolveVerdict>| v.is_some_and(SolveVerdict::is_unsat);
    if (sat(bmc) || sat(cegar)) && unsat(cegar) {
        return Err(SolveError::Disagreement);
    }
    for v in [bmc, cegar].into_iter().flatten() {
        if v.is_sat() {
            return Ok(v.clone());
        }
    }
    if unsat(cegar) {
        return Ok(SolveVerdict::Unsat);
    }
    let reasons: Vec<&str> = [bmc, cegar]
        .into_iter()
        .flatten()
        .filter_map(|v| match v {
            SolveVerdict::Unknown(r) if r != "cancelled" => Some(r.as_str()),
            _ => None,
        })
        .collect();
    Ok(SolveVerdict::Unknown(reasons.join("; ")))
}

/// Runs the engines according to the strategy and combines their verdicts:
/// a witness wins, then an emptiness proof, else unknown with all reasons.
/// Every witness is replayed before it is returned.
pub fn solve_formula(fts: &Fts, cfg: &SolveConfig) -> Result<SolveOutcome, SolveError> {
    let mut stats = SolveStats::default();
    let mut bmc_v = None;
    let mut cegar_v = None;
    match cfg.strategy {
        Strategy::Sequential | Strategy::BmcOnly | Strategy::CegarOnly => {
            if cfg.strategy != Strategy::CegarOnly {
                let (v, t) = run_bmc(fts, cfg, None)?;
                stats.bmc_time = t;
                bmc_v = Some(v);
            }
            let need_cegar = match cfg.strategy {
                Strategy::Sequential => !bmc_v.as_ref().is_some_and(SolveVerdict::is_sat),
                Strategy::CegarOnly => true,
                _ => false,
            };
            if need_cegar {
                let (v, s, t) = run_cegar(fts, cfg, None)?;
                stats.cegar_time = t;
                stats.cegar = s;
                cegar_v = Some(v);
            }
        }
        Strategy::Portfolio => {
            let cancel = AtomicBool::new(false);
            let (b, c) = std::thread::scope(|scope| {
                let b = scope.spawn(|| {
                    let r = run_bmc(fts, cfg, Some(&cancel));
                    if r.as_ref().is_ok_and(|(v, _)| v.is_sat()) {
                        cancel.store(true, Ordering::Relaxed);
                    }
                    r
                });
                let c = scope.spawn(|| {
                    let r = run_cegar(fts, cfg, Some(&cancel));
                    if r.as_ref().is_ok_and(|(v, _, _)| !matches!(v, SolveVerdict::Unknown(_))) {
                        cancel.store(true, Ordering::Relaxed);
                    }
                    r
                });
                (b.join().expect("lasso search panicked"), c.join().expect("refinement panicked"))
            });
            let (bv, bt) = b?;
            let (cv, cs, ct) = c?;
            stats.bmc_time = bt;
            stats.cegar_time = ct;
            stats.cegar = cs;
            bmc_v = Some(bv);
            cegar_v = Some(cv);
        }
    }
    stats.bmc_verdict = bmc_v.as_ref().map(describe);
    stats.cegar_verdict = cegar_v.as_ref().map(describe);
    let verdict = combine(bmc_v.as_ref(), cegar_v.as_ref())?;
    if let SolveVerdict::Sat(lasso) = &verdict {
        replay_lasso(fts, lasso).map_err(SolveError::Replay)?;
        stats.witness_steps = Some(lasso.states.len() - 1);
    }
    Ok(SolveOutcome { verdict, stats })
}
