//! Counterexample-guided abstraction refinement: abstract, check the
//! abstraction for emptiness, simulate abstract lassos concretely, refine.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicBool, Ordering};

use num::{One, Zero};

use crate::automata::{language_empty_explicit_with_limit, Domain, ExplicitError, Fts, DEFAULT_STATE_LIMIT};
use crate::discretize::{Lasso, SVar, DELTA};
use crate::expr::{CmpOp, Expr, Lin, Value};
use crate::rational::Q;
use crate::smt::{minimize_core, solve, SmtConfig, SmtError, SmtOutcome, SmtProblem, DEFAULT_ALLSAT_CAP};

use super::abstraction::{abstract_build, canonical_atom, Abstraction};
use super::bmc::{at_step, decode_states, declare_steps, states_equal};
use super::SolveVerdict;

pub const DEFAULT_CEGAR_ITERATIONS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CegarConfig {
    pub max_iterations: usize,
    /// How many times an abstract loop is unrolled during simulation.
    pub max_unrollings: usize,
    pub allsat_cap: usize,
    pub state_limit: usize,
}

impl Default for CegarConfig {
    fn default() -> Self {
        CegarConfig {
            max_iterations: DEFAULT_CEGAR_ITERATIONS,
            max_unrollings: 3,
            allsat_cap: DEFAULT_ALLSAT_CAP,
            state_limit: DEFAULT_STATE_LIMIT,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CegarStats {
    pub iterations: usize,
    pub predicates: usize,
}

/// Expands an abstract lasso into the sequence of abstract states visited
/// when its loop is traversed `u` times; returns the states and the index
/// the last concrete state must equal.
fn unroll(lasso: &Lasso, u: usize) -> (Vec<&BTreeMap<String, Value>>, usize) {
    let (l, k) = (lasso.loop_start, lasso.states.len() - 1);
    let mut seq: Vec<_> = lasso.states[..l].iter().collect();
    for _ in 0..u {
        seq.extend(lasso.states[l..k].iter());
    }
    let back = seq.len() - (k - l);
    seq.push(&lasso.states[l]);
    (seq, back)
}

/// Concrete query following the abstract path.
fn simulation_query(fts: &Fts, abs: &Abstraction, lasso: &Lasso, u: usize) -> (SmtProblem, usize, usize) {
    let (seq, back) = unroll(lasso, u);
    let n = seq.len() - 1;
    let mut p = SmtProblem::default();
    declare_steps(&mut p, fts, n);
    p.assert_named("init", at_step(&fts.init, 0));
    for j in 0..n {
        p.assert_named(format!("trans{j}"), at_step(&fts.trans, j));
    }
    for (j, s) in seq.iter().enumerate() {
        p.assert_named(format!("abs{j}"), abs.concretize(s, j, j < n));
    }
    p.assert_named("loop", states_equal(fts, n, back));
    for (i, c) in fts.fairness.iter().enumerate() {
        p.assert_named(format!("fair{i}"), Expr::or((back..n).map(|j| at_step(c, j))));
    }
    (p, n, back)
}

/// Removes the step suffix, yielding a state predicate when all variables
/// live at the same step.
fn unstep(atom: &Expr<String>) -> Option<Expr<SVar>> {
    let vars = atom.vars();
    let steps: BTreeSet<&str> = vars.iter().filter_map(|v| v.rsplit_once('@').map(|(_, s)| s)).collect();
    if steps.len() != 1 {
        return None;
    }
    Some(atom.map_vars(&mut |v| SVar::cur(base_name(v))))
}

fn base_name(v: &str) -> &str {
    v.rsplit_once('@').map_or(v, |(b, _)| b)
}

/// New predicates suggested by a failed simulation: untracked single-step
/// atoms of the core, else half-spaces `x <= c` and `x - y <= c` over the
/// numeric variables of the core with constants taken from its atoms.
fn mine_predicates(fts: &Fts, core_exprs: &[&Expr<String>], tracked: &[Expr<SVar>]) -> Vec<Expr<SVar>> {
    let is_tracked = |e: &Expr<SVar>| match e {
        Expr::Cmp(lin, op) => tracked.contains(&canonical_atom(lin, *op).0),
        _ => true,
    };
    let mut atoms = BTreeSet::new();
    for e in core_exprs {
        e.collect_atoms(&mut atoms);
    }
    let mut fresh: Vec<Expr<SVar>> = Vec::new();
    for a in &atoms {
        if let Some(s) = unstep(a) {
            if !is_tracked(&s) && !fresh.contains(&s) {
                fresh.push(s);
            }
        }
    }
    if !fresh.is_empty() {
        return fresh;
    }
    let numeric = |name: &str| fts.var(name).is_some_and(|v| v.domain != Domain::Boolean && !matches!(v.domain, Domain::Enumeration(_))) && name != DELTA;
    let mut vars = BTreeSet::new();
    let mut constants: BTreeSet<Q> = [Q::zero()].into_iter().collect();
    for a in &atoms {
        let Expr::Cmp(lin, _) = a else { continue };
        for v in lin.terms.keys() {
            if numeric(base_name(v)) {
                vars.insert(base_name(v).to_string());
            }
        }
        if lin.terms.len() == 1 {
            let coeff = lin.terms.values().next().expect("one term");
            constants.insert(-&lin.constant / coeff);
        }
    }
    let vars: Vec<String> = vars.into_iter().collect();
    let mut candidates = Vec::new();
    for c in &constants {
        for (i, x) in vars.iter().enumerate() {
            let mut lin = Lin::var(SVar::cur(x));
            lin.constant = -c.clone();
            candidates.push(Expr::cmp(lin.clone(), CmpOp::Le));
            for y in &vars[i + 1..] {
                let mut d = lin.clone();
                d.add_term(SVar::cur(y), -Q::one());
                candidates.push(Expr::cmp(d, CmpOp::Le));
            }
        }
    }
    candidates.into_iter().filter(|c| !is_tracked(c)).fold(Vec::new(), |mut acc, c| {
        if !acc.contains(&c) {
            acc.push(c);
        }
        acc
    })
}

pub fn cegar(
    fts: &Fts,
    init_preds: &[Expr<SVar>],
    cfg: &CegarConfig,
    smt: &SmtConfig,
) -> Result<(SolveVerdict, CegarStats), SmtError> {
    cegar_cancellable(fts, init_preds, cfg, smt, None)
}

pub(crate) fn cegar_cancellable(
    fts: &Fts,
    init_preds: &[Expr<SVar>],
    cfg: &CegarConfig,
    smt: &SmtConfig,
    cancel: Option<&AtomicBool>,
) -> Result<(SolveVerdict, CegarStats), SmtError> {
    let mut preds: Vec<Expr<SVar>> = init_preds.to_vec();
    let mut stats = CegarStats::default();
    let unknown = |r: &str, stats: CegarStats| Ok((SolveVerdict::Unknown(r.into()), stats));
    while stats.iterations < cfg.max_iterations {
        if cancel.is_some_and(|c| c.load(Ordering::Relaxed)) {
            return unknown("cancelled", stats);
        }
        stats.iterations += 1;
        let abs = match abstract_build(fts, &preds, smt, cfg.allsat_cap) {
            Ok(a) => a,
            Err(SmtError::EnumerationLimit(_)) => return unknown("abstraction-limit", stats),
            Err(SmtError::Timeout) => return unknown("timeout", stats),
            Err(SmtError::Unknown(_)) => return unknown("solver-unknown", stats),
            Err(e) => return Err(e),
        };
        stats.predicates = abs.predicates.len();
        let result = match language_empty_explicit_with_limit(&abs.fts, cfg.state_limit) {
            Ok(r) => r,
            Err(ExplicitError::StateLimit(_)) => return unknown("abstraction-limit", stats),
            Err(e @ ExplicitError::InfiniteDomain(_)) => unreachable!("abstract systems are boolean: {e}"),
        };
        let Some(lasso) = result.lasso else {
            tracing::debug!(iteration = stats.iterations, "abstract language empty");
            return Ok((SolveVerdict::Unsat, stats));
        };
        let mut failed: Option<SmtProblem> = None;
        for u in 1..=cfg.max_unrollings {
            let (q, n, back) = simulation_query(fts, &abs, &lasso, u);
            match solve(&q, smt)? {
                SmtOutcome::Sat(model) => {
                    let witness = Lasso { states: decode_states(fts, &model, n), loop_start: back };
                    return Ok((SolveVerdict::Sat(witness), stats));
                }
                SmtOutcome::Unsat(_) => {
                    if failed.is_none() {
                        failed = Some(q);
                    }
                }
                SmtOutcome::Unknown(_) => {}
            }
        }
        let Some(q) = failed else { return unknown("solver-unknown", stats) };
        let names: BTreeSet<String> = q.assertion_names().into_iter().map(str::to_string).collect();
        let core = match solve(&q, smt)? {
            SmtOutcome::Unsat(Some(core)) => minimize_core(&q, &core, smt)?.core,
            _ => names,
        };
        let core_exprs: Vec<&Expr<String>> =
            q.assertions.iter().filter(|(n, _)| n.as_ref().is_some_and(|n| core.contains(n))).map(|(_, e)| e).collect();
        let fresh = mine_predicates(fts, &core_exprs, &abs.predicates);
        tracing::debug!(iteration = stats.iterations, new = fresh.len(), "spurious abstract lasso");
        if fresh.is_empty() {
            return unknown("refinement-stuck", stats);
        }
        preds = abs.predicates.clone();
        preds.extend(fresh);
    }
    unknown("refinement-stuck", stats)
}
