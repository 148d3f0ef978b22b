//! Client for an external SMT-LIB 2 solver (z3 by default).

mod problem;
mod session;
pub mod sexp;

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::time::Duration;

use crate::expr::{Expr, Value};

pub use problem::{emit, symbol, SmtProblem, Sort};
pub use session::{Check, Session};

pub const DEFAULT_ALLSAT_CAP: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmtConfig {
    /// Solver command; arguments may follow the program name.
    pub solver: String,
    pub timeout: Option<Duration>,
    /// When set, every session's transcript is written there.
    pub dump_dir: Option<PathBuf>,
}

impl Default for SmtConfig {
    fn default() -> Self {
        SmtConfig { solver: "z3".into(), timeout: None, dump_dir: None }
    }
}

impl SmtConfig {
    /// Defaults overridden by `RVT_SMT_SOLVER` and `RVT_SMT_TIMEOUT_MS`.
    pub fn from_env() -> Self {
        let mut cfg = SmtConfig::default();
        if let Ok(s) = std::env::var("RVT_SMT_SOLVER") {
            if !s.trim().is_empty() {
                cfg.solver = s;
            }
        }
        if let Some(ms) = std::env::var("RVT_SMT_TIMEOUT_MS").ok().and_then(|s| s.trim().parse::<u64>().ok()) {
            cfg.timeout = Some(Duration::from_millis(ms));
        }
        cfg
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SmtError {
    #[error("cannot start solver {0}")]
    Spawn(String),
    #[error("solver protocol error: {0}")]
    Protocol(String),
    #[error("solver error: {0}")]
    Solver(String),
    #[error("solver timeout")]
    Timeout,
    #[error("solver returned unknown: {0}")]
    Unknown(String),
    #[error("model enumeration exceeds {0} models")]
    EnumerationLimit(usize),
}

pub type Model = BTreeMap<String, Value>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SmtOutcome {
    Sat(Model),
    /// Core over assertion names, when cores were requested.
    Unsat(Option<BTreeSet<String>>),
    Unknown(String),
}

impl SmtOutcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, SmtOutcome::Sat(_))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, SmtOutcome::Unsat(_))
    }
}

/// Reads the values of `names` from a session that just answered `sat`.
pub fn get_values(session: &mut Session, p: &SmtProblem, names: &[&str]) -> Result<Model, SmtError> {
    let mut model = Model::new();
    if names.is_empty() {
        return Ok(model);
    }
    let sorts = p.sorts();
    // Chunked so that huge unrollings do not produce one enormous answer.
    for chunk in names.chunks(512) {
        let cmd = format!("(get-value ({}))", chunk.iter().map(|n| symbol(n)).collect::<Vec<_>>().join(" "));
        let answer = session.query(&cmd)?;
        let pairs = answer.as_list().ok_or_else(|| SmtError::Protocol("get-value answer is not a list".into()))?;
        for pair in pairs {
            let pair = pair.as_list().filter(|p| p.len() == 2).ok_or_else(|| SmtError::Protocol("bad get-value pair".into()))?;
            let name = sexp::unquote(pair[0].as_atom().ok_or_else(|| SmtError::Protocol("bad symbol".into()))?).to_string();
            let value = match sorts.get(name.as_str()) {
                Some(Sort::Bool) => Value::Bool(pair[1].to_bool().ok_or_else(|| SmtError::Protocol(format!("bad boolean for {name}")))?),
                _ => Value::Num(pair[1].to_rational().ok_or_else(|| SmtError::Protocol(format!("bad number for {name}: {:?}", pair[1])))?),
            };
            model.insert(name, value);
        }
    }
    Ok(model)
}

fn unknown(session: &mut Session) -> SmtOutcome {
    SmtOutcome::Unknown(session.reason_unknown())
}

pub fn solve(p: &SmtProblem, cfg: &SmtConfig) -> Result<SmtOutcome, SmtError> {
    let mut s = Session::start(cfg)?;
    s.send(&p.preamble())?;
    let check = match s.check_sat() {
        Err(SmtError::Timeout) => return Ok(SmtOutcome::Unknown("timeout".into())),
        r => r?,
    };
    Ok(match check {
        Check::Sat => {
            let names: Vec<&str> = p.decls.iter().map(|(n, _)| n.as_str()).collect();
            SmtOutcome::Sat(get_values(&mut s, p, &names)?)
        }
        Check::Unsat if p.produce_cores => {
            let core = s.query("(get-unsat-core)")?;
            let names = core
                .as_list()
                .ok_or_else(|| SmtError::Protocol("unsat core is not a list".into()))?
                .iter()
                .filter_map(|x| x.as_atom().map(|a| sexp::unquote(a).to_string()))
                .collect();
            SmtOutcome::Unsat(Some(names))
        }
        Check::Unsat => SmtOutcome::Unsat(None),
        Check::Unknown => unknown(&mut s),
    })
}

/// All distinct projections onto the boolean variables `proj` of models of
/// `p`, by repeated solving with blocking clauses in one session.
pub fn all_models_projected(
    p: &SmtProblem,
    proj: &[String],
    cfg: &SmtConfig,
    cap: usize,
) -> Result<Vec<BTreeMap<String, bool>>, SmtError> {
    let mut s = Session::start(cfg)?;
    s.send(&p.preamble())?;
    let names: Vec<&str> = proj.iter().map(String::as_str).collect();
    let sorts = p.sorts();
    let mut out = Vec::new();
    loop {
        match s.check_sat()? {
            Check::Unsat => return Ok(out),
            Check::Unknown => return Err(SmtError::Unknown(s.reason_unknown())),
            Check::Sat => {}
        }
        if out.len() >= cap {
            return Err(SmtError::EnumerationLimit(cap));
        }
        let model = get_values(&mut s, p, &names)?;
        let assignment: BTreeMap<String, bool> =
            proj.iter().map(|n| (n.clone(), model.get(n).and_then(Value::as_bool).unwrap_or(false))).collect();
        let block = Expr::or(assignment.iter().map(|(n, &b)| {
            let v = Expr::Var(n.clone());
            if b {
                Expr::not(v)
            } else {
                v
            }
        }));
        out.push(assignment);
        if proj.is_empty() {
            return Ok(out);
        }
        s.send(&format!("(assert {})", emit(&block, &sorts)))?;
    }
}

/// Outcome of a core minimization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalCore {
    pub core: BTreeSet<String>,
    /// False when some removal test came back unknown.
    pub minimal: bool,
}

/// Deletion-based minimization of an unsatisfiable subset of the named
/// assertions of `p`. Unnamed assertions are always kept.
pub fn minimize_core(p: &SmtProblem, core: &BTreeSet<String>, cfg: &SmtConfig) -> Result<MinimalCore, SmtError> {
    let mut gated = SmtProblem { decls: p.decls.clone(), assertions: Vec::new(), produce_cores: false };
    let mut acts = BTreeMap::new();
    for (i, (name, e)) in p.assertions.iter().enumerate() {
        match name {
            Some(n) if core.contains(n) => {
                let act = format!("@act{i}");
                gated.declare(act.clone(), Sort::Bool);
                gated.assert(Expr::implies(Expr::Var(act.clone()), e.clone()));
                acts.entry(n.clone()).or_insert_with(Vec::new).push(act);
            }
            Some(_) => {}
            None => gated.assert(e.clone()),
        }
    }
    let mut s = Session::start(cfg)?;
    s.send(&gated.preamble())?;
    let mut keep: Vec<String> = core.iter().cloned().collect();
    let mut minimal = true;
    let mut i = 0;
    while i < keep.len() {
        let trial: Vec<String> = keep
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .flat_map(|(_, n)| acts.get(n).into_iter().flatten().map(|a| symbol(a)))
            .collect();
        match s.check_sat_assuming(&trial) {
            Ok(Check::Unsat) => {
                keep.remove(i);
            }
            Ok(Check::Sat) => i += 1,
            Ok(Check::Unknown) => {
                minimal = false;
                i += 1;
            }
            Err(SmtError::Timeout) => {
                minimal = false;
                s = Session::start(cfg)?;
                s.send(&gated.preamble())?;
                i += 1;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(MinimalCore { core: keep.into_iter().collect(), minimal })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_uses_z3() {
        let cfg = SmtConfig::default();
        assert_eq!(cfg.solver, "z3");
        assert!(cfg.timeout.is_none());
    }
}
