//! The three validation checks over a project: consistency of the
//! requirements, possibility of a scenario, entailment of a property.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::automata::{compile_ltl, Fts};
use crate::discretize::{lift_trace, to_discrete, DiscretizeError, HybridTrace, Lasso, TraceError};
use crate::ground::{instantiate_all, GroundError, GroundProblem, DEFAULT_EXPANSION_LIMIT};
use crate::lang::{parse_typed, Constraint, Formula, Span};
use crate::project::{Category, Project};
use crate::solve::{solve_formula, SolveConfig, SolveError, SolveOutcome, SolveVerdict};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "check", content = "id", rename_all = "lowercase")]
pub enum CheckKind {
    Consistency,
    Scenario(String),
    Property(String),
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckKind::Consistency => f.write_str("consistency"),
            CheckKind::Scenario(id) => write!(f, "scenario {id}"),
            CheckKind::Property(id) => write!(f, "property {id}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Consistent,
    Inconsistent,
    Possible,
    Impossible,
    Entailed,
    Violated,
    Unknown(String),
}

impl Verdict {
    pub fn is_positive(&self) -> bool {
        matches!(self, Verdict::Consistent | Verdict::Possible | Verdict::Entailed)
    }

    pub fn is_negative(&self) -> bool {
        matches!(self, Verdict::Inconsistent | Verdict::Impossible | Verdict::Violated)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Consistent => "CONSISTENT",
            Verdict::Inconsistent => "INCONSISTENT",
            Verdict::Possible => "POSSIBLE",
            Verdict::Impossible => "IMPOSSIBLE",
            Verdict::Entailed => "ENTAILED",
            Verdict::Violated => "VIOLATED",
            Verdict::Unknown(r) => return write!(f, "UNKNOWN ({r})"),
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckStats {
    pub bound_schedule: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness_steps: Option<usize>,
    pub bmc_ms: u64,
    pub cegar_ms: u64,
    pub cegar_iterations: usize,
    pub predicates: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bmc_verdict: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cegar_verdict: Option<String>,
    pub total_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub kind: CheckKind,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<HybridTrace>,
    /// Requirement ids jointly responsible for a negative verdict.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub culprit_core: Option<BTreeSet<String>>,
    /// False when minimization of the core was cut short by unknowns.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub core_minimal: Option<bool>,
    pub stats: CheckStats,
    /// Discrete witness over all system variables.
    #[serde(skip)]
    pub lasso: Option<Lasso>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckConfig {
    pub solve: SolveConfig,
    pub expansion_limit: usize,
    /// Minimize cores of negative verdicts.
    pub cores: bool,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig { solve: SolveConfig::default(), expansion_limit: DEFAULT_EXPANSION_LIMIT, cores: true }
    }
}

/// Front-end problem in one constraint of a requirement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintDiagnostic {
    pub requirement: String,
    /// Position of the constraint within its requirement.
    pub index: usize,
    pub start: usize,
    pub end: usize,
    pub message: String,
}

impl fmt::Display for ConstraintDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}] at {}: {}", self.requirement, self.index, Span::new(self.start, self.end), self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CheckError {
    #[error("{}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n"))]
    Front(Vec<ConstraintDiagnostic>),
    #[error("unknown id {0}")]
    UnknownId(String),
    #[error("category mismatch: {id} is a {found}, expected a {expected}")]
    CategoryMismatch { id: String, expected: Category, found: Category },
    #[error(transparent)]
    Ground(#[from] GroundError),
    #[error(transparent)]
    Discretize(#[from] DiscretizeError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Trace(#[from] TraceError),
}

/// Parses and typechecks every constraint of every requirement, collecting
/// all diagnostics.
pub fn parse_all(project: &Project) -> Result<BTreeMap<String, Vec<Constraint>>, Vec<ConstraintDiagnostic>> {
    let mut out = BTreeMap::new();
    let mut diags = Vec::new();
    for r in &project.requirements {
        let mut cs = Vec::new();
        for (index, src) in r.constraints.iter().enumerate() {
            match parse_typed(src, &project.signature) {
                Ok(formula) => cs.push(Constraint { requirement: r.id.clone(), source: src.clone(), formula }),
                Err(e) => diags.push(ConstraintDiagnostic {
                    requirement: r.id.clone(),
                    index,
                    start: e.span.start,
                    end: e.span.end,
                    message: e.message(),
                }),
            }
        }
        out.insert(r.id.clone(), cs);
    }
    if diags.is_empty() {
        Ok(out)
    } else {
        Err(diags)
    }
}

/// System compiled from a set of constraints.
#[derive(Debug, Clone)]
pub struct Compiled {
    pub ground: GroundProblem,
    pub fts: Fts,
}

pub fn compile_ground(g: &GroundProblem) -> Result<Fts, CheckError> {
    Ok(compile_ltl(&to_discrete(g)?))
}

pub fn compile_constraints(constraints: &[Constraint], project: &Project, cfg: &CheckConfig) -> Result<Compiled, CheckError> {
    let ground = instantiate_all(constraints, &project.signature, &project.bounds, cfg.expansion_limit)?;
    let fts = compile_ground(&ground)?;
    Ok(Compiled { ground, fts })
}

/// Deletion-based minimization: `unsat(subset)` answers `Some(true)` when
/// the subset is proved contradictory, `Some(false)` when it is satisfiable
/// and `None` when undecided. Returns the reduced set and whether every
/// removal test was conclusive.
pub fn minimize_core<E>(
    ids: &BTreeSet<String>,
    mut unsat: impl FnMut(&BTreeSet<String>) -> Result<Option<bool>, E>,
) -> Result<(BTreeSet<String>, bool), E> {
    let mut core = ids.clone();
    let mut minimal = true;
    for id in ids {
        let mut trial = core.clone();
        trial.remove(id);
        match unsat(&trial)? {
            Some(true) => core = trial,
            Some(false) => {}
            None => minimal = false,
        }
    }
    Ok((core, minimal))
}

fn requirement_constraints(parsed: &BTreeMap<String, Vec<Constraint>>, project: &Project) -> Vec<Constraint> {
    project.by_category(Category::Requirement).flat_map(|r| parsed[&r.id].iter().cloned()).collect()
}

fn lookup<'p>(project: &'p Project, id: &str, expected: Category) -> Result<&'p crate::project::Requirement, CheckError> {
    let r = project.requirement(id).ok_or_else(|| CheckError::UnknownId(id.to_string()))?;
    if r.category != expected {
        return Err(CheckError::CategoryMismatch { id: id.to_string(), expected, found: r.category });
    }
    Ok(r)
}

struct Run {
    outcome: SolveOutcome,
    compiled: Compiled,
}

fn run(constraints: &[Constraint], project: &Project, cfg: &CheckConfig) -> Result<Run, CheckError> {
    let compiled = compile_constraints(constraints, project, cfg)?;
    let outcome = solve_formula(&compiled.fts, &cfg.solve)?;
    Ok(Run { outcome, compiled })
}

fn result(kind: CheckKind, verdict: Verdict, run: &Run, started: Instant, cfg: &CheckConfig) -> Result<CheckResult, CheckError> {
    let s = &run.outcome.stats;
    let stats = CheckStats {
        bound_schedule: cfg.solve.bmc.schedule.clone(),
        witness_steps: s.witness_steps,
        bmc_ms: s.bmc_time.as_millis() as u64,
        cegar_ms: s.cegar_time.as_millis() as u64,
        cegar_iterations: s.cegar.iterations,
        predicates: s.cegar.predicates,
        bmc_verdict: s.bmc_verdict.clone(),
        cegar_verdict: s.cegar_verdict.clone(),
        total_ms: 0,
    };
    let (witness, lasso) = match &run.outcome.verdict {
        SolveVerdict::Sat(l) => (Some(lift_trace(l, &run.compiled.ground)?), Some(l.clone())),
        _ => (None, None),
    };
    let mut r = CheckResult { kind, verdict, witness, culprit_core: None, core_minimal: None, stats, lasso };
    r.stats.total_ms = started.elapsed().as_millis() as u64;
    Ok(r)
}

/// Core of a contradictory constraint set at requirement granularity.
fn core_of(run: &Run, candidates: &BTreeSet<String>, cfg: &CheckConfig) -> Result<(BTreeSet<String>, bool), CheckError> {
    let g = &run.compiled.ground;
    minimize_core(candidates, |subset| {
        let fts = compile_ground(&g.restrict(subset))?;
        Ok::<_, CheckError>(match solve_formula(&fts, &cfg.solve)?.verdict {
            SolveVerdict::Unsat => Some(true),
            SolveVerdict::Sat(_) => Some(false),
            SolveVerdict::Unknown(_) => None,
        })
    })
}

fn origins(constraints: &[Constraint]) -> BTreeSet<String> {
    constraints.iter().map(|c| c.requirement.clone()).collect()
}

fn unknown(v: &SolveVerdict) -> Verdict {
    match v {
        SolveVerdict::Unknown(r) => Verdict::Unknown(r.clone()),
        _ => unreachable!("conclusive verdict"),
    }
}

fn contradiction_check(
    kind: CheckKind,
    constraints: Vec<Constraint>,
    project: &Project,
    cfg: &CheckConfig,
    (pos, neg): (Verdict, Verdict),
) -> Result<CheckResult, CheckError> {
    let started = Instant::now();
    let run = run(&constraints, project, cfg)?;
    let verdict = match &run.outcome.verdict {
        SolveVerdict::Sat(_) => pos,
        SolveVerdict::Unsat => neg,
        v => unknown(v),
    };
    let negative = verdict.is_negative();
    let mut r = result(kind, verdict, &run, started, cfg)?;
    if negative && cfg.cores {
        let (core, minimal) = core_of(&run, &origins(&constraints), cfg)?;
        r.culprit_core = Some(core);
        r.core_minimal = Some(minimal);
        r.stats.total_ms = started.elapsed().as_millis() as u64;
    }
    Ok(r)
}

/// The constraints a check solves: the requirements, plus the scenario, or
/// plus the negated property (attributed to the property id).
pub fn check_constraints(project: &Project, kind: &CheckKind) -> Result<Vec<Constraint>, CheckError> {
    if let CheckKind::Scenario(id) | CheckKind::Property(id) = kind {
        let expected = if matches!(kind, CheckKind::Scenario(_)) { Category::Scenario } else { Category::Property };
        lookup(project, id, expected)?;
    }
    let parsed = parse_all(project).map_err(CheckError::Front)?;
    let mut constraints = requirement_constraints(&parsed, project);
    match kind {
        CheckKind::Consistency => {}
        CheckKind::Scenario(id) => constraints.extend(parsed[id].iter().cloned()),
        CheckKind::Property(id) => {
            let property = parsed[id].iter().map(|c| c.formula.clone()).reduce(Formula::and).unwrap_or(Formula::True);
            let source = project.requirement(id).map(|r| r.constraints.join(" and ")).unwrap_or_default();
            constraints.push(Constraint { requirement: id.clone(), source, formula: Formula::not(property) });
        }
    }
    Ok(constraints)
}

/// Satisfiability of the conjunction of all `requirement` constraints.
pub fn check_consistency(project: &Project, cfg: &CheckConfig) -> Result<CheckResult, CheckError> {
    let constraints = check_constraints(project, &CheckKind::Consistency)?;
    contradiction_check(CheckKind::Consistency, constraints, project, cfg, (Verdict::Consistent, Verdict::Inconsistent))
}

/// Satisfiability of the requirements together with one scenario.
pub fn check_scenario(project: &Project, id: &str, cfg: &CheckConfig) -> Result<CheckResult, CheckError> {
    let constraints = check_constraints(project, &CheckKind::Scenario(id.into()))?;
    contradiction_check(CheckKind::Scenario(id.into()), constraints, project, cfg, (Verdict::Possible, Verdict::Impossible))
}

/// Unsatisfiability of the requirements together with the negated property.
pub fn check_property(project: &Project, id: &str, cfg: &CheckConfig) -> Result<CheckResult, CheckError> {
    let started = Instant::now();
    let constraints = check_constraints(project, &CheckKind::Property(id.into()))?;
    let run = run(&constraints, project, cfg)?;
    let verdict = match &run.outcome.verdict {
        SolveVerdict::Sat(_) => Verdict::Violated,
        SolveVerdict::Unsat => Verdict::Entailed,
        v => unknown(v),
    };
    result(CheckKind::Property(id.into()), verdict, &run, started, cfg)
}

/// Every check of the project: consistency, then each scenario and each
/// property in declaration order, run on up to `jobs` threads.
pub fn check_all(project: &Project, cfg: &CheckConfig, jobs: usize) -> Vec<(CheckKind, Result<CheckResult, CheckError>)> {
    let mut kinds = vec![CheckKind::Consistency];
    kinds.extend(project.by_category(Category::Scenario).map(|r| CheckKind::Scenario(r.id.clone())));
    kinds.extend(project.by_category(Category::Property).map(|r| CheckKind::Property(r.id.clone())));
    let one = |k: &CheckKind| match k {
        CheckKind::Consistency => check_consistency(project, cfg),
        CheckKind::Scenario(id) => check_scenario(project, id, cfg),
        CheckKind::Property(id) => check_property(project, id, cfg),
    };
    let jobs = jobs.max(1);
    let mut results: Vec<Option<Result<CheckResult, CheckError>>> = (0..kinds.len()).map(|_| None).collect();
    for (chunk_kinds, chunk_results) in kinds.chunks(jobs).zip(results.chunks_mut(jobs)) {
        std::thread::scope(|s| {
            let handles: Vec<_> = chunk_kinds.iter().map(|k| s.spawn(move || one(k))).collect();
            for (slot, h) in chunk_results.iter_mut().zip(handles) {
                *slot = Some(h.join().expect("check panicked"));
            }
        });
    }
    kinds.into_iter().zip(results.into_iter().map(|r| r.expect("every check ran"))).collect()
}
