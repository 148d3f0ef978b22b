//! Reduction of hybrid satisfiability to discrete-time satisfiability.
//!
//! Each state carries the step model of the step that leaves it: a flag
//! `@flow` (flow vs. jump) and the duration `@delta`. Derivatives are
//! constant within a flow step, so `der(x)` equals `(x' - x) / delta`.
//! A derivative atom `sum a_i der(x_i) + c ~ 0` is therefore rewritten,
//! after multiplying by the positive duration, into the linear transition
//! atom `flow & sum a_i (x_i' - x_i) + c delta ~ 0`; no derivative variables
//! are needed and the flow law holds by construction.

use std::collections::BTreeMap;
use std::fmt;

use num::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::expr::{CmpOp, Expr, Lin, Value};
use crate::ground::{GRef, GroundDomain, GroundProblem, Mode};
use crate::ltl::Ltl;
use crate::project::RealKind;
use crate::rational::{fmt_q, parse_q, Q};

pub const FLOW: &str = "@flow";
pub const DELTA: &str = "@delta";

/// Variable of the discrete problem, current or next state.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SVar {
    pub name: String,
    pub next: bool,
}

impl SVar {
    pub fn cur(name: &str) -> Self {
        SVar { name: name.to_string(), next: false }
    }

    pub fn next(name: &str) -> Self {
        SVar { name: name.to_string(), next: true }
    }

    pub fn primed(&self) -> Self {
        SVar { name: self.name.clone(), next: true }
    }

    pub fn unprimed(&self) -> Self {
        SVar { name: self.name.clone(), next: false }
    }
}

impl fmt::Display for SVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.next {
            write!(f, "{}'", self.name)
        } else {
            write!(f, "{}", self.name)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DVar {
    pub name: String,
    pub domain: GroundDomain,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepModel {
    pub flow: String,
    pub delta: String,
    pub continuous: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscreteProblem {
    /// Ground state variables followed by the step-model variables.
    pub vars: Vec<DVar>,
    pub step: Option<StepModel>,
    /// Rewritten user formula.
    pub formula: Ltl<SVar>,
    /// Frame and flow axioms, required on every step.
    pub axioms: Expr<SVar>,
}

impl DiscreteProblem {
    /// `formula & always axioms`.
    pub fn full_formula(&self) -> Ltl<SVar> {
        Ltl::and([self.formula.clone(), Ltl::always(Ltl::atom(self.axioms.clone()))])
    }

    pub fn var(&self, name: &str) -> Option<&DVar> {
        self.vars.iter().find(|v| v.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DiscretizeError {
    #[error("atom mixing der and next: {0}")]
    DerWithNext(String),
    #[error("nonlinear ground atom: {0}")]
    Nonlinear(String),
}

pub fn to_discrete(g: &GroundProblem) -> Result<DiscreteProblem, DiscretizeError> {
    let mut vars: Vec<DVar> = g.vars.iter().map(|v| DVar { name: v.name.clone(), domain: v.domain.clone() }).collect();
    let continuous: Vec<String> = g.vars.iter().filter(|v| v.is_continuous()).map(|v| v.name.clone()).collect();
    let formula = g.formula().try_map_atoms(&mut |e| convert(e))?;
    if continuous.is_empty() {
        return Ok(DiscreteProblem { vars, step: None, formula, axioms: Expr::True });
    }
    vars.push(DVar { name: FLOW.into(), domain: GroundDomain::Boolean });
    vars.push(DVar { name: DELTA.into(), domain: GroundDomain::Real(RealKind::Discrete) });
    let flow = Expr::Var(SVar::cur(FLOW));
    let delta = Lin::var(SVar::cur(DELTA));
    let mut frame = Vec::new();
    for v in &g.vars {
        if v.is_continuous() {
            continue;
        }
        frame.push(match v.domain {
            GroundDomain::Boolean => Expr::iff(Expr::Var(SVar::next(&v.name)), Expr::Var(SVar::cur(&v.name))),
            _ => Expr::compare(Lin::var(SVar::next(&v.name)), CmpOp::Eq, &Lin::var(SVar::cur(&v.name))),
        });
    }
    let axioms = Expr::and([
        Expr::cmp(delta.clone(), CmpOp::Ge),
        Expr::implies(flow.clone(), Expr::and(std::iter::once(Expr::cmp(delta.clone(), CmpOp::Gt)).chain(frame))),
        Expr::implies(Expr::not(flow), Expr::cmp(delta, CmpOp::Eq)),
    ]);
    Ok(DiscreteProblem {
        vars,
        step: Some(StepModel { flow: FLOW.into(), delta: DELTA.into(), continuous }),
        formula,
        axioms,
    })
}

fn convert(e: &Expr<GRef>) -> Result<Expr<SVar>, DiscretizeError> {
    Ok(match e {
        Expr::True => Expr::True,
        Expr::False => Expr::False,
        Expr::Var(r) => Expr::Var(SVar { name: r.var.clone(), next: r.mode == Mode::Next }),
        Expr::Cmp(lin, op) => convert_atom(lin, *op)?,
        Expr::Not(a) => Expr::not(convert(a)?),
        Expr::And(xs) => Expr::and(xs.iter().map(convert).collect::<Result<Vec<_>, _>>()?),
        Expr::Or(xs) => Expr::or(xs.iter().map(convert).collect::<Result<Vec<_>, _>>()?),
        Expr::Iff(a, b) => Expr::iff(convert(a)?, convert(b)?),
    })
}

fn convert_atom(lin: &Lin<GRef>, op: CmpOp) -> Result<Expr<SVar>, DiscretizeError> {
    let has = |m: Mode| lin.terms.keys().any(|r| r.mode == m);
    if !has(Mode::Der) {
        let out = lin.map_vars(&mut |r| SVar { name: r.var.clone(), next: r.mode == Mode::Next });
        return Ok(Expr::cmp(out, op));
    }
    let shown = || format!("{lin} {} 0", op.symbol());
    if has(Mode::Next) {
        return Err(DiscretizeError::DerWithNext(shown()));
    }
    if has(Mode::Cur) {
        return Err(DiscretizeError::Nonlinear(shown()));
    }
    let mut out = Lin::term(SVar::cur(DELTA), lin.constant.clone());
    for (r, a) in &lin.terms {
        out.add_term(SVar::next(&r.var), a.clone());
        out.add_term(SVar::cur(&r.var), -a.clone());
    }
    Ok(Expr::and([Expr::Var(SVar::cur(FLOW)), Expr::cmp(out, op)]))
}

/// Discrete lasso: `states[k]` repeats `states[loop_start]`, so there are
/// `states.len() - 1` steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lasso {
    pub states: Vec<BTreeMap<String, Value>>,
    pub loop_start: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    Flow,
    Jump,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TraceValue {
    Bool(bool),
    Text(String),
}

impl fmt::Display for TraceValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceValue::Bool(b) => write!(f, "{b}"),
            TraceValue::Text(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HybridStep {
    pub kind: StepKind,
    pub delta: String,
    #[serde(default)]
    pub ders: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HybridTrace {
    pub states: Vec<BTreeMap<String, TraceValue>>,
    pub steps: Vec<HybridStep>,
    pub loop_start: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TraceError {
    #[error("invariant violation: {0}")]
    Invariant(String),
    #[error("malformed trace: {0}")]
    Malformed(String),
}

fn invariant(msg: impl Into<String>) -> TraceError {
    TraceError::Invariant(msg.into())
}

fn num_at(state: &BTreeMap<String, Value>, name: &str) -> Q {
    state.get(name).and_then(|v| v.as_num().cloned()).unwrap_or_else(Q::zero)
}

/// Renders a discrete lasso as a hybrid trace, checking the step laws.
pub fn lift_trace(t: &Lasso, g: &GroundProblem) -> Result<HybridTrace, TraceError> {
    if t.states.len() < 2 || t.loop_start + 1 >= t.states.len() {
        return Err(TraceError::Malformed("lasso needs a loop start before its last state".into()));
    }
    let mut states = Vec::with_capacity(t.states.len());
    for s in &t.states {
        let mut out = BTreeMap::new();
        for v in &g.vars {
            let val = s.get(&v.name);
            let rendered = match &v.domain {
                GroundDomain::Boolean => TraceValue::Bool(val.and_then(Value::as_bool).unwrap_or(false)),
                GroundDomain::Enumeration(labels) => {
                    let i = val.and_then(Value::as_num).map(|q| q.to_integer()).unwrap_or_default();
                    let label = usize::try_from(i)
                        .ok()
                        .and_then(|i| labels.get(i))
                        .ok_or_else(|| invariant(format!("{} outside its enumeration", v.name)))?;
                    TraceValue::Text(label.clone())
                }
                GroundDomain::Integer { .. } | GroundDomain::Real(_) => TraceValue::Text(fmt_q(&num_at(s, &v.name))),
            };
            out.insert(v.name.clone(), rendered);
        }
        states.push(out);
    }
    let mut steps = Vec::with_capacity(t.states.len() - 1);
    for j in 0..t.states.len() - 1 {
        let (s, s2) = (&t.states[j], &t.states[j + 1]);
        let flow = s.get(FLOW).and_then(Value::as_bool).unwrap_or(false);
        let delta = num_at(s, DELTA);
        let mut ders = BTreeMap::new();
        if flow {
            for v in g.vars.iter().filter(|v| v.is_continuous()) {
                if delta.is_positive() {
                    ders.insert(v.name.clone(), fmt_q(&((num_at(s2, &v.name) - num_at(s, &v.name)) / &delta)));
                }
            }
        }
        steps.push(HybridStep { kind: if flow { StepKind::Flow } else { StepKind::Jump }, delta: fmt_q(&delta), ders });
    }
    let trace = HybridTrace { states, steps, loop_start: t.loop_start };
    check_laws(&trace, g)?;
    Ok(trace)
}

/// Direct check of the step laws on a hybrid trace: flows have positive
/// duration, leave discrete variables unchanged and move continuous ones by
/// `der * delta`; jumps take no time.
pub fn check_laws(t: &HybridTrace, g: &GroundProblem) -> Result<(), TraceError> {
    if t.steps.len() + 1 != t.states.len() {
        return Err(TraceError::Malformed("expected one step between consecutive states".into()));
    }
    if t.loop_start >= t.steps.len() {
        return Err(TraceError::Malformed("loop start out of range".into()));
    }
    let q = |s: &str| parse_q(s).map_err(|e| TraceError::Malformed(e.to_string()));
    let text = |v: Option<&TraceValue>| v.map(ToString::to_string).unwrap_or_default();
    for (j, step) in t.steps.iter().enumerate() {
        let delta = q(&step.delta)?;
        let (s, s2) = (&t.states[j], &t.states[j + 1]);
        match step.kind {
            StepKind::Jump => {
                if !delta.is_zero() {
                    return Err(invariant(format!("jump with nonzero duration at step {j}")));
                }
            }
            StepKind::Flow => {
                if !delta.is_positive() {
                    return Err(invariant("flow with zero duration"));
                }
                for v in &g.vars {
                    if v.is_continuous() {
                        let der = step.ders.get(&v.name).map(|d| q(d)).transpose()?.unwrap_or_else(Q::zero);
                        let (x, x2) = (q(&text(s.get(&v.name)))?, q(&text(s2.get(&v.name)))?);
                        if x2 != x + der * &delta {
                            return Err(invariant(format!("flow law broken for {} at step {j}", v.name)));
                        }
                    } else if s.get(&v.name) != s2.get(&v.name) {
                        return Err(invariant(format!("discrete change of {} during flow at step {j}", v.name)));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Step-law check for a trace file on its own: variables with a derivative
/// entry in some flow step count as continuous.
pub fn check_trace(t: &HybridTrace) -> Result<(), TraceError> {
    let continuous: std::collections::BTreeSet<&String> = t.steps.iter().flat_map(|s| s.ders.keys()).collect();
    let names: std::collections::BTreeSet<&String> = t.states.iter().flat_map(|s| s.keys()).collect();
    let vars = names
        .into_iter()
        .map(|n| crate::ground::GroundVar {
            name: n.clone(),
            domain: if continuous.contains(n) { GroundDomain::Real(RealKind::Continuous) } else { GroundDomain::Boolean },
        })
        .collect();
    check_laws(t, &GroundProblem { vars, conjuncts: Vec::new() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground::{GroundConjunct, GroundVar};
    use crate::rational::int;

    fn problem(formula: Ltl<GRef>) -> GroundProblem {
        GroundProblem {
            vars: vec![
                GroundVar { name: "x".into(), domain: GroundDomain::Real(RealKind::Continuous) },
                GroundVar { name: "b".into(), domain: GroundDomain::Boolean },
            ],
            conjuncts: vec![GroundConjunct { origin: "R".into(), formula }],
        }
    }

    fn der_ge_one() -> Ltl<GRef> {
        Ltl::Atom(Expr::cmp(Lin::var(GRef::der("x")).plus(&Lin::constant(int(-1))), CmpOp::Ge))
    }

    #[test]
    fn der_atom_forces_flow() {
        let d = to_discrete(&problem(der_ge_one())).unwrap();
        let mut lin = Lin::term(SVar::cur(DELTA), int(-1));
        lin.add_term(SVar::next("x"), int(1));
        lin.add_term(SVar::cur("x"), int(-1));
        assert_eq!(d.formula, Ltl::Atom(Expr::and([Expr::Var(SVar::cur(FLOW)), Expr::cmp(lin, CmpOp::Ge)])));
        assert!(d.step.is_some());
    }

    #[test]
    fn mixing_der_and_state_is_rejected() {
        let mut lin = Lin::var(GRef::der("x"));
        lin.add_term(GRef::next("x"), int(1));
        let err = to_discrete(&problem(Ltl::Atom(Expr::cmp(lin, CmpOp::Ge)))).unwrap_err();
        assert!(matches!(err, DiscretizeError::DerWithNext(_)));
        let mut lin = Lin::var(GRef::der("x"));
        lin.add_term(GRef::cur("x"), int(1));
        let err = to_discrete(&problem(Ltl::Atom(Expr::cmp(lin, CmpOp::Ge)))).unwrap_err();
        assert!(err.to_string().starts_with("nonlinear ground atom"));
    }

    fn state(x: i64, flow: bool, delta: i64) -> BTreeMap<String, Value> {
        [
            ("x".to_string(), Value::Num(int(x))),
            ("b".to_string(), Value::Bool(false)),
            (FLOW.to_string(), Value::Bool(flow)),
            (DELTA.to_string(), Value::Num(int(delta))),
        ]
        .into_iter()
        .collect()
    }

    #[test]
    fn lift_flow_steps() {
        let g = problem(der_ge_one());
        let lasso = Lasso { states: vec![state(0, true, 1), state(1, true, 1), state(2, false, 0), state(2, false, 0)], loop_start: 2 };
        let h = lift_trace(&lasso, &g).unwrap();
        assert_eq!(h.steps[0].kind, StepKind::Flow);
        assert_eq!(h.steps[1].ders["x"], "1");
        assert_eq!(h.states[2]["x"], TraceValue::Text("2".into()));
    }

    #[test]
    fn zero_duration_flow_is_an_error() {
        let g = problem(der_ge_one());
        let lasso = Lasso { states: vec![state(0, true, 0), state(0, true, 0)], loop_start: 0 };
        let err = lift_trace(&lasso, &g).unwrap_err();
        assert_eq!(err.to_string(), "invariant violation: flow with zero duration");
    }

    #[test]
    fn single_state_jump_loop() {
        let g = problem(Ltl::True);
        let lasso = Lasso { states: vec![state(0, false, 0), state(0, false, 0)], loop_start: 0 };
        let h = lift_trace(&lasso, &g).unwrap();
        assert_eq!(h.steps.len(), 1);
        assert_eq!(h.steps[0].kind, StepKind::Jump);
        assert_eq!(h.steps[0].delta, "0");
    }
}
