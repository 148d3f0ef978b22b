use std::fmt;

use crate::discretize::SVar;
use crate::expr::Expr;
use crate::ground::GroundDomain;

pub type Domain = GroundDomain;

/// Why a variable exists; used for dumps and for projections.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarRole {
    /// Ground state variable of the problem.
    State,
    /// Step-model variable (`@flow`, `@delta`).
    Step,
    /// Elementary variable of an `X` or `U` subformula.
    Elementary,
    /// Obligation or breakpoint bit of a SERE automaton.
    Obligation,
    /// Stands for an atom over current and next state.
    TransitionAtom,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FtsVar {
    pub name: String,
    pub domain: Domain,
    pub role: VarRole,
}

impl FtsVar {
    pub fn is_finite(&self) -> bool {
        match &self.domain {
            Domain::Boolean | Domain::Enumeration(_) => true,
            Domain::Integer { lo, hi } => lo.is_some() && hi.is_some(),
            Domain::Real(_) => false,
        }
    }
}

/// Fair transition system: `init` over current variables, `trans` over
/// current and next, and justice constraints over current variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fts {
    pub vars: Vec<FtsVar>,
    pub init: Expr<SVar>,
    pub trans: Expr<SVar>,
    pub fairness: Vec<Expr<SVar>>,
}

impl Fts {
    pub fn var(&self, name: &str) -> Option<&FtsVar> {
        self.vars.iter().find(|v| v.name == name)
    }

    pub fn count(&self, role: VarRole) -> usize {
        self.vars.iter().filter(|v| v.role == role).count()
    }
}

impl fmt::Display for Fts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "VARIABLES")?;
        for v in &self.vars {
            let dom = match &v.domain {
                Domain::Boolean => "bool".to_string(),
                Domain::Enumeration(labels) => format!("{{{}}}", labels.join(", ")),
                Domain::Integer { lo, hi } => format!(
                    "int[{}, {}]",
                    lo.map_or("-inf".into(), |x| x.to_string()),
                    hi.map_or("inf".into(), |x| x.to_string())
                ),
                Domain::Real(kind) => format!("real ({kind:?})").to_lowercase(),
            };
            writeln!(f, "  {} : {dom}  -- {:?}", v.name, v.role)?;
        }
        writeln!(f, "INIT\n  {}", self.init)?;
        writeln!(f, "TRANS\n  {}", self.trans)?;
        writeln!(f, "FAIRNESS")?;
        for c in &self.fairness {
            writeln!(f, "  {c}")?;
        }
        Ok(())
    }
}

/// Replaces current-state variables by their next-state copies.
pub fn prime(e: &Expr<SVar>) -> Expr<SVar> {
    e.map_vars(&mut |v| {
        debug_assert!(!v.next, "priming a next-state expression");
        v.primed()
    })
}

pub fn mentions_next(e: &Expr<SVar>) -> bool {
    e.vars().iter().any(|v| v.next)
}
