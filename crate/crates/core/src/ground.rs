//! Finite instantiation: quantifiers are expanded over the bounded object
//! population of each class and attribute accesses become flat state
//! variables named `Class#i.attr` (objects are numbered from 1).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::expr::{CmpOp, Expr, Lin};
use crate::lang::{desugar, Constraint, Formula, Quantifier, Sere, Term};
use crate::ltl::Ltl;
use crate::project::{AttrType, RealKind, Signature};
use crate::rational::{int, Q};

pub const DEFAULT_EXPANSION_LIMIT: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroundError {
    #[error("missing bound {0}")]
    MissingBound(String),
    #[error("expansion exceeds the limit of {0} ground nodes")]
    ExpansionLimit(usize),
    #[error("ill-typed constraint reached grounding: {0}")]
    IllTyped(String),
}

/// How a ground variable occurs in an atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    Cur,
    Next,
    Der,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GRef {
    pub var: String,
    pub mode: Mode,
}

impl GRef {
    pub fn cur(var: &str) -> Self {
        GRef { var: var.to_string(), mode: Mode::Cur }
    }

    pub fn next(var: &str) -> Self {
        GRef { var: var.to_string(), mode: Mode::Next }
    }

    pub fn der(var: &str) -> Self {
        GRef { var: var.to_string(), mode: Mode::Der }
    }
}

impl fmt::Display for GRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.mode {
            Mode::Cur => write!(f, "{}", self.var),
            Mode::Next => write!(f, "{}'", self.var),
            Mode::Der => write!(f, "der({})", self.var),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroundDomain {
    Boolean,
    /// Values are encoded by their position in the label list.
    Enumeration(Vec<String>),
    Integer { lo: Option<i64>, hi: Option<i64> },
    Real(RealKind),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundVar {
    pub name: String,
    pub domain: GroundDomain,
}

impl GroundVar {
    pub fn is_continuous(&self) -> bool {
        self.domain == GroundDomain::Real(RealKind::Continuous)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundConjunct {
    /// Requirement that produced this conjunct.
    pub origin: String,
    pub formula: Ltl<GRef>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundProblem {
    pub vars: Vec<GroundVar>,
    pub conjuncts: Vec<GroundConjunct>,
}

impl GroundProblem {
    pub fn formula(&self) -> Ltl<GRef> {
        Ltl::and(self.conjuncts.iter().map(|c| c.formula.clone()).collect::<Vec<_>>())
    }

    pub fn var(&self, name: &str) -> Option<&GroundVar> {
        self.vars.iter().find(|v| v.name == name)
    }

    pub fn size(&self) -> usize {
        self.conjuncts.iter().map(|c| c.formula.size()).sum()
    }

    /// Restriction to the conjuncts whose origin is in `ids`.
    pub fn restrict(&self, ids: &BTreeSet<String>) -> GroundProblem {
        let conjuncts: Vec<_> = self.conjuncts.iter().filter(|c| ids.contains(&c.origin)).cloned().collect();
        let used: BTreeSet<String> = conjuncts.iter().flat_map(|c| c.formula.vars()).map(|r| r.var).collect();
        GroundProblem { vars: self.vars.iter().filter(|v| used.contains(&v.name)).cloned().collect(), conjuncts }
    }
}

impl fmt::Display for GroundProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.vars {
            writeln!(f, "var {} : {:?}", v.name, v.domain)?;
        }
        for c in &self.conjuncts {
            writeln!(f, "[{}] {}", c.origin, c.formula)?;
        }
        Ok(())
    }
}

/// Splits the variables into (discrete, continuous).
pub fn free_vars(g: &GroundProblem) -> (Vec<&GroundVar>, Vec<&GroundVar>) {
    g.vars.iter().partition(|v| !v.is_continuous())
}

pub fn var_name(class: &str, index: u32, attr: &str) -> String {
    format!("{class}#{index}.{attr}")
}

pub fn object_name(class: &str, index: u32) -> String {
    format!("{class}#{index}")
}

/// Grounds a single formula; the conjunct origin is left empty.
pub fn instantiate(f: &Formula, sig: &Signature, bounds: &BTreeMap<String, u32>) -> Result<GroundProblem, GroundError> {
    let c = Constraint { requirement: String::new(), source: String::new(), formula: f.clone() };
    instantiate_all(std::slice::from_ref(&c), sig, bounds, DEFAULT_EXPANSION_LIMIT)
}

/// Grounds a list of constraints, recording the owning requirement of each.
pub fn instantiate_all(
    constraints: &[Constraint],
    sig: &Signature,
    bounds: &BTreeMap<String, u32>,
    limit: usize,
) -> Result<GroundProblem, GroundError> {
    let mut g = Grounder { sig, bounds, limit, nodes: 0, vars: BTreeMap::new(), env: Vec::new() };
    let mut conjuncts = Vec::new();
    for c in constraints {
        let formula = g.formula(&desugar(&c.formula))?;
        conjuncts.push(GroundConjunct { origin: c.requirement.clone(), formula });
    }
    Ok(GroundProblem { vars: g.vars.into_values().collect(), conjuncts })
}

/// Grounded value of a term, tagged with its sort.
enum GTerm {
    Num(Lin<GRef>),
    Bool(Expr<GRef>),
    Enum(Vec<String>, Lin<GRef>),
    /// Object number (0 for null) of a reference-valued expression.
    Ref(Lin<GRef>),
    Sym(String),
    Obj(u32),
    Null,
}

struct Grounder<'a> {
    sig: &'a Signature,
    bounds: &'a BTreeMap<String, u32>,
    limit: usize,
    nodes: usize,
    vars: BTreeMap<String, GroundVar>,
    env: Vec<(String, String, u32)>,
}

fn ill(msg: impl Into<String>) -> GroundError {
    GroundError::IllTyped(msg.into())
}

impl Grounder<'_> {
    fn bound(&self, class: &str) -> Result<u32, GroundError> {
        self.bounds.get(class).copied().ok_or_else(|| GroundError::MissingBound(class.to_string()))
    }

    fn charge(&mut self, n: usize) -> Result<(), GroundError> {
        self.nodes += n;
        if self.nodes > self.limit {
            return Err(GroundError::ExpansionLimit(self.limit));
        }
        Ok(())
    }

    fn formula(&mut self, f: &Formula) -> Result<Ltl<GRef>, GroundError> {
        self.charge(1)?;
        Ok(match f {
            Formula::True => Ltl::True,
            Formula::False => Ltl::False,
            Formula::Prop(_) | Formula::Cmp(..) => Ltl::atom(self.atom(f)?),
            Formula::Not(a) => Ltl::not(self.formula(a)?),
            Formula::And(a, b) => Ltl::and([self.formula(a)?, self.formula(b)?]),
            Formula::Or(a, b) => Ltl::or([self.formula(a)?, self.formula(b)?]),
            Formula::Implies(a, b) => Ltl::or([Ltl::not(self.formula(a)?), self.formula(b)?]),
            Formula::Iff(a, b) => Ltl::iff(self.formula(a)?, self.formula(b)?),
            Formula::Next(a) => Ltl::next(self.formula(a)?),
            Formula::Until(a, b) => Ltl::until(self.formula(a)?, self.formula(b)?),
            Formula::Release(a, b) => {
                Ltl::not(Ltl::until(Ltl::not(self.formula(a)?), Ltl::not(self.formula(b)?)))
            }
            Formula::Always(a) => Ltl::always(self.formula(a)?),
            Formula::Eventually(a) => Ltl::eventually(self.formula(a)?),
            Formula::Quant { q, var, class, body } => {
                let n = self.bound(class)?;
                let mut parts = Vec::with_capacity(n as usize);
                for i in 1..=n {
                    self.env.push((var.clone(), class.clone(), i));
                    let part = self.formula(body);
                    self.env.pop();
                    parts.push(part?);
                }
                match q {
                    Quantifier::Forall => Ltl::and(parts),
                    Quantifier::Exists => Ltl::or(parts),
                }
            }
            Formula::StrongMatch(r) => Ltl::StrongSere(Box::new(self.sere(r)?)),
            Formula::SuffixImpl(r, g) => Ltl::SuffixImpl(Box::new(self.sere(r)?), Box::new(self.formula(g)?)),
            Formula::SuffixImplNext(r, g) => Ltl::SuffixImpl(
                Box::new(Sere::concat(self.sere(r)?, Sere::Letter(Expr::True))),
                Box::new(self.formula(g)?),
            ),
        })
    }

    fn sere(&mut self, r: &Sere<Formula>) -> Result<Sere<Expr<GRef>>, GroundError> {
        r.try_map(&mut |letter| {
            let g = self.formula(letter)?;
            g.to_expr().ok_or_else(|| ill("temporal operator inside a SERE letter"))
        })
    }

    fn atom(&mut self, f: &Formula) -> Result<Expr<GRef>, GroundError> {
        match f {
            Formula::Prop(t) => match self.term(t, Mode::Cur)? {
                GTerm::Bool(e) => Ok(e),
                _ => Err(ill("non-boolean term used as a formula")),
            },
            Formula::Cmp(a, op, b) => {
                let (ga, gb) = (self.term(a, Mode::Cur)?, self.term(b, Mode::Cur)?);
                self.compare(ga, *op, gb)
            }
            _ => unreachable!("atoms only"),
        }
    }

    fn compare(&self, a: GTerm, op: CmpOp, b: GTerm) -> Result<Expr<GRef>, GroundError> {
        use GTerm::*;
        let eq_only = |e: Expr<GRef>| match op {
            CmpOp::Eq => Ok(e),
            CmpOp::Ne => Ok(Expr::not(e)),
            _ => Err(ill("ordering comparison on a non-numeric sort")),
        };
        let lin_eq = |x: Lin<GRef>, y: &Lin<GRef>| Expr::compare(x, CmpOp::Eq, y);
        let sym_index = |labels: &[String], s: &str| {
            labels
                .iter()
                .position(|l| l == s)
                .map(|i| Lin::constant(int(i as i64)))
                .ok_or_else(|| ill(format!("symbol {s} is not a value of the enumeration")))
        };
        match (a, b) {
            (Num(x), Num(y)) => Ok(Expr::compare(x, op, &y)),
            (Bool(x), Bool(y)) => eq_only(Expr::iff(x, y)),
            (Enum(la, x), Enum(lb, y)) if la == lb => eq_only(lin_eq(x, &y)),
            (Enum(labels, x), Sym(s)) | (Sym(s), Enum(labels, x)) => eq_only(lin_eq(x, &sym_index(&labels, &s)?)),
            (Sym(s), Sym(t)) => eq_only(Expr::from_bool(s == t)),
            (Ref(x), Ref(y)) => eq_only(lin_eq(x, &y)),
            (Ref(x), Obj(i)) | (Obj(i), Ref(x)) => eq_only(lin_eq(x, &Lin::constant(int(i as i64)))),
            (Ref(x), Null) | (Null, Ref(x)) => eq_only(lin_eq(x, &Lin::zero())),
            (Obj(i), Obj(j)) => eq_only(Expr::from_bool(i == j)),
            (Obj(_), Null) | (Null, Obj(_)) => eq_only(Expr::False),
            (Null, Null) => eq_only(Expr::True),
            _ => Err(ill("comparison between incompatible sorts")),
        }
    }

    fn lookup(&self, v: &str) -> Result<(String, u32), GroundError> {
        self.env
            .iter()
            .rev()
            .find(|(name, _, _)| name == v)
            .map(|(_, c, i)| (c.clone(), *i))
            .ok_or_else(|| ill(format!("unbound variable {v}")))
    }

    fn declare(&mut self, name: &str, ty: &AttrType, kind: Option<RealKind>) -> Result<GroundDomain, GroundError> {
        if let Some(v) = self.vars.get(name) {
            return Ok(v.domain.clone());
        }
        let domain = match ty {
            AttrType::Boolean => GroundDomain::Boolean,
            AttrType::Enumeration(labels) => GroundDomain::Enumeration(labels.clone()),
            AttrType::Integer { lo, hi } => GroundDomain::Integer { lo: *lo, hi: *hi },
            AttrType::Real => GroundDomain::Real(kind.unwrap_or(RealKind::Discrete)),
            AttrType::Reference { target, nullable } => {
                let n = self.bound(target)?;
                let mut labels = Vec::new();
                if *nullable {
                    labels.push("null".to_string());
                }
                labels.extend((1..=n).map(|i| object_name(target, i)));
                GroundDomain::Enumeration(labels)
            }
        };
        self.vars.insert(name.to_string(), GroundVar { name: name.to_string(), domain: domain.clone() });
        Ok(domain)
    }

    fn term(&mut self, t: &Term, mode: Mode) -> Result<GTerm, GroundError> {
        Ok(match t {
            Term::Const(q) => GTerm::Num(Lin::constant(q.clone())),
            Term::Sym(s) => GTerm::Sym(s.clone()),
            Term::Null => GTerm::Null,
            Term::Obj(v) => GTerm::Obj(self.lookup(v)?.1),
            Term::Attr { obj, attr } => {
                let (class, i) = self.lookup(obj)?;
                let def = self.sig.class(&class).ok_or_else(|| ill(format!("unknown class {class}")))?;
                let a = def.attribute(attr).ok_or_else(|| ill(format!("unknown attribute {attr}")))?.clone();
                let name = var_name(&class, i, attr);
                self.declare(&name, &a.ty, a.kind)?;
                let r = GRef { var: name, mode };
                match &a.ty {
                    AttrType::Boolean if mode == Mode::Der => return Err(ill("der of a boolean")),
                    AttrType::Boolean => GTerm::Bool(Expr::Var(r)),
                    AttrType::Enumeration(labels) => GTerm::Enum(labels.clone(), Lin::var(r)),
                    AttrType::Integer { .. } | AttrType::Real => GTerm::Num(Lin::var(r)),
                    AttrType::Reference { nullable, .. } => {
                        let mut lin = Lin::var(r);
                        if !nullable {
                            lin.constant = Q::one();
                        }
                        GTerm::Ref(lin)
                    }
                }
            }
            Term::Add(a, b) | Term::Sub(a, b) => {
                let (x, y) = (self.num(a, mode)?, self.num(b, mode)?);
                GTerm::Num(if matches!(t, Term::Add(..)) { x.plus(&y) } else { x.minus(&y) })
            }
            Term::Scale(k, a) => GTerm::Num(self.num(a, mode)?.scaled(k)),
            Term::Next(a) => {
                if mode != Mode::Cur {
                    return Err(ill("nested next/der"));
                }
                self.term(a, Mode::Next)?
            }
            Term::Der(a) => {
                if mode != Mode::Cur {
                    return Err(ill("nested next/der"));
                }
                // Constants have zero derivative.
                let mut lin = self.num(a, Mode::Der)?;
                lin.constant = Q::zero();
                GTerm::Num(lin)
            }
        })
    }

    fn num(&mut self, t: &Term, mode: Mode) -> Result<Lin<GRef>, GroundError> {
        match self.term(t, mode)? {
            GTerm::Num(l) => Ok(l),
            _ => Err(ill("arithmetic on a non-numeric term")),
        }
    }
}
