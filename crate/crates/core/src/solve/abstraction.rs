//! Predicate abstraction of a fair transition system.
//!
//! Boolean variables are kept as they are. Every linear atom over one state
//! is tracked by a predicate bit `@b{i}`; every atom relating current and
//! next state (a transition atom) by a bit `@m{j}` describing the step that
//! leaves the state. The boolean skeleton of init/trans/fairness is kept
//! symbolically with atoms replaced by bits; the arithmetic content is
//! captured exactly by projecting, with ALLSAT, the concrete relation onto
//! the bits.

use std::collections::{BTreeMap, BTreeSet};

use num::{One, Signed};

use crate::automata::{Domain, Fts, FtsVar, VarRole};
use crate::discretize::SVar;
use crate::expr::{CmpOp, Expr, Lin};
use crate::smt::{all_models_projected, SmtConfig, SmtError, SmtProblem, Sort};

use super::bmc::{at, at_step, declare_steps};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Abstraction {
    /// Tracked state predicates (canonical atoms over current variables);
    /// predicate `i` is bit `@b{i}`.
    pub predicates: Vec<Expr<SVar>>,
    /// Tracked transition atoms; atom `j` is bit `@m{j}`.
    pub transition_atoms: Vec<Expr<SVar>>,
    /// Abstract system over booleans only.
    pub fts: Fts,
}

pub fn pred_bit(i: usize) -> String {
    format!("@b{i}")
}

pub fn trans_bit(j: usize) -> String {
    format!("@m{j}")
}

/// Canonical form of an atom: leading coefficient one, operator among
/// `=`, `<=`, `>=`; the flag tells whether the original atom is the
/// negation of the canonical one.
pub fn canonical_atom<V: Ord + Clone>(lin: &Lin<V>, op: CmpOp) -> (Expr<V>, bool) {
    let lead = lin.terms.values().next().cloned().unwrap_or_else(num::BigRational::one);
    let scale = lead.recip();
    let lin = lin.scaled(&scale);
    let op = if scale.is_negative() { op.flipped() } else { op };
    let (op, negated) = match op {
        CmpOp::Lt => (CmpOp::Ge, true),
        CmpOp::Gt => (CmpOp::Le, true),
        CmpOp::Ne => (CmpOp::Eq, true),
        op => (op, false),
    };
    (Expr::cmp(lin, op), negated)
}

fn canonical(e: &Expr<SVar>) -> Option<(Expr<SVar>, bool)> {
    match e {
        Expr::Cmp(lin, op) => Some(canonical_atom(lin, *op)),
        _ => None,
    }
}

enum AtomKind {
    Current,
    Next,
    Mixed,
}

fn kind(e: &Expr<SVar>) -> AtomKind {
    let vars = e.vars();
    match (vars.iter().any(|v| !v.next), vars.iter().any(|v| v.next)) {
        (_, false) => AtomKind::Current,
        (false, true) => AtomKind::Next,
        (true, true) => AtomKind::Mixed,
    }
}

fn unprime(e: &Expr<SVar>) -> Expr<SVar> {
    e.map_vars(&mut |v| v.unprimed())
}

/// Linear atoms of init, trans and fairness, as canonical state predicates
/// (next-state atoms unprimed); transition atoms are left out.
pub fn initial_predicates(fts: &Fts) -> Vec<Expr<SVar>> {
    let mut atoms = BTreeSet::new();
    fts.init.collect_atoms(&mut atoms);
    fts.trans.collect_atoms(&mut atoms);
    for c in &fts.fairness {
        c.collect_atoms(&mut atoms);
    }
    let mut out = Vec::new();
    for a in atoms {
        let a = match kind(&a) {
            AtomKind::Current => a,
            AtomKind::Next => unprime(&a),
            AtomKind::Mixed => continue,
        };
        if let Some((c, _)) = canonical(&a) {
            if !out.contains(&c) {
                out.push(c);
            }
        }
    }
    out
}

fn transition_atoms(fts: &Fts) -> Vec<Expr<SVar>> {
    let mut atoms = BTreeSet::new();
    fts.trans.collect_atoms(&mut atoms);
    let mut out = Vec::new();
    for a in atoms {
        if let AtomKind::Mixed = kind(&a) {
            let (c, _) = canonical(&a).expect("atom");
            if !out.contains(&c) {
                out.push(c);
            }
        }
    }
    out
}

struct Bits<'a> {
    preds: &'a [Expr<SVar>],
    trans: &'a [Expr<SVar>],
}

impl Bits<'_> {
    /// Replaces every atom by its bit.
    fn substitute(&self, e: &Expr<SVar>) -> Expr<SVar> {
        e.rewrite(&mut |node| {
            let Expr::Cmp(..) = node else { return None };
            let bit = match kind(node) {
                AtomKind::Current => {
                    let (c, neg) = canonical(node)?;
                    self.preds.iter().position(|p| *p == c).map(|i| (SVar::cur(&pred_bit(i)), neg))
                }
                AtomKind::Next => {
                    let (c, neg) = canonical(&unprime(node))?;
                    self.preds.iter().position(|p| *p == c).map(|i| (SVar::next(&pred_bit(i)), neg))
                }
                AtomKind::Mixed => {
                    let (c, neg) = canonical(node)?;
                    self.trans.iter().position(|p| *p == c).map(|j| (SVar::cur(&trans_bit(j)), neg))
                }
            };
            let (v, neg) = bit.expect("every atom is tracked");
            let b = Expr::Var(v);
            Some(if neg { Expr::not(b) } else { b })
        })
    }

    /// Declares `bit@step` and defines it by its predicate at `step`.
    fn link_state(&self, p: &mut SmtProblem, step: usize) {
        for (i, pred) in self.preds.iter().enumerate() {
            let b = at(&pred_bit(i), step);
            p.declare(b.clone(), Sort::Bool);
            p.assert(Expr::iff(Expr::Var(b), at_step(pred, step)));
        }
    }

    fn link_trans(&self, p: &mut SmtProblem, step: usize) {
        for (j, atom) in self.trans.iter().enumerate() {
            let m = at(&trans_bit(j), step);
            p.declare(m.clone(), Sort::Bool);
            p.assert(Expr::iff(Expr::Var(m), at_step(atom, step)));
        }
    }
}

/// Disjunction of the enumerated cubes; `bit@0` is the current and
/// `bit@1` the next copy of `bit`.
fn cubes_to_expr(models: &[BTreeMap<String, bool>]) -> Expr<SVar> {
    Expr::or(models.iter().map(|m| {
        Expr::and(m.iter().map(|(name, &val)| {
            let (base, step) = name.rsplit_once('@').expect("stepped name");
            let v = if step == "0" { SVar::cur(base) } else { SVar::next(base) };
            if val {
                Expr::Var(v)
            } else {
                Expr::not(Expr::Var(v))
            }
        }))
    }))
}

/// Builds the abstraction for `preds` together with all atoms of the system.
pub fn abstract_build(fts: &Fts, preds: &[Expr<SVar>], cfg: &SmtConfig, cap: usize) -> Result<Abstraction, SmtError> {
    let mut predicates: Vec<Expr<SVar>> = Vec::new();
    for p in preds.iter().cloned().chain(initial_predicates(fts)) {
        let Some((c, _)) = canonical(&p) else { continue };
        assert!(c.vars().iter().all(|v| !v.next), "predicates range over the current state");
        if !predicates.contains(&c) {
            predicates.push(c);
        }
    }
    let trans_atoms = transition_atoms(fts);
    let bits = Bits { preds: &predicates, trans: &trans_atoms };

    let mut vars: Vec<FtsVar> = fts.vars.iter().filter(|v| v.domain == Domain::Boolean).cloned().collect();
    vars.extend((0..predicates.len()).map(|i| FtsVar { name: pred_bit(i), domain: Domain::Boolean, role: VarRole::State }));
    vars.extend(
        (0..trans_atoms.len()).map(|j| FtsVar { name: trans_bit(j), domain: Domain::Boolean, role: VarRole::TransitionAtom }),
    );
    let state_bits: Vec<String> = (0..predicates.len()).map(pred_bit).collect();

    // Initial states.
    let mut q = SmtProblem::default();
    declare_steps(&mut q, fts, 0);
    bits.link_state(&mut q, 0);
    q.assert(at_step(&fts.init, 0));
    let proj: Vec<String> = state_bits.iter().map(|b| at(b, 0)).collect();
    let init_cubes = all_models_projected(&q, &proj, cfg, cap)?;
    let init = Expr::and([bits.substitute(&fts.init), cubes_to_expr(&init_cubes)]);

    // Transitions.
    let mut q = SmtProblem::default();
    declare_steps(&mut q, fts, 1);
    bits.link_state(&mut q, 0);
    bits.link_state(&mut q, 1);
    bits.link_trans(&mut q, 0);
    q.assert(at_step(&fts.trans, 0));
    let mut proj: Vec<String> = state_bits.iter().map(|b| at(b, 0)).collect();
    proj.extend(state_bits.iter().map(|b| at(b, 1)));
    proj.extend((0..trans_atoms.len()).map(|j| at(&trans_bit(j), 0)));
    let trans_cubes = all_models_projected(&q, &proj, cfg, cap)?;
    let trans = Expr::and([bits.substitute(&fts.trans), cubes_to_expr(&trans_cubes)]);

    let fairness = fts.fairness.iter().map(|c| bits.substitute(c)).collect();
    tracing::debug!(
        predicates = predicates.len(),
        transition_atoms = trans_atoms.len(),
        init_cubes = init_cubes.len(),
        trans_cubes = trans_cubes.len(),
        "abstraction built"
    );
    Ok(Abstraction { fts: Fts { vars, init, trans, fairness }, predicates, transition_atoms: trans_atoms })
}

impl Abstraction {
    /// Constraint at concrete `step` forcing the bits of abstract `state`;
    /// transition-atom bits are only imposed when `with_step` is set.
    pub fn concretize(
        &self,
        state: &BTreeMap<String, crate::expr::Value>,
        step: usize,
        with_step: bool,
    ) -> Expr<String> {
        let mut parts = Vec::new();
        let lit = |e: Expr<String>, val: bool| if val { e } else { Expr::not(e) };
        for v in &self.fts.vars {
            let val = state.get(&v.name).and_then(crate::expr::Value::as_bool).unwrap_or(false);
            if let Some(i) = v.name.strip_prefix("@b").and_then(|s| s.parse::<usize>().ok()) {
                parts.push(lit(at_step(&self.predicates[i], step), val));
            } else if let Some(j) = v.name.strip_prefix("@m").and_then(|s| s.parse::<usize>().ok()) {
                if with_step {
                    parts.push(lit(at_step(&self.transition_atoms[j], step), val));
                }
            } else {
                parts.push(lit(Expr::Var(at(&v.name, step)), val));
            }
        }
        Expr::and(parts)
    }
}
