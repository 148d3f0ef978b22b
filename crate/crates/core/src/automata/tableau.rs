//! Tableau construction from discrete temporal formulas to fair transition
//! systems.
//!
//! `X h` and `h U k` get an elementary variable constrained by their fixpoint
//! equations; `U` additionally gets the justice constraint `!v | k`.
//!
//! SEREs are handled through one construct, `EM(r, g)`: some match of `r`
//! starts here and `g` holds at its last letter. `{r}!` is `EM(r, true)` and
//! `{r} |-> g` is `!EM(r, !g)`. Per NFA state `s`, `w_s` means "a match can be
//! completed from `s` starting at the current letter"; it is defined by its
//! step equation, which alone admits runs that postpone acceptance forever.
//! Breakpoint tokens `p_s` rule those out: a token runs along a witness path
//! and must reach acceptance, tokens are reissued to every true `w_s` only
//! when none is pending, and justice demands the pending set be empty
//! infinitely often. Matches of the empty word are not counted.

use std::collections::HashMap;

use crate::discretize::{DiscreteProblem, SVar, DELTA, FLOW};
use crate::expr::Expr;
use crate::lang::Sere;
use crate::ltl::Ltl;

use super::fts::{mentions_next, prime, Domain, Fts, FtsVar, VarRole};
use super::sere::compile_sere;

pub fn compile_ltl(d: &DiscreteProblem) -> Fts {
    let mut t = Tableau::default();
    for v in &d.vars {
        let role = if v.name == FLOW || v.name == DELTA { VarRole::Step } else { VarRole::State };
        t.vars.push(FtsVar { name: v.name.clone(), domain: v.domain.clone(), role });
    }
    t.trans.push(d.axioms.clone());
    let conjuncts = match &d.formula {
        Ltl::And(xs) => xs.clone(),
        f => vec![f.clone()],
    };
    for c in &conjuncts {
        if let Some(inv) = invariant(c) {
            // `always psi` with propositional psi: psi holds in every state,
            // so it is imposed on every step directly.
            t.trans.push(inv);
        } else {
            let e = t.enc(c);
            t.init.push(e);
        }
    }
    Fts { vars: t.vars, init: Expr::and(t.init), trans: Expr::and(t.trans), fairness: t.fairness }
}

fn invariant(f: &Ltl<SVar>) -> Option<Expr<SVar>> {
    match f {
        Ltl::Not(inner) => match &**inner {
            Ltl::Until(a, h) if **a == Ltl::True => Some(Expr::not(h.to_expr()?)),
            _ => None,
        },
        _ => None,
    }
}

#[derive(Default)]
struct Tableau {
    vars: Vec<FtsVar>,
    init: Vec<Expr<SVar>>,
    trans: Vec<Expr<SVar>>,
    fairness: Vec<Expr<SVar>>,
    cache: HashMap<Ltl<SVar>, Expr<SVar>>,
    atoms: HashMap<Expr<SVar>, Expr<SVar>>,
    seres: usize,
}

impl Tableau {
    fn fresh(&mut self, name: String, role: VarRole) -> Expr<SVar> {
        self.vars.push(FtsVar { name: name.clone(), domain: Domain::Boolean, role });
        Expr::Var(SVar::cur(&name))
    }

    fn count(&self, role: VarRole) -> usize {
        self.vars.iter().filter(|v| v.role == role).count()
    }

    /// State expression for an atom; transition atoms get a proxy variable.
    fn state_atom(&mut self, e: &Expr<SVar>) -> Expr<SVar> {
        if !mentions_next(e) {
            return e.clone();
        }
        if let Some(v) = self.atoms.get(e) {
            return v.clone();
        }
        let v = self.fresh(format!("@a{}", self.count(VarRole::TransitionAtom)), VarRole::TransitionAtom);
        self.trans.push(Expr::iff(v.clone(), e.clone()));
        self.atoms.insert(e.clone(), v.clone());
        v
    }

    fn enc(&mut self, f: &Ltl<SVar>) -> Expr<SVar> {
        match f {
            Ltl::True => Expr::True,
            Ltl::False => Expr::False,
            Ltl::Atom(e) => self.state_atom(e),
            Ltl::Not(a) => Expr::not(self.enc(a)),
            Ltl::And(xs) => {
                let parts: Vec<_> = xs.iter().map(|x| self.enc(x)).collect();
                Expr::and(parts)
            }
            Ltl::Or(xs) => {
                let parts: Vec<_> = xs.iter().map(|x| self.enc(x)).collect();
                Expr::or(parts)
            }
            Ltl::Iff(a, b) => {
                let (a, b) = (self.enc(a), self.enc(b));
                Expr::iff(a, b)
            }
            Ltl::Next(_) | Ltl::Until(..) | Ltl::StrongSere(_) | Ltl::SuffixImpl(..) => {
                if let Some(e) = self.cache.get(f) {
                    return e.clone();
                }
                let e = self.enc_temporal(f);
                self.cache.insert(f.clone(), e.clone());
                e
            }
        }
    }

    fn enc_temporal(&mut self, f: &Ltl<SVar>) -> Expr<SVar> {
        match f {
            Ltl::Next(h) => {
                let h = self.enc(h);
                let v = self.fresh(format!("@x{}", self.count(VarRole::Elementary)), VarRole::Elementary);
                self.trans.push(Expr::iff(v.clone(), prime(&h)));
                v
            }
            Ltl::Until(h, k) => {
                let (h, k) = (self.enc(h), self.enc(k));
                let v = self.fresh(format!("@u{}", self.count(VarRole::Elementary)), VarRole::Elementary);
                self.trans.push(Expr::iff(v.clone(), Expr::or([k.clone(), Expr::and([h, prime(&v)])])));
                self.fairness.push(Expr::or([Expr::not(v.clone()), k]));
                v
            }
            Ltl::StrongSere(r) => self.exists_match(r, Expr::True),
            Ltl::SuffixImpl(r, g) => {
                let g = self.enc(g);
                Expr::not(self.exists_match(r, Expr::not(g)))
            }
            _ => unreachable!("temporal nodes only"),
        }
    }

    fn exists_match(&mut self, r: &Sere<Expr<SVar>>, g: Expr<SVar>) -> Expr<SVar> {
        let r = r.try_map(&mut |l| Ok::<_, ()>(self.state_atom(l))).expect("infallible");
        let nfa = compile_sere(&r);
        if nfa.edges.is_empty() {
            return Expr::False;
        }
        let id = self.seres;
        self.seres += 1;
        let w: Vec<Expr<SVar>> =
            (0..nfa.states).map(|s| self.fresh(format!("@w{id}.{s}"), VarRole::Obligation)).collect();
        let p: Vec<Expr<SVar>> =
            (0..nfa.states).map(|s| self.fresh(format!("@p{id}.{s}"), VarRole::Obligation)).collect();
        for s in 0..nfa.states {
            let step = |bits: &[Expr<SVar>]| {
                Expr::or(nfa.edges.iter().filter(|e| e.from == s).map(|e| {
                    let cont = prime(&bits[e.to]);
                    let cont = if nfa.accepting.contains(&e.to) { Expr::or([g.clone(), cont]) } else { cont };
                    Expr::and(e.guard.iter().cloned().chain(std::iter::once(cont)))
                }))
            };
            let (ws, ps) = (step(&w), step(&p));
            self.trans.push(Expr::iff(w[s].clone(), ws));
            self.trans.push(Expr::implies(p[s].clone(), Expr::and([w[s].clone(), ps])));
        }
        let none_pending = Expr::and(p.iter().map(|b| Expr::not(b.clone())));
        let reissue = Expr::and((0..nfa.states).map(|s| Expr::implies(w[s].clone(), p[s].clone())));
        self.init.push(reissue.clone());
        self.trans.push(Expr::implies(none_pending.clone(), prime(&reissue)));
        self.fairness.push(none_pending);
        Expr::or(nfa.initial.iter().map(|&s| w[s].clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::language_empty_explicit;
    use crate::discretize::DVar;
    use crate::expr::Value;
    use crate::ground::GroundDomain;

    fn p() -> Ltl<SVar> {
        Ltl::Atom(Expr::Var(SVar::cur("p")))
    }

    fn q() -> Ltl<SVar> {
        Ltl::Atom(Expr::Var(SVar::cur("q")))
    }

    fn problem(formula: Ltl<SVar>) -> DiscreteProblem {
        DiscreteProblem {
            vars: ["p", "q"].iter().map(|n| DVar { name: n.to_string(), domain: GroundDomain::Boolean }).collect(),
            step: None,
            formula,
            axioms: Expr::True,
        }
    }

    fn empty(f: Ltl<SVar>) -> bool {
        language_empty_explicit(&compile_ltl(&problem(f))).unwrap().empty
    }

    #[test]
    fn eventually_is_satisfiable() {
        let fts = compile_ltl(&problem(Ltl::eventually(p())));
        assert_eq!(fts.count(VarRole::Elementary), 1);
        assert_eq!(fts.fairness.len(), 1);
        assert!(!language_empty_explicit(&fts).unwrap().empty);
    }

    #[test]
    fn always_and_eventually_not_is_empty() {
        assert!(empty(Ltl::and([Ltl::always(p()), Ltl::eventually(Ltl::not(p()))])));
        assert!(empty(Ltl::and([Ltl::eventually(Ltl::always(p())), Ltl::always(Ltl::eventually(Ltl::not(p())))])));
        assert!(!empty(Ltl::always(Ltl::eventually(p()))));
    }

    #[test]
    fn strong_sere_forces_its_letters() {
        let r = Sere::concat(Sere::Letter(Expr::Var(SVar::cur("p"))), Sere::Letter(Expr::Var(SVar::cur("q"))));
        let f = Ltl::StrongSere(Box::new(r));
        let lasso = language_empty_explicit(&compile_ltl(&problem(f))).unwrap().lasso.unwrap();
        let at = |i: usize, v: &str| lasso.states[i.min(lasso.states.len() - 1)][v].clone();
        assert_eq!(at(0, "p"), Value::Bool(true));
        let second = if lasso.states.len() > 2 { 1 } else { lasso.loop_start };
        assert_eq!(at(second, "q"), Value::Bool(true));
    }

    #[test]
    fn strong_sere_cannot_postpone_forever() {
        // {p[*] ; q}! with q never true is unsatisfiable.
        let star = Sere::star(Sere::Letter(Expr::Var(SVar::cur("p"))));
        let r = Sere::concat(star, Sere::Letter(Expr::Var(SVar::cur("q"))));
        assert!(empty(Ltl::and([Ltl::StrongSere(Box::new(r.clone())), Ltl::always(Ltl::not(q()))])));
        assert!(!empty(Ltl::and([Ltl::StrongSere(Box::new(r)), Ltl::always(p())])));
    }

    #[test]
    fn suffix_implication() {
        // {p} |-> q together with p and not q is contradictory.
        let r = Sere::Letter(Expr::Var(SVar::cur("p")));
        let f = Ltl::SuffixImpl(Box::new(r), Box::new(q()));
        assert!(empty(Ltl::and([f.clone(), p(), Ltl::not(q())])));
        assert!(!empty(Ltl::and([f, p()])));
    }

    #[test]
    fn invariants_go_to_trans() {
        let fts = compile_ltl(&problem(Ltl::always(p())));
        assert_eq!(fts.count(VarRole::Elementary), 0);
        assert!(fts.fairness.is_empty());
    }
}
