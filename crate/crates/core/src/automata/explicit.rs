//! Explicit-state emptiness check for finite-domain fair transition systems:
//! reachable graph, strongly connected components, fair-cycle extraction.

use std::collections::{BTreeMap, HashMap, VecDeque};

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::discretize::{Lasso, SVar};
use crate::expr::{Expr, Value};
use crate::rational::int;

use super::fts::{Domain, Fts};

pub const DEFAULT_STATE_LIMIT: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExplicitError {
    #[error("variable {0} has an infinite domain")]
    InfiniteDomain(String),
    #[error("explicit state space exceeds {0} states")]
    StateLimit(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplicitResult {
    pub empty: bool,
    pub lasso: Option<Lasso>,
    pub states: usize,
}

pub fn language_empty_explicit(fts: &Fts) -> Result<ExplicitResult, ExplicitError> {
    language_empty_explicit_with_limit(fts, DEFAULT_STATE_LIMIT)
}

type State = Vec<i64>;

struct Space<'a> {
    fts: &'a Fts,
    index: HashMap<&'a str, usize>,
    bools: Vec<bool>,
    values: Vec<Vec<i64>>,
}

impl<'a> Space<'a> {
    fn new(fts: &'a Fts) -> Result<Self, ExplicitError> {
        let mut values = Vec::new();
        let mut bools = Vec::new();
        for v in &fts.vars {
            let vals: Vec<i64> = match &v.domain {
                Domain::Boolean => vec![0, 1],
                Domain::Enumeration(labels) => (0..labels.len() as i64).collect(),
                Domain::Integer { lo: Some(lo), hi: Some(hi) } => (*lo..=*hi).collect(),
                _ => return Err(ExplicitError::InfiniteDomain(v.name.clone())),
            };
            bools.push(v.domain == Domain::Boolean);
            values.push(vals);
        }
        let index = fts.vars.iter().enumerate().map(|(i, v)| (v.name.as_str(), i)).collect();
        Ok(Space { fts, index, bools, values })
    }

    fn value(&self, i: usize, x: i64) -> Value {
        if self.bools[i] {
            Value::Bool(x != 0)
        } else {
            Value::Num(int(x))
        }
    }

    /// All assignments `next` (with `cur` fixed, if given) satisfying `e`.
    fn solutions(&self, e: &Expr<SVar>, cur: Option<&State>) -> Vec<State> {
        let n = self.values.len();
        let mut out = Vec::new();
        let mut partial: Vec<Option<i64>> = vec![None; n];
        self.search(e, cur, &mut partial, 0, &mut out);
        out
    }

    fn eval(&self, e: &Expr<SVar>, cur: Option<&State>, partial: &[Option<i64>]) -> Option<bool> {
        e.eval(&|v: &SVar| {
            let i = *self.index.get(v.name.as_str())?;
            let x = match (cur, v.next) {
                (Some(c), false) => Some(c[i]),
                (None, true) => None,
                _ => partial[i],
            }?;
            Some(self.value(i, x))
        })
    }

    fn search(&self, e: &Expr<SVar>, cur: Option<&State>, partial: &mut Vec<Option<i64>>, k: usize, out: &mut Vec<State>) {
        match self.eval(e, cur, partial) {
            Some(false) => return,
            Some(true) if k == partial.len() => {
                out.push(partial.iter().map(|x| x.unwrap()).collect());
                return;
            }
            _ => {}
        }
        if k == partial.len() {
            return;
        }
        for &x in &self.values[k] {
            partial[k] = Some(x);
            self.search(e, cur, partial, k + 1, out);
        }
        partial[k] = None;
    }

    fn holds(&self, e: &Expr<SVar>, s: &State) -> bool {
        let full: Vec<Option<i64>> = s.iter().map(|&x| Some(x)).collect();
        self.eval(e, Some(s), &full) == Some(true)
    }

    fn to_map(&self, s: &State) -> BTreeMap<String, Value> {
        self.fts.vars.iter().enumerate().map(|(i, v)| (v.name.clone(), self.value(i, s[i]))).collect()
    }
}

/// Literal of a cube over boolean variables.
struct Lit {
    var: usize,
    next: bool,
    positive: bool,
}

/// Recognizes `trans` as a disjunction of cubes over boolean variables.
fn as_cubes(space: &Space, e: &Expr<SVar>) -> Option<Vec<Vec<Lit>>> {
    let lit = |e: &Expr<SVar>| -> Option<Lit> {
        let (v, positive) = match e {
            Expr::Var(v) => (v, true),
            Expr::Not(inner) => match &**inner {
                Expr::Var(v) => (v, false),
                _ => return None,
            },
            _ => return None,
        };
        let var = *space.index.get(v.name.as_str())?;
        space.bools[var].then_some(Lit { var, next: v.next, positive })
    };
    let cube = |e: &Expr<SVar>| -> Option<Vec<Lit>> {
        match e {
            Expr::And(xs) => xs.iter().map(lit).collect(),
            Expr::True => Some(vec![]),
            e => Some(vec![lit(e)?]),
        }
    };
    match e {
        Expr::Or(xs) => xs.iter().map(cube).collect(),
        Expr::False => Some(vec![]),
        e => Some(vec![cube(e)?]),
    }
}

fn cube_successors(space: &Space, cubes: &[Vec<Lit>], s: &State) -> Vec<State> {
    let n = s.len();
    let mut out = Vec::new();
    'cubes: for cube in cubes {
        let mut fixed: Vec<Option<i64>> = vec![None; n];
        for l in cube {
            let want = i64::from(l.positive);
            if l.next {
                match fixed[l.var] {
                    Some(x) if x != want => continue 'cubes,
                    _ => fixed[l.var] = Some(want),
                }
            } else if s[l.var] != want {
                continue 'cubes;
            }
        }
        let free: Vec<usize> = (0..n).filter(|&i| fixed[i].is_none()).collect();
        let mut combos: Vec<State> = vec![fixed.iter().map(|x| x.unwrap_or(0)).collect()];
        for &i in &free {
            combos = combos
                .into_iter()
                .flat_map(|c| {
                    space.values[i].iter().map(move |&x| {
                        let mut c = c.clone();
                        c[i] = x;
                        c
                    })
                })
                .collect();
        }
        out.extend(combos);
    }
    out.sort();
    out.dedup();
    out
}

pub fn language_empty_explicit_with_limit(fts: &Fts, limit: usize) -> Result<ExplicitResult, ExplicitError> {
    let space = Space::new(fts)?;
    let cubes = as_cubes(&space, &fts.trans);
    let mut graph: DiGraph<(), ()> = DiGraph::new();
    let mut ids: HashMap<State, NodeIndex> = HashMap::new();
    let mut states: Vec<State> = Vec::new();
    let mut queue = VecDeque::new();
    let mut add = |s: State, graph: &mut DiGraph<(), ()>, states: &mut Vec<State>, queue: &mut VecDeque<NodeIndex>| {
        if let Some(&id) = ids.get(&s) {
            return Ok(id);
        }
        if states.len() >= limit {
            return Err(ExplicitError::StateLimit(limit));
        }
        let id = graph.add_node(());
        ids.insert(s.clone(), id);
        states.push(s);
        queue.push_back(id);
        Ok(id)
    };
    let mut initial = Vec::new();
    for s in space.solutions(&fts.init, None) {
        initial.push(add(s, &mut graph, &mut states, &mut queue)?);
    }
    while let Some(id) = queue.pop_front() {
        let s = states[id.index()].clone();
        let succ = match &cubes {
            Some(c) => cube_successors(&space, c, &s),
            None => space.solutions(&fts.trans, Some(&s)),
        };
        for t in succ {
            let tid = add(t, &mut graph, &mut states, &mut queue)?;
            graph.add_edge(id, tid, ());
        }
    }
    let fair: Vec<Vec<bool>> =
        states.iter().map(|s| fts.fairness.iter().map(|c| space.holds(c, s)).collect()).collect();
    for scc in tarjan_scc(&graph) {
        let nontrivial = scc.len() > 1 || graph.contains_edge(scc[0], scc[0]);
        if !nontrivial {
            continue;
        }
        if !(0..fts.fairness.len()).all(|j| scc.iter().any(|n| fair[n.index()][j])) {
            continue;
        }
        let lasso = build_lasso(&graph, &initial, &scc, &fair, fts.fairness.len());
        let to_maps = |path: &[NodeIndex]| path.iter().map(|n| space.to_map(&states[n.index()])).collect::<Vec<_>>();
        let (prefix, cycle) = lasso;
        let mut all = to_maps(&prefix);
        let loop_start = all.len();
        all.extend(to_maps(&cycle));
        all.push(space.to_map(&states[cycle[0].index()]));
        return Ok(ExplicitResult { empty: false, lasso: Some(Lasso { states: all, loop_start }), states: states.len() });
    }
    Ok(ExplicitResult { empty: true, lasso: None, states: states.len() })
}

/// Shortest path (node list, excluding `from` unless `at_least_one` loops
/// back) from `from` to a node satisfying `target`, staying inside `allowed`.
fn bfs(
    graph: &DiGraph<(), ()>,
    from: &[NodeIndex],
    allowed: &dyn Fn(NodeIndex) -> bool,
    target: &dyn Fn(NodeIndex) -> bool,
) -> Option<Vec<NodeIndex>> {
    let mut parent: HashMap<NodeIndex, Option<NodeIndex>> = HashMap::new();
    let mut queue = VecDeque::new();
    for &f in from {
        parent.insert(f, None);
        queue.push_back(f);
    }
    while let Some(n) = queue.pop_front() {
        if target(n) {
            let mut path = vec![n];
            let mut cur = n;
            while let Some(Some(p)) = parent.get(&cur) {
                path.push(*p);
                cur = *p;
            }
            path.reverse();
            return Some(path);
        }
        for m in graph.neighbors(n) {
            if allowed(m) && !parent.contains_key(&m) {
                parent.insert(m, Some(n));
                queue.push_back(m);
            }
        }
    }
    None
}

fn build_lasso(
    graph: &DiGraph<(), ()>,
    initial: &[NodeIndex],
    scc: &[NodeIndex],
    fair: &[Vec<bool>],
    constraints: usize,
) -> (Vec<NodeIndex>, Vec<NodeIndex>) {
    let members: std::collections::HashSet<NodeIndex> = scc.iter().copied().collect();
    let inside = |n: NodeIndex| members.contains(&n);
    let to_scc = bfs(graph, initial, &|_| true, &inside).expect("SCC is reachable");
    let entry = *to_scc.last().unwrap();
    let prefix = to_scc[..to_scc.len() - 1].to_vec();
    let mut cycle = vec![entry];
    for j in 0..constraints {
        let here = *cycle.last().unwrap();
        let path = bfs(graph, &[here], &inside, &|n| fair[n.index()][j]).expect("constraint met in SCC");
        cycle.extend_from_slice(&path[1..]);
    }
    // Close the cycle with at least one edge.
    let here = *cycle.last().unwrap();
    let starts: Vec<NodeIndex> = graph.neighbors(here).filter(|&m| inside(m)).collect();
    let back = bfs(graph, &starts, &inside, &|n| n == entry).expect("SCC is strongly connected");
    cycle.extend_from_slice(&back[..back.len() - 1]);
    (prefix, cycle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::fts::{FtsVar, VarRole};

    fn x() -> Expr<SVar> {
        Expr::Var(SVar::cur("x"))
    }

    fn one_bit(trans: Expr<SVar>, fairness: Expr<SVar>) -> Fts {
        Fts {
            vars: vec![FtsVar { name: "x".into(), domain: Domain::Boolean, role: VarRole::State }],
            init: x(),
            trans,
            fairness: vec![fairness],
        }
    }

    #[test]
    fn stuttering_bit() {
        let frame = Expr::iff(Expr::Var(SVar::next("x")), x());
        let r = language_empty_explicit(&one_bit(frame.clone(), x())).unwrap();
        assert!(!r.empty);
        let lasso = r.lasso.unwrap();
        assert_eq!(lasso.states.len(), 2);
        assert_eq!(lasso.loop_start, 0);
        assert_eq!(lasso.states[0]["x"], Value::Bool(true));
        assert!(language_empty_explicit(&one_bit(frame, Expr::not(x()))).unwrap().empty);
    }

    #[test]
    fn toggle_visits_both_values() {
        let toggle = Expr::iff(Expr::Var(SVar::next("x")), Expr::not(x()));
        let mut fts = one_bit(toggle, x());
        fts.fairness.push(Expr::not(x()));
        let r = language_empty_explicit(&fts).unwrap();
        let lasso = r.lasso.unwrap();
        assert_eq!(lasso.states.len(), 3);
        assert_ne!(lasso.states[0]["x"], lasso.states[1]["x"]);
    }

    #[test]
    fn reals_are_rejected() {
        let mut fts = one_bit(Expr::True, Expr::True);
        fts.vars[0].domain = Domain::Real(crate::project::RealKind::Discrete);
        assert!(matches!(language_empty_explicit(&fts), Err(ExplicitError::InfiniteDomain(_))));
    }
}
