//! Epsilon-free NFAs for SEREs. Edges carry a conjunction of letters, which
//! is what fusion needs: the overlapping letter must satisfy both sides.

use std::collections::{BTreeSet, VecDeque};

use crate::lang::Sere;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge<L> {
    pub from: usize,
    /// Conjunction of letters; empty means `true`.
    pub guard: Vec<L>,
    pub to: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nfa<L> {
    pub states: usize,
    pub initial: BTreeSet<usize>,
    pub accepting: BTreeSet<usize>,
    pub edges: Vec<Edge<L>>,
}

impl<L: Clone> Nfa<L> {
    fn empty_word() -> Self {
        Nfa { states: 1, initial: [0].into(), accepting: [0].into(), edges: vec![] }
    }

    fn letter(l: &L) -> Self {
        Nfa { states: 2, initial: [0].into(), accepting: [1].into(), edges: vec![Edge { from: 0, guard: vec![l.clone()], to: 1 }] }
    }

    pub fn accepts_empty(&self) -> bool {
        self.initial.iter().any(|s| self.accepting.contains(s))
    }

    /// Copies `other` after the states of `self`; returns the offset.
    fn absorb(&mut self, other: &Nfa<L>) -> usize {
        let off = self.states;
        self.states += other.states;
        self.edges.extend(other.edges.iter().map(|e| Edge { from: e.from + off, guard: e.guard.clone(), to: e.to + off }));
        off
    }

    fn union(a: &Nfa<L>, b: &Nfa<L>) -> Self {
        let mut out = a.clone();
        let off = out.absorb(b);
        out.initial.extend(b.initial.iter().map(|s| s + off));
        out.accepting.extend(b.accepting.iter().map(|s| s + off));
        out
    }

    fn concat(a: &Nfa<L>, b: &Nfa<L>) -> Self {
        let mut out = a.clone();
        let off = out.absorb(b);
        let b_init: Vec<usize> = b.initial.iter().map(|s| s + off).collect();
        for e in &a.edges {
            if a.accepting.contains(&e.to) {
                for &i in &b_init {
                    out.edges.push(Edge { from: e.from, guard: e.guard.clone(), to: i });
                }
            }
        }
        if a.accepts_empty() {
            out.initial.extend(b_init.iter().copied());
        }
        let mut accepting: BTreeSet<usize> = b.accepting.iter().map(|s| s + off).collect();
        if b.accepts_empty() {
            accepting.extend(a.accepting.iter().copied());
        }
        out.accepting = accepting;
        out
    }

    fn fusion(a: &Nfa<L>, b: &Nfa<L>) -> Self {
        let mut out = a.clone();
        let off = out.absorb(b);
        for ea in &a.edges {
            if !a.accepting.contains(&ea.to) {
                continue;
            }
            for eb in b.edges.iter().filter(|e| b.initial.contains(&e.from)) {
                let mut guard = ea.guard.clone();
                guard.extend(eb.guard.iter().cloned());
                out.edges.push(Edge { from: ea.from, guard, to: eb.to + off });
            }
        }
        out.accepting = b.accepting.iter().map(|s| s + off).collect();
        out
    }

    fn star(a: &Nfa<L>) -> Self {
        let mut out = a.clone();
        let fresh = out.states;
        out.states += 1;
        for e in &a.edges {
            if a.accepting.contains(&e.to) {
                for &i in &a.initial {
                    out.edges.push(Edge { from: e.from, guard: e.guard.clone(), to: i });
                }
            }
        }
        out.initial.insert(fresh);
        out.accepting.insert(fresh);
        out
    }

    /// Drops states that are unreachable or cannot reach acceptance and
    /// renumbers the rest.
    fn trim(self) -> Self {
        let reach = |starts: &BTreeSet<usize>, forward: bool| {
            let mut seen: BTreeSet<usize> = starts.clone();
            let mut queue: VecDeque<usize> = starts.iter().copied().collect();
            while let Some(s) = queue.pop_front() {
                for e in &self.edges {
                    let (src, dst) = if forward { (e.from, e.to) } else { (e.to, e.from) };
                    if src == s && seen.insert(dst) {
                        queue.push_back(dst);
                    }
                }
            }
            seen
        };
        let fwd = reach(&self.initial, true);
        let bwd = reach(&self.accepting, false);
        let mut keep: Vec<usize> = fwd.intersection(&bwd).copied().collect();
        if keep.is_empty() {
            // Empty language: a single non-accepting initial state.
            return Nfa { states: 1, initial: [0].into(), accepting: BTreeSet::new(), edges: vec![] };
        }
        keep.sort_unstable();
        let index = |s: usize| keep.binary_search(&s).ok();
        let mut edges: Vec<Edge<L>> = Vec::new();
        for e in &self.edges {
            if let (Some(from), Some(to)) = (index(e.from), index(e.to)) {
                edges.push(Edge { from, guard: e.guard.clone(), to });
            }
        }
        Nfa {
            states: keep.len(),
            initial: self.initial.iter().filter_map(|&s| index(s)).collect(),
            accepting: self.accepting.iter().filter_map(|&s| index(s)).collect(),
            edges,
        }
    }

    /// Whether the word of length `n` is accepted; `holds(l, i)` evaluates
    /// letter `l` at position `i`.
    pub fn accepts(&self, n: usize, holds: impl Fn(&L, usize) -> bool) -> bool {
        let mut current = self.initial.clone();
        for i in 0..n {
            let mut next = BTreeSet::new();
            for e in &self.edges {
                if current.contains(&e.from) && e.guard.iter().all(|l| holds(l, i)) {
                    next.insert(e.to);
                }
            }
            if next.is_empty() {
                return false;
            }
            current = next;
        }
        current.iter().any(|s| self.accepting.contains(s))
    }
}

pub fn compile_sere<L: Clone>(r: &Sere<L>) -> Nfa<L> {
    build(r).trim()
}

fn build<L: Clone>(r: &Sere<L>) -> Nfa<L> {
    match r {
        Sere::Letter(l) => Nfa::letter(l),
        Sere::Concat(a, b) => Nfa::concat(&build(a), &build(b)),
        Sere::Fusion(a, b) => Nfa::fusion(&build(a), &build(b)),
        Sere::Union(a, b) => Nfa::union(&build(a), &build(b)),
        Sere::Star(a) => Nfa::star(&build(a)),
        Sere::Repeat(a, n) => {
            let a = build(a);
            let mut out = Nfa::empty_word();
            for _ in 0..*n {
                out = Nfa::concat(&out, &a);
            }
            out
        }
    }
}
