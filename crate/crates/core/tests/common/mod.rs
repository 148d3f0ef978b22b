//! Reference implementations shared by the integration suites: a direct
//! lasso evaluator for boolean formulas, a recursive SERE matcher and a
//! generator of random well-typed formulas.
#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::Rng;
use rvt_core::lang::{CmpOp, Formula, Quantifier, Sere, Term};
use rvt_core::project::{AttrType, Attribute, ClassDef, RealKind, Signature};
use rvt_core::rational::{frac, Q};

// ---------------------------------------------------------------------------
// Lasso evaluation

#[derive(Debug, Clone, Copy)]
enum Node {
    Const(bool),
    Bit(usize),
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Iff(usize, usize),
    Next(usize),
    Until(usize, usize),
    Release(usize, usize),
}

/// A boolean formula over `objects` instances of one class, compiled to a
/// node list. Quantifiers unfold over the instances by direct semantics.
pub struct Evaluator {
    nodes: Vec<Node>,
    root: usize,
    /// Dense bit index → (object, attribute).
    pub bits: Vec<(usize, String)>,
}

impl Evaluator {
    pub fn new(f: &Formula, objects: usize) -> Evaluator {
        let mut e = Evaluator { nodes: Vec::new(), root: 0, bits: Vec::new() };
        e.root = e.compile(f, objects, &mut BTreeMap::new());
        e
    }

    fn push(&mut self, n: Node) -> usize {
        self.nodes.push(n);
        self.nodes.len() - 1
    }

    fn bit(&mut self, obj: usize, attr: &str) -> usize {
        let key = (obj, attr.to_string());
        let i = match self.bits.iter().position(|b| *b == key) {
            Some(i) => i,
            None => {
                self.bits.push(key);
                self.bits.len() - 1
            }
        };
        self.push(Node::Bit(i))
    }

    fn compile(&mut self, f: &Formula, n: usize, env: &mut BTreeMap<String, usize>) -> usize {
        match f {
            Formula::True => self.push(Node::Const(true)),
            Formula::False => self.push(Node::Const(false)),
            Formula::Prop(Term::Attr { obj, attr }) => self.bit(env[obj], attr),
            Formula::Cmp(Term::Obj(a), op, Term::Obj(b)) => {
                let eq = env[a] == env[b];
                self.push(Node::Const(match op {
                    CmpOp::Eq => eq,
                    CmpOp::Ne => !eq,
                    _ => panic!("ordering on objects"),
                }))
            }
            Formula::Cmp(Term::Attr { obj: o1, attr: a1 }, op @ (CmpOp::Eq | CmpOp::Ne), Term::Attr { obj: o2, attr: a2 }) => {
                let x = self.bit(env[o1], a1);
                let y = self.bit(env[o2], a2);
                let iff = self.push(Node::Iff(x, y));
                if *op == CmpOp::Eq {
                    iff
                } else {
                    self.push(Node::Not(iff))
                }
            }
            Formula::Not(a) => {
                let a = self.compile(a, n, env);
                self.push(Node::Not(a))
            }
            Formula::And(a, b) => {
                let (a, b) = (self.compile(a, n, env), self.compile(b, n, env));
                self.push(Node::And(a, b))
            }
            Formula::Or(a, b) => {
                let (a, b) = (self.compile(a, n, env), self.compile(b, n, env));
                self.push(Node::Or(a, b))
            }
            Formula::Implies(a, b) => {
                let (a, b) = (self.compile(a, n, env), self.compile(b, n, env));
                let na = self.push(Node::Not(a));
                self.push(Node::Or(na, b))
            }
            Formula::Iff(a, b) => {
                let (a, b) = (self.compile(a, n, env), self.compile(b, n, env));
                self.push(Node::Iff(a, b))
            }
            Formula::Next(a) => {
                let a = self.compile(a, n, env);
                self.push(Node::Next(a))
            }
            Formula::Until(a, b) => {
                let (a, b) = (self.compile(a, n, env), self.compile(b, n, env));
                self.push(Node::Until(a, b))
            }
            Formula::Release(a, b) => {
                let (a, b) = (self.compile(a, n, env), self.compile(b, n, env));
                self.push(Node::Release(a, b))
            }
            Formula::Always(a) => {
                let a = self.compile(a, n, env);
                let f = self.push(Node::Const(false));
                self.push(Node::Release(f, a))
            }
            Formula::Eventually(a) => {
                let a = self.compile(a, n, env);
                let t = self.push(Node::Const(true));
                self.push(Node::Until(t, a))
            }
            Formula::Quant { q, var, body, .. } => {
                let saved = env.get(var).copied();
                let mut acc: Option<usize> = None;
                for obj in 0..n {
                    env.insert(var.clone(), obj);
                    let b = self.compile(body, n, env);
                    acc = Some(match acc {
                        None => b,
                        Some(x) => self.push(if *q == Quantifier::Forall { Node::And(x, b) } else { Node::Or(x, b) }),
                    });
                }
                match saved {
                    Some(s) => env.insert(var.clone(), s),
                    None => env.remove(var),
                };
                acc.unwrap_or_else(|| self.push(Node::Const(*q == Quantifier::Forall)))
            }
            other => panic!("outside the boolean fragment: {other:?}"),
        }
    }

    /// Truth at position 0 of `states[0..n] (states[loop_start..n])^ω`,
    /// where each state is a bit mask over [`Evaluator::bits`].
    pub fn holds(&self, states: &[u32], loop_start: usize) -> bool {
        let masks = position_masks(states, self.bits.len());
        self.eval(&masks, states.len(), loop_start, &mut vec![0; self.nodes.len()])
    }

    /// `masks[b]` has bit `p` set when state `p` sets bit `b`.
    fn eval(&self, masks: &[u32], n: usize, loop_start: usize, val: &mut [u32]) -> bool {
        let full: u32 = if n == 32 { u32::MAX } else { (1 << n) - 1 };
        let next = |m: u32| (m >> 1) | (((m >> loop_start) & 1) << (n - 1));
        for (i, node) in self.nodes.iter().enumerate() {
            val[i] = match *node {
                Node::Const(b) => {
                    if b {
                        full
                    } else {
                        0
                    }
                }
                Node::Bit(b) => masks[b],
                Node::Not(a) => !val[a] & full,
                Node::And(a, b) => val[a] & val[b],
                Node::Or(a, b) => val[a] | val[b],
                Node::Iff(a, b) => !(val[a] ^ val[b]) & full,
                Node::Next(a) => next(val[a]),
                Node::Until(a, b) => {
                    let mut u = 0;
                    loop {
                        let u2 = val[b] | (val[a] & next(u));
                        if u2 == u {
                            break u;
                        }
                        u = u2;
                    }
                }
                Node::Release(a, b) => {
                    let mut r = full;
                    loop {
                        let r2 = val[b] & (val[a] | next(r));
                        if r2 == r {
                            break r;
                        }
                        r = r2;
                    }
                }
            };
        }
        val[self.root] & 1 == 1
    }

    /// Lasso length bound for exhaustive enumeration: 8 up to three bits
    /// (8^8 sequences per loop start), shorter beyond.
    pub fn length_cap(&self) -> usize {
        match self.bits.len() {
            0..=3 => 8,
            _ => 4,
        }
    }

    /// First satisfying lasso of length ≤ `max_len`, shortest first.
    pub fn find_lasso(&self, max_len: usize) -> Option<(Vec<u32>, usize)> {
        let letters = 1u64 << self.bits.len();
        let mut val = vec![0u32; self.nodes.len()];
        for n in 1..=max_len {
            let total = letters.pow(n as u32);
            let mut states = vec![0u32; n];
            for code in 0..total {
                let mut c = code;
                for s in states.iter_mut() {
                    *s = (c % letters) as u32;
                    c /= letters;
                }
                let masks = position_masks(&states, self.bits.len());
                for l in 0..n {
                    if self.eval(&masks, n, l, &mut val) {
                        return Some((states, l));
                    }
                }
            }
        }
        None
    }
}

fn position_masks(states: &[u32], bits: usize) -> Vec<u32> {
    (0..bits).map(|b| states.iter().enumerate().fold(0, |m, (p, s)| m | (((s >> b) & 1) << p))).collect()
}

// ---------------------------------------------------------------------------
// SEREs

/// Whether `r` matches exactly `w`, by structural recursion.
pub fn sere_matches<L>(r: &Sere<L>, w: &[u8], holds: &impl Fn(&L, u8) -> bool) -> bool {
    match r {
        Sere::Letter(l) => w.len() == 1 && holds(l, w[0]),
        Sere::Union(a, b) => sere_matches(a, w, holds) || sere_matches(b, w, holds),
        Sere::Concat(a, b) => (0..=w.len()).any(|k| sere_matches(a, &w[..k], holds) && sere_matches(b, &w[k..], holds)),
        Sere::Fusion(a, b) => (0..w.len()).any(|k| sere_matches(a, &w[..=k], holds) && sere_matches(b, &w[k..], holds)),
        Sere::Star(a) => w.is_empty() || (1..=w.len()).any(|k| sere_matches(a, &w[..k], holds) && sere_matches(r, &w[k..], holds)),
        Sere::Repeat(a, n) => repeat_matches(a, *n, w, holds),
    }
}

fn repeat_matches<L>(a: &Sere<L>, n: u32, w: &[u8], holds: &impl Fn(&L, u8) -> bool) -> bool {
    if n == 0 {
        return w.is_empty();
    }
    (0..=w.len()).any(|k| sere_matches(a, &w[..k], holds) && repeat_matches(a, n - 1, &w[k..], holds))
}

/// Random SERE of the given depth over letters `0..letters`.
pub fn random_sere(rng: &mut impl Rng, depth: u32, letters: u8) -> Sere<u8> {
    if depth == 0 || rng.gen_bool(0.2) {
        return Sere::Letter(rng.gen_range(0..letters));
    }
    let d = depth - 1;
    match rng.gen_range(0..6) {
        0 => Sere::concat(random_sere(rng, d, letters), random_sere(rng, d, letters)),
        1 => Sere::fusion(random_sere(rng, d, letters), random_sere(rng, d, letters)),
        2 => Sere::union(random_sere(rng, d, letters), random_sere(rng, d, letters)),
        3 => Sere::star(random_sere(rng, d, letters)),
        4 => {
            let a = random_sere(rng, d, letters);
            Sere::repeat(a, rng.gen_range(0..3))
        }
        _ => Sere::Letter(rng.gen_range(0..letters)),
    }
}

// ---------------------------------------------------------------------------
// Random well-typed formulas

pub fn rich_signature() -> Signature {
    let attr = |name: &str, ty: AttrType, kind| Attribute { name: name.into(), ty, kind };
    Signature {
        classes: vec![
            ClassDef {
                name: "Train".into(),
                attributes: vec![
                    attr("speed", AttrType::Real, Some(RealKind::Continuous)),
                    attr("pos", AttrType::Real, Some(RealKind::Discrete)),
                    attr("doors", AttrType::Boolean, None),
                    attr("mode", AttrType::Enumeration(vec!["idle".into(), "run".into()]), None),
                    attr("at", AttrType::Reference { target: "Station".into(), nullable: true }, None),
                ],
            },
            ClassDef {
                name: "Station".into(),
                attributes: vec![
                    attr("open", AttrType::Boolean, None),
                    attr("load", AttrType::Integer { lo: Some(0), hi: Some(5) }, None),
                ],
            },
        ],
    }
}

pub struct FormulaGen<'r, R: Rng> {
    pub rng: &'r mut R,
    scope: Vec<(String, &'static str)>,
}

impl<'r, R: Rng> FormulaGen<'r, R> {
    pub fn new(rng: &'r mut R) -> Self {
        FormulaGen { rng, scope: Vec::new() }
    }

    /// Closed formula: a quantifier on top, then `depth` more levels.
    pub fn closed(&mut self, depth: u32) -> Formula {
        self.quantified(depth)
    }

    fn quantified(&mut self, depth: u32) -> Formula {
        let class = if self.rng.gen_bool(0.7) { "Train" } else { "Station" };
        let var = format!("{}{}", if class == "Train" { "t" } else { "s" }, self.scope.len());
        self.scope.push((var.clone(), class));
        let body = self.formula(depth);
        self.scope.pop();
        let q = if self.rng.gen_bool(0.5) { Quantifier::Forall } else { Quantifier::Exists };
        Formula::Quant { q, var, class: class.into(), body: Box::new(body) }
    }

    fn formula(&mut self, depth: u32) -> Formula {
        if depth == 0 || self.rng.gen_bool(0.2) {
            return self.atom(true);
        }
        let d = depth - 1;
        match self.rng.gen_range(0..15) {
            0 => Formula::not(self.formula(d)),
            1 => Formula::and(self.formula(d), self.formula(d)),
            2 => Formula::or(self.formula(d), self.formula(d)),
            3 => Formula::implies(self.formula(d), self.formula(d)),
            4 => Formula::iff(self.formula(d), self.formula(d)),
            5 => Formula::next(self.formula(d)),
            6 => Formula::until(self.formula(d), self.formula(d)),
            7 => Formula::release(self.formula(d), self.formula(d)),
            8 => Formula::always(self.formula(d)),
            9 => Formula::eventually(self.formula(d)),
            10 => self.quantified(d),
            11 => Formula::StrongMatch(Box::new(self.sere(d.min(2)))),
            12 => {
                let r = self.sere(d.min(2));
                Formula::SuffixImpl(Box::new(r), Box::new(self.formula(d)))
            }
            13 => {
                let r = self.sere(d.min(2));
                Formula::SuffixImplNext(Box::new(r), Box::new(self.formula(d)))
            }
            _ => self.atom(true),
        }
    }

    fn sere(&mut self, depth: u32) -> Sere<Formula> {
        if depth == 0 || self.rng.gen_bool(0.3) {
            return Sere::Letter(self.letter(1));
        }
        let d = depth - 1;
        match self.rng.gen_range(0..5) {
            0 => Sere::concat(self.sere(d), self.sere(d)),
            1 => Sere::fusion(self.sere(d), self.sere(d)),
            2 => Sere::union(self.sere(d), self.sere(d)),
            3 => Sere::star(self.sere(d)),
            _ => {
                let n = self.rng.gen_range(0..4);
                Sere::repeat(self.sere(d), n)
            }
        }
    }

    fn letter(&mut self, depth: u32) -> Formula {
        if depth == 0 || self.rng.gen_bool(0.5) {
            return self.atom(false);
        }
        match self.rng.gen_range(0..5) {
            0 => Formula::not(self.letter(depth - 1)),
            1 => Formula::and(self.letter(depth - 1), self.letter(depth - 1)),
            2 => Formula::or(self.letter(depth - 1), self.letter(depth - 1)),
            3 => Formula::implies(self.letter(depth - 1), self.letter(depth - 1)),
            _ => Formula::iff(self.letter(depth - 1), self.letter(depth - 1)),
        }
    }

    fn pick(&mut self, class: &str) -> Option<String> {
        let vars: Vec<&String> = self.scope.iter().filter(|(_, c)| *c == class).map(|(v, _)| v).collect();
        if vars.is_empty() {
            None
        } else {
            Some(vars[self.rng.gen_range(0..vars.len())].clone())
        }
    }

    fn constant(&mut self) -> Q {
        frac(self.rng.gen_range(-9..=9), self.rng.gen_range(1..=4))
    }

    /// Atom; `modal` allows `next`/`der` terms.
    fn atom(&mut self, modal: bool) -> Formula {
        if self.scope.is_empty() {
            return if self.rng.gen_bool(0.5) { Formula::True } else { Formula::False };
        }
        let (var, class) = self.scope[self.rng.gen_range(0..self.scope.len())].clone();
        let attr = |a: &str| Term::attr(&var, a);
        let wrap = |gen: &mut Self, t: Term| if modal && gen.rng.gen_bool(0.3) { Term::Next(Box::new(t)) } else { t };
        let op = [CmpOp::Lt, CmpOp::Le, CmpOp::Eq, CmpOp::Ge, CmpOp::Gt, CmpOp::Ne][self.rng.gen_range(0..6)];
        let eq = if self.rng.gen_bool(0.5) { CmpOp::Eq } else { CmpOp::Ne };
        match (class, self.rng.gen_range(0..9)) {
            (_, 0) => {
                if self.rng.gen_bool(0.5) {
                    Formula::True
                } else {
                    Formula::False
                }
            }
            ("Train", 1) => Formula::Prop(attr("doors")),
            ("Station", 1 | 2) => Formula::Prop(attr("open")),
            ("Train", 2) => {
                let other = self.pick("Train").unwrap();
                let lhs = wrap(self, attr("doors"));
                Formula::Cmp(lhs, eq, Term::attr(&other, "doors"))
            }
            ("Train", 3) => {
                let sym = if self.rng.gen_bool(0.5) { "idle" } else { "run" };
                let lhs = wrap(self, attr("mode"));
                Formula::Cmp(lhs, eq, Term::Sym(sym.into()))
            }
            ("Train", 4) => {
                let lhs = wrap(self, attr("at"));
                let rhs = match self.pick("Station") {
                    Some(s) if self.rng.gen_bool(0.6) => Term::Obj(s),
                    _ => Term::Null,
                };
                Formula::Cmp(lhs, eq, rhs)
            }
            (c, 5) => {
                let other = self.pick(c).unwrap();
                Formula::Cmp(Term::Obj(var.clone()), eq, Term::Obj(other))
            }
            _ => {
                let lhs = self.num_term(&var, class, 2, modal, true);
                let rhs = self.num_term(&var, class, 1, modal, false);
                Formula::Cmp(lhs, op, rhs)
            }
        }
    }

    fn num_leaf(&mut self, var: &str, class: &str, modal: bool) -> Term {
        let a = if class == "Train" { if self.rng.gen_bool(0.5) { "speed" } else { "pos" } } else { "load" };
        let t = Term::attr(var, a);
        if !modal {
            return t;
        }
        match self.rng.gen_range(0..4) {
            0 => Term::Next(Box::new(t)),
            1 if a == "speed" => Term::Der(Box::new(t)),
            _ => t,
        }
    }

    /// Numeric term in the parser's normal form; `open` forces at least one
    /// attribute occurrence.
    fn num_term(&mut self, var: &str, class: &str, depth: u32, modal: bool, open: bool) -> Term {
        if depth == 0 || self.rng.gen_bool(0.35) {
            return if !open && self.rng.gen_bool(0.5) { Term::Const(self.constant()) } else { self.num_leaf(var, class, modal) };
        }
        let d = depth - 1;
        match self.rng.gen_range(0..3) {
            0 | 1 => {
                let left_open = open && self.rng.gen_bool(0.5);
                let a = self.num_term(var, class, d, modal, left_open);
                let b_open = (open && !left_open) || matches!(a, Term::Const(_));
                let b = self.num_term(var, class, d, modal, b_open);
                if self.rng.gen_bool(0.5) {
                    Term::Add(Box::new(a), Box::new(b))
                } else {
                    Term::Sub(Box::new(a), Box::new(b))
                }
            }
            _ => {
                let c = self.constant();
                Term::Scale(c, Box::new(self.num_term(var, class, d, modal, true)))
            }
        }
    }
}

/// Pretty-printed text reparsed against the rich signature.
pub fn round_trips(f: &Formula) -> Result<bool, String> {
    let sig = rich_signature();
    let text = rvt_core::lang::pretty(f);
    let back = rvt_core::lang::parse_typed(&text, &sig).map_err(|e| format!("{text}: {}", e.message()))?;
    Ok(back == *f)
}
