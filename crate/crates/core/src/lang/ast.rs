use serde::{Deserialize, Serialize};

pub use crate::expr::CmpOp;
use crate::rational::Q;

/// Linear term over object attributes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Const(Q),
    /// `obj.attr` where `obj` is a quantified object variable.
    Attr { obj: String, attr: String },
    /// A bare object variable, compared against references or other objects.
    Obj(String),
    /// Enumeration symbol; resolved against the other side of a comparison.
    Sym(String),
    Null,
    Add(Box<Term>, Box<Term>),
    Sub(Box<Term>, Box<Term>),
    Scale(Q, Box<Term>),
    Next(Box<Term>),
    Der(Box<Term>),
}

impl Term {
    pub fn attr(obj: &str, attr: &str) -> Term {
        Term::Attr { obj: obj.to_string(), attr: attr.to_string() }
    }

    /// True when the term mentions no attribute and no object variable.
    pub fn is_closed_constant(&self) -> bool {
        match self {
            Term::Const(_) | Term::Sym(_) | Term::Null => true,
            Term::Attr { .. } | Term::Obj(_) => false,
            Term::Add(a, b) | Term::Sub(a, b) => a.is_closed_constant() && b.is_closed_constant(),
            Term::Scale(_, t) | Term::Next(t) | Term::Der(t) => t.is_closed_constant(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Add(a, b) | Term::Sub(a, b) => 1 + a.size() + b.size(),
            Term::Scale(_, t) | Term::Next(t) | Term::Der(t) => 1 + t.size(),
            _ => 1,
        }
    }
}

/// Sequential extended regular expression over letters of type `L`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sere<L> {
    Letter(L),
    Concat(Box<Sere<L>>, Box<Sere<L>>),
    Fusion(Box<Sere<L>>, Box<Sere<L>>),
    Union(Box<Sere<L>>, Box<Sere<L>>),
    Star(Box<Sere<L>>),
    Repeat(Box<Sere<L>>, u32),
}

impl<L> Sere<L> {
    pub fn concat(a: Sere<L>, b: Sere<L>) -> Self {
        Sere::Concat(Box::new(a), Box::new(b))
    }

    pub fn fusion(a: Sere<L>, b: Sere<L>) -> Self {
        Sere::Fusion(Box::new(a), Box::new(b))
    }

    pub fn union(a: Sere<L>, b: Sere<L>) -> Self {
        Sere::Union(Box::new(a), Box::new(b))
    }

    pub fn star(a: Sere<L>) -> Self {
        Sere::Star(Box::new(a))
    }

    pub fn repeat(a: Sere<L>, n: u32) -> Self {
        Sere::Repeat(Box::new(a), n)
    }

    /// Rebuilds the expression with every letter transformed by `f`.
    pub fn try_map<M, E>(&self, f: &mut impl FnMut(&L) -> Result<M, E>) -> Result<Sere<M>, E> {
        Ok(match self {
            Sere::Letter(l) => Sere::Letter(f(l)?),
            Sere::Concat(a, b) => Sere::concat(a.try_map(f)?, b.try_map(f)?),
            Sere::Fusion(a, b) => Sere::fusion(a.try_map(f)?, b.try_map(f)?),
            Sere::Union(a, b) => Sere::union(a.try_map(f)?, b.try_map(f)?),
            Sere::Star(a) => Sere::star(a.try_map(f)?),
            Sere::Repeat(a, n) => Sere::repeat(a.try_map(f)?, *n),
        })
    }

    pub fn letters(&self) -> Vec<&L> {
        let mut out = Vec::new();
        self.visit_letters(&mut |l| out.push(l));
        out
    }

    fn visit_letters<'a>(&'a self, f: &mut impl FnMut(&'a L)) {
        match self {
            Sere::Letter(l) => f(l),
            Sere::Concat(a, b) | Sere::Fusion(a, b) | Sere::Union(a, b) => {
                a.visit_letters(f);
                b.visit_letters(f);
            }
            Sere::Star(a) | Sere::Repeat(a, _) => a.visit_letters(f),
        }
    }

    pub fn size_with(&self, letter_size: &impl Fn(&L) -> usize) -> usize {
        match self {
            Sere::Letter(l) => letter_size(l),
            Sere::Concat(a, b) | Sere::Fusion(a, b) | Sere::Union(a, b) => {
                1 + a.size_with(letter_size) + b.size_with(letter_size)
            }
            Sere::Star(a) | Sere::Repeat(a, _) => 1 + a.size_with(letter_size),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Quantifier {
    Forall,
    Exists,
}

/// Formula of the constraint language.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    True,
    False,
    /// Boolean-valued term used as a formula (`t.doorsOpen`).
    Prop(Term),
    Cmp(Term, CmpOp, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Release(Box<Formula>, Box<Formula>),
    Always(Box<Formula>),
    Eventually(Box<Formula>),
    Quant { q: Quantifier, var: String, class: String, body: Box<Formula> },
    /// `{r}!`
    StrongMatch(Box<Sere<Formula>>),
    /// `{r} |-> f`
    SuffixImpl(Box<Sere<Formula>>, Box<Formula>),
    /// `{r} |=> f`
    SuffixImplNext(Box<Sere<Formula>>, Box<Formula>),
}

impl Formula {
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn next(a: Formula) -> Formula {
        Formula::Next(Box::new(a))
    }

    pub fn until(a: Formula, b: Formula) -> Formula {
        Formula::Until(Box::new(a), Box::new(b))
    }

    pub fn release(a: Formula, b: Formula) -> Formula {
        Formula::Release(Box::new(a), Box::new(b))
    }

    pub fn always(a: Formula) -> Formula {
        Formula::Always(Box::new(a))
    }

    pub fn eventually(a: Formula) -> Formula {
        Formula::Eventually(Box::new(a))
    }

    pub fn forall(var: &str, class: &str, body: Formula) -> Formula {
        Formula::Quant { q: Quantifier::Forall, var: var.into(), class: class.into(), body: Box::new(body) }
    }

    pub fn exists(var: &str, class: &str, body: Formula) -> Formula {
        Formula::Quant { q: Quantifier::Exists, var: var.into(), class: class.into(), body: Box::new(body) }
    }

    /// Conjunction of a list (`true` when empty).
    pub fn conjunction(items: impl IntoIterator<Item = Formula>) -> Formula {
        let mut iter = items.into_iter();
        match iter.next() {
            None => Formula::True,
            Some(first) => iter.fold(first, Formula::and),
        }
    }

    /// Node count, including SERE nodes and term-free atoms.
    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Prop(_) | Formula::Cmp(..) => 1,
            Formula::Not(a)
            | Formula::Next(a)
            | Formula::Always(a)
            | Formula::Eventually(a) => 1 + a.size(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b)
            | Formula::Until(a, b)
            | Formula::Release(a, b) => 1 + a.size() + b.size(),
            Formula::Quant { body, .. } => 1 + body.size(),
            Formula::StrongMatch(r) => 1 + r.size_with(&Formula::size),
            Formula::SuffixImpl(r, f) | Formula::SuffixImplNext(r, f) => {
                1 + r.size_with(&Formula::size) + f.size()
            }
        }
    }

    /// True when the formula contains no temporal operator and no SERE.
    pub fn is_temporal_free(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Prop(_) | Formula::Cmp(..) => true,
            Formula::Not(a) => a.is_temporal_free(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.is_temporal_free() && b.is_temporal_free()
            }
            Formula::Quant { body, .. } => body.is_temporal_free(),
            _ => false,
        }
    }

    /// Visits every direct child formula (SERE letters included).
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::True | Formula::False | Formula::Prop(_) | Formula::Cmp(..) => vec![],
            Formula::Not(a) | Formula::Next(a) | Formula::Always(a) | Formula::Eventually(a) => vec![a],
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b)
            | Formula::Until(a, b)
            | Formula::Release(a, b) => vec![a, b],
            Formula::Quant { body, .. } => vec![body],
            Formula::StrongMatch(r) => r.letters(),
            Formula::SuffixImpl(r, f) | Formula::SuffixImplNext(r, f) => {
                let mut v = r.letters();
                v.push(f);
                v
            }
        }
    }
}

/// Parsed constraint attached to the requirement that owns it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub requirement: String,
    pub source: String,
    pub formula: Formula,
}
