//! Quantifier-free temporal formulas over linear atoms, shared by the
//! grounding, discretization and automata layers.

use std::collections::BTreeSet;
use std::fmt;

use crate::expr::Expr;
use crate::lang::Sere;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ltl<V: Ord> {
    True,
    False,
    Atom(Expr<V>),
    Not(Box<Ltl<V>>),
    And(Vec<Ltl<V>>),
    Or(Vec<Ltl<V>>),
    Iff(Box<Ltl<V>>, Box<Ltl<V>>),
    Next(Box<Ltl<V>>),
    Until(Box<Ltl<V>>, Box<Ltl<V>>),
    /// `{r}!`: some finite prefix from here matches `r`.
    StrongSere(Box<Sere<Expr<V>>>),
    /// `{r} |-> f`: every match of `r` from here is followed by `f` at its last letter.
    SuffixImpl(Box<Sere<Expr<V>>>, Box<Ltl<V>>),
}

impl<V: Ord + Clone> Ltl<V> {
    pub fn atom(e: Expr<V>) -> Self {
        match e {
            Expr::True => Ltl::True,
            Expr::False => Ltl::False,
            e => Ltl::Atom(e),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Ltl<V>) -> Self {
        match f {
            Ltl::True => Ltl::False,
            Ltl::False => Ltl::True,
            Ltl::Not(inner) => *inner,
            f => Ltl::Not(Box::new(f)),
        }
    }

    pub fn and(items: impl IntoIterator<Item = Ltl<V>>) -> Self {
        let mut out = Vec::new();
        for f in items {
            match f {
                Ltl::True => {}
                Ltl::False => return Ltl::False,
                Ltl::And(inner) => out.extend(inner),
                f => out.push(f),
            }
        }
        match out.len() {
            0 => Ltl::True,
            1 => out.pop().unwrap(),
            _ => Ltl::And(out),
        }
    }

    pub fn or(items: impl IntoIterator<Item = Ltl<V>>) -> Self {
        let mut out = Vec::new();
        for f in items {
            match f {
                Ltl::False => {}
                Ltl::True => return Ltl::True,
                Ltl::Or(inner) => out.extend(inner),
                f => out.push(f),
            }
        }
        match out.len() {
            0 => Ltl::False,
            1 => out.pop().unwrap(),
            _ => Ltl::Or(out),
        }
    }

    pub fn iff(a: Ltl<V>, b: Ltl<V>) -> Self {
        match (a, b) {
            (Ltl::True, f) | (f, Ltl::True) => f,
            (Ltl::False, f) | (f, Ltl::False) => Ltl::not(f),
            (a, b) => Ltl::Iff(Box::new(a), Box::new(b)),
        }
    }

    pub fn next(f: Ltl<V>) -> Self {
        match f {
            Ltl::True | Ltl::False => f,
            f => Ltl::Next(Box::new(f)),
        }
    }

    pub fn until(a: Ltl<V>, b: Ltl<V>) -> Self {
        match b {
            Ltl::True | Ltl::False => b,
            b => Ltl::Until(Box::new(a), Box::new(b)),
        }
    }

    pub fn always(f: Ltl<V>) -> Self {
        Ltl::not(Ltl::until(Ltl::True, Ltl::not(f)))
    }

    pub fn eventually(f: Ltl<V>) -> Self {
        Ltl::until(Ltl::True, f)
    }

    /// Rewrites every atom and SERE letter.
    pub fn map_atoms<W: Ord + Clone>(&self, f: &mut impl FnMut(&Expr<V>) -> Expr<W>) -> Ltl<W> {
        match self {
            Ltl::True => Ltl::True,
            Ltl::False => Ltl::False,
            Ltl::Atom(e) => Ltl::atom(f(e)),
            Ltl::Not(a) => Ltl::not(a.map_atoms(f)),
            Ltl::And(xs) => Ltl::and(xs.iter().map(|x| x.map_atoms(f)).collect::<Vec<_>>()),
            Ltl::Or(xs) => Ltl::or(xs.iter().map(|x| x.map_atoms(f)).collect::<Vec<_>>()),
            Ltl::Iff(a, b) => Ltl::iff(a.map_atoms(f), b.map_atoms(f)),
            Ltl::Next(a) => Ltl::next(a.map_atoms(f)),
            Ltl::Until(a, b) => Ltl::until(a.map_atoms(f), b.map_atoms(f)),
            Ltl::StrongSere(r) => Ltl::StrongSere(Box::new(map_letters(r, f))),
            Ltl::SuffixImpl(r, g) => Ltl::SuffixImpl(Box::new(map_letters(r, f)), Box::new(g.map_atoms(f))),
        }
    }

    /// Fallible variant of [`Ltl::map_atoms`].
    pub fn try_map_atoms<W: Ord + Clone, E>(
        &self,
        f: &mut impl FnMut(&Expr<V>) -> Result<Expr<W>, E>,
    ) -> Result<Ltl<W>, E> {
        Ok(match self {
            Ltl::True => Ltl::True,
            Ltl::False => Ltl::False,
            Ltl::Atom(e) => Ltl::atom(f(e)?),
            Ltl::Not(a) => Ltl::not(a.try_map_atoms(f)?),
            Ltl::And(xs) => Ltl::and(xs.iter().map(|x| x.try_map_atoms(f)).collect::<Result<Vec<_>, _>>()?),
            Ltl::Or(xs) => Ltl::or(xs.iter().map(|x| x.try_map_atoms(f)).collect::<Result<Vec<_>, _>>()?),
            Ltl::Iff(a, b) => Ltl::iff(a.try_map_atoms(f)?, b.try_map_atoms(f)?),
            Ltl::Next(a) => Ltl::next(a.try_map_atoms(f)?),
            Ltl::Until(a, b) => Ltl::until(a.try_map_atoms(f)?, b.try_map_atoms(f)?),
            Ltl::StrongSere(r) => Ltl::StrongSere(Box::new(r.try_map(f)?)),
            Ltl::SuffixImpl(r, g) => Ltl::SuffixImpl(Box::new(r.try_map(f)?), Box::new(g.try_map_atoms(f)?)),
        })
    }

    /// All atoms, including SERE letters, in deterministic order.
    pub fn atoms(&self) -> BTreeSet<Expr<V>> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Ltl::Atom(e) = f {
                out.insert(e.clone());
            }
        });
        self.visit_letters(&mut |e| {
            out.insert(e.clone());
        });
        out
    }

    pub fn vars(&self) -> BTreeSet<V> {
        let mut out = BTreeSet::new();
        for a in self.atoms() {
            a.collect_vars(&mut out);
        }
        out
    }

    fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Ltl<V>)) {
        f(self);
        match self {
            Ltl::True | Ltl::False | Ltl::Atom(_) | Ltl::StrongSere(_) => {}
            Ltl::Not(a) | Ltl::Next(a) | Ltl::SuffixImpl(_, a) => a.visit(f),
            Ltl::And(xs) | Ltl::Or(xs) => xs.iter().for_each(|x| x.visit(f)),
            Ltl::Iff(a, b) | Ltl::Until(a, b) => {
                a.visit(f);
                b.visit(f);
            }
        }
    }

    fn visit_letters<'a>(&'a self, f: &mut impl FnMut(&'a Expr<V>)) {
        let mut seres = Vec::new();
        self.visit(&mut |g| match g {
            Ltl::StrongSere(r) | Ltl::SuffixImpl(r, _) => seres.push(&**r),
            _ => {}
        });
        for r in seres {
            for l in r.letters() {
                f(l);
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Ltl::True | Ltl::False => 1,
            Ltl::Atom(e) => e.size(),
            Ltl::Not(a) | Ltl::Next(a) => 1 + a.size(),
            Ltl::And(xs) | Ltl::Or(xs) => 1 + xs.iter().map(Ltl::size).sum::<usize>(),
            Ltl::Iff(a, b) | Ltl::Until(a, b) => 1 + a.size() + b.size(),
            Ltl::StrongSere(r) => 1 + r.size_with(&Expr::size),
            Ltl::SuffixImpl(r, g) => 1 + r.size_with(&Expr::size) + g.size(),
        }
    }

    /// True when no temporal operator or SERE occurs.
    pub fn is_propositional(&self) -> bool {
        match self {
            Ltl::True | Ltl::False | Ltl::Atom(_) => true,
            Ltl::Not(a) => a.is_propositional(),
            Ltl::And(xs) | Ltl::Or(xs) => xs.iter().all(Ltl::is_propositional),
            Ltl::Iff(a, b) => a.is_propositional() && b.is_propositional(),
            _ => false,
        }
    }

    /// The formula as a state expression; `None` if it is temporal.
    pub fn to_expr(&self) -> Option<Expr<V>> {
        Some(match self {
            Ltl::True => Expr::True,
            Ltl::False => Expr::False,
            Ltl::Atom(e) => e.clone(),
            Ltl::Not(a) => Expr::not(a.to_expr()?),
            Ltl::And(xs) => Expr::and(xs.iter().map(Ltl::to_expr).collect::<Option<Vec<_>>>()?),
            Ltl::Or(xs) => Expr::or(xs.iter().map(Ltl::to_expr).collect::<Option<Vec<_>>>()?),
            Ltl::Iff(a, b) => Expr::iff(a.to_expr()?, b.to_expr()?),
            _ => return None,
        })
    }
}

fn map_letters<V: Ord + Clone, W: Ord + Clone>(
    r: &Sere<Expr<V>>,
    f: &mut impl FnMut(&Expr<V>) -> Expr<W>,
) -> Sere<Expr<W>> {
    r.try_map(&mut |e| Ok::<_, ()>(f(e))).expect("infallible")
}

fn fmt_sere<V: Ord + fmt::Display>(r: &Sere<Expr<V>>, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match r {
        Sere::Letter(e) => write!(f, "({e})"),
        Sere::Concat(a, b) => {
            write!(f, "{{")?;
            fmt_sere(a, f)?;
            write!(f, " ; ")?;
            fmt_sere(b, f)?;
            write!(f, "}}")
        }
        Sere::Fusion(a, b) => {
            write!(f, "{{")?;
            fmt_sere(a, f)?;
            write!(f, " : ")?;
            fmt_sere(b, f)?;
            write!(f, "}}")
        }
        Sere::Union(a, b) => {
            write!(f, "{{")?;
            fmt_sere(a, f)?;
            write!(f, " | ")?;
            fmt_sere(b, f)?;
            write!(f, "}}")
        }
        Sere::Star(a) => {
            fmt_sere(a, f)?;
            write!(f, "[*]")
        }
        Sere::Repeat(a, n) => {
            fmt_sere(a, f)?;
            write!(f, "[*{n}]")
        }
    }
}

impl<V: Ord + fmt::Display> fmt::Display for Ltl<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, xs: &[Ltl<V>], op: &str| -> fmt::Result {
            write!(f, "(")?;
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    write!(f, " {op} ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, ")")
        };
        match self {
            Ltl::True => write!(f, "true"),
            Ltl::False => write!(f, "false"),
            Ltl::Atom(e) => write!(f, "{e}"),
            Ltl::Not(a) => write!(f, "!{a}"),
            Ltl::And(xs) => list(f, xs, "&"),
            Ltl::Or(xs) => list(f, xs, "|"),
            Ltl::Iff(a, b) => write!(f, "({a} <-> {b})"),
            Ltl::Next(a) => write!(f, "X {a}"),
            Ltl::Until(a, b) => write!(f, "({a} U {b})"),
            Ltl::StrongSere(r) => {
                fmt_sere(r, f)?;
                write!(f, "!")
            }
            Ltl::SuffixImpl(r, g) => {
                fmt_sere(r, f)?;
                write!(f, " |-> {g}")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type L = Ltl<String>;

    fn p() -> L {
        Ltl::Atom(Expr::Var("p".to_string()))
    }

    #[test]
    fn constructors_fold_constants() {
        assert_eq!(L::and([L::True, p()]), p());
        assert_eq!(L::or([L::False, L::True]), L::True);
        assert_eq!(L::not(L::not(p())), p());
        assert_eq!(L::until(p(), L::False), L::False);
        assert_eq!(L::iff(L::False, p()), L::not(p()));
    }

    #[test]
    fn atoms_include_sere_letters() {
        let r = Sere::concat(Sere::Letter(Expr::Var("a".to_string())), Sere::Letter(Expr::Var("b".to_string())));
        let f = L::and([p(), L::StrongSere(Box::new(r))]);
        assert_eq!(f.vars().len(), 3);
        assert!(!f.is_propositional());
    }
}
