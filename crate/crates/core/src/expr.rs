//! Quantifier-free constraint language shared by the grounder, the FTS and the
//! SMT client: boolean structure over linear arithmetic atoms `lin ⋈ 0`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{fmt_q, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
    Ne,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "=",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
            CmpOp::Ne => "!=",
        }
    }

    /// Operator obtained by swapping the operands: `a < b` iff `b > a`.
    pub fn flipped(self) -> CmpOp {
        match self {
            CmpOp::Lt => CmpOp::Gt,
            CmpOp::Le => CmpOp::Ge,
            CmpOp::Ge => CmpOp::Le,
            CmpOp::Gt => CmpOp::Lt,
            op => op,
        }
    }

    pub fn negated(self) -> CmpOp {
        match self {
            CmpOp::Lt => CmpOp::Ge,
            CmpOp::Le => CmpOp::Gt,
            CmpOp::Eq => CmpOp::Ne,
            CmpOp::Ge => CmpOp::Lt,
            CmpOp::Gt => CmpOp::Le,
            CmpOp::Ne => CmpOp::Eq,
        }
    }

    /// Truth of `lhs ⋈ rhs`.
    pub fn holds(self, lhs: &Q, rhs: &Q) -> bool {
        match self {
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ge => lhs >= rhs,
            CmpOp::Gt => lhs > rhs,
            CmpOp::Ne => lhs != rhs,
        }
    }
}

/// Runtime value of a state variable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Bool(bool),
    Num(Q),
}

impl Value {
    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            Value::Num(_) => None,
        }
    }

    pub fn as_num(&self) -> Option<&Q> {
        match self {
            Value::Num(q) => Some(q),
            Value::Bool(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Num(q) => f.write_str(&fmt_q(q)),
        }
    }
}

/// Linear combination `Σ coeff·var + constant`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lin<V: Ord> {
    pub terms: BTreeMap<V, Q>,
    pub constant: Q,
}

impl<V: Ord + Clone> Lin<V> {
    pub fn zero() -> Self {
        Lin { terms: BTreeMap::new(), constant: Q::zero() }
    }

    pub fn constant(q: Q) -> Self {
        Lin { terms: BTreeMap::new(), constant: q }
    }

    pub fn var(v: V) -> Self {
        Lin::term(v, Q::from_integer(1.into()))
    }

    pub fn term(v: V, coeff: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(v, coeff);
        }
        Lin { terms, constant: Q::zero() }
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, v: V, coeff: Q) {
        let entry = self.terms.entry(v.clone()).or_insert_with(Q::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&v);
        }
    }

    pub fn plus(mut self, other: &Lin<V>) -> Self {
        for (v, c) in &other.terms {
            self.add_term(v.clone(), c.clone());
        }
        self.constant += &other.constant;
        self
    }

    pub fn minus(self, other: &Lin<V>) -> Self {
        self.plus(&other.scaled(&-Q::from_integer(1.into())))
    }

    pub fn scaled(&self, k: &Q) -> Self {
        if k.is_zero() {
            return Lin::zero();
        }
        Lin {
            terms: self.terms.iter().map(|(v, c)| (v.clone(), c * k)).collect(),
            constant: &self.constant * k,
        }
    }

    pub fn vars(&self) -> impl Iterator<Item = &V> {
        self.terms.keys()
    }

    pub fn map_vars<W: Ord + Clone>(&self, f: &mut impl FnMut(&V) -> W) -> Lin<W> {
        let mut out = Lin::constant(self.constant.clone());
        for (v, c) in &self.terms {
            out.add_term(f(v), c.clone());
        }
        out
    }

    pub fn eval(&self, env: &impl Fn(&V) -> Option<Value>) -> Option<Q> {
        let mut acc = self.constant.clone();
        for (v, c) in &self.terms {
            acc += c * env(v)?.as_num()?;
        }
        Some(acc)
    }
}

impl<V: Ord + fmt::Display> fmt::Display for Lin<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, c) in &self.terms {
            let one = Q::from_integer(1.into());
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if mag == one {
                write!(f, "{v}")?;
            } else {
                write!(f, "{}*{v}", fmt_q(&mag))?;
            }
            first = false;
        }
        if first {
            f.write_str(&fmt_q(&self.constant))?;
        } else if !self.constant.is_zero() {
            let neg = self.constant.is_negative();
            write!(f, "{}{}", if neg { " - " } else { " + " }, fmt_q(&self.constant.abs()))?;
        }
        Ok(())
    }
}

/// Boolean combination of boolean variables and linear atoms `lin ⋈ 0`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr<V: Ord> {
    True,
    False,
    Var(V),
    Cmp(Lin<V>, CmpOp),
    Not(Box<Expr<V>>),
    And(Vec<Expr<V>>),
    Or(Vec<Expr<V>>),
    Iff(Box<Expr<V>>, Box<Expr<V>>),
}

impl<V: Ord + Clone> Expr<V> {
    pub fn var(v: V) -> Self {
        Expr::Var(v)
    }

    /// `lin ⋈ 0`, folded to a constant when `lin` has no variables.
    pub fn cmp(lin: Lin<V>, op: CmpOp) -> Self {
        if lin.is_constant() {
            return Expr::from_bool(op.holds(&lin.constant, &Q::zero()));
        }
        Expr::Cmp(lin, op)
    }

    /// `lhs ⋈ rhs`.
    pub fn compare(lhs: Lin<V>, op: CmpOp, rhs: &Lin<V>) -> Self {
        Expr::cmp(lhs.minus(rhs), op)
    }

    pub fn from_bool(b: bool) -> Self {
        if b {
            Expr::True
        } else {
            Expr::False
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: Expr<V>) -> Self {
        match e {
            Expr::True => Expr::False,
            Expr::False => Expr::True,
            Expr::Not(inner) => *inner,
            other => Expr::Not(Box::new(other)),
        }
    }

    pub fn and(items: impl IntoIterator<Item = Expr<V>>) -> Self {
        let mut out = Vec::new();
        for e in items {
            match e {
                Expr::True => {}
                Expr::False => return Expr::False,
                Expr::And(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Expr::True,
            1 => out.pop().unwrap(),
            _ => Expr::And(out),
        }
    }

    pub fn or(items: impl IntoIterator<Item = Expr<V>>) -> Self {
        let mut out = Vec::new();
        for e in items {
            match e {
                Expr::False => {}
                Expr::True => return Expr::True,
                Expr::Or(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Expr::False,
            1 => out.pop().unwrap(),
            _ => Expr::Or(out),
        }
    }

    pub fn implies(a: Expr<V>, b: Expr<V>) -> Self {
        Expr::or([Expr::not(a), b])
    }

    pub fn iff(a: Expr<V>, b: Expr<V>) -> Self {
        match (a, b) {
            (Expr::True, x) | (x, Expr::True) => x,
            (Expr::False, x) | (x, Expr::False) => Expr::not(x),
            (a, b) => Expr::Iff(Box::new(a), Box::new(b)),
        }
    }

    pub fn map_vars<W: Ord + Clone>(&self, f: &mut impl FnMut(&V) -> W) -> Expr<W> {
        match self {
            Expr::True => Expr::True,
            Expr::False => Expr::False,
            Expr::Var(v) => Expr::Var(f(v)),
            Expr::Cmp(lin, op) => Expr::cmp(lin.map_vars(f), *op),
            Expr::Not(e) => Expr::not(e.map_vars(f)),
            Expr::And(es) => Expr::and(es.iter().map(|e| e.map_vars(f)).collect::<Vec<_>>()),
            Expr::Or(es) => Expr::or(es.iter().map(|e| e.map_vars(f)).collect::<Vec<_>>()),
            Expr::Iff(a, b) => Expr::iff(a.map_vars(f), b.map_vars(f)),
        }
    }

    /// Replaces selected sub-expressions bottom-up: `f` returns `Some` to
    /// substitute a node.
    pub fn rewrite(&self, f: &mut impl FnMut(&Expr<V>) -> Option<Expr<V>>) -> Expr<V> {
        if let Some(r) = f(self) {
            return r;
        }
        match self {
            Expr::Not(e) => Expr::not(e.rewrite(f)),
            Expr::And(es) => Expr::and(es.iter().map(|e| e.rewrite(f)).collect::<Vec<_>>()),
            Expr::Or(es) => Expr::or(es.iter().map(|e| e.rewrite(f)).collect::<Vec<_>>()),
            Expr::Iff(a, b) => Expr::iff(a.rewrite(f), b.rewrite(f)),
            other => other.clone(),
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<V>) {
        match self {
            Expr::True | Expr::False => {}
            Expr::Var(v) => {
                out.insert(v.clone());
            }
            Expr::Cmp(lin, _) => out.extend(lin.vars().cloned()),
            Expr::Not(e) => e.collect_vars(out),
            Expr::And(es) | Expr::Or(es) => es.iter().for_each(|e| e.collect_vars(out)),
            Expr::Iff(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn vars(&self) -> BTreeSet<V> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    /// Linear atoms (`Cmp` nodes) occurring anywhere in the expression.
    pub fn collect_atoms(&self, out: &mut BTreeSet<Expr<V>>) {
        match self {
            Expr::Cmp(..) => {
                out.insert(self.clone());
            }
            Expr::Not(e) => e.collect_atoms(out),
            Expr::And(es) | Expr::Or(es) => es.iter().for_each(|e| e.collect_atoms(out)),
            Expr::Iff(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
            _ => {}
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Expr::True | Expr::False | Expr::Var(_) | Expr::Cmp(..) => 1,
            Expr::Not(e) => 1 + e.size(),
            Expr::And(es) | Expr::Or(es) => 1 + es.iter().map(Expr::size).sum::<usize>(),
            Expr::Iff(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Three-valued evaluation: `None` when the outcome depends on a variable
    /// `env` does not know.
    pub fn eval(&self, env: &impl Fn(&V) -> Option<Value>) -> Option<bool> {
        match self {
            Expr::True => Some(true),
            Expr::False => Some(false),
            Expr::Var(v) => env(v)?.as_bool(),
            Expr::Cmp(lin, op) => Some(op.holds(&lin.eval(env)?, &Q::zero())),
            Expr::Not(e) => e.eval(env).map(|b| !b),
            Expr::And(es) => {
                let mut unknown = false;
                for e in es {
                    match e.eval(env) {
                        Some(false) => return Some(false),
                        None => unknown = true,
                        Some(true) => {}
                    }
                }
                if unknown {
                    None
                } else {
                    Some(true)
                }
            }
            Expr::Or(es) => {
                let mut unknown = false;
                for e in es {
                    match e.eval(env) {
                        Some(true) => return Some(true),
                        None => unknown = true,
                        Some(false) => {}
                    }
                }
                if unknown {
                    None
                } else {
                    Some(false)
                }
            }
            Expr::Iff(a, b) => Some(a.eval(env)? == b.eval(env)?),
        }
    }
}

impl<V: Ord + fmt::Display> fmt::Display for Expr<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::True => f.write_str("true"),
            Expr::False => f.write_str("false"),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Cmp(lin, op) => write!(f, "{lin} {} 0", op.symbol()),
            Expr::Not(e) => write!(f, "!({e})"),
            Expr::And(es) | Expr::Or(es) => {
                let sep = if matches!(self, Expr::And(_)) { " & " } else { " | " };
                f.write_str("(")?;
                for (i, e) in es.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    write!(f, "{e}")?;
                }
                f.write_str(")")
            }
            Expr::Iff(a, b) => write!(f, "({a} <-> {b})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn env(name: &str) -> Option<Value> {
        match name {
            "x" => Some(Value::Num(int(2))),
            "p" => Some(Value::Bool(true)),
            _ => None,
        }
    }

    #[test]
    fn linear_arithmetic_merges_terms() {
        let a = Lin::var("x").plus(&Lin::term("y", int(2)));
        let b = Lin::term("y", int(2)).plus(&Lin::constant(int(1)));
        let d = a.minus(&b);
        assert_eq!(d.terms.len(), 1);
        assert_eq!(d.constant, int(-1));
    }

    #[test]
    fn three_valued_eval_short_circuits() {
        let env = |v: &&str| env(v);
        let unknown = Expr::Var("q");
        let e = Expr::Or(vec![unknown.clone(), Expr::Var("p")]);
        assert_eq!(e.eval(&env), Some(true));
        let e = Expr::And(vec![unknown, Expr::Var("p")]);
        assert_eq!(e.eval(&env), None);
        let c = Expr::cmp(Lin::var("x").minus(&Lin::constant(frac(3, 2))), CmpOp::Gt);
        assert_eq!(c.eval(&env), Some(true));
    }

    #[test]
    fn constant_comparisons_fold() {
        assert_eq!(Expr::<&str>::cmp(Lin::constant(int(-1)), CmpOp::Ge), Expr::False);
        assert_eq!(Expr::<&str>::cmp(Lin::zero(), CmpOp::Eq), Expr::True);
    }
}
