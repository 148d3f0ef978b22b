use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num::{BigInt, One, Signed, Zero};

use crate::expr::{CmpOp, Expr, Lin};
use crate::rational::{denom_lcm, Q};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sort {
    Bool,
    Real,
    /// Integers, optionally bounded; finite enumerations are lowered to
    /// `Int` with bounds `0..n-1`.
    Int { lo: Option<i64>, hi: Option<i64> },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SmtProblem {
    pub decls: Vec<(String, Sort)>,
    /// Assertions, optionally named for unsat cores.
    pub assertions: Vec<(Option<String>, Expr<String>)>,
    pub produce_cores: bool,
}

impl SmtProblem {
    pub fn declare(&mut self, name: impl Into<String>, sort: Sort) {
        self.decls.push((name.into(), sort));
    }

    pub fn assert(&mut self, e: Expr<String>) {
        self.assertions.push((None, e));
    }

    pub fn assert_named(&mut self, name: impl Into<String>, e: Expr<String>) {
        self.assertions.push((Some(name.into()), e));
        self.produce_cores = true;
    }

    pub fn sorts(&self) -> BTreeMap<&str, &Sort> {
        self.decls.iter().map(|(n, s)| (n.as_str(), s)).collect()
    }

    pub fn logic(&self) -> &'static str {
        if self.decls.iter().any(|(_, s)| matches!(s, Sort::Int { .. })) {
            "QF_LIRA"
        } else {
            "QF_LRA"
        }
    }

    /// Header, declarations (with range constraints) and assertions.
    pub fn preamble(&self) -> String {
        let mut out = String::new();
        if self.produce_cores {
            out.push_str("(set-option :produce-unsat-cores true)\n");
        }
        out.push_str("(set-option :produce-models true)\n");
        let _ = writeln!(out, "(set-logic {})", self.logic());
        let sorts = self.sorts();
        for (name, sort) in &self.decls {
            let s = match sort {
                Sort::Bool => "Bool",
                Sort::Real => "Real",
                Sort::Int { .. } => "Int",
            };
            let _ = writeln!(out, "(declare-const {} {s})", symbol(name));
            if let Sort::Int { lo, hi } = sort {
                if let Some(lo) = lo {
                    let _ = writeln!(out, "(assert (>= {} {}))", symbol(name), int_lit(&BigInt::from(*lo)));
                }
                if let Some(hi) = hi {
                    let _ = writeln!(out, "(assert (<= {} {}))", symbol(name), int_lit(&BigInt::from(*hi)));
                }
            }
        }
        for (name, e) in &self.assertions {
            let body = emit(e, &sorts);
            match name {
                Some(n) => {
                    let _ = writeln!(out, "(assert (! {body} :named {}))", symbol(n));
                }
                None => {
                    let _ = writeln!(out, "(assert {body})");
                }
            }
        }
        out
    }

    /// Complete standalone query text.
    pub fn to_smtlib(&self) -> String {
        let mut out = self.preamble();
        out.push_str("(check-sat)\n");
        out
    }

    pub fn assertion_names(&self) -> BTreeSet<&str> {
        self.assertions.iter().filter_map(|(n, _)| n.as_deref()).collect()
    }
}

pub fn symbol(name: &str) -> String {
    format!("|{name}|")
}

fn int_lit(n: &BigInt) -> String {
    if n.is_negative() {
        format!("(- {})", -n)
    } else {
        n.to_string()
    }
}

fn real_lit(n: &BigInt) -> String {
    if n.is_negative() {
        format!("(- {}.0)", -n)
    } else {
        format!("{n}.0")
    }
}

/// SMT-LIB text for an expression; declared sorts decide whether atoms are
/// integer or real and where `to_real` coercions are needed.
pub fn emit(e: &Expr<String>, sorts: &BTreeMap<&str, &Sort>) -> String {
    let mut out = String::new();
    emit_into(e, sorts, &mut out);
    out
}

fn emit_into(e: &Expr<String>, sorts: &BTreeMap<&str, &Sort>, out: &mut String) {
    let list = |op: &str, xs: &[&Expr<String>], out: &mut String| {
        out.push('(');
        out.push_str(op);
        for x in xs {
            out.push(' ');
            emit_into(x, sorts, out);
        }
        out.push(')');
    };
    match e {
        Expr::True => out.push_str("true"),
        Expr::False => out.push_str("false"),
        Expr::Var(v) => out.push_str(&symbol(v)),
        Expr::Cmp(lin, op) => emit_atom(lin, *op, sorts, out),
        Expr::Not(a) => list("not", &[a], out),
        Expr::And(xs) => list("and", &xs.iter().collect::<Vec<_>>(), out),
        Expr::Or(xs) => list("or", &xs.iter().collect::<Vec<_>>(), out),
        Expr::Iff(a, b) => list("=", &[a, b], out),
    }
}

fn emit_atom(lin: &Lin<String>, op: CmpOp, sorts: &BTreeMap<&str, &Sort>, out: &mut String) {
    let scale = Q::from_integer(denom_lcm(lin.terms.values().chain(std::iter::once(&lin.constant))));
    let is_int = |v: &str| matches!(sorts.get(v), Some(Sort::Int { .. }));
    let real = !lin.terms.keys().all(|v| is_int(v));
    let lit = |n: &BigInt| if real { real_lit(n) } else { int_lit(n) };
    let mut summands = Vec::new();
    for (v, c) in &lin.terms {
        let c = (c * &scale).to_integer();
        let var = if real && is_int(v) { format!("(to_real {})", symbol(v)) } else { symbol(v) };
        if c.is_one() {
            summands.push(var);
        } else {
            summands.push(format!("(* {} {var})", lit(&c)));
        }
    }
    let k = (&lin.constant * &scale).to_integer();
    // Constant goes to the right-hand side: sum op -k.
    let lhs = match summands.len() {
        0 => lit(&BigInt::zero()),
        1 => summands.pop().unwrap(),
        _ => format!("(+ {})", summands.join(" ")),
    };
    let rhs = lit(&-k);
    let _ = match op {
        CmpOp::Ne => write!(out, "(not (= {lhs} {rhs}))"),
        op => write!(out, "({} {lhs} {rhs})", op.symbol()),
    };
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    #[test]
    fn atoms_are_scaled_to_integers() {
        let mut p = SmtProblem::default();
        p.declare("x", Sort::Real);
        p.declare("n", Sort::Int { lo: Some(0), hi: Some(2) });
        let mut lin = Lin::term("x".to_string(), frac(1, 2));
        lin.add_term("n".to_string(), int(1));
        lin.constant = frac(-1, 3);
        p.assert(Expr::cmp(lin, CmpOp::Le));
        let text = p.to_smtlib();
        assert!(text.contains("(set-logic QF_LIRA)"));
        assert!(text.contains("(assert (<= (+ (* 6.0 (to_real |n|)) (* 3.0 |x|)) 2.0))"), "{text}");
        assert_eq!(text, p.clone().to_smtlib());
    }

    #[test]
    fn integer_atoms_stay_integer() {
        let sorts: BTreeMap<&str, &Sort> = [("n", &Sort::Int { lo: None, hi: None })].into_iter().collect();
        let mut lin = Lin::var("n".to_string());
        lin.constant = int(3);
        assert_eq!(emit(&Expr::cmp(lin, CmpOp::Ne), &sorts), "(not (= |n| (- 3)))");
    }
}
