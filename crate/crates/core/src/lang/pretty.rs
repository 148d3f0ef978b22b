//! Printer producing concrete syntax that parses back to the same tree.

use crate::rational::fmt_q;

use super::ast::{Formula, Quantifier, Sere, Term};

// Binding levels, loosest first; they mirror the parser's descent order.
const QUANT: u8 = 0;
const TEMPORAL: u8 = 1;
const IFF: u8 = 2;
const IMPLIES: u8 = 3;
const OR: u8 = 4;
const AND: u8 = 5;
const UNARY: u8 = 6;
const ATOM: u8 = 7;

pub fn pretty(f: &Formula) -> String {
    let mut out = String::new();
    formula(f, QUANT, &mut out);
    out
}

pub fn pretty_term(t: &Term) -> String {
    let mut out = String::new();
    term(t, 0, &mut out);
    out
}

fn level(f: &Formula) -> u8 {
    match f {
        Formula::Quant { .. } => QUANT,
        Formula::Until(..) | Formula::Release(..) => TEMPORAL,
        Formula::Iff(..) => IFF,
        Formula::Implies(..) => IMPLIES,
        Formula::Or(..) => OR,
        Formula::And(..) => AND,
        Formula::Not(_)
        | Formula::Always(_)
        | Formula::Eventually(_)
        | Formula::SuffixImpl(..)
        | Formula::SuffixImplNext(..) => UNARY,
        _ => ATOM,
    }
}

fn formula(f: &Formula, min: u8, out: &mut String) {
    if level(f) < min {
        out.push('(');
        formula(f, QUANT, out);
        out.push(')');
        return;
    }
    let binary = |a: &Formula, op: &str, b: &Formula, la: u8, lb: u8, out: &mut String| {
        formula(a, la, out);
        out.push(' ');
        out.push_str(op);
        out.push(' ');
        formula(b, lb, out);
    };
    match f {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Prop(t) => term(t, 0, out),
        Formula::Cmp(a, op, b) => {
            term(a, 0, out);
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            term(b, 0, out);
        }
        Formula::Until(a, b) => binary(a, "until", b, TEMPORAL, TEMPORAL + 1, out),
        Formula::Release(a, b) => binary(a, "releases", b, TEMPORAL, TEMPORAL + 1, out),
        Formula::Iff(a, b) => binary(a, "iff", b, IFF, IFF + 1, out),
        Formula::Implies(a, b) => binary(a, "implies", b, IMPLIES + 1, IMPLIES, out),
        Formula::Or(a, b) => binary(a, "or", b, OR, OR + 1, out),
        Formula::And(a, b) => binary(a, "and", b, AND, AND + 1, out),
        Formula::Not(a) => prefix("not", a, out),
        Formula::Always(a) => prefix("always", a, out),
        Formula::Eventually(a) => prefix("eventually", a, out),
        Formula::Next(a) => {
            out.push_str("next (");
            formula(a, QUANT, out);
            out.push(')');
        }
        Formula::Quant { q, var, class, body } => {
            out.push_str(match q {
                Quantifier::Forall => "forall ",
                Quantifier::Exists => "exists ",
            });
            out.push_str(var);
            out.push_str(" in ");
            out.push_str(class);
            out.push_str(" . ");
            formula(body, QUANT, out);
        }
        Formula::StrongMatch(r) => {
            braced(r, out);
            out.push('!');
        }
        Formula::SuffixImpl(r, g) => {
            braced(r, out);
            out.push_str(" |-> ");
            formula(g, UNARY, out);
        }
        Formula::SuffixImplNext(r, g) => {
            braced(r, out);
            out.push_str(" |=> ");
            formula(g, UNARY, out);
        }
    }
}

fn prefix(op: &str, a: &Formula, out: &mut String) {
    out.push_str(op);
    out.push(' ');
    formula(a, UNARY, out);
}

fn braced(r: &Sere<Formula>, out: &mut String) {
    out.push_str("{ ");
    sere(r, 0, out);
    out.push_str(" }");
}

fn sere_level(r: &Sere<Formula>) -> u8 {
    match r {
        Sere::Union(..) => 0,
        Sere::Concat(..) => 1,
        Sere::Fusion(..) => 2,
        Sere::Star(_) | Sere::Repeat(..) => 3,
        Sere::Letter(_) => 4,
    }
}

fn sere(r: &Sere<Formula>, min: u8, out: &mut String) {
    if sere_level(r) < min {
        braced(r, out);
        return;
    }
    let binary = |a: &Sere<Formula>, op: &str, b: &Sere<Formula>, l: u8, out: &mut String| {
        sere(a, l, out);
        out.push_str(op);
        sere(b, l + 1, out);
    };
    match r {
        Sere::Letter(f) => formula(f, OR, out),
        Sere::Union(a, b) => binary(a, " | ", b, 0, out),
        Sere::Concat(a, b) => binary(a, " ; ", b, 1, out),
        Sere::Fusion(a, b) => binary(a, " : ", b, 2, out),
        Sere::Star(a) => {
            sere(a, 3, out);
            out.push_str(" [*]");
        }
        Sere::Repeat(a, n) => {
            sere(a, 3, out);
            out.push_str(&format!(" [*{n}]"));
        }
    }
}

// Term levels: 0 sum, 1 product operand, 2 atomic.
fn term(t: &Term, min: u8, out: &mut String) {
    let lvl = match t {
        Term::Add(..) | Term::Sub(..) => 0,
        Term::Scale(..) => 1,
        _ => 2,
    };
    if lvl < min {
        out.push('(');
        term(t, 0, out);
        out.push(')');
        return;
    }
    match t {
        Term::Const(q) => out.push_str(&fmt_q(q)),
        Term::Attr { obj, attr } => {
            out.push_str(obj);
            out.push('.');
            out.push_str(attr);
        }
        Term::Obj(v) | Term::Sym(v) => out.push_str(v),
        Term::Null => out.push_str("null"),
        Term::Add(a, b) => {
            term(a, 0, out);
            out.push_str(" + ");
            term(b, 1, out);
        }
        Term::Sub(a, b) => {
            term(a, 0, out);
            out.push_str(" - ");
            term(b, 1, out);
        }
        Term::Scale(c, inner) => {
            out.push_str(&fmt_q(c));
            out.push_str(" * ");
            term(inner, 2, out);
        }
        Term::Next(inner) => {
            out.push_str("next(");
            term(inner, 0, out);
            out.push(')');
        }
        Term::Der(inner) => {
            out.push_str("der(");
            term(inner, 0, out);
            out.push(')');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::CmpOp;
    use crate::rational::frac;

    #[test]
    fn always_of_conjunction() {
        let f = Formula::always(Formula::and(
            Formula::Prop(Term::attr("t", "p")),
            Formula::Prop(Term::attr("t", "q")),
        ));
        assert_eq!(pretty(&f), "always (t.p and t.q)");
    }

    #[test]
    fn canonical_atom() {
        let f = Formula::Cmp(Term::attr("t", "speed"), CmpOp::Ge, Term::Const(frac(3, 2)));
        assert_eq!(pretty(&f), "t.speed >= 3/2");
    }

    #[test]
    fn implication_is_right_associative() {
        let p = || Formula::Prop(Term::attr("t", "p"));
        let f = Formula::implies(Formula::implies(p(), p()), p());
        assert_eq!(pretty(&f), "(t.p implies t.p) implies t.p");
    }
}
