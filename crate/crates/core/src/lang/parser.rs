//! Recursive-descent parser. Parsing yields an untyped syntax tree first;
//! elaboration then decides, from context, whether a node is a formula or a
//! term (`next(...)` is `X` in formula position and a term operator under a
//! comparison), resolves names against the signature and canonicalizes
//! atoms so that the constant side of a comparison is on the right.

use num::Zero;

use crate::project::Signature;
use crate::rational::Q;

use super::ast::{CmpOp, Formula, Quantifier, Sere, Term};
use super::lexer::{lex, Tok, Token};
use super::typecheck::{check_atom, check_letter, Scope};
use super::{LangError, LangErrorKind, Span};

#[derive(Debug, Clone)]
struct Node {
    kind: Syn,
    span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Prefix {
    Not,
    Always,
    Eventually,
    Never,
    Next,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Bin {
    And,
    Or,
    Implies,
    Iff,
    Until,
    Release,
    Add,
    Sub,
    Mul,
    Div,
    Cmp(CmpOp),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum SereUse {
    Strong,
    Impl,
    ImplNext,
}

#[derive(Debug, Clone)]
enum Syn {
    Num(Q),
    True,
    False,
    Null,
    Ident(String),
    Attr(String, String),
    NextCall(Box<Node>),
    DerCall(Box<Node>),
    Prefix(Prefix, Box<Node>),
    Neg(Box<Node>),
    Bin(Bin, Box<Node>, Box<Node>),
    Quant(Quantifier, String, String, Box<Node>),
    Sere(SereUse, Box<Sere<Node>>, Option<Box<Node>>),
}

const KEYWORDS: &[&str] = &[
    "always", "eventually", "never", "next", "until", "releases", "implies", "iff", "and", "or", "not", "forall",
    "exists", "true", "false", "null", "der",
];

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

fn syntax(msg: impl Into<String>, span: Span) -> LangError {
    LangError { kind: LangErrorKind::Syntax(msg.into()), span }
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn prev_span(&self) -> Span {
        self.toks[self.pos.saturating_sub(1)].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok, what: &str) -> Result<Span, LangError> {
        if self.peek() == tok {
            Ok(self.bump().span)
        } else {
            Err(syntax(format!("expected {what}, found {}", describe(self.peek())), self.span()))
        }
    }

    fn is_word(&self, k: usize, word: &str) -> bool {
        matches!(self.peek_at(k), Tok::Ident(w) if w == word)
    }

    fn eat_word(&mut self, word: &str) -> bool {
        if self.is_word(0, word) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, Span), LangError> {
        match self.peek().clone() {
            Tok::Ident(w) if !KEYWORDS.contains(&w.as_str()) => {
                let span = self.bump().span;
                Ok((w, span))
            }
            other => Err(syntax(format!("expected {what}, found {}", describe(&other)), self.span())),
        }
    }

    fn node(kind: Syn, span: Span) -> Node {
        Node { kind, span }
    }

    fn bin(op: Bin, a: Node, b: Node) -> Node {
        let span = a.span.join(b.span);
        Node { kind: Syn::Bin(op, Box::new(a), Box::new(b)), span }
    }

    fn formula(&mut self) -> Result<Node, LangError> {
        if let Some(q) = self.quantifier_start() {
            return self.quantifier(q);
        }
        self.temporal_binary()
    }

    fn quantifier_start(&self) -> Option<(Quantifier, usize)> {
        if self.is_word(0, "forall") {
            Some((Quantifier::Forall, 1))
        } else if self.is_word(0, "for") && self.is_word(1, "all") {
            Some((Quantifier::Forall, 2))
        } else if self.is_word(0, "exists") {
            Some((Quantifier::Exists, 1))
        } else if self.is_word(0, "there") && self.is_word(1, "exists") {
            Some((Quantifier::Exists, 2))
        } else {
            None
        }
    }

    fn quantifier(&mut self, (q, words): (Quantifier, usize)) -> Result<Node, LangError> {
        let start = self.span();
        for _ in 0..words {
            self.bump();
        }
        let (var, _) = self.ident("a variable name")?;
        if !self.eat_word("in") {
            return Err(syntax(format!("expected `in`, found {}", describe(self.peek())), self.span()));
        }
        let (class, _) = self.ident("a class name")?;
        self.expect(&Tok::Dot, "`.`")?;
        let body = self.formula()?;
        let span = start.join(body.span);
        Ok(Self::node(Syn::Quant(q, var, class, Box::new(body)), span))
    }

    fn temporal_binary(&mut self) -> Result<Node, LangError> {
        let mut lhs = self.iff()?;
        loop {
            let op = if self.eat_word("until") {
                Bin::Until
            } else if self.eat_word("releases") {
                Bin::Release
            } else {
                return Ok(lhs);
            };
            let rhs = self.iff()?;
            lhs = Self::bin(op, lhs, rhs);
        }
    }

    fn iff(&mut self) -> Result<Node, LangError> {
        let mut lhs = self.implies()?;
        while self.eat_word("iff") || self.eat(&Tok::DoubleArrow) {
            let rhs = self.implies()?;
            lhs = Self::bin(Bin::Iff, lhs, rhs);
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Node, LangError> {
        let lhs = self.or()?;
        if self.eat_word("implies") || self.eat(&Tok::Arrow) {
            let rhs = self.implies()?;
            return Ok(Self::bin(Bin::Implies, lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Node, LangError> {
        let mut lhs = self.and()?;
        while self.eat_word("or") || self.eat(&Tok::OrOr) {
            let rhs = self.and()?;
            lhs = Self::bin(Bin::Or, lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Node, LangError> {
        let mut lhs = self.unary()?;
        while self.eat_word("and") || self.eat(&Tok::AndAnd) {
            let rhs = self.unary()?;
            lhs = Self::bin(Bin::And, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node, LangError> {
        if let Some(q) = self.quantifier_start() {
            return self.quantifier(q);
        }
        let start = self.span();
        let prefix = if self.is_word(0, "not") {
            self.bump();
            Some(Prefix::Not)
        } else if self.is_word(0, "always") {
            self.bump();
            Some(Prefix::Always)
        } else if self.is_word(0, "eventually") {
            self.bump();
            Some(Prefix::Eventually)
        } else if self.is_word(0, "never") {
            self.bump();
            Some(Prefix::Never)
        } else if self.is_word(0, "in") && self.is_word(1, "the") && self.is_word(2, "future") {
            for _ in 0..3 {
                self.bump();
            }
            Some(Prefix::Eventually)
        } else if self.is_word(0, "next") && self.peek_at(1) != &Tok::LParen {
            self.bump();
            Some(Prefix::Next)
        } else {
            None
        };
        match prefix {
            Some(p) => {
                let operand = self.unary()?;
                let span = start.join(operand.span);
                Ok(Self::node(Syn::Prefix(p, Box::new(operand)), span))
            }
            None => self.comparison(),
        }
    }

    fn comparison(&mut self) -> Result<Node, LangError> {
        let lhs = self.sum()?;
        let op = match self.peek() {
            Tok::Lt => CmpOp::Lt,
            Tok::Le => CmpOp::Le,
            Tok::Eq => CmpOp::Eq,
            Tok::Ge => CmpOp::Ge,
            Tok::Gt => CmpOp::Gt,
            Tok::Ne => CmpOp::Ne,
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.sum()?;
        Ok(Self::bin(Bin::Cmp(op), lhs, rhs))
    }

    fn sum(&mut self) -> Result<Node, LangError> {
        let mut lhs = self.product()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => Bin::Add,
                Tok::Minus => Bin::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.product()?;
            lhs = Self::bin(op, lhs, rhs);
        }
    }

    fn product(&mut self) -> Result<Node, LangError> {
        let mut lhs = self.negation()?;
        loop {
            let op = match self.peek() {
                Tok::Star => Bin::Mul,
                Tok::Slash => Bin::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.negation()?;
            lhs = Self::bin(op, lhs, rhs);
        }
    }

    fn negation(&mut self) -> Result<Node, LangError> {
        if self.peek() == &Tok::Minus {
            let start = self.bump().span;
            let inner = self.negation()?;
            let span = start.join(inner.span);
            return Ok(Self::node(Syn::Neg(Box::new(inner)), span));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Node, LangError> {
        let start = self.span();
        match self.peek().clone() {
            Tok::Num(q) => {
                self.bump();
                Ok(Self::node(Syn::Num(q), start))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.formula()?;
                let end = self.expect(&Tok::RParen, "`)`")?;
                Ok(Node { kind: inner.kind, span: start.join(end) })
            }
            Tok::LBrace => self.sere_formula(),
            Tok::Ident(w) => match w.as_str() {
                "true" => {
                    self.bump();
                    Ok(Self::node(Syn::True, start))
                }
                "false" => {
                    self.bump();
                    Ok(Self::node(Syn::False, start))
                }
                "null" => {
                    self.bump();
                    Ok(Self::node(Syn::Null, start))
                }
                "next" | "der" => {
                    self.bump();
                    self.expect(&Tok::LParen, "`(`")?;
                    let inner = self.formula()?;
                    let end = self.expect(&Tok::RParen, "`)`")?;
                    let kind = if w == "next" {
                        Syn::NextCall(Box::new(inner))
                    } else {
                        Syn::DerCall(Box::new(inner))
                    };
                    Ok(Self::node(kind, start.join(end)))
                }
                _ => {
                    let (name, span) = self.ident("an expression")?;
                    if self.peek() == &Tok::Dot && matches!(self.peek_at(1), Tok::Ident(_)) {
                        self.bump();
                        let Token { tok: Tok::Ident(attr), span: aspan } = self.bump() else { unreachable!() };
                        return Ok(Self::node(Syn::Attr(name, attr), span.join(aspan)));
                    }
                    Ok(Self::node(Syn::Ident(name), span))
                }
            },
            other => Err(syntax(format!("expected an expression, found {}", describe(&other)), start)),
        }
    }

    fn sere_formula(&mut self) -> Result<Node, LangError> {
        let start = self.expect(&Tok::LBrace, "`{`")?;
        let r = self.sere()?;
        self.expect(&Tok::RBrace, "`}`")?;
        let (usage, rhs) = match self.peek() {
            Tok::Bang => {
                self.bump();
                (SereUse::Strong, None)
            }
            Tok::SuffixImpl => {
                self.bump();
                (SereUse::Impl, Some(Box::new(self.unary()?)))
            }
            Tok::SuffixImplNext => {
                self.bump();
                (SereUse::ImplNext, Some(Box::new(self.unary()?)))
            }
            other => {
                return Err(syntax(
                    format!("expected `!`, `|->` or `|=>` after a SERE, found {}", describe(other)),
                    self.span(),
                ))
            }
        };
        let span = start.join(rhs.as_ref().map_or(self.prev_span(), |n| n.span));
        Ok(Self::node(Syn::Sere(usage, Box::new(r), rhs), span))
    }

    fn sere(&mut self) -> Result<Sere<Node>, LangError> {
        let mut lhs = self.sere_concat()?;
        while self.eat(&Tok::Pipe) {
            lhs = Sere::union(lhs, self.sere_concat()?);
        }
        Ok(lhs)
    }

    fn sere_concat(&mut self) -> Result<Sere<Node>, LangError> {
        let mut lhs = self.sere_fusion()?;
        while self.eat(&Tok::Semi) {
            lhs = Sere::concat(lhs, self.sere_fusion()?);
        }
        Ok(lhs)
    }

    fn sere_fusion(&mut self) -> Result<Sere<Node>, LangError> {
        let mut lhs = self.sere_postfix()?;
        while self.eat(&Tok::Colon) {
            lhs = Sere::fusion(lhs, self.sere_postfix()?);
        }
        Ok(lhs)
    }

    fn sere_postfix(&mut self) -> Result<Sere<Node>, LangError> {
        let mut r = if self.eat(&Tok::LBrace) {
            let inner = self.sere()?;
            self.expect(&Tok::RBrace, "`}`")?;
            inner
        } else {
            Sere::Letter(self.or()?)
        };
        while self.peek() == &Tok::LBracket {
            self.bump();
            self.expect(&Tok::Star, "`*`")?;
            match self.peek().clone() {
                Tok::RBracket => {
                    self.bump();
                    r = Sere::star(r);
                }
                Tok::Num(q) if q.is_integer() && q >= Q::zero() => {
                    let span = self.bump().span;
                    let n = u32::try_from(q.to_integer()).map_err(|_| syntax("repetition count too large", span))?;
                    self.expect(&Tok::RBracket, "`]`")?;
                    r = Sere::repeat(r, n);
                }
                other => return Err(syntax(format!("expected a repetition count, found {}", describe(&other)), self.span())),
            }
        }
        Ok(r)
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(w) => format!("`{w}`"),
        Tok::Num(q) => format!("number {q}"),
        Tok::Eof => "end of input".into(),
        other => format!("{other:?}"),
    }
}

fn parse_syntax(src: &str) -> Result<Node, LangError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0 };
    let node = p.formula()?;
    if p.peek() != &Tok::Eof {
        return Err(syntax(format!("unexpected {}", describe(p.peek())), p.span()));
    }
    Ok(node)
}

struct Elaborator<'s> {
    sig: &'s Signature,
    scope: Scope,
    check_types: bool,
}

fn err(kind: LangErrorKind, span: Span) -> LangError {
    LangError { kind, span }
}

impl Elaborator<'_> {
    fn formula(&mut self, n: &Node) -> Result<Formula, LangError> {
        let f = match &n.kind {
            Syn::True => Formula::True,
            Syn::False => Formula::False,
            Syn::Attr(..) => self.atom(Formula::Prop(self.term(n)?), n.span)?,
            Syn::Ident(name) => {
                return Err(if self.scope.iter().any(|(v, _)| v == name) {
                    err(LangErrorKind::Type(format!("object variable {name} used as a formula")), n.span)
                } else {
                    err(LangErrorKind::UnknownAttribute(name.clone()), n.span)
                })
            }
            Syn::NextCall(inner) => Formula::next(self.formula(inner)?),
            Syn::DerCall(_) | Syn::Num(_) | Syn::Null | Syn::Neg(_) => {
                return Err(err(LangErrorKind::Type("arithmetic term used as a formula".into()), n.span))
            }
            Syn::Prefix(p, inner) => {
                let a = self.formula(inner)?;
                match p {
                    Prefix::Not => Formula::not(a),
                    Prefix::Always => Formula::always(a),
                    Prefix::Eventually => Formula::eventually(a),
                    Prefix::Never => Formula::always(Formula::not(a)),
                    Prefix::Next => Formula::next(a),
                }
            }
            Syn::Bin(Bin::Cmp(op), a, b) => {
                let (ta, tb) = (self.term(a)?, self.term(b)?);
                let atom = if ta.is_closed_constant() && !tb.is_closed_constant() {
                    Formula::Cmp(tb, op.flipped(), ta)
                } else {
                    Formula::Cmp(ta, *op, tb)
                };
                self.atom(atom, n.span)?
            }
            Syn::Bin(op @ (Bin::Add | Bin::Sub | Bin::Mul | Bin::Div), ..) => {
                let _ = op;
                return Err(err(LangErrorKind::Type("arithmetic term used as a formula".into()), n.span));
            }
            Syn::Bin(op, a, b) => {
                let (fa, fb) = (self.formula(a)?, self.formula(b)?);
                match op {
                    Bin::And => Formula::and(fa, fb),
                    Bin::Or => Formula::or(fa, fb),
                    Bin::Implies => Formula::implies(fa, fb),
                    Bin::Iff => Formula::iff(fa, fb),
                    Bin::Until => Formula::until(fa, fb),
                    Bin::Release => Formula::release(fa, fb),
                    _ => unreachable!("arithmetic handled above"),
                }
            }
            Syn::Quant(q, var, class, body) => {
                if self.sig.class(class).is_none() {
                    return Err(err(LangErrorKind::UnknownClass(class.clone()), n.span));
                }
                self.scope.push((var.clone(), class.clone()));
                let body = self.formula(body);
                self.scope.pop();
                Formula::Quant { q: *q, var: var.clone(), class: class.clone(), body: Box::new(body?) }
            }
            Syn::Sere(usage, r, rhs) => {
                let r = r.try_map(&mut |letter: &Node| {
                    let f = self.formula(letter)?;
                    if self.check_types {
                        check_letter(&f).map_err(|k| err(k, letter.span))?;
                    }
                    Ok::<_, LangError>(f)
                })?;
                match (usage, rhs) {
                    (SereUse::Strong, _) => Formula::StrongMatch(Box::new(r)),
                    (SereUse::Impl, Some(g)) => Formula::SuffixImpl(Box::new(r), Box::new(self.formula(g)?)),
                    (SereUse::ImplNext, Some(g)) => Formula::SuffixImplNext(Box::new(r), Box::new(self.formula(g)?)),
                    _ => unreachable!("parser attaches a consequent to suffix implications"),
                }
            }
        };
        Ok(f)
    }

    fn atom(&self, f: Formula, span: Span) -> Result<Formula, LangError> {
        if self.check_types {
            check_atom(&f, self.sig, &self.scope).map_err(|k| err(k, span))?;
        }
        Ok(f)
    }

    fn term(&self, n: &Node) -> Result<Term, LangError> {
        Ok(match &n.kind {
            Syn::Num(q) => Term::Const(q.clone()),
            Syn::Null => Term::Null,
            Syn::Ident(name) => {
                if self.scope.iter().any(|(v, _)| v == name) {
                    Term::Obj(name.clone())
                } else {
                    Term::Sym(name.clone())
                }
            }
            Syn::Attr(obj, attr) => {
                let class = self
                    .scope
                    .iter()
                    .rev()
                    .find(|(v, _)| v == obj)
                    .map(|(_, c)| c.clone())
                    .ok_or_else(|| err(LangErrorKind::UnboundVariable(obj.clone()), n.span))?;
                let def = self.sig.class(&class).expect("quantified classes are declared");
                if def.attribute(attr).is_none() {
                    return Err(err(LangErrorKind::UnknownAttribute(attr.clone()), n.span));
                }
                Term::attr(obj, attr)
            }
            Syn::NextCall(inner) => Term::Next(Box::new(self.term(inner)?)),
            Syn::DerCall(inner) => Term::Der(Box::new(self.term(inner)?)),
            Syn::Neg(inner) => match self.term(inner)? {
                Term::Const(q) => Term::Const(-q),
                t => Term::Scale(-Q::from_integer(1.into()), Box::new(t)),
            },
            Syn::Bin(op @ (Bin::Add | Bin::Sub), a, b) => {
                let (ta, tb) = (self.term(a)?, self.term(b)?);
                match (ta, tb, op) {
                    (Term::Const(x), Term::Const(y), Bin::Add) => Term::Const(x + y),
                    (Term::Const(x), Term::Const(y), _) => Term::Const(x - y),
                    (ta, tb, Bin::Add) => Term::Add(Box::new(ta), Box::new(tb)),
                    (ta, tb, _) => Term::Sub(Box::new(ta), Box::new(tb)),
                }
            }
            Syn::Bin(Bin::Mul, a, b) => match (self.term(a)?, self.term(b)?) {
                (Term::Const(x), Term::Const(y)) => Term::Const(x * y),
                (Term::Const(x), t) | (t, Term::Const(x)) => Term::Scale(x, Box::new(t)),
                _ => return Err(err(LangErrorKind::Type("nonlinear product of terms".into()), n.span)),
            },
            Syn::Bin(Bin::Div, a, b) => match (self.term(a)?, self.term(b)?) {
                (_, Term::Const(y)) if y.is_zero() => {
                    return Err(err(LangErrorKind::Type("division by zero".into()), b.span))
                }
                (Term::Const(x), Term::Const(y)) => Term::Const(x / y),
                (t, Term::Const(y)) => Term::Scale(Q::from_integer(1.into()) / y, Box::new(t)),
                _ => return Err(err(LangErrorKind::Type("division by a non-constant term".into()), n.span)),
            },
            _ => return Err(err(LangErrorKind::Type("formula used where a term is expected".into()), n.span)),
        })
    }
}

/// Parses and resolves a constraint against the signature. Type rules are
/// not applied; see [`parse_typed`].
pub fn parse_constraint(src: &str, sig: &Signature) -> Result<Formula, LangError> {
    let node = parse_syntax(src)?;
    Elaborator { sig, scope: Vec::new(), check_types: false }.formula(&node)
}

/// Parses and typechecks in one pass, so that type errors carry spans.
pub fn parse_typed(src: &str, sig: &Signature) -> Result<Formula, LangError> {
    let node = parse_syntax(src)?;
    let f = Elaborator { sig, scope: Vec::new(), check_types: true }.formula(&node)?;
    super::typecheck(&f, sig)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::project::{AttrType, Attribute, ClassDef, RealKind};
    use crate::rational::{frac, int};

    fn sig() -> Signature {
        Signature {
            classes: vec![ClassDef {
                name: "Train".into(),
                attributes: vec![
                    Attribute { name: "speed".into(), ty: AttrType::Real, kind: Some(RealKind::Continuous) },
                    Attribute { name: "p".into(), ty: AttrType::Boolean, kind: None },
                    Attribute { name: "q".into(), ty: AttrType::Boolean, kind: None },
                    Attribute {
                        name: "mode".into(),
                        ty: AttrType::Enumeration(vec!["idle".into(), "run".into()]),
                        kind: None,
                    },
                ],
            }],
        }
    }

    #[test]
    fn parses_always_forall() {
        let f = parse_typed("always (forall t in Train . t.speed >= 0)", &sig()).unwrap();
        let expected = Formula::always(Formula::forall(
            "t",
            "Train",
            Formula::Cmp(Term::attr("t", "speed"), CmpOp::Ge, Term::Const(int(0))),
        ));
        assert_eq!(f, expected);
    }

    #[test]
    fn unknown_bare_attribute() {
        let e = parse_typed("in the future x > 1", &Signature::default()).unwrap_err();
        assert_eq!(e.message(), "unknown attribute x");
        assert_eq!(e.span, Span::new(14, 19));
    }

    #[test]
    fn parses_strong_sere() {
        let f = parse_typed("forall t in Train . { t.p ; t.q [*2] }!", &sig()).unwrap();
        let Formula::Quant { body, .. } = f else { panic!() };
        assert_eq!(
            *body,
            Formula::StrongMatch(Box::new(Sere::concat(
                Sere::Letter(Formula::Prop(Term::attr("t", "p"))),
                Sere::repeat(Sere::Letter(Formula::Prop(Term::attr("t", "q"))), 2),
            )))
        );
    }

    #[test]
    fn constant_side_moves_right() {
        let f = parse_typed("forall t in Train . 3/2 <= t.speed", &sig()).unwrap();
        let Formula::Quant { body, .. } = f else { panic!() };
        assert_eq!(*body, Formula::Cmp(Term::attr("t", "speed"), CmpOp::Ge, Term::Const(frac(3, 2))));
    }

    #[test]
    fn next_is_contextual() {
        let f = parse_typed("forall t in Train . next(t.speed) = t.speed + 1", &sig()).unwrap();
        let Formula::Quant { body, .. } = f else { panic!() };
        assert!(matches!(*body, Formula::Cmp(Term::Next(_), CmpOp::Eq, Term::Add(..))));
        let f = parse_typed("forall t in Train . next (t.p) and t.q", &sig()).unwrap();
        let Formula::Quant { body, .. } = f else { panic!() };
        assert!(matches!(*body, Formula::And(ref a, _) if matches!(**a, Formula::Next(_))));
    }

    #[test]
    fn sugar_forms() {
        let s = sig();
        let f = parse_typed("forall t in Train . never t.p", &s).unwrap();
        let Formula::Quant { body, .. } = f else { panic!() };
        assert_eq!(*body, Formula::always(Formula::not(Formula::Prop(Term::attr("t", "p")))));
        assert!(parse_typed("for all t in Train . there exists u in Train . t.p implies u.q", &s).is_ok());
        assert!(parse_typed("forall t in Train . t.p until t.q releases t.p", &s).is_ok());
    }

    #[test]
    fn errors_carry_spans() {
        let s = sig();
        let e = parse_typed("forall t in Train . t.speed >=", &s).unwrap_err();
        assert!(matches!(e.kind, LangErrorKind::Syntax(_)));
        let e = parse_typed("forall t in Bus . true", &s).unwrap_err();
        assert_eq!(e.message(), "unknown class Bus");
        let e = parse_typed("u.p", &s).unwrap_err();
        assert_eq!(e.message(), "unbound variable u");
        let e = parse_typed("forall t in Train . t.speed * t.speed > 1", &s).unwrap_err();
        assert!(e.message().contains("nonlinear"));
    }

    #[test]
    fn precedence_and_below_or() {
        let s = sig();
        let f = parse_typed("forall t in Train . t.p or t.q and t.p", &s).unwrap();
        let Formula::Quant { body, .. } = f else { panic!() };
        assert!(matches!(*body, Formula::Or(_, ref r) if matches!(**r, Formula::And(..))));
        let f = parse_typed("forall t in Train . t.p until t.q or t.p", &s).unwrap();
        let Formula::Quant { body, .. } = f else { panic!() };
        assert!(matches!(*body, Formula::Until(..)));
    }
}
