use crate::project::{AttrType, Signature};

use super::ast::{CmpOp, Formula, Sere, Term};
use super::{LangError, LangErrorKind, Span};

/// Type of a term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ty {
    Num,
    Bool,
    Enum(Vec<String>),
    /// Reference attribute to the named class.
    Ref(String),
    /// Object variable of the named class.
    Obj(String),
    /// Unresolved enumeration symbol.
    Sym(String),
    Null,
}

/// Object variables in scope, innermost last: `(variable, class)`.
pub(crate) type Scope = Vec<(String, String)>;

fn lookup<'s>(scope: &'s Scope, var: &str) -> Option<&'s str> {
    scope.iter().rev().find(|(v, _)| v == var).map(|(_, c)| c.as_str())
}

fn ty_err(msg: impl Into<String>) -> LangErrorKind {
    LangErrorKind::Type(msg.into())
}

/// True when the term contains a `next` or `der` node.
fn has_modal(t: &Term) -> bool {
    match t {
        Term::Next(_) | Term::Der(_) => true,
        Term::Add(a, b) | Term::Sub(a, b) => has_modal(a) || has_modal(b),
        Term::Scale(_, t) => has_modal(t),
        _ => false,
    }
}

fn term_type_in(t: &Term, sig: &Signature, scope: &Scope) -> Result<Ty, LangErrorKind> {
    match t {
        Term::Const(_) => Ok(Ty::Num),
        Term::Null => Ok(Ty::Null),
        Term::Sym(s) => Ok(Ty::Sym(s.clone())),
        Term::Obj(v) => lookup(scope, v)
            .map(|c| Ty::Obj(c.to_string()))
            .ok_or_else(|| LangErrorKind::UnboundVariable(v.clone())),
        Term::Attr { obj, attr } => {
            let class = lookup(scope, obj).ok_or_else(|| LangErrorKind::UnboundVariable(obj.clone()))?;
            let def = sig.class(class).ok_or_else(|| LangErrorKind::UnknownClass(class.to_string()))?;
            let a = def.attribute(attr).ok_or_else(|| LangErrorKind::UnknownAttribute(attr.clone()))?;
            Ok(match &a.ty {
                AttrType::Boolean => Ty::Bool,
                AttrType::Enumeration(s) => Ty::Enum(s.clone()),
                AttrType::Integer { .. } | AttrType::Real => Ty::Num,
                AttrType::Reference { target, .. } => Ty::Ref(target.clone()),
            })
        }
        Term::Add(a, b) | Term::Sub(a, b) => {
            for side in [a, b] {
                expect_num(side, sig, scope)?;
            }
            Ok(Ty::Num)
        }
        Term::Scale(_, inner) => {
            expect_num(inner, sig, scope)?;
            Ok(Ty::Num)
        }
        Term::Next(inner) => {
            if has_modal(inner) {
                return Err(ty_err(if contains_der(inner) { "der inside next" } else { "nested next" }));
            }
            term_type_in(inner, sig, scope)
        }
        Term::Der(inner) => {
            if has_modal(inner) {
                return Err(ty_err(if contains_der(inner) { "nested der" } else { "next inside der" }));
            }
            let mut attrs = Vec::new();
            collect_attrs(inner, &mut attrs);
            if attrs.is_empty() {
                return Err(ty_err("der requires continuous real"));
            }
            for (obj, attr) in attrs {
                let class = lookup(scope, obj).expect("checked above");
                let cont = sig
                    .class(class)
                    .and_then(|c| c.attribute(attr))
                    .is_some_and(|a| a.is_continuous());
                if !cont {
                    return Err(ty_err("der requires continuous real"));
                }
            }
            expect_num(inner, sig, scope)?;
            Ok(Ty::Num)
        }
    }
}

fn contains_der(t: &Term) -> bool {
    match t {
        Term::Der(_) => true,
        Term::Next(a) | Term::Scale(_, a) => contains_der(a),
        Term::Add(a, b) | Term::Sub(a, b) => contains_der(a) || contains_der(b),
        _ => false,
    }
}

fn collect_attrs<'t>(t: &'t Term, out: &mut Vec<(&'t str, &'t str)>) {
    match t {
        Term::Attr { obj, attr } => out.push((obj, attr)),
        Term::Add(a, b) | Term::Sub(a, b) => {
            collect_attrs(a, out);
            collect_attrs(b, out);
        }
        Term::Scale(_, a) | Term::Next(a) | Term::Der(a) => collect_attrs(a, out),
        _ => {}
    }
}

fn expect_num(t: &Term, sig: &Signature, scope: &Scope) -> Result<(), LangErrorKind> {
    match term_type_in(t, sig, scope)? {
        Ty::Num => Ok(()),
        Ty::Sym(s) => Err(LangErrorKind::UnknownAttribute(s)),
        other => Err(ty_err(format!("arithmetic on non-numeric term of type {}", ty_name(&other)))),
    }
}

fn ty_name(t: &Ty) -> String {
    match t {
        Ty::Num => "number".into(),
        Ty::Bool => "boolean".into(),
        Ty::Enum(s) => format!("enumeration {{{}}}", s.join(", ")),
        Ty::Ref(c) => format!("reference to {c}"),
        Ty::Obj(c) => format!("object of {c}"),
        Ty::Sym(s) => format!("symbol {s}"),
        Ty::Null => "null".into(),
    }
}

/// Type of `t` with the given `(variable, class)` bindings in scope.
pub fn term_type(t: &Term, sig: &Signature, scope: &[(String, String)]) -> Result<Ty, LangError> {
    term_type_in(t, sig, &scope.to_vec()).map_err(|kind| LangError { kind, span: Span::default() })
}

/// Type rules for a single atom (`Prop` or `Cmp`).
pub(crate) fn check_atom(f: &Formula, sig: &Signature, scope: &Scope) -> Result<(), LangErrorKind> {
    match f {
        Formula::Prop(t) => match term_type_in(t, sig, scope)? {
            Ty::Bool => Ok(()),
            Ty::Sym(s) => Err(LangErrorKind::UnknownAttribute(s)),
            other => Err(ty_err(format!("expected a boolean, found {}", ty_name(&other)))),
        },
        Formula::Cmp(a, op, b) => {
            let ta = term_type_in(a, sig, scope)?;
            let tb = term_type_in(b, sig, scope)?;
            let eq_only = || -> Result<(), LangErrorKind> {
                if matches!(op, CmpOp::Eq | CmpOp::Ne) {
                    Ok(())
                } else {
                    Err(ty_err(format!("ordering comparison on {}", ty_name(&ta))))
                }
            };
            match (&ta, &tb) {
                (Ty::Num, Ty::Num) => Ok(()),
                (Ty::Bool, Ty::Bool) => eq_only(),
                (Ty::Enum(x), Ty::Enum(y)) => {
                    if x != y {
                        return Err(ty_err("comparison across enumerations"));
                    }
                    eq_only()
                }
                (Ty::Enum(syms), Ty::Sym(s)) | (Ty::Sym(s), Ty::Enum(syms)) => {
                    if !syms.contains(s) {
                        return Err(ty_err(format!("{s} is not a symbol of {}", ty_name(&Ty::Enum(syms.clone())))));
                    }
                    eq_only()
                }
                (Ty::Enum(_), Ty::Num) | (Ty::Num, Ty::Enum(_)) => Err(ty_err("enum compared with number")),
                (Ty::Sym(s), _) | (_, Ty::Sym(s)) => Err(LangErrorKind::UnknownAttribute(s.clone())),
                (Ty::Ref(c) | Ty::Obj(c), Ty::Ref(d) | Ty::Obj(d)) => {
                    if c != d {
                        return Err(ty_err(format!("comparison between objects of {c} and {d}")));
                    }
                    eq_only()
                }
                (Ty::Ref(_), Ty::Null) | (Ty::Null, Ty::Ref(_)) | (Ty::Obj(_), Ty::Null) | (Ty::Null, Ty::Obj(_)) => {
                    eq_only()
                }
                _ => Err(ty_err(format!("cannot compare {} with {}", ty_name(&ta), ty_name(&tb)))),
            }
        }
        _ => Ok(()),
    }
}

fn atom_has_modal(f: &Formula) -> bool {
    match f {
        Formula::Prop(t) => has_modal(t),
        Formula::Cmp(a, _, b) => has_modal(a) || has_modal(b),
        other => other.children().into_iter().any(atom_has_modal),
    }
}

fn has_quantifier(f: &Formula) -> bool {
    matches!(f, Formula::Quant { .. }) || f.children().into_iter().any(has_quantifier)
}

/// Restrictions on SERE letters: boolean, temporal-free, quantifier-free,
/// without `next`/`der`.
pub(crate) fn check_letter(f: &Formula) -> Result<(), LangErrorKind> {
    if !f.is_temporal_free() {
        return Err(ty_err("SERE letters must be temporal-free"));
    }
    if has_quantifier(f) {
        return Err(ty_err("quantifiers are not allowed in SERE letters"));
    }
    if atom_has_modal(f) {
        return Err(ty_err("next/der are not allowed in SERE letters"));
    }
    Ok(())
}

fn check_in(f: &Formula, sig: &Signature, scope: &mut Scope) -> Result<(), LangErrorKind> {
    match f {
        Formula::True | Formula::False => Ok(()),
        Formula::Prop(_) | Formula::Cmp(..) => check_atom(f, sig, scope),
        Formula::Quant { var, class, body, .. } => {
            if sig.class(class).is_none() {
                return Err(LangErrorKind::UnknownClass(class.clone()));
            }
            scope.push((var.clone(), class.clone()));
            let r = check_in(body, sig, scope);
            scope.pop();
            r
        }
        Formula::StrongMatch(r) => check_sere(r, sig, scope),
        Formula::SuffixImpl(r, g) | Formula::SuffixImplNext(r, g) => {
            check_sere(r, sig, scope)?;
            check_in(g, sig, scope)
        }
        other => other.children().into_iter().try_for_each(|c| check_in(c, sig, scope)),
    }
}

fn check_sere(r: &Sere<Formula>, sig: &Signature, scope: &mut Scope) -> Result<(), LangErrorKind> {
    for l in r.letters() {
        check_letter(l)?;
        check_in(l, sig, scope)?;
    }
    Ok(())
}

/// Verifies typing rules, closedness and letter restrictions; returns the
/// formula unchanged when well-typed.
pub fn typecheck(f: &Formula, sig: &Signature) -> Result<Formula, LangError> {
    check_in(f, sig, &mut Vec::new()).map_err(|kind| LangError { kind, span: Span::default() })?;
    Ok(f.clone())
}
