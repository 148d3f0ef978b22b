use super::ast::{Formula, Sere};

/// Negation that cancels an outer double negation, keeping the rewrite
/// linear in size and idempotent.
fn neg(f: Formula) -> Formula {
    match f {
        Formula::Not(inner) => *inner,
        other => Formula::not(other),
    }
}

fn sere(r: &Sere<Formula>) -> Sere<Formula> {
    r.try_map(&mut |l| Ok::<_, ()>(desugar(l))).expect("infallible")
}

/// Rewrites derived operators into the core set: atoms, `not`, `and`,
/// `iff`, `next`, `until`, quantifiers, `{r}!` and `{r} |-> f`.
///
/// `iff` stays a core connective: expanding it would copy both sides.
pub fn desugar(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Prop(_) | Formula::Cmp(..) => f.clone(),
        Formula::Not(a) => neg(desugar(a)),
        Formula::And(a, b) => Formula::and(desugar(a), desugar(b)),
        Formula::Or(a, b) => neg(Formula::and(neg(desugar(a)), neg(desugar(b)))),
        Formula::Implies(a, b) => neg(Formula::and(desugar(a), neg(desugar(b)))),
        Formula::Iff(a, b) => Formula::iff(desugar(a), desugar(b)),
        Formula::Next(a) => Formula::next(desugar(a)),
        Formula::Until(a, b) => Formula::until(desugar(a), desugar(b)),
        Formula::Release(a, b) => neg(Formula::until(neg(desugar(a)), neg(desugar(b)))),
        Formula::Always(a) => neg(Formula::until(Formula::True, neg(desugar(a)))),
        Formula::Eventually(a) => Formula::until(Formula::True, desugar(a)),
        Formula::Quant { q, var, class, body } => {
            Formula::Quant { q: *q, var: var.clone(), class: class.clone(), body: Box::new(desugar(body)) }
        }
        Formula::StrongMatch(r) => Formula::StrongMatch(Box::new(sere(r))),
        Formula::SuffixImpl(r, g) => Formula::SuffixImpl(Box::new(sere(r)), Box::new(desugar(g))),
        Formula::SuffixImplNext(r, g) => Formula::SuffixImpl(
            Box::new(Sere::concat(sere(r), Sere::Letter(Formula::True))),
            Box::new(desugar(g)),
        ),
    }
}

/// True when `f` uses only core constructs.
pub fn is_core(f: &Formula) -> bool {
    match f {
        Formula::Or(..)
        | Formula::Implies(..)
        | Formula::Release(..)
        | Formula::Always(_)
        | Formula::Eventually(_)
        | Formula::SuffixImplNext(..) => false,
        other => other.children().into_iter().all(is_core),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::Term;

    fn p() -> Formula {
        Formula::Prop(Term::attr("t", "p"))
    }

    fn q() -> Formula {
        Formula::Prop(Term::attr("t", "q"))
    }

    #[test]
    fn always_becomes_negated_until() {
        assert_eq!(
            desugar(&Formula::always(p())),
            Formula::not(Formula::until(Formula::True, Formula::not(p())))
        );
    }

    #[test]
    fn suffix_next_appends_true() {
        let r = Sere::Letter(p());
        assert_eq!(
            desugar(&Formula::SuffixImplNext(Box::new(r.clone()), Box::new(q()))),
            Formula::SuffixImpl(Box::new(Sere::concat(r, Sere::Letter(Formula::True))), Box::new(q()))
        );
    }

    #[test]
    fn release_and_eventually() {
        let f = Formula::release(p(), Formula::eventually(q()));
        let d = desugar(&f);
        assert_eq!(
            d,
            Formula::not(Formula::until(
                Formula::not(p()),
                Formula::not(Formula::until(Formula::True, q()))
            ))
        );
        assert!(is_core(&d));
        assert!(!is_core(&f));
    }
}
