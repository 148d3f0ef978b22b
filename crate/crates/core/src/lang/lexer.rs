use crate::rational::{parse_decimal, Q};

use super::{LangError, LangErrorKind, Span};

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Num(Q),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Dot,
    Comma,
    Semi,
    Colon,
    Plus,
    Minus,
    Star,
    Slash,
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
    Ne,
    Bang,
    Pipe,
    OrOr,
    AndAnd,
    Arrow,
    DoubleArrow,
    SuffixImpl,
    SuffixImplNext,
    Eof,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

pub fn lex(src: &str) -> Result<Vec<Token>, LangError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let rest = &src[i..];
        let (tok, len) = if c.is_ascii_alphabetic() || c == b'_' {
            let len = rest
                .find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_'))
                .unwrap_or(rest.len());
            (Tok::Ident(rest[..len].to_string()), len)
        } else if c.is_ascii_digit() {
            let mut len = rest.find(|ch: char| !ch.is_ascii_digit()).unwrap_or(rest.len());
            let after = &rest[len..];
            if after.starts_with('.') && after[1..].starts_with(|ch: char| ch.is_ascii_digit()) {
                let frac = after[1..].find(|ch: char| !ch.is_ascii_digit()).unwrap_or(after.len() - 1);
                len += 1 + frac;
            }
            let q = parse_decimal(&rest[..len]).ok_or_else(|| LangError {
                kind: LangErrorKind::Lexical(format!("bad number `{}`", &rest[..len])),
                span: Span::new(start, start + len),
            })?;
            (Tok::Num(q), len)
        } else {
            const PUNCT: &[(&str, Tok)] = &[
                ("|->", Tok::SuffixImpl),
                ("|=>", Tok::SuffixImplNext),
                ("<->", Tok::DoubleArrow),
                ("||", Tok::OrOr),
                ("&&", Tok::AndAnd),
                ("->", Tok::Arrow),
                ("<=", Tok::Le),
                (">=", Tok::Ge),
                ("!=", Tok::Ne),
                ("==", Tok::Eq),
                ("(", Tok::LParen),
                (")", Tok::RParen),
                ("{", Tok::LBrace),
                ("}", Tok::RBrace),
                ("[", Tok::LBracket),
                ("]", Tok::RBracket),
                (".", Tok::Dot),
                (",", Tok::Comma),
                (";", Tok::Semi),
                (":", Tok::Colon),
                ("+", Tok::Plus),
                ("-", Tok::Minus),
                ("*", Tok::Star),
                ("/", Tok::Slash),
                ("<", Tok::Lt),
                ("=", Tok::Eq),
                (">", Tok::Gt),
                ("!", Tok::Bang),
                ("|", Tok::Pipe),
            ];
            match PUNCT.iter().find(|(p, _)| rest.starts_with(p)) {
                Some((p, t)) => (t.clone(), p.len()),
                None => {
                    let ch = rest.chars().next().unwrap();
                    return Err(LangError {
                        kind: LangErrorKind::Lexical(format!("unexpected character `{ch}`")),
                        span: Span::new(start, start + ch.len_utf8()),
                    });
                }
            }
        };
        out.push(Token { tok, span: Span::new(start, start + len) });
        i += len;
    }
    out.push(Token { tok: Tok::Eof, span: Span::new(src.len(), src.len()) });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    fn toks(src: &str) -> Vec<Tok> {
        lex(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn lexes_operators_greedily() {
        assert_eq!(
            toks("{a} |-> b |=> c <-> d <= e || f | g"),
            vec![
                Tok::LBrace,
                Tok::Ident("a".into()),
                Tok::RBrace,
                Tok::SuffixImpl,
                Tok::Ident("b".into()),
                Tok::SuffixImplNext,
                Tok::Ident("c".into()),
                Tok::DoubleArrow,
                Tok::Ident("d".into()),
                Tok::Le,
                Tok::Ident("e".into()),
                Tok::OrOr,
                Tok::Ident("f".into()),
                Tok::Pipe,
                Tok::Ident("g".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn decimals_are_exact_and_dots_separate_attributes() {
        assert_eq!(toks("1.25")[0], Tok::Num(frac(5, 4)));
        assert_eq!(toks("t.x")[1], Tok::Dot);
        assert_eq!(toks("C . 1")[1], Tok::Dot);
    }

    #[test]
    fn rejects_unknown_characters() {
        let err = lex("a # b").unwrap_err();
        assert_eq!(err.span, Span::new(2, 3));
    }
}
