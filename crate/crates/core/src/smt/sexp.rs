use num::{BigInt, Zero};

use crate::rational::{parse_decimal, Q};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

impl Sexp {
    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(a) => Some(a),
            Sexp::List(_) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(xs) => Some(xs),
            Sexp::Atom(_) => None,
        }
    }

    /// Exact rational value of a numeral term: `3`, `1.5`, `(- 3)`, `(/ 1 2)`.
    pub fn to_rational(&self) -> Option<Q> {
        match self {
            Sexp::Atom(a) => {
                if a.contains('.') {
                    parse_decimal(a)
                } else {
                    a.parse::<BigInt>().ok().map(Q::from_integer)
                }
            }
            Sexp::List(xs) => match (xs.first()?.as_atom()?, xs.len()) {
                ("-", 2) => Some(-xs[1].to_rational()?),
                ("-", 3) => Some(xs[1].to_rational()? - xs[2].to_rational()?),
                ("+", _) => xs[1..].iter().map(Sexp::to_rational).sum(),
                ("/", 3) => {
                    let d = xs[2].to_rational()?;
                    if d.is_zero() {
                        return None;
                    }
                    Some(xs[1].to_rational()? / d)
                }
                ("to_real", 2) => xs[1].to_rational(),
                _ => None,
            },
        }
    }

    pub fn to_bool(&self) -> Option<bool> {
        match self.as_atom()? {
            "true" => Some(true),
            "false" => Some(false),
            _ => None,
        }
    }
}

/// Strips SMT-LIB symbol quoting.
pub fn unquote(s: &str) -> &str {
    s.strip_prefix('|').and_then(|s| s.strip_suffix('|')).unwrap_or(s)
}

/// Parses one s-expression; returns it together with the unparsed rest.
pub fn parse(src: &str) -> Result<(Sexp, &str), String> {
    let src = src.trim_start();
    let mut chars = src.char_indices();
    match chars.next() {
        None => Err("unexpected end of input".into()),
        Some((_, '(')) => {
            let mut rest = &src[1..];
            let mut items = Vec::new();
            loop {
                rest = rest.trim_start();
                if let Some(r) = rest.strip_prefix(')') {
                    return Ok((Sexp::List(items), r));
                }
                if rest.is_empty() {
                    return Err("unbalanced parentheses".into());
                }
                let (item, r) = parse(rest)?;
                items.push(item);
                rest = r;
            }
        }
        Some((_, ')')) => Err("unexpected `)`".into()),
        Some((_, '|')) => {
            let end = src[1..].find('|').ok_or("unterminated quoted symbol")? + 2;
            Ok((Sexp::Atom(src[..end].to_string()), &src[end..]))
        }
        Some((_, '"')) => {
            let mut i = 1;
            let bytes = src.as_bytes();
            while i < bytes.len() {
                if bytes[i] == b'"' {
                    if bytes.get(i + 1) == Some(&b'"') {
                        i += 2;
                        continue;
                    }
                    return Ok((Sexp::Atom(src[..=i].to_string()), &src[i + 1..]));
                }
                i += 1;
            }
            Err("unterminated string".into())
        }
        Some(_) => {
            let end = src.find(|c: char| c.is_whitespace() || c == '(' || c == ')').unwrap_or(src.len());
            Ok((Sexp::Atom(src[..end].to_string()), &src[end..]))
        }
    }
}

/// True once `text` holds a complete s-expression (or a bare atom line).
pub fn is_complete(text: &str) -> bool {
    let mut depth = 0i64;
    let mut in_quote = false;
    let mut in_string = false;
    let mut seen = false;
    for c in text.chars() {
        match c {
            '|' if !in_string => in_quote = !in_quote,
            '"' if !in_quote => in_string = !in_string,
            '(' if !in_quote && !in_string => {
                depth += 1;
                seen = true;
            }
            ')' if !in_quote && !in_string => depth -= 1,
            c if !c.is_whitespace() => seen = true,
            _ => {}
        }
    }
    seen && depth <= 0 && !in_quote && !in_string
}
