//! Exact rational numbers used throughout the pipeline.
//!
//! Constants in constraints, SMT models and trace files are all exact; there
//! is no floating point anywhere between the parser and the witness renderer.

use std::fmt;
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

/// Exact rational value.
pub type Q = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal `{0}`")]
pub struct RationalParseError(pub String);

pub fn int(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

pub fn frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"3"`, `"-3/2"`, `"1.25"` or `"-0.5"` exactly.
pub fn parse_q(src: &str) -> Result<Q, RationalParseError> {
    let err = || RationalParseError(src.to_string());
    let s = src.trim();
    if s.is_empty() {
        return Err(err());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| err())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Q::new(n, d));
    }
    parse_decimal(s).ok_or_else(err)
}

/// Exact decimal parsing: `"1.25"` is `5/4`.
pub fn parse_decimal(s: &str) -> Option<Q> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (whole, fracpart) = match body.split_once('.') {
        Some((w, f)) => (w, f),
        None => (body, ""),
    };
    if whole.is_empty() && fracpart.is_empty() {
        return None;
    }
    if !whole.chars().all(|c| c.is_ascii_digit()) || !fracpart.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{whole}{fracpart}");
    let n = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).ok()?;
    let d = num::pow(BigInt::from(10), fracpart.len());
    let q = Q::new(n, d);
    Some(if neg { -q } else { q })
}

/// Renders as `"p/q"` (or `"p"` when integral).
pub fn fmt_q(q: &Q) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Display adapter for `p/q` rendering.
pub struct DisplayQ<'a>(pub &'a Q);

impl fmt::Display for DisplayQ<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_q(self.0))
    }
}

/// Least common multiple of the denominators of `qs` (1 for an empty list).
pub fn denom_lcm<'a>(qs: impl IntoIterator<Item = &'a Q>) -> BigInt {
    use num::Integer;
    qs.into_iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

pub fn is_nonneg(q: &Q) -> bool {
    !q.is_negative()
}
