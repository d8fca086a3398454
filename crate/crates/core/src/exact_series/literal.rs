//! Text literals for scalars, series and two-variable polynomials.
//!
//! Accepted syntax: integers, single-letter symbols, `+ - * /`, `^` with an
//! integer exponent (negative allowed on monomials), parentheses, and
//! juxtaposition as multiplication: `3/2 t^2 y^3 - E^-1 y`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

use super::bivariate::BivariateTruncated;
use super::scalar::{Rational, Scalar};
use super::series::TruncatedSeries;

/// Exponent vector keyed by symbol.
type Monomial = BTreeMap<char, i64>;

/// Sparse Laurent polynomial in arbitrary single-letter symbols.
#[derive(Clone, Debug, PartialEq, Default)]
struct Expr(BTreeMap<Monomial, Rational>);

impl Expr {
    fn constant(c: Rational) -> Self {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert(Monomial::new(), c);
        }
        Expr(m)
    }

    fn symbol(s: char) -> Self {
        let mut mono = Monomial::new();
        mono.insert(s, 1);
        Expr(BTreeMap::from([(mono, Rational::one())]))
    }

    fn add_term(&mut self, mono: Monomial, c: Rational) {
        let entry = self.0.entry(mono).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.0.retain(|_, v| !v.is_zero());
        }
    }

    fn add(mut self, other: Expr) -> Expr {
        for (m, c) in other.0 {
            self.add_term(m, c);
        }
        self
    }

    fn neg(self) -> Expr {
        Expr(self.0.into_iter().map(|(m, c)| (m, -c)).collect())
    }

    fn mul(&self, other: &Expr) -> Expr {
        let mut out = Expr::default();
        for (ma, ca) in &self.0 {
            for (mb, cb) in &other.0 {
                let mut m = ma.clone();
                for (&s, &e) in mb {
                    let v = m.entry(s).or_insert(0);
                    *v += e;
                    if *v == 0 {
                        m.remove(&s);
                    }
                }
                out.add_term(m, ca * cb);
            }
        }
        out
    }

    /// Reciprocal, defined only for a single nonzero term.
    fn recip(&self) -> Option<Expr> {
        if self.0.len() != 1 {
            return None;
        }
        let (m, c) = self.0.iter().next()?;
        let m = m.iter().map(|(&s, &e)| (s, -e)).collect();
        Some(Expr(BTreeMap::from([(m, c.recip())])))
    }

    fn pow(&self, n: i64) -> Option<Expr> {
        let base = if n < 0 { self.recip()? } else { self.clone() };
        let mut acc = Expr::constant(Rational::one());
        for _ in 0..n.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Some(acc)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Sym(char),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1usize, 1usize);
    while let Some(&ch) = chars.peek() {
        let (l, c) = (line, column);
        let push = |tok| Spanned {
            tok,
            line: l,
            column: c,
        };
        if ch == '\n' {
            chars.next();
            line += 1;
            column = 1;
            continue;
        }
        if ch.is_whitespace() {
            chars.next();
            column += 1;
            continue;
        }
        if ch.is_ascii_digit() {
            let mut digits = String::new();
            while let Some(&d) = chars.peek() {
                if !d.is_ascii_digit() {
                    break;
                }
                digits.push(d);
                chars.next();
                column += 1;
            }
            let n: BigInt = digits.parse().expect("ascii digits");
            out.push(push(Tok::Int(n)));
            continue;
        }
        let tok = match ch {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            c if c.is_ascii_alphabetic() => Tok::Sym(c),
            other => return Err(Error::parse(l, c, format!("unexpected character '{other}'"))),
        };
        chars.next();
        column += 1;
        out.push(push(tok));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|s| (s.line, s.column))
            .unwrap_or(self.end)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        let (l, c) = self.here();
        Err(Error::parse(l, c, message))
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                self.term()?.neg()
            }
            Some(Tok::Plus) => {
                self.bump();
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = acc.add(self.term()?);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = acc.add(self.term()?.neg());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc = acc.mul(&self.factor()?);
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let at = self.here();
                    let d = self.factor()?;
                    if d.0.is_empty() {
                        return Err(Error::parse(at.0, at.1, "division by zero"));
                    }
                    match d.recip() {
                        Some(r) => acc = acc.mul(&r),
                        None => {
                            return Err(Error::parse(at.0, at.1, "can only divide by a single term"))
                        }
                    }
                }
                Some(Tok::Int(_) | Tok::Sym(_) | Tok::LParen) => {
                    acc = acc.mul(&self.factor()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.bump();
        let at = self.here();
        let n = self.exponent()?;
        base.pow(n)
            .ok_or_else(|| Error::parse(at.0, at.1, "negative power of a sum"))
    }

    fn exponent(&mut self) -> Result<i64> {
        let parenthesized = self.peek() == Some(&Tok::LParen);
        if parenthesized {
            self.bump();
        }
        let negative = match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                true
            }
            Some(Tok::Plus) => {
                self.bump();
                false
            }
            _ => false,
        };
        let n = match self.bump() {
            Some(Tok::Int(n)) => {
                let v: i64 = match n.try_into() {
                    Ok(v) if v <= 10_000 => v,
                    _ => {
                        self.pos -= 1;
                        return self.error("exponent too large");
                    }
                };
                v
            }
            _ => {
                self.pos -= 1;
                return self.error("expected an integer exponent");
            }
        };
        if parenthesized {
            if self.peek() != Some(&Tok::RParen) {
                return self.error("expected ')'");
            }
            self.bump();
        }
        Ok(if negative { -n } else { n })
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.bump();
                Ok(Expr::constant(Rational::from_integer(n)))
            }
            Some(Tok::Sym(s)) => {
                self.bump();
                Ok(Expr::symbol(s))
            }
            Some(Tok::LParen) => {
                self.bump();
                let e = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.error("expected ')'");
                }
                self.bump();
                Ok(e)
            }
            Some(Tok::Minus) => {
                self.bump();
                Ok(self.factor()?.neg())
            }
            Some(_) => self.error("expected a number, a symbol or '('"),
            None => self.error("unexpected end of input"),
        }
    }
}

fn parse_expr(text: &str) -> Result<(Expr, Vec<Spanned>)> {
    let toks = lex(text)?;
    let end_line = text.lines().count().max(1);
    let end_col = text.lines().last().map(|l| l.chars().count() + 1).unwrap_or(1);
    let mut p = Parser {
        toks: toks.clone(),
        pos: 0,
        end: (end_line, end_col),
    };
    if p.peek().is_none() {
        return p.error("empty expression");
    }
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.error("unexpected token");
    }
    Ok((e, toks))
}

/// Location of the first occurrence of symbol `s`, for error reporting.
fn locate(toks: &[Spanned], s: char) -> (usize, usize) {
    toks.iter()
        .find(|t| t.tok == Tok::Sym(s))
        .map(|t| (t.line, t.column))
        .unwrap_or((1, 1))
}

/// Splits a monomial into the scalar part (`t`, `E`) and the exponents of the
/// remaining allowed variables.
fn scalar_part(
    mono: &Monomial,
    c: &Rational,
    vars: &[char],
    toks: &[Spanned],
) -> Result<(Scalar, Vec<i64>)> {
    let mut t = 0i64;
    let mut e = 0i64;
    let mut powers = vec![0i64; vars.len()];
    for (&s, &n) in mono {
        if let Some(i) = vars.iter().position(|&v| v == s) {
            powers[i] = n;
        } else if s == 't' {
            t = n;
        } else if s == 'E' {
            e = n;
        } else {
            let (l, col) = locate(toks, s);
            return Err(Error::parse(l, col, format!("unknown symbol '{s}'")));
        }
        if n < 0 && s != 'E' {
            let (l, col) = locate(toks, s);
            return Err(Error::parse(l, col, format!("negative power of '{s}'")));
        }
    }
    let scalar = Scalar::from_laurent_terms([(t as usize, e, c.clone())]);
    Ok((scalar, powers))
}

/// Parses a coefficient-ring element built from rationals, `t` and `E`.
pub fn parse_scalar(text: &str) -> Result<Scalar> {
    let (e, toks) = parse_expr(text)?;
    let mut acc = Scalar::zero();
    for (mono, c) in &e.0 {
        let (s, _) = scalar_part(mono, c, &[], &toks)?;
        acc = &acc + &s;
    }
    Ok(acc)
}

/// Parses an exact rational such as `-3/4`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = parse_scalar(text)?;
    match s.as_rational() {
        Some(r) => Ok(r.clone()),
        None => Err(Error::parse(1, 1, format!("expected a rational number, found {s}"))),
    }
}

/// Parses a series in `var`, dropping terms above `order`.
pub fn parse_series(text: &str, var: char, order: usize) -> Result<TruncatedSeries> {
    let (e, toks) = parse_expr(text)?;
    let mut coeffs = vec![Scalar::zero(); order + 1];
    for (mono, c) in &e.0 {
        let (s, p) = scalar_part(mono, c, &[var], &toks)?;
        let n = p[0] as usize;
        if n <= order {
            coeffs[n] = &coeffs[n] + &s;
        }
    }
    Ok(TruncatedSeries::new(var, coeffs, order))
}

/// Parses a series in `var` and returns it at its exact degree (order = degree,
/// at least 1).
pub fn parse_polynomial(text: &str, var: char) -> Result<TruncatedSeries> {
    let (e, toks) = parse_expr(text)?;
    let mut terms = Vec::new();
    for (mono, c) in &e.0 {
        let (s, p) = scalar_part(mono, c, &[var], &toks)?;
        terms.push((p[0] as usize, s));
    }
    let order = terms.iter().map(|t| t.0).max().unwrap_or(0).max(1);
    let mut coeffs = vec![Scalar::zero(); order + 1];
    for (n, s) in terms {
        coeffs[n] = &coeffs[n] + &s;
    }
    Ok(TruncatedSeries::new(var, coeffs, order))
}

/// Parses a polynomial in the two given variables.
pub fn parse_bivariate(text: &str, vars: (char, char)) -> Result<BivariateTruncated> {
    let (e, toks) = parse_expr(text)?;
    let mut terms = Vec::new();
    for (mono, c) in &e.0 {
        let (s, p) = scalar_part(mono, c, &[vars.0, vars.1], &toks)?;
        terms.push((p[0] as usize, p[1] as usize, s));
    }
    Ok(BivariateTruncated::from_terms_fitted(vars, terms))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_literals() {
        let s = parse_series("y + y^2 + y^3", 'y', 3).unwrap();
        assert_eq!(s.to_string(), "y + y^2 + y^3");
        let s = parse_series("3/2 t^2 y^3 - E^-1 y", 'y', 3).unwrap();
        assert_eq!(s.to_string(), "-E^-1 y + 3/2 t^2 y^3");
        let s = parse_series("2*y*(1 + y)", 'y', 2).unwrap();
        assert_eq!(s.to_string(), "2 y + 2 y^2");
        let s = parse_series("y^1 + y^5", 'y', 3).unwrap();
        assert_eq!(s.to_string(), "y");
        let s = parse_series("(y + y^2)^2", 'y', 4).unwrap();
        assert_eq!(s.to_string(), "y^2 + 2 y^3 + y^4");
        let s = parse_series("y/2", 'y', 1).unwrap();
        assert_eq!(s.to_string(), "1/2 y");
    }

    #[test]
    fn scalars() {
        assert_eq!(parse_rational("-3/4").unwrap(), Rational::new((-3).into(), 4.into()));
        assert_eq!(parse_scalar("E^2 - E").unwrap().to_string(), "-E + E^2");
        assert_eq!(parse_scalar("E^(-1)").unwrap(), Scalar::exp_power(-1));
    }

    #[test]
    fn errors_carry_positions() {
        match parse_series("y + x", 'y', 2) {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (1, 5)),
            other => panic!("{other:?}"),
        }
        match parse_series("y + ", 'y', 2) {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 5),
            other => panic!("{other:?}"),
        }
        assert!(parse_series("y^-1", 'y', 2).unwrap_err().is_parse());
        assert!(parse_series("1/(1 + y)", 'y', 2).unwrap_err().is_parse());
        assert!(parse_series("y # 2", 'y', 2).unwrap_err().is_parse());
        assert!(parse_series("", 'y', 2).unwrap_err().is_parse());
        assert!(parse_series("(y", 'y', 2).unwrap_err().is_parse());
    }

    #[test]
    fn bivariate() {
        let p = parse_bivariate("y + x y^2", ('x', 'y')).unwrap();
        assert_eq!(p.coeff(1, 2), Scalar::one());
        assert_eq!(p.coeff(0, 1), Scalar::one());
        assert_eq!(p.order_y(), 2);
    }
}
