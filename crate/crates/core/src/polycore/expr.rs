//! The polynomial expression grammar shared by every file format and the CLI.
//!
//! Integers, rationals `a/b`, variables `x0`..`x63`, `+ - * ^` and
//! parentheses. `^` binds tightest, then `*`, then `+`/`-`; unary minus is
//! allowed and whitespace is ignored.

use std::fmt;

use num_bigint::BigInt;

use super::monomial::Monomial;
use super::poly::{Ctx, Polynomial};
use super::scalar::Scalar;
use crate::error::{Error, Result};

const MAX_EXPONENT: u64 = 1 << 31;
const MAX_VARS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Var(usize),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(text: &'a str) -> Result<Vec<(usize, Tok)>> {
        let mut lx = Lexer {
            src: text.as_bytes(),
            pos: 0,
        };
        let mut out = Vec::new();
        while let Some(t) = lx.next()? {
            out.push(t);
        }
        Ok(out)
    }

    fn next(&mut self) -> Result<Option<(usize, Tok)>> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if self.pos >= self.src.len() {
            return Ok(None);
        }
        let start = self.pos;
        let c = self.src[self.pos];
        let tok = match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'^' => Tok::Caret,
            b'/' => Tok::Slash,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' => {
                let digits = self.digits();
                let n: BigInt = digits.parse().expect("ascii digits");
                return Ok(Some((start, Tok::Num(n))));
            }
            b'x' => {
                self.pos += 1;
                let digits = self.digits();
                if digits.is_empty() {
                    return Err(parse_err(start, "expected a variable index after 'x'"));
                }
                let idx: usize = digits
                    .parse()
                    .ok()
                    .filter(|&i| i < MAX_VARS)
                    .ok_or_else(|| parse_err(start, "variable index must be below 64"))?;
                return Ok(Some((start, Tok::Var(idx))));
            }
            other => {
                return Err(parse_err(start, &format!("unexpected character {:?}", other as char)));
            }
        };
        self.pos += 1;
        Ok(Some((start, tok)))
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }
}

fn parse_err(offset: usize, message: &str) -> Error {
    Error::Parse {
        offset,
        message: message.to_string(),
    }
}

struct Parser<'c> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    ctx: &'c Ctx,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.at).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(_, t)| t.clone());
        self.at += 1;
        t
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.unary()?;
        while let Some(Tok::Star) = self.peek() {
            self.bump();
            acc = acc.mul(&self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                Ok(self.unary()?.neg())
            }
            Some(Tok::Plus) => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.bump();
            let off = self.offset();
            match self.bump() {
                Some(Tok::Num(n)) => {
                    let e: u64 = n
                        .try_into()
                        .ok()
                        .filter(|&e| e <= MAX_EXPONENT)
                        .ok_or_else(|| parse_err(off, "exponent overflow (limit 2^31)"))?;
                    if let Some(Tok::Caret) = self.peek() {
                        return Err(parse_err(self.offset(), "chained exponents need parentheses"));
                    }
                    return power_checked(&base, e, off);
                }
                _ => return Err(parse_err(off, "expected a non-negative integer exponent")),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial> {
        let off = self.offset();
        match self.bump() {
            Some(Tok::Num(n)) => {
                let field = self.ctx.field();
                if let Some(Tok::Slash) = self.peek() {
                    self.bump();
                    let doff = self.offset();
                    match self.bump() {
                        Some(Tok::Num(d)) => {
                            if d == BigInt::from(0) {
                                return Err(parse_err(doff, "zero denominator"));
                            }
                            let c = Scalar::from_ratio(field, &n, &d)
                                .map_err(|_| parse_err(doff, "denominator vanishes in the field"))?;
                            Ok(Polynomial::constant(self.ctx, c))
                        }
                        _ => Err(parse_err(doff, "expected an integer denominator")),
                    }
                } else {
                    Ok(Polynomial::constant(self.ctx, Scalar::from_bigint(field, &n)))
                }
            }
            Some(Tok::Var(i)) => {
                if i >= self.ctx.nvars() {
                    return Err(parse_err(
                        off,
                        &format!("variable x{i} outside a ring with {} variables", self.ctx.nvars()),
                    ));
                }
                Ok(Polynomial::var(self.ctx, i))
            }
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => Err(parse_err(self.toks.get(self.at - 1).map(|t| t.0).unwrap_or(self.end), "expected ')'")),
                }
            }
            Some(_) => Err(parse_err(off, "expected a number, variable or '('")),
            None => Err(parse_err(off, "unexpected end of input")),
        }
    }
}

fn power_checked(base: &Polynomial, e: u64, off: usize) -> Result<Polynomial> {
    match base.terms() {
        [] => Ok(if e == 0 { Polynomial::one(base.ctx()) } else { base.clone() }),
        [(m, c)] => {
            let mut exps = Vec::with_capacity(m.nvars());
            for &x in m.exponents() {
                let v = x as u64 * e;
                if v > MAX_EXPONENT {
                    return Err(parse_err(off, "exponent overflow (limit 2^31)"));
                }
                exps.push(v as u32);
            }
            let mut coeff = Scalar::one(base.field());
            let mut b = c.clone();
            let mut k = e;
            while k > 0 {
                if k & 1 == 1 {
                    coeff = coeff.mul(&b);
                }
                k >>= 1;
                if k > 0 {
                    b = b.mul(&b);
                }
            }
            Ok(Polynomial::monomial(base.ctx(), Monomial::from_exponents(exps), coeff))
        }
        _ => {
            if e > 64 {
                return Err(parse_err(off, "exponent too large for a non-monomial base"));
            }
            Ok(base.pow(e as u32))
        }
    }
}

/// Parses `text` into a canonical polynomial over `ctx`.
pub fn parse_expression(text: &str, ctx: &Ctx) -> Result<Polynomial> {
    let toks = Lexer::tokens(text)?;
    let mut p = Parser {
        toks,
        at: 0,
        end: text.len(),
        ctx,
    };
    let poly = p.expr()?;
    if p.at < p.toks.len() {
        return Err(parse_err(p.offset(), "unexpected trailing input"));
    }
    Ok(poly)
}

impl Polynomial {
    pub fn parse(text: &str, ctx: &Ctx) -> Result<Polynomial> {
        parse_expression(text, ctx)
    }
}

fn write_monomial(f: &mut fmt::Formatter<'_>, m: &Monomial) -> fmt::Result {
    let mut first = true;
    for (i, &e) in m.exponents().iter().enumerate() {
        if e == 0 {
            continue;
        }
        if !first {
            write!(f, "*")?;
        }
        first = false;
        if e == 1 {
            write!(f, "x{i}")?;
        } else {
            write!(f, "x{i}^{e}")?;
        }
    }
    Ok(())
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms().iter().enumerate() {
            let negative = c.is_negative();
            match (k, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mag = c.abs();
            if m.is_one() {
                write!(f, "{mag}")?;
            } else {
                if !mag.is_one() {
                    write!(f, "{mag}*")?;
                }
                write_monomial(f, m)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::{Field, PolyContext};

    fn q(n: usize) -> Ctx {
        PolyContext::new(n, Field::Rational)
    }

    #[test]
    fn parses_grammar_examples() {
        let c = q(2);
        let p = parse_expression("x0*x1 + 1", &c).unwrap();
        assert_eq!(p.to_string(), "x0*x1 + 1");
        let sq = parse_expression("(x0+x1)^2", &c).unwrap();
        let expanded = parse_expression("x0^2 + 2*x0*x1 + x1^2", &c).unwrap();
        assert_eq!(sq, expanded);
        match parse_expression("x0 + ", &c) {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn precedence_and_unary_minus() {
        let c = q(1);
        assert_eq!(parse_expression("-x0^2", &c).unwrap().to_string(), "-x0^2");
        assert_eq!(parse_expression("2*-x0", &c).unwrap().to_string(), "-2*x0");
        assert_eq!(parse_expression("3/6 - 1/2", &c).unwrap().to_string(), "0");
        assert_eq!(parse_expression(" 1 -  - 1", &c).unwrap().to_string(), "2");
    }

    #[test]
    fn rejects_bad_input() {
        let c = q(2);
        assert!(parse_expression("x2", &c).is_err());
        assert!(parse_expression("x0^4294967296", &c).is_err());
        assert!(parse_expression("x0^2147483649", &c).is_err());
        assert!(parse_expression("1/0", &c).is_err());
        assert!(parse_expression("(x0", &c).is_err());
        assert!(parse_expression("x0 x1", &c).is_err());
        assert!(parse_expression("", &c).is_err());
    }

    #[test]
    fn residues_print_canonically() {
        let c = PolyContext::new(1, Field::prime(5).unwrap());
        let p = parse_expression("-x0 + 1/2", &c).unwrap();
        assert_eq!(p.to_string(), "4*x0 + 3");
        assert_eq!(parse_expression(&p.to_string(), &c).unwrap(), p);
    }
}
