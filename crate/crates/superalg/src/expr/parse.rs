//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr     := '-'? term (('+' | '-') term)*
//! term     := factor (('*' | '/') factor)*
//! factor   := base ('^' exponent)?
//! base     := number | symbol | func '(' expr ')' | '(' expr ')'
//! exponent := integer | '(' '-'? integer ('/' integer)? ')'
//! func     := sin | cos | sqrt | cbrt
//! ```
//!
//! Symbols are the coordinates `x`, `y`, `px`, `py` plus declared parameter
//! names; anything else is rejected with its position.

use super::{Expr, Rat};
use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown symbol `{name}` at byte {pos} (not a coordinate, momentum, or declared parameter)")]
    UnknownSymbol { pos: usize, name: String },
}

pub const COORDINATES: [&str; 4] = ["x", "y", "px", "py"];

/// Parse with the four phase-space coordinates plus the given parameters.
pub fn parse(text: &str, params: &[&str]) -> Result<Expr, ParseError> {
    let mut allowed: Vec<String> = COORDINATES.iter().map(|s| s.to_string()).collect();
    allowed.extend(params.iter().map(|s| s.to_string()));
    parse_with_symbols(text, &allowed)
}

/// Parse with an explicit symbol table (used e.g. for polynomials in abstract
/// `H`, `L`).
pub fn parse_with_symbols(text: &str, allowed: &[String]) -> Result<Expr, ParseError> {
    let mut p = Parser {
        bytes: text.as_bytes(),
        pos: 0,
        allowed,
    };
    p.skip_ws();
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    allowed: &'a [String],
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> ParseError {
        ParseError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ') | Some(b'\t') | Some(b'\n') | Some(b'\r')) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        let negate = self.eat(b'-');
        let mut terms = Vec::new();
        let first = self.term()?;
        terms.push(if negate { first.neg() } else { first });
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.bump();
                    terms.push(self.term()?);
                }
                Some(b'-') => {
                    self.bump();
                    terms.push(self.term()?.neg());
                }
                _ => break,
            }
        }
        Ok(Expr::sum(terms))
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut factors = vec![self.factor()?];
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'*') => {
                    self.bump();
                    factors.push(self.factor()?);
                }
                Some(b'/') => {
                    self.bump();
                    factors.push(self.factor()?.recip());
                }
                _ => break,
            }
        }
        Ok(Expr::prod(factors))
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.base()?;
        self.skip_ws();
        if self.peek() == Some(b'^') {
            self.bump();
            let exp = self.exponent()?;
            return Ok(Expr::pow(base, exp));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<Rat, ParseError> {
        self.skip_ws();
        if self.eat(b'(') {
            self.skip_ws();
            let negate = self.eat(b'-');
            let num = self.integer()?;
            self.skip_ws();
            let r = if self.eat(b'/') {
                let den = self.integer()?;
                if den == BigInt::from(0) {
                    return Err(self.err("zero denominator in exponent"));
                }
                Rat::new(num, den)
            } else {
                Rat::from_integer(num)
            };
            self.expect(b')')?;
            Ok(if negate { -r } else { r })
        } else {
            let negate = self.eat(b'-');
            let num = self.integer()?;
            let r = Rat::from_integer(num);
            Ok(if negate { -r } else { r })
        }
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected integer"));
        }
        let s = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        Ok(s.parse::<BigInt>().unwrap())
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(b'(') => {
                self.bump();
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(Expr::Num(Rat::from_integer(n)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.bytes[start..self.pos])
                    .unwrap()
                    .to_string();
                self.skip_ws();
                match name.as_str() {
                    "sin" | "cos" | "sqrt" | "cbrt" if self.peek() == Some(b'(') => {
                        self.bump();
                        let arg = self.expr()?;
                        self.expect(b')')?;
                        Ok(match name.as_str() {
                            "sin" => Expr::sin(arg),
                            "cos" => Expr::cos(arg),
                            "sqrt" => Expr::sqrt(arg),
                            _ => Expr::cbrt(arg),
                        })
                    }
                    _ => {
                        if self.allowed.iter().any(|a| a == &name) {
                            Ok(Expr::Sym(name))
                        } else {
                            Err(ParseError::UnknownSymbol { pos: start, name })
                        }
                    }
                }
            }
            _ => Err(self.err("expected number, symbol, function, or `(`")),
        }
    }
}

/// Parse a standalone rational constant such as `-1/10`, `3`, or `2.5`
/// (decimals are converted exactly). Used by the CLI for constants.
pub fn parse_rational(text: &str) -> Option<Rat> {
    let t = text.trim();
    if let Some((n, d)) = t.split_once('/') {
        let num: BigInt = n.trim().parse().ok()?;
        let den: BigInt = d.trim().parse().ok()?;
        if den == BigInt::from(0) {
            return None;
        }
        return Some(Rat::new(num, den));
    }
    if let Some((int_part, frac_part)) = t.split_once('.') {
        let negative = int_part.trim_start().starts_with('-');
        let ip: BigInt = if int_part.is_empty() || int_part == "-" {
            BigInt::from(0)
        } else {
            int_part.trim().parse().ok()?
        };
        if !frac_part.bytes().all(|b| b.is_ascii_digit()) || frac_part.is_empty() {
            return None;
        }
        let fp: BigInt = frac_part.parse().ok()?;
        let scale = BigInt::from(10).pow(frac_part.len() as u32);
        let frac = Rat::new(fp, scale.clone());
        let whole = Rat::from_integer(ip);
        return Some(if negative { whole - frac } else { whole + frac });
    }
    let n: BigInt = t.parse().ok()?;
    let _ = Rat::one();
    Some(Rat::from_integer(n))
}
