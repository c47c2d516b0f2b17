//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := base ('^' nonneg-integer)?
//! base   := number | ident | '(' expr ')' | 'sqrt' '(' expr ')' | '-' base
//! ```
//!
//! Whitespace is insignificant. Identifiers resolve against the context's
//! variable table; `sqrt(...)` must name the registered radicand.

use crate::scalar::{Scalar, VariableContext};
use num::BigInt;
use std::fmt;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub pos: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at byte {}: {}", self.pos, self.message)
    }
}

impl std::error::Error for ParseError {}

pub fn parse(text: &str, ctx: &Arc<VariableContext>) -> Result<Scalar, ParseError> {
    let mut p = Parser {
        bytes: text.as_bytes(),
        pos: 0,
        ctx,
    };
    p.skip_ws();
    let value = p.expr()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(value)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    ctx: &'a Arc<VariableContext>,
}

impl<'a> Parser<'a> {
    fn err(&self, message: &str) -> ParseError {
        ParseError {
            pos: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            self.skip_ws();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, b: u8) -> Result<(), ParseError> {
        if self.eat(b) {
            Ok(())
        } else {
            Err(self.err(&format!("expected `{}`", b as char)))
        }
    }

    fn expr(&mut self) -> Result<Scalar, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = acc.add(&self.term()?);
            } else if self.eat(b'-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Scalar, ParseError> {
        let mut acc = self.factor()?;
        loop {
            if self.eat(b'*') {
                acc = acc.mul(&self.factor()?);
            } else if self.peek() == Some(b'/') {
                let at = self.pos;
                self.pos += 1;
                self.skip_ws();
                let rhs = self.factor()?;
                acc = acc.try_div(&rhs).map_err(|_| ParseError {
                    pos: at,
                    message: "division by zero".to_string(),
                })?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Scalar, ParseError> {
        let base = self.base()?;
        if self.eat(b'^') {
            let at = self.pos;
            let exp = self.integer()?;
            let exp: u32 = exp.try_into().map_err(|_| ParseError {
                pos: at,
                message: "exponent too large".to_string(),
            })?;
            self.skip_ws();
            return Ok(base.pow(exp));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Scalar, ParseError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                self.skip_ws();
                Ok(self.base()?.neg())
            }
            Some(b'(') => {
                self.pos += 1;
                self.skip_ws();
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                self.skip_ws();
                Ok(Scalar::rational(
                    self.ctx,
                    num::BigRational::from(BigInt::from(n)),
                ))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.ident(),
            _ => Err(self.err("expected a number, identifier or `(`")),
        }
    }

    fn integer(&mut self) -> Result<u64, ParseError> {
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected a nonnegative integer"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| ParseError {
                pos: start,
                message: "integer literal too large".to_string(),
            })
    }

    fn ident(&mut self) -> Result<Scalar, ParseError> {
        let start = self.pos;
        while self.pos < self.bytes.len()
            && (self.bytes[self.pos].is_ascii_alphanumeric() || self.bytes[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        self.skip_ws();
        if name == "sqrt" {
            self.expect(b'(')?;
            let inner = self.expr()?;
            self.expect(b')')?;
            let root = Scalar::radical(self.ctx).map_err(|_| ParseError {
                pos: start,
                message: "sqrt used but no radicand is registered".to_string(),
            })?;
            // The argument must be exactly the registered radicand.
            let delta = root.mul(&root);
            if inner != delta {
                return Err(ParseError {
                    pos: start,
                    message: "sqrt argument is not the registered radicand".to_string(),
                });
            }
            return Ok(root);
        }
        Scalar::var_named(self.ctx, name).map_err(|_| ParseError {
            pos: start,
            message: format!("unknown identifier `{name}`"),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;
    use crate::scalar::{rat_int, VariableContext, VAR_P, VAR_Q, VAR_X, VAR_Y};

    #[test]
    fn literals_and_precedence() {
        let ctx = VariableContext::base();
        let f = parse("x*y+1", &ctx).unwrap();
        let x = Scalar::var(&ctx, VAR_X);
        let y = Scalar::var(&ctx, VAR_Y);
        assert_eq!(f, (&x * &y).add(&Scalar::one(&ctx)));
        let g = parse("(p^2+q)/q", &ctx).unwrap();
        let p = Scalar::var(&ctx, VAR_P);
        let q = Scalar::var(&ctx, VAR_Q);
        assert_eq!(g, (&(&p * &p) + &q).try_div(&q).unwrap());
        assert_eq!(parse("-2*x - -3", &ctx).unwrap(), parse("3 - 2*x", &ctx).unwrap());
        assert_eq!(parse("2^3", &ctx).unwrap(), Scalar::int(&ctx, 8));
    }

    #[test]
    fn sqrt_of_registered_radicand() {
        let ctx = VariableContext::builder()
            .radical(Poly::var(4, VAR_X), Poly::one(4))
            .build();
        let f = parse("sqrt(x)^2", &ctx).unwrap();
        assert_eq!(f, Scalar::var(&ctx, VAR_X));
        assert!(parse("sqrt(y)", &ctx).is_err());
        let plain = VariableContext::base();
        assert!(parse("sqrt(x)", &plain).is_err());
    }

    #[test]
    fn error_positions() {
        let ctx = VariableContext::base();
        let e = parse("x + foo", &ctx).unwrap_err();
        assert_eq!(e.pos, 4);
        let e = parse("x / (y - y)", &ctx).unwrap_err();
        assert_eq!(e.pos, 2);
        assert!(parse("x +", &ctx).is_err());
        assert!(parse("x 2", &ctx).is_err());
    }

    #[test]
    fn print_parse_round_trip() {
        let ctx = VariableContext::base();
        for text in ["x*y+1", "(p^2+q)/q", "-2*x*y + 1", "(x+y)/(x-y) + q^3"] {
            let f = parse(text, &ctx).unwrap();
            let g = parse(&f.to_string(), &ctx).unwrap();
            assert_eq!(f, g);
        }
    }

    #[test]
    fn eval_at_point() {
        let ctx = VariableContext::base();
        let f = parse("x*y+1", &ctx).unwrap();
        let v = f
            .eval(&[rat_int(1), rat_int(0), rat_int(2), rat_int(0)])
            .unwrap();
        assert_eq!(v, rat_int(3));
        let g = parse("1/q", &ctx).unwrap();
        assert!(g
            .eval(&[rat_int(1), rat_int(0), rat_int(2), rat_int(0)])
            .is_err());
    }
}
