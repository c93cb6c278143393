//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := ('-' | '+') unary | power
//! power := atom ('^' '-'? integer)?
//! atom  := integer | ident | 'exp' '(' expr ')' | '(' expr ')'
//! ```

use std::str::FromStr;

use num::BigInt;

use super::coord::{Coord, Field, MAX_JET_ORDER};
use super::error::KernelError;
use super::expr::{exp_of, Expr};
use super::poly::Q;

/// How `m`, `n` and their jets are read.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Momentum {
    /// `m_k` expands to `u_k - u_{k+2}`, `n_k` to `v_k - v_{k+2}`.
    #[default]
    Alias,
    /// `m_k`, `n_k` are jet coordinates of their own.
    Independent,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ParseOptions {
    pub momentum: Momentum,
    /// Replaces `delta` by this value when set.
    pub delta: Option<i8>,
}

pub fn parse(text: &str) -> Result<Expr, KernelError> {
    parse_with(text, &ParseOptions::default())
}

pub fn parse_with(text: &str, opts: &ParseOptions) -> Result<Expr, KernelError> {
    let mut p = Parser {
        src: text,
        pos: 0,
        opts,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

impl FromStr for Expr {
    type Err = KernelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

/// Momentum jets expand through this in alias mode.
pub fn momentum_alias(field: Field, k: u8) -> Result<Expr, KernelError> {
    let base = match field {
        Field::M => Field::U,
        Field::N => Field::V,
        other => return Ok(Expr::coord(Coord::Jet(other, k))),
    };
    if k + 2 > MAX_JET_ORDER {
        return Err(KernelError::JetOrder(k as u32 + 2));
    }
    Ok(&Expr::coord(Coord::Jet(base, k)) - &Expr::coord(Coord::Jet(base, k + 2)))
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    opts: &'a ParseOptions,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> KernelError {
        KernelError::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, ch: char) -> bool {
        if self.peek() == Some(ch) {
            self.pos += ch.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, ch: char) -> Result<(), KernelError> {
        if self.eat(ch) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{ch}`")))
        }
    }

    fn expr(&mut self) -> Result<Expr, KernelError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, KernelError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.unary()?;
            } else if self.peek() == Some('/') {
                let at = self.pos;
                self.pos += 1;
                let rhs = self.unary()?;
                acc = acc.checked_div(&rhs).map_err(|_| KernelError::Syntax {
                    offset: at,
                    message: "division by zero".into(),
                })?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, KernelError> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, KernelError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let neg = self.eat('-');
        self.skip_ws();
        let at = self.pos;
        let digits = self.digits();
        if digits.is_empty() {
            return Err(self.error("expected integer exponent"));
        }
        let k: i32 = digits
            .parse()
            .map_err(|_| KernelError::Syntax {
                offset: at,
                message: "exponent too large".into(),
            })?;
        base.pow(if neg { -k } else { k }).map_err(|_| KernelError::Syntax {
            offset: at,
            message: "negative power of zero".into(),
        })
    }

    fn digits(&mut self) -> &str {
        let start = self.pos;
        let len = self.src[start..]
            .bytes()
            .take_while(u8::is_ascii_digit)
            .count();
        self.pos += len;
        &self.src[start..start + len]
    }

    fn atom(&mut self) -> Result<Expr, KernelError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let n: BigInt = self.digits().parse().expect("digits");
                Ok(Expr::constant(Q::from_integer(n)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == '_' => self.ident(),
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn ident(&mut self) -> Result<Expr, KernelError> {
        let start = self.pos;
        let len = self.src[start..]
            .bytes()
            .take_while(|b| b.is_ascii_alphanumeric() || *b == b'_')
            .count();
        self.pos += len;
        let name = &self.src[start..start + len];
        if name == "exp" {
            self.expect('(')?;
            let arg_at = self.pos;
            let arg = self.expr()?;
            self.expect(')')?;
            return exp_of(&arg).map(Expr::from_poly).map_err(|_| KernelError::Syntax {
                offset: arg_at,
                message: "exp argument must be a parameter polynomial times one coordinate".into(),
            });
        }
        let coord = Coord::from_name(name).ok_or_else(|| KernelError::UnknownIdentifier {
            offset: start,
            name: name.to_string(),
        })?;
        match coord {
            Coord::Jet(field @ (Field::M | Field::N), k) if self.opts.momentum == Momentum::Alias => {
                momentum_alias(field, k)
            }
            Coord::DELTA => match self.opts.delta {
                Some(d) => Ok(Expr::int(d as i64)),
                None => Ok(Expr::coord(coord)),
            },
            _ => Ok(Expr::coord(coord)),
        }
    }
}
