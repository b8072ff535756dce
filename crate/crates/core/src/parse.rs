//! Polynomial expressions.
//!
//! ```text
//! expr   := sign? term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' int)?
//! atom   := rational | variable | '(' expr ')'
//! ```
//!
//! Exponents are non-negative except on `x`, which may carry a negative
//! exponent so that rendered Laurent polynomials read back.

use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::frame::std_polys;
use crate::monomial::{abstract_slot, Var};
use crate::poly::MultiPoly;

/// How identifiers are resolved.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dialect {
    /// `x, y, z, u, t, c`, with `v`, `w`, `p` expanding to the standard frame.
    Concrete,
    /// `x, c` and the slots `Y, V, W, T` (lowercase accepted).
    Abstract,
}

pub fn parse_expr(text: &str) -> Result<MultiPoly> {
    parse(text, Dialect::Concrete)
}

pub fn parse_abstract(text: &str) -> Result<MultiPoly> {
    parse(text, Dialect::Abstract)
}

pub fn parse(text: &str, dialect: Dialect) -> Result<MultiPoly> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        dialect,
        frame: std_polys(),
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    dialect: Dialect,
    frame: (MultiPoly, MultiPoly, MultiPoly),
}

impl Parser<'_> {
    fn err(&self, message: &str) -> Error {
        Error::Parse {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<MultiPoly> {
        let negate = if self.eat(b'-') {
            true
        } else {
            self.eat(b'+');
            false
        };
        let mut acc = self.term()?;
        if negate {
            acc = -acc;
        }
        loop {
            if self.eat(b'+') {
                acc = &acc + &self.term()?;
            } else if self.eat(b'-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly> {
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<MultiPoly> {
        let (base, is_x) = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        self.skip_ws();
        let start = self.pos;
        let neg = self.src.get(self.pos) == Some(&b'-');
        if neg {
            self.pos += 1;
        }
        let digits = self.digits();
        if digits.is_empty() {
            return Err(self.err("expected an exponent"));
        }
        let e: u32 = digits.parse().map_err(|_| Error::Parse {
            offset: start,
            message: "exponent out of range".into(),
        })?;
        if neg {
            if !is_x {
                return Err(Error::Parse {
                    offset: start,
                    message: "negative exponents are allowed on x only".into(),
                });
            }
            return Ok(MultiPoly::x_pow(-(e as i32)));
        }
        Ok(base.pow(e))
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    /// The atom, and whether it is the bare variable `x`.
    fn atom(&mut self) -> Result<(MultiPoly, bool)> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                Ok((e, false))
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                let num = self.digits();
                let mut text = num;
                // `a/b` only when a digit follows the slash.
                if self.src.get(self.pos) == Some(&b'/')
                    && self.src.get(self.pos + 1).is_some_and(|d| d.is_ascii_digit())
                {
                    self.pos += 1;
                    text.push('/');
                    text.push_str(&self.digits());
                }
                let c: Coeff = text.parse().map_err(|m: String| Error::Parse {
                    offset: start,
                    message: m,
                })?;
                Ok((MultiPoly::constant(c), false))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
                self.variable(name, start)
            }
            Some(_) => Err(self.err("expected a number, variable or '('")),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn variable(&self, name: &str, offset: usize) -> Result<(MultiPoly, bool)> {
        let var = |v| Ok((MultiPoly::var(v), v == Var::X));
        match (self.dialect, name) {
            (_, "x") => var(Var::X),
            (_, "c") => var(Var::C),
            (Dialect::Concrete, "y") => var(Var::Y),
            (Dialect::Concrete, "z") => var(Var::Z),
            (Dialect::Concrete, "u") => var(Var::U),
            (Dialect::Concrete, "t") => var(Var::T),
            (Dialect::Concrete, "p") => Ok((self.frame.0.clone(), false)),
            (Dialect::Concrete, "v") => Ok((self.frame.1.clone(), false)),
            (Dialect::Concrete, "w") => Ok((self.frame.2.clone(), false)),
            (Dialect::Abstract, "Y" | "y") => var(abstract_slot::Y),
            (Dialect::Abstract, "V" | "v") => var(abstract_slot::V),
            (Dialect::Abstract, "W" | "w") => var(abstract_slot::W),
            (Dialect::Abstract, "T" | "t") => var(abstract_slot::T),
            _ => Err(Error::UnknownVariable {
                name: name.to_string(),
                offset,
            }),
        }
    }
}
