//! Evaluator for closed-form k values such as `12-8*sqrt(2)`,
//! `8i*sqrt(4+3*sqrt(2))` or `root4(8)*(sqrt(2)-1)*i`.
//!
//! Grammar: sums and differences of products and quotients of factors; a
//! factor is a decimal or rational literal, `i`, `pi`, a parenthesised
//! expression, or `sqrt(..)` / `root4(..)` (principal branches, `√` also
//! accepted) or the real `atan(..)`. Juxtaposition such as `8i` or `2i*sqrt(7)` multiplies.

use crate::error::{Error, Result};
use crate::numerics::{parse_real, pi, BigComplex};

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    prec: u32,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at byte {} of {:?}", self.pos, String::from_utf8_lossy(self.s)))
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<BigComplex> {
        let mut acc = if self.eat(b'-') {
            -self.term()?
        } else {
            self.eat(b'+');
            self.term()?
        };
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

    fn term(&mut self) -> Result<BigComplex> {
        let mut acc = self.factor()?;
        loop {
            if self.eat(b'*') {
                acc = &acc * &self.factor()?;
            } else if self.eat(b'/') {
                let d = self.factor()?;
                if d.is_zero() {
                    return Err(self.err("division by zero"));
                }
                acc = &acc / &d;
            } else if matches!(self.peek(), Some(b'0'..=b'9' | b'(' | b'a'..=b'z')) || self.starts_with("√") {
                acc = &acc * &self.factor()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn starts_with(&self, w: &str) -> bool {
        self.s[self.pos..].starts_with(w.as_bytes())
    }

    fn call(&mut self, name: &str) -> Result<Option<BigComplex>> {
        if !self.starts_with(name) {
            return Ok(None);
        }
        self.pos += name.len();
        if !self.eat(b'(') {
            return Err(self.err("expected '('"));
        }
        let v = self.expr()?;
        if !self.eat(b')') {
            return Err(self.err("expected ')'"));
        }
        Ok(Some(v))
    }

    fn factor(&mut self) -> Result<BigComplex> {
        let p = self.prec;
        if self.eat(b'(') {
            let v = self.expr()?;
            if !self.eat(b')') {
                return Err(self.err("expected ')'"));
            }
            return Ok(v);
        }
        if let Some(v) = self.call("sqrt")? {
            return Ok(v.sqrt());
        }
        if let Some(v) = self.call("root4")? {
            return Ok(v.sqrt().sqrt());
        }
        if let Some(v) = self.call("atan")? {
            if !v.im.is_zero() {
                return Err(self.err("atan takes a real argument"));
            }
            return Ok(BigComplex::from_real(v.re.atan()));
        }
        if self.starts_with("√") {
            self.pos += "√".len();
            // √2 binds to the literal or parenthesised group that follows
            let v = self.factor_atom()?;
            return Ok(v.sqrt());
        }
        if self.starts_with("pi") {
            self.pos += 2;
            return Ok(BigComplex::from_real(pi(p)));
        }
        if self.eat(b'i') {
            return Ok(BigComplex::i(p));
        }
        self.number()
    }

    fn factor_atom(&mut self) -> Result<BigComplex> {
        if self.eat(b'(') {
            let v = self.expr()?;
            if !self.eat(b')') {
                return Err(self.err("expected ')'"));
            }
            return Ok(v);
        }
        self.number()
    }

    fn number(&mut self) -> Result<BigComplex> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9' | b'.')) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        let txt = std::str::from_utf8(&self.s[start..self.pos]).map_err(|_| self.err("bad utf-8"))?;
        Ok(BigComplex::from_real(parse_real(txt, self.prec)?))
    }
}

/// Evaluates a k expression at `prec` bits.
pub fn parse(expr: &str, prec: u32) -> Result<BigComplex> {
    let cleaned: String = expr.chars().filter(|c| !c.is_whitespace()).map(|c| if c == '−' { '-' } else { c }).collect();
    let mut p = Parser { s: cleaned.as_bytes(), pos: 0, prec };
    let v = p.expr()?;
    if p.pos != p.s.len() {
        return Err(p.err("trailing input"));
    }
    Ok(v)
}
