//! Recursive-descent parser for polynomial expressions.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary ('*' unary)*
//! unary := '-' unary | power
//! power := atom ('^' integer)?
//! atom  := integer | ident | '(' expr ')'
//! ```

use num_traits::ToPrimitive;

use super::{Poly, Ring};
use crate::arith::Integer;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Integer),
    Ident(String),
    Sym(char),
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().map(|(_, c)| c).collect();
            out.push((pos, Tok::Num(text.parse().expect("digits"))));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            out.push((pos, Tok::Ident(chars[start..i].iter().map(|(_, c)| c).collect())));
        } else if "+-*^()".contains(c) {
            out.push((pos, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected `{c}` at offset {pos}")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    ring: &'a Ring,
    toks: Vec<(usize, Tok)>,
    at: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn err(&self, what: &str) -> Error {
        match self.toks.get(self.at) {
            Some((pos, t)) => Error::Parse(format!("{what}, found {t:?} at offset {pos}")),
            None => Error::Parse(format!("{what}, found end of input")),
        }
    }

    fn expr(&mut self) -> Result<Poly> {
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

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.unary()?;
        while self.eat('*') {
            acc = &acc * &self.unary()?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Poly> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if self.eat('^') {
            let e = match self.peek() {
                Some(Tok::Num(n)) => n.to_u32().ok_or_else(|| self.err("exponent too large"))?,
                _ => return Err(self.err("expected exponent")),
            };
            self.at += 1;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.at += 1;
                Ok(self.ring.constant(n))
            }
            Some(Tok::Ident(name)) => {
                self.at += 1;
                self.ring.var(&name)
            }
            Some(Tok::Sym('(')) => {
                self.at += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(inner)
            }
            _ => Err(self.err("expected a number, indeterminate or `(`")),
        }
    }
}

pub(super) fn parse(ring: &Ring, src: &str) -> Result<Poly> {
    let mut p = Parser { ring, toks: lex(src)?, at: 0 };
    let out = p.expr()?;
    if p.at != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let r = Ring::new(&["x", "y"]);
        assert_eq!(r.parse("-x^2").unwrap(), -r.gen(0).pow(2));
        assert_eq!(r.parse("2*(x+y)^2 - 4*x*y").unwrap(), r.parse("2*x^2 + 2*y^2").unwrap());
        assert_eq!(r.parse("x - y - x").unwrap(), -r.gen(1));
    }

    #[test]
    fn errors() {
        let r = Ring::new(&["x"]);
        assert!(r.parse("x + z").is_err());
        assert!(r.parse("(x + 1").is_err());
        assert!(r.parse("x ^ y").is_err());
        assert!(r.parse("x $ 1").is_err());
        assert!(r.parse("x x").is_err());
    }
}
