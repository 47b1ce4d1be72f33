//! Boolean coordinate expressions.
//!
//! ```text
//! expr  := or
//! or    := xor ('|' xor)*
//! xor   := and ('^' and)*
//! and   := not ('&' not)*
//! not   := '!' not | atom
//! atom  := '0' | '1' | ident | '(' expr ')'
//! ident := ('w' | 'v') nonzero-decimal
//! ```
//!
//! Whitespace is ignored. Identifiers are 1-based; `w3` is state coordinate
//! 3 and `v1` the first input coordinate. Error positions are 0-based byte
//! offsets.

use crate::error::{Error, Result};
use crate::state::TotalState;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Var {
    /// State coordinate, 0-based.
    W(usize),
    /// Input coordinate, 0-based.
    V(usize),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Expr {
    Const(bool),
    Var(Var),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Xor(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
}

impl Expr {
    /// Evaluates at `z`; out-of-range identifiers are errors.
    pub fn eval(&self, z: &TotalState) -> Result<bool> {
        Ok(match self {
            Expr::Const(b) => *b,
            Expr::Var(Var::W(i)) => lookup(z.w, *i, 'w')?,
            Expr::Var(Var::V(i)) => lookup(z.v, *i, 'v')?,
            Expr::Not(e) => !e.eval(z)?,
            Expr::And(a, b) => a.eval(z)? & b.eval(z)?,
            Expr::Xor(a, b) => a.eval(z)? ^ b.eval(z)?,
            Expr::Or(a, b) => a.eval(z)? | b.eval(z)?,
        })
    }

    /// Every identifier, in order of appearance.
    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut Vec<Var>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(v) => out.push(*v),
            Expr::Not(e) => e.collect(out),
            Expr::And(a, b) | Expr::Xor(a, b) | Expr::Or(a, b) => {
                a.collect(out);
                b.collect(out);
            }
        }
    }
}

fn lookup(s: crate::state::State, i: usize, prefix: char) -> Result<bool> {
    if i < s.width() {
        Ok(s.get(i))
    } else {
        Err(Error::Model(format!(
            "unknown identifier {prefix}{} (width {})",
            i + 1,
            s.width()
        )))
    }
}

pub fn parse_expression(text: &str) -> Result<Expr> {
    let mut p = Parser {
        text: text.as_bytes(),
        pos: 0,
    };
    let e = p.or()?;
    p.skip_ws();
    if p.pos < p.text.len() {
        return Err(p.error(format!("unexpected {:?}", p.text[p.pos] as char)));
    }
    Ok(e)
}

/// Parses and checks identifiers against widths `n` and `m`.
pub fn parse_coordinate(text: &str, n: usize, m: usize) -> Result<Expr> {
    let e = parse_expression(text)?;
    for v in e.vars() {
        let (name, i, limit) = match v {
            Var::W(i) => ('w', i, n),
            Var::V(i) => ('v', i, m),
        };
        if i >= limit {
            return Err(Error::Model(format!(
                "unknown identifier {name}{} in {text:?}",
                i + 1
            )));
        }
    }
    Ok(e)
}

struct Parser<'a> {
    text: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: String) -> Error {
        Error::Expression {
            message,
            pos: self.pos,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, ch: u8) -> bool {
        self.skip_ws();
        if self.text.get(self.pos) == Some(&ch) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn binary(
        &mut self,
        op: u8,
        next: fn(&mut Self) -> Result<Expr>,
        build: fn(Box<Expr>, Box<Expr>) -> Expr,
    ) -> Result<Expr> {
        let mut lhs = next(self)?;
        while self.eat(op) {
            let rhs = next(self)?;
            lhs = build(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Expr> {
        self.binary(b'|', Self::xor, Expr::Or)
    }

    fn xor(&mut self) -> Result<Expr> {
        self.binary(b'^', Self::and, Expr::Xor)
    }

    fn and(&mut self) -> Result<Expr> {
        self.binary(b'&', Self::not, Expr::And)
    }

    fn not(&mut self) -> Result<Expr> {
        if self.eat(b'!') {
            Ok(Expr::Not(Box::new(self.not()?)))
        } else {
            self.atom()
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        self.skip_ws();
        let Some(&ch) = self.text.get(self.pos) else {
            return Err(self.error("unexpected end of expression".into()));
        };
        match ch {
            b'0' | b'1' => {
                self.pos += 1;
                Ok(Expr::Const(ch == b'1'))
            }
            b'(' => {
                self.pos += 1;
                let e = self.or()?;
                if !self.eat(b')') {
                    return Err(self.error("expected ')'".into()));
                }
                Ok(e)
            }
            b'w' | b'v' => self.ident(ch),
            _ => Err(self.error(format!("unexpected {:?}", ch as char))),
        }
    }

    fn ident(&mut self, prefix: u8) -> Result<Expr> {
        let start = self.pos;
        self.pos += 1;
        let digits_at = self.pos;
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let digits = &self.text[digits_at..self.pos];
        let fail = |message: String| Error::Expression { message, pos: start };
        let name = String::from_utf8_lossy(&self.text[start..self.pos]).into_owned();
        if digits.is_empty() {
            return Err(fail(format!("identifier {name:?} needs an index")));
        }
        if digits[0] == b'0' {
            return Err(fail(format!("identifier {name:?}: indices start at 1 without leading zeros")));
        }
        let index: usize = std::str::from_utf8(digits)
            .expect("ascii digits")
            .parse()
            .map_err(|_| fail(format!("identifier {name:?}: index too large")))?;
        let var = if prefix == b'w' {
            Var::W(index - 1)
        } else {
            Var::V(index - 1)
        };
        Ok(Expr::Var(var))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::State;

    fn at(w: &str) -> TotalState {
        TotalState::new(w.parse().unwrap(), State::empty())
    }

    #[test]
    fn evaluation_examples() {
        assert!(parse_expression("w1 & !w2").unwrap().eval(&at("10")).unwrap());
        assert!(parse_expression("w1 ^ w2 | w1 & w2").unwrap().eval(&at("11")).unwrap());
        assert!(!parse_expression("0").unwrap().eval(&at("1")).unwrap());
    }

    #[test]
    fn precedence_and_associativity() {
        let e = parse_expression("w1 | w2 ^ w3 & !w1").unwrap();
        let expected = Expr::Or(
            Box::new(Expr::Var(Var::W(0))),
            Box::new(Expr::Xor(
                Box::new(Expr::Var(Var::W(1))),
                Box::new(Expr::And(
                    Box::new(Expr::Var(Var::W(2))),
                    Box::new(Expr::Not(Box::new(Expr::Var(Var::W(0))))),
                )),
            )),
        );
        assert_eq!(e, expected);
        let left = parse_expression("w1 ^ w2 ^ w3").unwrap();
        assert!(matches!(left, Expr::Xor(ref a, _) if matches!(**a, Expr::Xor(..))));
        assert_eq!(parse_expression("!!w1").unwrap(), parse_expression("!(!w1)").unwrap());
    }

    #[test]
    fn errors_carry_positions() {
        assert!(matches!(parse_expression("w0"), Err(Error::Expression { pos: 0, .. })));
        assert!(matches!(parse_expression("w1 & w01"), Err(Error::Expression { pos: 5, .. })));
        assert!(matches!(parse_expression("w1 &"), Err(Error::Expression { pos: 4, .. })));
        assert!(matches!(parse_expression("(w1"), Err(Error::Expression { .. })));
        assert!(matches!(parse_expression("w1 w2"), Err(Error::Expression { pos: 3, .. })));
        assert!(matches!(parse_expression("x1"), Err(Error::Expression { pos: 0, .. })));
        assert!(matches!(parse_coordinate("v2", 1, 1), Err(Error::Model(_))));
        assert!(parse_coordinate("v1 & w1", 1, 1).is_ok());
    }
}
