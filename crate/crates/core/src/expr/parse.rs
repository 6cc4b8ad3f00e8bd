//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' exponent)?
//! exponent:= integer | '(' '-'? integer ')'
//! atom    := number | ident | 'sqrt' '(' expr ')' | '(' expr ')'
//! number  := decimal literal, optional fraction and exponent
//! ident   := [A-Za-z_][A-Za-z0-9_]*        (must name a chart coordinate)
//! ```
//!
//! `^` binds tighter than unary minus, so `-x^2` is `-(x^2)`.

use std::sync::Arc;

use super::Expr;

#[derive(Debug, Clone)]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    coords: &'a [&'a str],
}

pub(super) fn parse(text: &str, coords: &[&str]) -> Result<Expr, ParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        coords,
    };
    p.skip_ws();
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

impl<'a> Parser<'a> {
    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            self.skip_ws();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                let rhs = self.term()?;
                lhs = Expr::Add(Arc::new(lhs), Arc::new(rhs));
            } else if self.eat(b'-') {
                let rhs = self.term()?;
                lhs = Expr::Sub(Arc::new(lhs), Arc::new(rhs));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                let rhs = self.unary()?;
                lhs = Expr::Mul(Arc::new(lhs), Arc::new(rhs));
            } else if self.eat(b'/') {
                let rhs = self.unary()?;
                lhs = Expr::Div(Arc::new(lhs), Arc::new(rhs));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(b'-') {
            let inner = self.unary()?;
            return Ok(Expr::Neg(Arc::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let n = self.exponent()?;
            return Ok(Expr::Pow(Arc::new(base), n));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<i32, ParseError> {
        if self.eat(b'(') {
            let neg = self.eat(b'-');
            let n = self.integer()?;
            if !self.eat(b')') {
                return Err(self.err("expected `)` after exponent"));
            }
            return Ok(if neg { -n } else { n });
        }
        let neg = self.eat(b'-');
        let n = self.integer()?;
        Ok(if neg { -n } else { n })
    }

    fn integer(&mut self) -> Result<i32, ParseError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer exponent"));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let n: i32 = text
            .parse()
            .map_err(|_| self.err(format!("exponent out of range: {text}")))?;
        self.skip_ws();
        Ok(n)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                self.skip_ws();
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.ident(),
            Some(c) => Err(self.err(format!("unexpected character `{}`", c as char))),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.peek() == Some(b'.') {
            self.pos += 1;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
        }
        if matches!(self.peek(), Some(b'e') | Some(b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'+') | Some(b'-')) {
                self.pos += 1;
            }
            if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
            } else {
                // `e` belonged to an identifier after all; back off
                self.pos = mark;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let v: f64 = text
            .parse()
            .map_err(|_| ParseError {
                offset: start,
                message: format!("invalid number literal `{text}`"),
            })?;
        self.skip_ws();
        Ok(Expr::Const(v))
    }

    fn ident(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_owned();
        self.skip_ws();
        if name == "sqrt" {
            if !self.eat(b'(') {
                return Err(self.err("expected `(` after sqrt"));
            }
            let e = self.expr()?;
            if !self.eat(b')') {
                return Err(self.err("expected `)` closing sqrt"));
            }
            return Ok(Expr::Sqrt(Arc::new(e)));
        }
        match self.coords.iter().position(|c| *c == name) {
            Some(i) => Ok(Expr::Coord(i)),
            None => Err(ParseError {
                offset: start,
                message: format!(
                    "unknown coordinate `{name}` (chart declares {:?})",
                    self.coords
                ),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_is_standard() {
        let coords = ["a", "b"];
        let e = parse("a + b*a^2", &coords).unwrap();
        // a + (b * (a^2))
        assert_eq!(
            e.eval(&[2.0, 3.0]).unwrap(),
            2.0 + 3.0 * 4.0
        );
        let e = parse("-a^2", &coords).unwrap();
        assert_eq!(e.eval(&[3.0, 0.0]).unwrap(), -9.0);
        let e = parse("a - b - a", &coords).unwrap();
        assert_eq!(e.eval(&[5.0, 1.0]).unwrap(), -1.0);
        let e = parse("a/b/a", &coords).unwrap();
        assert_eq!(e.eval(&[4.0, 2.0]).unwrap(), 0.5);
    }

    #[test]
    fn error_carries_byte_offset() {
        let coords = ["a"];
        let err = parse("a + $", &coords).unwrap_err();
        assert_eq!(err.offset, 4);
        let err = parse("a +", &coords).unwrap_err();
        assert_eq!(err.offset, 3);
    }

    #[test]
    fn negative_exponent_forms() {
        let coords = ["a"];
        for src in ["a^-2", "a^(-2)"] {
            let e = parse(src, &coords).unwrap();
            assert_eq!(e.eval(&[2.0]).unwrap(), 0.25, "{src}");
        }
    }

    #[test]
    fn malformed_inputs_do_not_panic() {
        let coords = ["x0", "x1"];
        for src in [
            "", "(", ")", "((x0)", "x0^^2", "sqrt", "sqrt(", "sqrt()", "1..2", "^2", "x0^x1",
            "*x0", "x0 x1", "e10", "1e", "x0^999999999999",
        ] {
            let _ = parse(src, &coords); // must return, never panic
        }
    }
}
