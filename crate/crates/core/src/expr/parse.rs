use std::f64::consts::PI;

use super::{BinaryOp, Expr, UnaryOp};
use crate::error::{Error, Result};

/// Parses `text` as an expression over `x1..xn`.
///
/// ```text
/// expr   := term (("+" | "-") term)*
/// term   := factor (("*" | "/") factor)*
/// factor := "-"? atom ("^" integer)?
/// atom   := number | "pi" | "x" integer | func "(" expr ("," expr)? ")" | "(" expr ")"
/// func   := sin | cos | exp | abs | sign | min | max
/// ```
pub fn parse(text: &str, n: usize) -> Result<Expr> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, n };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error(format!("unexpected '{}'", p.src[p.pos] as char)));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    n: usize,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> Error {
        Error::Syntax { offset: self.pos, message: message.into() }
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

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(b'+') => BinaryOp::Add,
                Some(b'-') => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Some(b'*') => BinaryOp::Mul,
                Some(b'/') => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.factor()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let negate = self.eat(b'-');
        let mut e = self.atom()?;
        if self.eat(b'^') {
            self.skip_ws();
            let k = self.integer()?;
            let k = u32::try_from(k).map_err(|_| self.error("exponent too large"))?;
            e = Expr::Pow(Box::new(e), k);
        }
        Ok(if negate { Expr::Unary(UnaryOp::Neg, Box::new(e)) } else { e })
    }

    fn integer(&mut self) -> Result<u64> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected integer"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        digits.parse().map_err(|_| Error::Syntax { offset: start, message: "integer overflow".into() })
    }

    fn atom(&mut self) -> Result<Expr> {
        let c = self.peek().ok_or_else(|| self.error("unexpected end of input"))?;
        if c == b'(' {
            self.pos += 1;
            let e = self.expr()?;
            self.expect(b')')?;
            return Ok(e);
        }
        if c.is_ascii_digit() || c == b'.' {
            return self.number();
        }
        if c.is_ascii_alphabetic() {
            return self.name();
        }
        Err(self.error(format!("unexpected '{}'", c as char)))
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut count = digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            count += digits(self);
        }
        if count == 0 {
            return Err(Error::Syntax { offset: start, message: "malformed number".into() });
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                self.pos = mark;
                return Err(self.error("malformed exponent"));
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii number");
        let v: f64 = text
            .parse()
            .map_err(|_| Error::Syntax { offset: start, message: format!("bad number '{}'", text) })?;
        if !v.is_finite() {
            return Err(Error::Syntax { offset: start, message: format!("number '{}' overflows", text) });
        }
        Ok(Expr::Const(v))
    }

    fn name(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        let word = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii word");
        match word {
            "x" => {
                let k = self.integer()?;
                let k = usize::try_from(k).unwrap_or(usize::MAX);
                if k == 0 || k > self.n {
                    return Err(Error::Dimension { expected: self.n, found: k });
                }
                Ok(Expr::Var(k))
            }
            "pi" => Ok(Expr::Const(PI)),
            "sin" | "cos" | "exp" | "abs" | "sign" => {
                let op = match word {
                    "sin" => UnaryOp::Sin,
                    "cos" => UnaryOp::Cos,
                    "exp" => UnaryOp::Exp,
                    "abs" => UnaryOp::Abs,
                    _ => UnaryOp::Sign,
                };
                self.expect(b'(')?;
                let a = self.expr()?;
                self.expect(b')')?;
                Ok(Expr::Unary(op, Box::new(a)))
            }
            "min" | "max" => {
                let op = if word == "min" { BinaryOp::Min } else { BinaryOp::Max };
                self.expect(b'(')?;
                let a = self.expr()?;
                self.expect(b',')?;
                let b = self.expr()?;
                self.expect(b')')?;
                Ok(Expr::Binary(op, Box::new(a), Box::new(b)))
            }
            _ => Err(Error::Syntax { offset: start, message: format!("unknown name '{}'", word) }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(k: usize) -> Box<Expr> {
        Box::new(Expr::Var(k))
    }

    #[test]
    fn grammar_examples() {
        assert_eq!(
            parse("x1 + 2*x2", 2).unwrap(),
            Expr::Binary(
                BinaryOp::Add,
                var(1),
                Box::new(Expr::Binary(BinaryOp::Mul, Box::new(Expr::Const(2.0)), var(2)))
            )
        );
        assert_eq!(parse("-x1", 1).unwrap(), Expr::Unary(UnaryOp::Neg, var(1)));
        assert_eq!(
            parse("sin(x1^2)", 1).unwrap(),
            Expr::Unary(UnaryOp::Sin, Box::new(Expr::Pow(var(1), 2)))
        );
    }

    #[test]
    fn precedence_and_associativity() {
        // ^ binds tighter than unary minus.
        assert_eq!(
            parse("-x1^2", 1).unwrap(),
            Expr::Unary(UnaryOp::Neg, Box::new(Expr::Pow(var(1), 2)))
        );
        // Left associative.
        assert_eq!(
            parse("x1 - x2 - x3", 3).unwrap(),
            Expr::Binary(
                BinaryOp::Sub,
                Box::new(Expr::Binary(BinaryOp::Sub, var(1), var(2))),
                var(3)
            )
        );
        assert_eq!(
            parse("x1 / x2 * x3", 3).unwrap(),
            Expr::Binary(
                BinaryOp::Mul,
                Box::new(Expr::Binary(BinaryOp::Div, var(1), var(2))),
                var(3)
            )
        );
    }

    #[test]
    fn numbers_and_constants() {
        assert_eq!(parse("2.5e-3", 1).unwrap(), Expr::Const(2.5e-3));
        assert_eq!(parse("1E+2", 1).unwrap(), Expr::Const(100.0));
        assert_eq!(parse(".5", 1).unwrap(), Expr::Const(0.5));
        assert_eq!(parse("pi", 1).unwrap(), Expr::Const(PI));
        assert_eq!(
            parse("max(x1, 0)", 1).unwrap(),
            Expr::Binary(BinaryOp::Max, var(1), Box::new(Expr::Const(0.0)))
        );
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        assert_eq!(
            parse("x1 + * x2", 2),
            Err(Error::Syntax { offset: 5, message: "unexpected '*'".into() })
        );
        assert!(matches!(parse("x1^2^3", 1), Err(Error::Syntax { offset: 4, .. })));
        assert!(matches!(parse("--x1", 1), Err(Error::Syntax { offset: 1, .. })));
        assert!(matches!(parse("tan(x1)", 1), Err(Error::Syntax { offset: 0, .. })));
        assert!(matches!(parse("(x1", 1), Err(Error::Syntax { offset: 3, .. })));
        assert!(matches!(parse("x1^-1", 1), Err(Error::Syntax { offset: 3, .. })));
        assert!(matches!(parse("1e", 1), Err(Error::Syntax { .. })));
        assert!(matches!(parse("", 1), Err(Error::Syntax { offset: 0, .. })));
    }

    #[test]
    fn dimension_errors() {
        assert_eq!(parse("x3", 2), Err(Error::Dimension { expected: 2, found: 3 }));
        assert_eq!(parse("x0", 2), Err(Error::Dimension { expected: 2, found: 0 }));
    }
}
