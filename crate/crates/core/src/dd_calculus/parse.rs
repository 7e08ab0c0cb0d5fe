//! Parser for the textual function syntax used in configuration files.
//!
//! Grammar: `+ - * / ^`, parentheses, numbers, the variable `t`, the
//! constants `pi` and `e`, and the functions `exp log ln sqrt sin cos`.

use crate::dd_calculus::function::ScalarFunction;
use crate::error::{Error, Result};

pub fn parse_function(src: &str) -> Result<ScalarFunction> {
    let mut p = Parser { src: src.as_bytes(), pos: 0 };
    let f = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(f)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.to_string() }
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

    fn expr(&mut self) -> Result<ScalarFunction> {
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

    fn term(&mut self) -> Result<ScalarFunction> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc = acc.mul(&self.unary()?);
            } else if self.eat(b'/') {
                acc = acc.div(&self.unary()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<ScalarFunction> {
        if self.eat(b'-') {
            return Ok(self.unary()?.neg());
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<ScalarFunction> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let exponent = self.unary()?;
            return Ok(match exponent.as_const() {
                Some(p) => base.powf(p),
                None => exponent.mul(&base.ln()).exp(),
            });
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ScalarFunction> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                match name {
                    "t" => Ok(ScalarFunction::identity()),
                    "pi" => Ok(ScalarFunction::constant(std::f64::consts::PI)),
                    "e" => Ok(ScalarFunction::constant(std::f64::consts::E)),
                    "exp" | "log" | "ln" | "sqrt" | "sin" | "cos" => {
                        if !self.eat(b'(') {
                            return Err(self.error("expected `(` after function name"));
                        }
                        let arg = self.expr()?;
                        if !self.eat(b')') {
                            return Err(self.error("expected `)`"));
                        }
                        Ok(match name {
                            "exp" => arg.exp(),
                            "log" | "ln" => arg.ln(),
                            "sqrt" => arg.powf(0.5),
                            "sin" => arg.sin(),
                            _ => arg.cos(),
                        })
                    }
                    _ => {
                        self.pos = start;
                        Err(self.error(&format!("unknown identifier `{name}`")))
                    }
                }
            }
            _ => Err(self.error("expected a number, `t`, a function or `(`")),
        }
    }

    fn number(&mut self) -> Result<ScalarFunction> {
        let start = self.pos;
        let s = self.src;
        let digits = |p: &mut usize| {
            while *p < s.len() && s[*p].is_ascii_digit() {
                *p += 1;
            }
        };
        digits(&mut self.pos);
        if self.pos < s.len() && s[self.pos] == b'.' {
            self.pos += 1;
            digits(&mut self.pos);
        }
        if self.pos < s.len() && (s[self.pos] == b'e' || s[self.pos] == b'E') {
            let save = self.pos;
            self.pos += 1;
            if self.pos < s.len() && (s[self.pos] == b'+' || s[self.pos] == b'-') {
                self.pos += 1;
            }
            if self.pos < s.len() && s[self.pos].is_ascii_digit() {
                digits(&mut self.pos);
            } else {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&s[start..self.pos]).unwrap();
        text.parse::<f64>()
            .map(ScalarFunction::constant)
            .map_err(|_| Error::Parse { pos: start, msg: format!("bad number `{text}`") })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_evaluates() {
        let f = parse_function("exp(-2*t) + t^2/3 - sqrt(t)").unwrap();
        let t: f64 = 0.8;
        let expect = (-2.0 * t).exp() + t * t / 3.0 - t.sqrt();
        assert!((f.eval(t) - expect).abs() < 1e-15);
        assert!((parse_function("2^t").unwrap().eval(3.0) - 8.0).abs() < 1e-12);
        assert!((parse_function("-t^2").unwrap().eval(3.0) + 9.0).abs() < 1e-12);
        assert!((parse_function("1.5e-1*t").unwrap().eval(2.0) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_function("exp(t").is_err());
        assert!(parse_function("foo(t)").is_err());
        assert!(parse_function("t t").is_err());
    }

    #[test]
    fn polynomial_detection() {
        let f = parse_function("(t+1)^2 - 2*t").unwrap();
        assert_eq!(f.as_polynomial(), Some(vec![1.0, 0.0, 1.0]));
    }
}
