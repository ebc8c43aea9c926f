//! Text syntax for chart forms.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*        '*' is the wedge product
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' primary)*             integer exponent on a function, else wedge
//! primary := number | coordinate | differential | '(' expr ')'
//!          | ('exp' | 'sin' | 'cos') '(' expr ')'
//!          | ('bump' | 'step') "'"* '(' number ',' number ',' expr ')'
//!          | 'd' '(' expr ')'
//! ```
//!
//! Coordinates are `x1.., r1.., th1..` (`theta1` also accepted, and a bare
//! `x`, `r` or `th` means index 1); differentials prefix them with `d`.

use num_traits::Zero;

use super::expr::{Poly, Profile, Var};
use super::form::FormExpr;
use crate::lattice::{Int, Rat};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rat),
    Ident(String, u32),
    Sym(char),
}

struct Lexer<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
}

fn err(col: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line: 1, col: col + 1, msg: msg.into() }
}

impl<'a> Lexer<'a> {
    fn run(src: &'a str) -> Result<Vec<(Tok, usize)>> {
        let mut lx = Lexer { src, toks: Vec::new() };
        let bytes = src.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i] as char;
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() || c == '.' {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                lx.toks.push((Tok::Num(decimal(&src[start..i]).ok_or_else(|| err(start, "bad number"))?), start));
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let name = lx.src[start..i].to_string();
                let mut primes = 0;
                while i < bytes.len() && bytes[i] == b'\'' {
                    primes += 1;
                    i += 1;
                }
                lx.toks.push((Tok::Ident(name, primes), start));
            } else if "+-*/^(),".contains(c) {
                lx.toks.push((Tok::Sym(c), i));
                i += 1;
            } else {
                return Err(err(i, format!("unexpected character {c:?}")));
            }
        }
        Ok(lx.toks)
    }
}

fn decimal(s: &str) -> Option<Rat> {
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if int.is_empty() && frac.is_empty() || frac.contains('.') {
        return None;
    }
    let digits = format!("{int}{frac}");
    let n: Int = digits.parse().ok()?;
    let d = num_traits::pow(Int::from(10), frac.len());
    Some(Rat::new(n, d))
}

/// Parses a coordinate name such as `x2`, `th1` or `theta` into a variable.
fn coordinate(name: &str) -> Option<Var> {
    let split = name.find(|c: char| c.is_ascii_digit()).unwrap_or(name.len());
    let (stem, digits) = name.split_at(split);
    let index = if digits.is_empty() {
        0
    } else {
        let k: usize = digits.parse().ok()?;
        k.checked_sub(1)?
    };
    match stem {
        "x" => Some(Var::x(index)),
        "r" => Some(Var::r(index)),
        "th" | "theta" => Some(Var::theta(index)),
        _ => None,
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.1)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(err(self.col(), format!("expected '{c}'")))
        }
    }

    fn expr(&mut self) -> Result<FormExpr> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<FormExpr> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc.wedge(&self.unary()?);
            } else if self.eat('/') {
                let col = self.col();
                let k = self.unary()?.as_function().and_then(|f| f.as_constant());
                match k {
                    Some(k) if !k.is_zero() => acc = acc.scale(&k.recip()),
                    _ => return Err(err(col, "can only divide by a nonzero constant")),
                }
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<FormExpr> {
        if self.eat('-') {
            return Ok(self.unary()?.neg());
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<FormExpr> {
        let mut acc = self.primary()?;
        while self.eat('^') {
            let col = self.col();
            if let Some(Tok::Num(k)) = self.peek().cloned() {
                self.pos += 1;
                let f = acc.as_function().ok_or_else(|| err(col, "only functions can be raised to a power"))?;
                let e: u32 = (k.is_integer()).then(|| k.to_integer().try_into().ok()).flatten().ok_or_else(|| {
                    err(col, "exponent must be a small non-negative integer")
                })?;
                acc = FormExpr::function(f.pow(e));
            } else {
                acc = acc.wedge(&self.primary()?);
            }
        }
        Ok(acc)
    }

    fn function_arg(&mut self) -> Result<Poly> {
        let col = self.col();
        self.expr()?.as_function().ok_or_else(|| err(col, "argument must be a function"))
    }

    fn constant(&mut self) -> Result<Rat> {
        let col = self.col();
        self.function_arg()?.as_constant().ok_or_else(|| err(col, "expected a constant"))
    }

    fn primary(&mut self) -> Result<FormExpr> {
        let col = self.col();
        let tok = self.peek().cloned().ok_or_else(|| err(col, "unexpected end of input"))?;
        self.pos += 1;
        match tok {
            Tok::Num(k) => Ok(FormExpr::function(Poly::constant(k))),
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Sym(c) => Err(err(col, format!("unexpected '{c}'"))),
            Tok::Ident(name, primes) => self.identifier(&name, primes, col),
        }
    }

    fn identifier(&mut self, name: &str, primes: u32, col: usize) -> Result<FormExpr> {
        let profile = match name {
            "bump" => Some(Profile::Bump),
            "step" => Some(Profile::Step),
            _ => None,
        };
        if let Some(profile) = profile {
            self.expect('(')?;
            let a = self.constant()?;
            self.expect(',')?;
            let b = self.constant()?;
            self.expect(',')?;
            let arg = self.function_arg()?;
            self.expect(')')?;
            if a >= b {
                return Err(err(col, "support must satisfy a < b"));
            }
            return Ok(FormExpr::function(Poly::smooth(profile, a, b, primes, arg)));
        }
        if primes > 0 {
            return Err(err(col, "derivative marks apply only to bump and step"));
        }
        match name {
            "exp" | "sin" | "cos" => {
                self.expect('(')?;
                let arg = self.function_arg()?;
                self.expect(')')?;
                let f = match name {
                    "exp" => Poly::exp(arg),
                    "sin" => Poly::sin(arg),
                    _ => Poly::cos(arg),
                };
                Ok(FormExpr::function(f))
            }
            "d" => {
                self.expect('(')?;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e.d())
            }
            _ => {
                if let Some(v) = coordinate(name) {
                    return Ok(FormExpr::function(Poly::var(v)));
                }
                if let Some(v) = name.strip_prefix('d').and_then(coordinate) {
                    return Ok(FormExpr::differential(v));
                }
                Err(err(col, format!("unknown name {name:?}")))
            }
        }
    }
}

/// Parses a form. Errors carry the 1-based column of the offending token.
pub fn parse_form(src: &str) -> Result<FormExpr> {
    let toks = Lexer::run(src)?;
    let mut p = Parser { toks, pos: 0, end: src.len() };
    if p.peek().is_none() {
        return Err(err(0, "empty form"));
    }
    let e = p.expr()?;
    if p.pos < p.toks.len() {
        return Err(err(p.col(), "unexpected trailing input"));
    }
    Ok(e)
}

/// Parses a function (a 0-form).
pub fn parse_function(src: &str) -> Result<Poly> {
    parse_form(src)?.as_function().ok_or_else(|| err(0, "expected a function, found a form of positive degree"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{rat, rat_frac};

    #[test]
    fn coordinates_and_differentials() {
        let f = parse_form("exp(r1) * dr1 ^ dth1").unwrap();
        let expected = FormExpr::term(vec![Var::r(0), Var::theta(0)], Poly::exp(Poly::var(Var::r(0))));
        assert_eq!(f, expected);
        assert_eq!(parse_form("dtheta").unwrap(), parse_form("dth1").unwrap());
    }

    #[test]
    fn powers_and_constants() {
        let f = parse_function("x^2/4 - 0.5*x").unwrap();
        let x = Poly::var(Var::x(0));
        assert_eq!(f, x.pow(2).scale(&rat_frac(1, 4)).sub(&x.scale(&rat_frac(1, 2))));
        assert_eq!(parse_function("3").unwrap().as_constant(), Some(rat(3)));
    }

    #[test]
    fn exterior_derivative_in_text() {
        let a = parse_form("d(step(0, 1, r) * dth)").unwrap();
        let b = parse_form("step'(0, 1, r) * dr ^ dth").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn errors_have_columns() {
        match parse_form("exp(r1) + ?") {
            Err(Error::Parse { col, .. }) => assert_eq!(col, 11),
            other => panic!("{other:?}"),
        }
        assert!(parse_form("dr^2").is_err());
        assert!(parse_form("bump(1, 0, r)").is_err());
        assert!(parse_form("sin(dr)").is_err());
    }
}
