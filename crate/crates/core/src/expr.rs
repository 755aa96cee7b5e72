//! Tiny expression parser for rational functions of `x`, `y`, `t`.
//!
//! Parses the group-map column of the model catalog (`1/((x+1/x)y)`,
//! `x^2/y`, …) and inline CLI expressions (`x^3*t`). Grammar: `+ - * / ^`
//! with parentheses, integer literals, and juxtaposition as multiplication.
//! The result is an exact fraction of Laurent polynomials.

use crate::bivar::{BivarLaurent, Frac};
use crate::number::rat;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(i64),
    Var(char),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let mut toks = Vec::new();
    let mut chars = s.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            ' ' | '\t' => {
                chars.next();
            }
            '0'..='9' => {
                let mut n: i64 = 0;
                while let Some(&d) = chars.peek() {
                    if let Some(v) = d.to_digit(10) {
                        n = n
                            .checked_mul(10)
                            .and_then(|n| n.checked_add(v as i64))
                            .ok_or_else(|| Error::Parse(format!("integer overflow in {s:?}")))?;
                        chars.next();
                    } else {
                        break;
                    }
                }
                toks.push(Tok::Num(n));
            }
            'x' | 'y' | 't' => {
                toks.push(Tok::Var(c));
                chars.next();
            }
            '+' => {
                toks.push(Tok::Plus);
                chars.next();
            }
            '-' => {
                toks.push(Tok::Minus);
                chars.next();
            }
            '*' => {
                toks.push(Tok::Star);
                chars.next();
            }
            '/' => {
                toks.push(Tok::Slash);
                chars.next();
            }
            '^' => {
                toks.push(Tok::Caret);
                chars.next();
            }
            '(' => {
                toks.push(Tok::LParen);
                chars.next();
            }
            ')' => {
                toks.push(Tok::RParen);
                chars.next();
            }
            other => {
                return Err(Error::Parse(format!(
                    "unexpected character {other:?} in expression {s:?}"
                )))
            }
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: &'a [Tok],
    pos: usize,
    src: &'a str,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} in expression {:?}", self.src))
    }

    fn expr(&mut self) -> Result<Frac> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let t = self.term()?;
                    acc = acc.add(&Frac::new(t.num.neg(), t.den));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Frac> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc = acc.mul(&self.factor()?);
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let f = self.factor()?;
                    if f.is_zero() {
                        return Err(self.err("division by zero"));
                    }
                    acc = acc.mul(&f.recip());
                }
                // juxtaposition is multiplication: (x+1/x)y, 2x
                Some(Tok::Num(_)) | Some(Tok::Var(_)) | Some(Tok::LParen) => {
                    acc = acc.mul(&self.factor()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Frac> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.bump();
            let neg = matches!(self.peek(), Some(Tok::Minus));
            if neg {
                self.bump();
            }
            match self.bump() {
                Some(Tok::Num(n)) => {
                    let e = if neg { -n } else { n };
                    if e < 0 && base.is_zero() {
                        return Err(self.err("zero to a negative power"));
                    }
                    Ok(base.pow_i(e))
                }
                _ => Err(self.err("expected integer exponent after '^'")),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Frac> {
        match self.bump() {
            Some(Tok::Num(n)) => Ok(Frac::from_poly(BivarLaurent::constant(rat(n)))),
            Some(Tok::Var('x')) => Ok(Frac::from_poly(BivarLaurent::var_x())),
            Some(Tok::Var('y')) => Ok(Frac::from_poly(BivarLaurent::var_y())),
            Some(Tok::Var('t')) => Ok(Frac::from_poly(BivarLaurent::var_t())),
            Some(Tok::Minus) => {
                let f = self.factor()?;
                Ok(Frac::new(f.num.neg(), f.den))
            }
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => Err(self.err("missing closing parenthesis")),
                }
            }
            _ => Err(self.err("expected an atom")),
        }
    }
}

/// Parse an expression into an exact fraction of Laurent polynomials.
pub fn parse_frac(src: &str) -> Result<Frac> {
    let toks = tokenize(src)?;
    if toks.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        src,
    };
    let f = p.expr()?;
    if p.pos != toks.len() {
        return Err(p.err("trailing tokens"));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::rat;

    #[test]
    fn parses_monomials_and_fractions() {
        let f = parse_frac("x^3*t").unwrap();
        assert!(f.eq_frac(&Frac::from_poly(BivarLaurent::monomial(3, 0, 1, rat(1)))));
        let g = parse_frac("1/x").unwrap();
        assert!(g.eq_frac(&Frac::from_poly(BivarLaurent::monomial(-1, 0, 0, rat(1)))));
    }

    #[test]
    fn parses_group_map_expressions() {
        // 1/((x+1/x)y) == x/((x^2+1)y)
        let f = parse_frac("1/((x+1/x)y)").unwrap();
        let num = BivarLaurent::var_x();
        let den = BivarLaurent::from_terms([((2, 1, 0), rat(1)), ((0, 1, 0), rat(1))]);
        assert!(f.eq_frac(&Frac::new(num, den)));
        let g = parse_frac("(x+1/x)/y").unwrap();
        let num2 = BivarLaurent::from_terms([((1, 0, 0), rat(1)), ((-1, 0, 0), rat(1))]);
        assert!(g.eq_frac(&Frac::new(num2, BivarLaurent::var_y())));
    }

    #[test]
    fn negative_exponents_and_unary_minus() {
        let f = parse_frac("x^-2").unwrap();
        assert!(f.eq_frac(&Frac::from_poly(BivarLaurent::monomial(-2, 0, 0, rat(1)))));
        let g = parse_frac("-x + x").unwrap();
        assert!(g.is_zero());
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_frac("").is_err());
        assert!(parse_frac("x +").is_err());
        assert!(parse_frac("(x").is_err());
        assert!(parse_frac("x$").is_err());
        assert!(parse_frac("1/0").is_err());
    }
}
