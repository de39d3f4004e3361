//! Plain-text s-expression serialization for scalar expressions.
//!
//! Grammar (atoms are whitespace-separated):
//!   expr    := INT | "i" | SYMBOL | "(rat" INT INT ")"
//!            | "(add" expr+ ")" | "(mul" expr+ ")"
//!            | "(pow" expr INT ")" | "(sin" expr ")" | "(cos" expr ")"
//!            | "(neg" expr ")"
//! INT is an arbitrary-precision signed integer; SYMBOL is a coordinate
//! name. Complex constants print as (add (rat ..) (mul (rat ..) i)).

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Zero};
use std::str::FromStr;

use super::expr::ScalarExpr;
use crate::error::{Error, Result};
use crate::exact::CRat;

fn rat_sexpr(r: &BigRational) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("(rat {} {})", r.numer(), r.denom())
    }
}

pub fn to_sexpr(e: &ScalarExpr) -> String {
    match e {
        ScalarExpr::Const(c) => {
            if c.im.is_zero() {
                rat_sexpr(&c.re)
            } else if c.re.is_zero() {
                if c.im.is_one() {
                    "i".to_string()
                } else {
                    format!("(mul {} i)", rat_sexpr(&c.im))
                }
            } else {
                format!("(add {} (mul {} i))", rat_sexpr(&c.re), rat_sexpr(&c.im))
            }
        }
        ScalarExpr::Coord(name) => name.clone(),
        ScalarExpr::Add(terms) => {
            if terms.is_empty() {
                "0".to_string()
            } else {
                let inner: Vec<String> = terms.iter().map(to_sexpr).collect();
                format!("(add {})", inner.join(" "))
            }
        }
        ScalarExpr::Mul(factors) => {
            if factors.is_empty() {
                "1".to_string()
            } else {
                let inner: Vec<String> = factors.iter().map(to_sexpr).collect();
                format!("(mul {})", inner.join(" "))
            }
        }
        ScalarExpr::Pow(base, n) => format!("(pow {} {})", to_sexpr(base), n),
        ScalarExpr::Sin(arg) => format!("(sin {})", to_sexpr(arg)),
        ScalarExpr::Cos(arg) => format!("(cos {})", to_sexpr(arg)),
    }
}

#[derive(Debug)]
enum Token {
    Open,
    Close,
    Atom(String),
}

fn tokenize(text: &str) -> Vec<Token> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in text.chars() {
        match ch {
            '(' | ')' => {
                if !cur.is_empty() {
                    out.push(Token::Atom(std::mem::take(&mut cur)));
                }
                out.push(if ch == '(' { Token::Open } else { Token::Close });
            }
            c if c.is_whitespace() => {
                if !cur.is_empty() {
                    out.push(Token::Atom(std::mem::take(&mut cur)));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        out.push(Token::Atom(cur));
    }
    out
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<&Token> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn parse_int(&mut self) -> Result<BigInt> {
        match self.next() {
            Some(Token::Atom(s)) => {
                BigInt::from_str(s).map_err(|_| Error::Parse(format!("expected integer, got `{s}`")))
            }
            other => Err(Error::Parse(format!("expected integer, got {other:?}"))),
        }
    }

    fn parse_expr(&mut self) -> Result<ScalarExpr> {
        match self.next() {
            None => Err(Error::Parse("unexpected end of input".into())),
            Some(Token::Close) => Err(Error::Parse("unexpected `)`".into())),
            Some(Token::Atom(s)) => {
                let s = s.clone();
                if s == "i" {
                    Ok(ScalarExpr::i())
                } else if let Ok(n) = BigInt::from_str(&s) {
                    Ok(ScalarExpr::constant(CRat {
                        re: BigRational::from_integer(n),
                        im: BigRational::zero(),
                    }))
                } else if s.chars().all(|c| c.is_alphanumeric() || or_underscore(c)) {
                    Ok(ScalarExpr::coord(&s))
                } else {
                    Err(Error::Parse(format!("bad atom `{s}`")))
                }
            }
            Some(Token::Open) => {
                let head = match self.next() {
                    Some(Token::Atom(h)) => h.clone(),
                    other => return Err(Error::Parse(format!("expected operator, got {other:?}"))),
                };
                let expr = match head.as_str() {
                    "rat" => {
                        let n = self.parse_int()?;
                        let d = self.parse_int()?;
                        if d.is_zero() {
                            return Err(Error::Parse("rational with zero denominator".into()));
                        }
                        ScalarExpr::constant(CRat {
                            re: BigRational::new(n, d),
                            im: BigRational::zero(),
                        })
                    }
                    "add" => {
                        let mut terms = Vec::new();
                        while !matches!(self.peek(), Some(Token::Close) | None) {
                            terms.push(self.parse_expr()?);
                        }
                        ScalarExpr::Add(terms)
                    }
                    "mul" => {
                        let mut factors = Vec::new();
                        while !matches!(self.peek(), Some(Token::Close) | None) {
                            factors.push(self.parse_expr()?);
                        }
                        ScalarExpr::Mul(factors)
                    }
                    "pow" => {
                        let base = self.parse_expr()?;
                        let n = self.parse_int()?;
                        let n: i32 = n
                            .try_into()
                            .map_err(|_| Error::Parse("power exponent out of range".into()))?;
                        ScalarExpr::Pow(Box::new(base), n)
                    }
                    "sin" => ScalarExpr::Sin(Box::new(self.parse_expr()?)),
                    "cos" => ScalarExpr::Cos(Box::new(self.parse_expr()?)),
                    "neg" => -self.parse_expr()?,
                    other => return Err(Error::Parse(format!("unknown operator `{other}`"))),
                };
                match self.next() {
                    Some(Token::Close) => Ok(expr),
                    other => Err(Error::Parse(format!("expected `)`, got {other:?}"))),
                }
            }
        }
    }
}

fn or_underscore(c: char) -> bool {
    c == '_'
}

pub fn parse_sexpr(text: &str) -> Result<ScalarExpr> {
    let mut p = Parser {
        tokens: tokenize(text),
        pos: 0,
    };
    let e = p.parse_expr()?;
    if p.pos != p.tokens.len() {
        return Err(Error::Parse("trailing input after expression".into()));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_spec_example() {
        let e = parse_sexpr("(mul (sin th) (rat 1 2))").unwrap();
        assert_eq!(e, ScalarExpr::coord("th").sin() * ScalarExpr::rat(1, 2));
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(parse_sexpr("(mul (sin th)").is_err());
        assert!(parse_sexpr("(frob 1 2)").is_err());
        assert!(parse_sexpr("(rat 1 0)").is_err());
    }

    #[test]
    fn integer_and_symbol_atoms() {
        assert_eq!(parse_sexpr("-3").unwrap(), ScalarExpr::from_int(-3));
        assert_eq!(parse_sexpr("x0").unwrap(), ScalarExpr::coord("x0"));
        assert_eq!(parse_sexpr("i").unwrap(), ScalarExpr::i());
    }
}
