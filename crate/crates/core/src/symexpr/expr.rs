use num::complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};

use super::chart::Point;
use crate::error::{Error, Result};
use crate::exact::CRat;

/// Symbolic scalar expression tree.
///
/// Leaves are exact complex rationals and coordinate symbols; interior
/// nodes are sums, products, integer powers and sin/cos. Expressions
/// are immutable; every operation builds a new tree.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ScalarExpr {
    Const(CRat),
    Coord(String),
    Add(Vec<ScalarExpr>),
    Mul(Vec<ScalarExpr>),
    Pow(Box<ScalarExpr>, i32),
    Sin(Box<ScalarExpr>),
    Cos(Box<ScalarExpr>),
}

impl ScalarExpr {
    pub fn zero() -> Self {
        ScalarExpr::Const(CRat::zero())
    }

    pub fn one() -> Self {
        ScalarExpr::Const(CRat::one())
    }

    pub fn i() -> Self {
        ScalarExpr::Const(CRat::i())
    }

    pub fn from_int(n: i64) -> Self {
        ScalarExpr::Const(CRat::from_int(n))
    }

    pub fn rat(num: i64, den: i64) -> Self {
        ScalarExpr::Const(CRat::rat(num, den))
    }

    pub fn constant(c: CRat) -> Self {
        ScalarExpr::Const(c)
    }

    pub fn coord(name: &str) -> Self {
        ScalarExpr::Coord(name.to_string())
    }

    pub fn sin(self) -> Self {
        ScalarExpr::Sin(Box::new(self))
    }

    pub fn cos(self) -> Self {
        ScalarExpr::Cos(Box::new(self))
    }

    pub fn pow(self, n: i32) -> Self {
        ScalarExpr::Pow(Box::new(self), n)
    }

    /// Structural zero check (the constant 0 or an empty sum).
    pub fn is_zero(&self) -> bool {
        match self {
            ScalarExpr::Const(c) => c.is_zero(),
            ScalarExpr::Add(ts) => ts.is_empty(),
            _ => false,
        }
    }

    pub fn as_const(&self) -> Option<&CRat> {
        match self {
            ScalarExpr::Const(c) => Some(c),
            _ => None,
        }
    }

    /// Deterministic numeric evaluation at a coordinate assignment.
    pub fn eval(&self, point: &Point) -> Result<Complex64> {
        match self {
            ScalarExpr::Const(c) => Ok(c.to_complex64()),
            ScalarExpr::Coord(name) => point
                .get(name)
                .map(|v| Complex64::new(*v, 0.0))
                .ok_or_else(|| Error::MissingCoordinate(name.clone())),
            ScalarExpr::Add(terms) => {
                let mut acc = Complex64::new(0.0, 0.0);
                for t in terms {
                    acc += t.eval(point)?;
                }
                Ok(acc)
            }
            ScalarExpr::Mul(factors) => {
                let mut acc = Complex64::new(1.0, 0.0);
                for f in factors {
                    acc *= f.eval(point)?;
                }
                Ok(acc)
            }
            ScalarExpr::Pow(base, n) => Ok(base.eval(point)?.powi(*n)),
            ScalarExpr::Sin(arg) => Ok(arg.eval(point)?.sin()),
            ScalarExpr::Cos(arg) => Ok(arg.eval(point)?.cos()),
        }
    }

    /// Exact partial derivative with respect to a coordinate symbol.
    /// Symbols other than `coord` are treated as independent.
    pub(crate) fn diff(&self, coord: &str) -> ScalarExpr {
        match self {
            ScalarExpr::Const(_) => ScalarExpr::zero(),
            ScalarExpr::Coord(name) => {
                if name == coord {
                    ScalarExpr::one()
                } else {
                    ScalarExpr::zero()
                }
            }
            ScalarExpr::Add(terms) => {
                ScalarExpr::Add(terms.iter().map(|t| t.diff(coord)).collect())
            }
            ScalarExpr::Mul(factors) => {
                // Leibniz over the factor list.
                let mut terms = Vec::new();
                for (k, f) in factors.iter().enumerate() {
                    let mut prod = Vec::with_capacity(factors.len());
                    for (j, g) in factors.iter().enumerate() {
                        if j == k {
                            prod.push(f.diff(coord));
                        } else {
                            prod.push(g.clone());
                        }
                    }
                    terms.push(ScalarExpr::Mul(prod));
                }
                ScalarExpr::Add(terms)
            }
            ScalarExpr::Pow(base, n) => {
                if *n == 0 {
                    ScalarExpr::zero()
                } else {
                    ScalarExpr::Mul(vec![
                        ScalarExpr::from_int(*n as i64),
                        ScalarExpr::Pow(base.clone(), n - 1),
                        base.diff(coord),
                    ])
                }
            }
            ScalarExpr::Sin(arg) => {
                ScalarExpr::Mul(vec![ScalarExpr::Cos(arg.clone()), arg.diff(coord)])
            }
            ScalarExpr::Cos(arg) => ScalarExpr::Mul(vec![
                ScalarExpr::from_int(-1),
                ScalarExpr::Sin(arg.clone()),
                arg.diff(coord),
            ]),
        }
    }
}

impl Add for ScalarExpr {
    type Output = ScalarExpr;
    fn add(self, rhs: ScalarExpr) -> ScalarExpr {
        match (self, rhs) {
            (a, b) if a.is_zero() => b,
            (a, b) if b.is_zero() => a,
            (ScalarExpr::Add(mut xs), ScalarExpr::Add(ys)) => {
                xs.extend(ys);
                ScalarExpr::Add(xs)
            }
            (ScalarExpr::Add(mut xs), b) => {
                xs.push(b);
                ScalarExpr::Add(xs)
            }
            (a, ScalarExpr::Add(mut ys)) => {
                ys.insert(0, a);
                ScalarExpr::Add(ys)
            }
            (a, b) => ScalarExpr::Add(vec![a, b]),
        }
    }
}

impl Sub for ScalarExpr {
    type Output = ScalarExpr;
    fn sub(self, rhs: ScalarExpr) -> ScalarExpr {
        self + (-rhs)
    }
}

impl Mul for ScalarExpr {
    type Output = ScalarExpr;
    fn mul(self, rhs: ScalarExpr) -> ScalarExpr {
        if self.is_zero() || rhs.is_zero() {
            return ScalarExpr::zero();
        }
        let is_one = |e: &ScalarExpr| matches!(e, ScalarExpr::Const(c) if c == &crate::exact::CRat::one());
        if is_one(&self) {
            return rhs;
        }
        if is_one(&rhs) {
            return self;
        }
        match (self, rhs) {
            (ScalarExpr::Mul(mut xs), ScalarExpr::Mul(ys)) => {
                xs.extend(ys);
                ScalarExpr::Mul(xs)
            }
            (ScalarExpr::Mul(mut xs), b) => {
                xs.push(b);
                ScalarExpr::Mul(xs)
            }
            (a, ScalarExpr::Mul(mut ys)) => {
                ys.insert(0, a);
                ScalarExpr::Mul(ys)
            }
            (a, b) => ScalarExpr::Mul(vec![a, b]),
        }
    }
}

impl Neg for ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        ScalarExpr::from_int(-1) * self
    }
}
