//! Dense matrices of symbolic scalars. Used for SU(2) elements, spinor
//! blocks and form coefficients.

use num::complex::Complex64;

use crate::error::{Error, Result};
use crate::exact::ExactMat;
use crate::symexpr::{simplify, Point, ScalarExpr};

#[derive(Debug, Clone, PartialEq)]
pub struct ExprMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<ScalarExpr>,
}

impl ExprMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExprMat {
            rows,
            cols,
            data: vec![ScalarExpr::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = ExprMat::zeros(n, n);
        for k in 0..n {
            m.set(k, k, ScalarExpr::one());
        }
        m
    }

    pub fn scalar(e: ScalarExpr) -> Self {
        ExprMat {
            rows: 1,
            cols: 1,
            data: vec![e],
        }
    }

    pub fn from_exact(m: &ExactMat) -> Self {
        ExprMat {
            rows: m.rows,
            cols: m.cols,
            data: m.data.iter().map(|c| ScalarExpr::constant(c.clone())).collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> ScalarExpr) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        ExprMat { rows, cols, data }
    }

    pub fn get(&self, r: usize, c: usize) -> &ScalarExpr {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, e: ScalarExpr) {
        self.data[r * self.cols + c] = e;
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn map(&self, f: impl Fn(&ScalarExpr) -> ScalarExpr) -> Self {
        ExprMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn simplified(&self) -> Self {
        self.map(simplify)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    pub fn add(&self, rhs: &ExprMat) -> Result<ExprMat> {
        if self.shape() != rhs.shape() {
            return Err(Error::ShapeMismatch(format!(
                "add {:?} with {:?}",
                self.shape(),
                rhs.shape()
            )));
        }
        Ok(ExprMat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(rhs.data.iter())
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        })
    }

    pub fn sub(&self, rhs: &ExprMat) -> Result<ExprMat> {
        self.add(&rhs.scale(&ScalarExpr::from_int(-1)))
    }

    pub fn scale(&self, s: &ScalarExpr) -> ExprMat {
        self.map(|e| s.clone() * e.clone())
    }

    pub fn mul(&self, rhs: &ExprMat) -> Result<ExprMat> {
        // 1x1 blocks act as scalars on either side.
        if self.shape() == (1, 1) {
            return Ok(rhs.scale(self.get(0, 0)));
        }
        if rhs.shape() == (1, 1) {
            return Ok(self.scale(rhs.get(0, 0)));
        }
        if self.cols != rhs.rows {
            return Err(Error::ShapeMismatch(format!(
                "mul {:?} with {:?}",
                self.shape(),
                rhs.shape()
            )));
        }
        let mut out = ExprMat::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for c in 0..rhs.cols {
                let mut acc = ScalarExpr::zero();
                for k in 0..self.cols {
                    let a = self.get(r, k);
                    let b = rhs.get(k, c);
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    acc = acc + a.clone() * b.clone();
                }
                out.set(r, c, acc);
            }
        }
        Ok(out)
    }

    pub fn kron(&self, rhs: &ExprMat) -> ExprMat {
        let mut out = ExprMat::zeros(self.rows * rhs.rows, self.cols * rhs.cols);
        for r1 in 0..self.rows {
            for c1 in 0..self.cols {
                let a = self.get(r1, c1);
                if a.is_zero() {
                    continue;
                }
                for r2 in 0..rhs.rows {
                    for c2 in 0..rhs.cols {
                        let b = rhs.get(r2, c2);
                        if b.is_zero() {
                            continue;
                        }
                        out.set(
                            r1 * rhs.rows + r2,
                            c1 * rhs.cols + c2,
                            a.clone() * b.clone(),
                        );
                    }
                }
            }
        }
        out
    }

    /// Conjugate transpose; conjugation flips the sign of the imaginary
    /// unit in constants. Coordinates are real, sin/cos of real stay real.
    pub fn dagger(&self) -> ExprMat {
        let mut out = ExprMat::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, conj_expr(self.get(r, c)));
            }
        }
        out
    }

    pub fn eval(&self, point: &Point) -> Result<NumMat> {
        let mut data = Vec::with_capacity(self.data.len());
        for e in &self.data {
            data.push(e.eval(point)?);
        }
        Ok(NumMat {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// 2x2 determinant helper (SU(2) elements).
    pub fn det2(&self) -> Result<ScalarExpr> {
        if self.shape() != (2, 2) {
            return Err(Error::ShapeMismatch("det2 needs a 2x2 matrix".into()));
        }
        Ok(self.get(0, 0).clone() * self.get(1, 1).clone()
            - self.get(0, 1).clone() * self.get(1, 0).clone())
    }
}

fn conj_expr(e: &ScalarExpr) -> ScalarExpr {
    match e {
        ScalarExpr::Const(c) => ScalarExpr::constant(c.conj()),
        ScalarExpr::Coord(_) => e.clone(),
        ScalarExpr::Add(ts) => ScalarExpr::Add(ts.iter().map(conj_expr).collect()),
        ScalarExpr::Mul(fs) => ScalarExpr::Mul(fs.iter().map(conj_expr).collect()),
        ScalarExpr::Pow(b, n) => ScalarExpr::Pow(Box::new(conj_expr(b)), *n),
        ScalarExpr::Sin(a) => ScalarExpr::Sin(Box::new(conj_expr(a))),
        ScalarExpr::Cos(a) => ScalarExpr::Cos(Box::new(conj_expr(a))),
    }
}

/// Numeric matrix produced by evaluating an ExprMat at a point.
#[derive(Debug, Clone)]
pub struct NumMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex64>,
}

impl NumMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        NumMat {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    pub fn sub(&self, rhs: &NumMat) -> NumMat {
        NumMat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(rhs.data.iter())
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn norm_inf(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}
