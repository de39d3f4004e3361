//! Exact complex-rational scalars and dense matrices over them.
//!
//! All gamma-matrix algebra runs on these types so that Clifford and
//! generator identities hold with zero tolerance.

use num::bigint::BigInt;
use num::complex::Complex64;
use num::rational::BigRational;
use num::traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Complex number with exact rational real and imaginary parts.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl CRat {
    pub fn zero() -> Self {
        CRat {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    pub fn one() -> Self {
        CRat {
            re: BigRational::one(),
            im: BigRational::zero(),
        }
    }

    pub fn i() -> Self {
        CRat {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        CRat {
            re: BigRational::from_integer(BigInt::from(n)),
            im: BigRational::zero(),
        }
    }

    pub fn rat(num: i64, den: i64) -> Self {
        assert!(den != 0, "rational with zero denominator");
        CRat {
            re: BigRational::new(BigInt::from(num), BigInt::from(den)),
            im: BigRational::zero(),
        }
    }

    pub fn imag_rat(num: i64, den: i64) -> Self {
        assert!(den != 0, "rational with zero denominator");
        CRat {
            re: BigRational::zero(),
            im: BigRational::new(BigInt::from(num), BigInt::from(den)),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        CRat {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn inv(&self) -> Result<Self> {
        let norm = &self.re * &self.re + &self.im * &self.im;
        if norm.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(CRat {
            re: &self.re / &norm,
            im: -&self.im / &norm,
        })
    }

    pub fn pow(&self, n: i32) -> Result<Self> {
        if n == 0 {
            return Ok(CRat::one());
        }
        let base = if n < 0 { self.inv()? } else { self.clone() };
        let mut acc = CRat::one();
        for _ in 0..n.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    pub fn to_complex64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

fn fmt_rat(r: &BigRational) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for CRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", fmt_rat(&self.re))
        } else if self.re.is_zero() {
            write!(f, "{}i", fmt_rat(&self.im))
        } else if self.im.is_negative() {
            write!(f, "{}-{}i", fmt_rat(&self.re), fmt_rat(&-self.im.clone()))
        } else {
            write!(f, "{}+{}i", fmt_rat(&self.re), fmt_rat(&self.im))
        }
    }
}

impl Add for &CRat {
    type Output = CRat;
    fn add(self, rhs: &CRat) -> CRat {
        CRat {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl Sub for &CRat {
    type Output = CRat;
    fn sub(self, rhs: &CRat) -> CRat {
        CRat {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl Mul for &CRat {
    type Output = CRat;
    fn mul(self, rhs: &CRat) -> CRat {
        CRat {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Neg for &CRat {
    type Output = CRat;
    fn neg(self) -> CRat {
        CRat {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }
}

/// Dense matrix with exact complex-rational entries, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<CRat>,
}

impl ExactMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMat {
            rows,
            cols,
            data: vec![CRat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = ExactMat::zeros(n, n);
        for k in 0..n {
            m.set(k, k, CRat::one());
        }
        m
    }

    /// Build from row-major integer entries, scaled by `scale`.
    pub fn from_rows_scaled(entries: &[&[(i64, i64)]], scale: CRat) -> Self {
        let rows = entries.len();
        let cols = entries[0].len();
        let mut m = ExactMat::zeros(rows, cols);
        for (r, row) in entries.iter().enumerate() {
            for (c, &(re, im)) in row.iter().enumerate() {
                let v = CRat {
                    re: BigRational::from_integer(BigInt::from(re)),
                    im: BigRational::from_integer(BigInt::from(im)),
                };
                m.set(r, c, &v * &scale);
            }
        }
        m
    }

    pub fn get(&self, r: usize, c: usize) -> &CRat {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: CRat) {
        self.data[r * self.cols + c] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn scale(&self, s: &CRat) -> Self {
        ExactMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, rhs: &ExactMat) -> Result<ExactMat> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch(format!(
                "add {}x{} with {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(ExactMat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(rhs.data.iter())
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, rhs: &ExactMat) -> Result<ExactMat> {
        self.add(&rhs.scale(&CRat::from_int(-1)))
    }

    pub fn mul(&self, rhs: &ExactMat) -> Result<ExactMat> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "mul {}x{} with {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = ExactMat::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let b = rhs.get(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.get(r, c).clone();
                    out.set(r, c, &cur + &(a * b));
                }
            }
        }
        Ok(out)
    }

    pub fn kron(&self, rhs: &ExactMat) -> ExactMat {
        let mut out = ExactMat::zeros(self.rows * rhs.rows, self.cols * rhs.cols);
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
                        out.set(r1 * rhs.rows + r2, c1 * rhs.cols + c2, a * b);
                    }
                }
            }
        }
        out
    }

    pub fn commutator(&self, rhs: &ExactMat) -> Result<ExactMat> {
        let ab = self.mul(rhs)?;
        let ba = rhs.mul(self)?;
        ab.sub(&ba)
    }

    pub fn anticommutator(&self, rhs: &ExactMat) -> Result<ExactMat> {
        let ab = self.mul(rhs)?;
        let ba = rhs.mul(self)?;
        ab.add(&ba)
    }

    /// Row-major list of exact entry strings, for reports.
    pub fn entry_strings(&self) -> Vec<String> {
        self.data.iter().map(|v| v.to_string()).collect()
    }
}

impl fmt::Display for ExactMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}
