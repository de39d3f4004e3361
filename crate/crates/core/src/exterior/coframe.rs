use std::sync::Arc;

use super::form::{Form, FrameKind};
use crate::error::{Error, Result};
use crate::matrix::ExprMat;
use crate::symexpr::{simplify, Chart, ScalarExpr};

/// Determinant of a square symbolic matrix by cofactor expansion along
/// the first row. Returns the simplified expression.
pub fn sym_det(m: &ExprMat) -> Result<ScalarExpr> {
    if m.rows != m.cols {
        return Err(Error::ShapeMismatch(format!(
            "determinant of a {}x{} matrix",
            m.rows, m.cols
        )));
    }
    Ok(simplify(&det_rec(m)))
}

fn det_rec(m: &ExprMat) -> ScalarExpr {
    let n = m.rows;
    if n == 1 {
        return m.get(0, 0).clone();
    }
    let mut acc = ScalarExpr::zero();
    for c in 0..n {
        let a = m.get(0, c);
        if a.is_zero() {
            continue;
        }
        let minor = ExprMat::from_fn(n - 1, n - 1, |r2, c2| {
            m.get(r2 + 1, if c2 < c { c2 } else { c2 + 1 }).clone()
        });
        let term = a.clone() * det_rec(&minor);
        acc = if c % 2 == 0 { acc + term } else { acc - term };
    }
    acc
}

/// Exact symbolic inverse via the adjugate. Monomial determinants invert
/// into closed form; composite ones carry an explicit reciprocal factor.
pub fn sym_inverse(m: &ExprMat) -> Result<ExprMat> {
    let n = m.rows;
    let det = sym_det(m)?;
    if det.is_zero() {
        return Err(Error::SingularVielbein(
            "determinant simplifies to zero".into(),
        ));
    }
    let det_inv = simplify(&det.pow(-1));
    let mut out = ExprMat::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            // adjugate: transpose of the cofactor matrix
            let minor = ExprMat::from_fn(n - 1, n - 1, |r2, c2| {
                m.get(
                    if r2 < c { r2 } else { r2 + 1 },
                    if c2 < r { c2 } else { c2 + 1 },
                )
                .clone()
            });
            let sign = if (r + c) % 2 == 0 { 1 } else { -1 };
            let cof = ScalarExpr::from_int(sign) * det_rec(&minor);
            out.set(r, c, simplify(&(cof * det_inv.clone())));
        }
    }
    Ok(out)
}

/// An orthonormal coframe e^a = vielbein[a][m] dx^m on a chart, with a
/// diagonal metric signature and a declared orientation order for the
/// frame labels (the Hodge epsilon is +1 on that order).
#[derive(Debug, Clone)]
pub struct Coframe {
    pub chart: Arc<Chart>,
    /// Row a holds the coordinate components of e^a.
    pub vielbein: ExprMat,
    /// Row m holds the orthonormal components of dx^m (matrix inverse).
    pub inverse: ExprMat,
    /// Diagonal metric entries eta^{aa} per frame label.
    pub signature: Vec<i8>,
    /// Frame indices in orientation order.
    pub orientation: Vec<u8>,
    /// Display labels for the frame indices.
    pub labels: Vec<u8>,
}

impl Coframe {
    pub fn new(
        chart: Arc<Chart>,
        vielbein: ExprMat,
        signature: Vec<i8>,
        labels: Vec<u8>,
    ) -> Result<Self> {
        let n = chart.dim();
        if vielbein.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "vielbein {:?} on a {n}-dimensional chart",
                vielbein.shape()
            )));
        }
        if signature.len() != n || labels.len() != n {
            return Err(Error::DimensionMismatch(
                "signature and labels must match the chart dimension".into(),
            ));
        }
        let inverse = sym_inverse(&vielbein)?;
        Ok(Coframe {
            chart,
            vielbein,
            inverse,
            signature,
            orientation: (0..n as u8).collect(),
            labels,
        })
    }

    /// Like [`Coframe::new`] but with the inverse supplied, for block
    /// structures whose closed-form inverse is cheaper than the adjugate.
    pub fn with_inverse(
        chart: Arc<Chart>,
        vielbein: ExprMat,
        inverse: ExprMat,
        signature: Vec<i8>,
        labels: Vec<u8>,
    ) -> Result<Self> {
        let n = chart.dim();
        if vielbein.shape() != (n, n) || inverse.shape() != (n, n) {
            return Err(Error::DimensionMismatch(
                "vielbein and inverse must be square of the chart dimension".into(),
            ));
        }
        Ok(Coframe {
            chart,
            vielbein,
            inverse,
            signature,
            orientation: (0..n as u8).collect(),
            labels,
        })
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    /// Basis 1-form e^a with components in the orthonormal frame.
    pub fn basis(&self, a: usize) -> Form {
        Form::basis_one_form(self.chart.clone(), FrameKind::Orthonormal, a as u8)
    }

    /// e^a written out in the coordinate frame.
    pub fn basis_coordinate(&self, a: usize) -> Form {
        let mut f = Form::zero(self.chart.clone(), FrameKind::Coordinate, 1, (1, 1));
        for m in 0..self.dim() {
            let e = self.vielbein.get(a, m);
            if !e.is_zero() {
                f.accumulate(&[m as u8], ExprMat::scalar(e.clone()));
            }
        }
        f
    }

    /// The frame vector X_a dual to e^a, in orthonormal components.
    pub fn frame_vector(&self, a: usize) -> FrameVector {
        let mut components = vec![ScalarExpr::zero(); self.dim()];
        components[a] = ScalarExpr::one();
        FrameVector {
            chart: self.chart.clone(),
            frame: FrameKind::Orthonormal,
            components,
        }
    }

    /// X_a expressed on the coordinate basis: X_a = inverse[m][a] d/dx^m.
    pub fn frame_vector_coordinate(&self, a: usize) -> FrameVector {
        let components = (0..self.dim())
            .map(|m| self.inverse.get(m, a).clone())
            .collect();
        FrameVector {
            chart: self.chart.clone(),
            frame: FrameKind::Coordinate,
            components,
        }
    }

    /// Unit volume form e^{o_0} ∧ ... ∧ e^{o_{n-1}} in orientation order,
    /// with orthonormal components.
    pub fn volume(&self) -> Form {
        let mut f = Form::zero(
            self.chart.clone(),
            FrameKind::Orthonormal,
            self.dim(),
            (1, 1),
        );
        f.accumulate(&self.orientation.clone(), ExprMat::scalar(ScalarExpr::one()));
        f
    }
}

/// A vector field given by its components on either basis.
#[derive(Debug, Clone)]
pub struct FrameVector {
    pub chart: Arc<Chart>,
    pub frame: FrameKind,
    pub components: Vec<ScalarExpr>,
}

impl FrameVector {
    pub fn new(chart: Arc<Chart>, frame: FrameKind, components: Vec<ScalarExpr>) -> Self {
        assert_eq!(components.len(), chart.dim());
        FrameVector {
            chart,
            frame,
            components,
        }
    }
}
