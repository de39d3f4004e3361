use std::collections::BTreeMap;
use std::sync::Arc;

use super::coframe::{Coframe, FrameVector};
use crate::error::{Error, Result};
use crate::matrix::{ExprMat, NumMat};
use crate::perm::perm_sign;
use crate::symexpr::{differentiate, Chart, Point, ScalarExpr};

/// Which coframe the component tuples refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameKind {
    Coordinate,
    Orthonormal,
}

/// A degree-p exterior form on a chart with blocks of symbolic scalars
/// as coefficients. Blocks all share one declared shape; a (1,1) block
/// is a scalar coefficient.
#[derive(Debug, Clone)]
pub struct Form {
    pub chart: Arc<Chart>,
    pub frame: FrameKind,
    pub degree: usize,
    pub shape: (usize, usize),
    comps: BTreeMap<Vec<u8>, ExprMat>,
}

impl Form {
    pub fn zero(chart: Arc<Chart>, frame: FrameKind, degree: usize, shape: (usize, usize)) -> Self {
        Form {
            chart,
            frame,
            degree,
            shape,
            comps: BTreeMap::new(),
        }
    }

    /// Degree-0 form from a single block.
    pub fn from_block(chart: Arc<Chart>, frame: FrameKind, block: ExprMat) -> Self {
        let shape = block.shape();
        let mut f = Form::zero(chart, frame, 0, shape);
        f.accumulate(&[], block);
        f
    }

    /// Scalar-coefficient basis 1-form with index `idx`.
    pub fn basis_one_form(chart: Arc<Chart>, frame: FrameKind, idx: u8) -> Self {
        let mut f = Form::zero(chart, frame, 1, (1, 1));
        f.accumulate(&[idx], ExprMat::scalar(ScalarExpr::one()));
        f
    }

    pub fn components(&self) -> impl Iterator<Item = (&Vec<u8>, &ExprMat)> {
        self.comps.iter()
    }

    pub fn component(&self, tuple: &[u8]) -> Option<&ExprMat> {
        self.comps.get(tuple)
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }

    /// Add `block` on an arbitrary index tuple, normalizing to the
    /// strictly increasing representative with the permutation sign.
    /// Tuples with repeated indices contribute nothing.
    pub fn accumulate(&mut self, tuple: &[u8], block: ExprMat) {
        assert_eq!(tuple.len(), self.degree, "tuple length must equal degree");
        let sign = perm_sign(tuple);
        if sign == 0 || block.is_zero() {
            return;
        }
        let mut sorted = tuple.to_vec();
        sorted.sort_unstable();
        let signed = if sign < 0 {
            block.scale(&ScalarExpr::from_int(-1))
        } else {
            block
        };
        match self.comps.remove(&sorted) {
            None => {
                self.comps.insert(sorted, signed);
            }
            Some(existing) => {
                let sum = existing.add(&signed).expect("matching block shapes");
                self.comps.insert(sorted, sum);
            }
        }
    }

    pub fn map_blocks(&self, f: impl Fn(&ExprMat) -> ExprMat) -> Form {
        let mut out = Form::zero(self.chart.clone(), self.frame, self.degree, self.shape);
        for (t, b) in &self.comps {
            let nb = f(b);
            if !nb.is_zero() {
                out.comps.insert(t.clone(), nb);
            }
        }
        out
    }

    /// Simplify every block and drop components that collapse to zero.
    pub fn simplified(&self) -> Form {
        let mut out = self.map_blocks(|b| b.simplified());
        out.comps.retain(|_, b| !b.is_zero());
        out
    }

    pub fn scale(&self, s: &ScalarExpr) -> Form {
        self.map_blocks(|b| b.scale(s))
    }

    /// Left-multiply every block by a matrix (spinor-valued forms do not
    /// commute, so left and right actions are distinct).
    pub fn mat_mul_left(&self, m: &ExprMat) -> Result<Form> {
        let mut out = Form::zero(self.chart.clone(), self.frame, self.degree, self.shape);
        for (t, b) in &self.comps {
            let nb = m.mul(b)?;
            out.shape = nb.shape();
            if !nb.is_zero() {
                out.comps.insert(t.clone(), nb);
            }
        }
        if out.comps.is_empty() {
            out.shape = block_mul_shape(m.shape(), self.shape)?;
        }
        Ok(out)
    }

    /// Same components with a corrected declared shape, for block maps
    /// that change the block dimensions.
    pub fn with_shape(mut self, shape: (usize, usize)) -> Form {
        self.shape = shape;
        self
    }

    /// Tensor a matrix onto the left slot of every block.
    pub fn kron_left(&self, m: &ExprMat) -> Form {
        let mut out = self.map_blocks(|b| m.kron(b));
        out.shape = (m.rows * self.shape.0, m.cols * self.shape.1);
        out
    }

    /// Tensor a matrix onto the right slot of every block.
    pub fn kron_right(&self, m: &ExprMat) -> Form {
        let mut out = self.map_blocks(|b| b.kron(m));
        out.shape = (self.shape.0 * m.rows, self.shape.1 * m.cols);
        out
    }

    pub fn add(&self, rhs: &Form) -> Result<Form> {
        self.compatible(rhs)?;
        if self.degree != rhs.degree {
            return Err(Error::ShapeMismatch(format!(
                "adding degree {} to degree {}",
                self.degree, rhs.degree
            )));
        }
        let mut out = self.clone();
        if out.is_empty() {
            out.shape = rhs.shape;
        }
        for (t, b) in &rhs.comps {
            out.accumulate_sorted(t.clone(), b.clone())?;
        }
        Ok(out)
    }

    fn accumulate_sorted(&mut self, tuple: Vec<u8>, block: ExprMat) -> Result<()> {
        match self.comps.remove(&tuple) {
            None => {
                self.comps.insert(tuple, block);
            }
            Some(existing) => {
                let sum = existing.add(&block)?;
                self.comps.insert(tuple, sum);
            }
        }
        Ok(())
    }

    pub fn sub(&self, rhs: &Form) -> Result<Form> {
        self.add(&rhs.scale(&ScalarExpr::from_int(-1)))
    }

    fn compatible(&self, rhs: &Form) -> Result<()> {
        if self.chart.name() != rhs.chart.name() {
            return Err(Error::ChartMismatch(format!(
                "{} vs {}",
                self.chart.name(),
                rhs.chart.name()
            )));
        }
        if self.frame != rhs.frame {
            return Err(Error::FrameMismatch(
                "forms live in different frames".into(),
            ));
        }
        Ok(())
    }

    /// Wedge product. Block multiplication keeps left-to-right order;
    /// degrees beyond the chart dimension yield the canonical zero form.
    pub fn wedge(&self, rhs: &Form) -> Result<Form> {
        self.compatible(rhs)?;
        let n = self.chart.dim();
        let degree = self.degree + rhs.degree;
        let shape = block_mul_shape(self.shape, rhs.shape)?;
        let mut out = Form::zero(self.chart.clone(), self.frame, degree.min(n + 1), shape);
        if degree > n {
            return Ok(out);
        }
        for (ta, ba) in &self.comps {
            for (tb, bb) in &rhs.comps {
                let mut tuple = ta.clone();
                tuple.extend_from_slice(tb);
                if perm_sign(&tuple) == 0 {
                    continue;
                }
                let block = ba.mul(bb)?;
                out.accumulate(&tuple, block);
            }
        }
        Ok(out)
    }

    /// Exterior derivative; components must be in the coordinate frame.
    pub fn d(&self) -> Result<Form> {
        if self.frame != FrameKind::Coordinate {
            return Err(Error::FrameMismatch(
                "exterior derivative needs coordinate-frame components".into(),
            ));
        }
        let n = self.chart.dim();
        let mut out = Form::zero(
            self.chart.clone(),
            FrameKind::Coordinate,
            (self.degree + 1).min(n + 1),
            self.shape,
        );
        if self.degree + 1 > n {
            return Ok(out);
        }
        for (tuple, block) in &self.comps {
            for m in 0..n {
                let coord = self.chart.coord(m).to_string();
                let db = block.map(|e| {
                    differentiate(e, &self.chart, &coord).expect("chart coordinate")
                });
                if db.is_zero() {
                    continue;
                }
                let mut t = vec![m as u8];
                t.extend_from_slice(tuple);
                out.accumulate(&t, db);
            }
        }
        Ok(out.simplified())
    }

    /// Interior product with a frame vector expressed in the same frame.
    pub fn interior(&self, x: &FrameVector) -> Result<Form> {
        if x.frame != self.frame {
            return Err(Error::FrameMismatch(
                "interior product needs vector and form in one frame".into(),
            ));
        }
        if self.degree == 0 {
            return Ok(Form::zero(
                self.chart.clone(),
                self.frame,
                0,
                self.shape,
            ));
        }
        let mut out = Form::zero(
            self.chart.clone(),
            self.frame,
            self.degree - 1,
            self.shape,
        );
        for (tuple, block) in &self.comps {
            for (k, idx) in tuple.iter().enumerate() {
                let xc = &x.components[*idx as usize];
                if xc.is_zero() {
                    continue;
                }
                let mut t = tuple.clone();
                t.remove(k);
                let sign = if k % 2 == 0 { 1 } else { -1 };
                let coeff = ScalarExpr::from_int(sign) * xc.clone();
                out.accumulate(&t, block.scale(&coeff));
            }
        }
        Ok(out)
    }

    /// Hodge map in the orthonormal frame of `cf`, with indices raised by
    /// the diagonal signature and the sign fixed by the declared
    /// orientation (epsilon = +1 in orientation order).
    pub fn hodge(&self, cf: &Coframe) -> Result<Form> {
        if self.frame != FrameKind::Orthonormal {
            return Err(Error::FrameMismatch(
                "hodge needs orthonormal-frame components".into(),
            ));
        }
        let n = cf.dim();
        let rank: Vec<u8> = {
            let mut r = vec![0u8; n];
            for (i, &pos) in cf.orientation.iter().enumerate() {
                r[pos as usize] = i as u8;
            }
            r
        };
        let mut out = Form::zero(
            self.chart.clone(),
            FrameKind::Orthonormal,
            n - self.degree,
            self.shape,
        );
        for (tuple, block) in &self.comps {
            let complement: Vec<u8> = (0..n as u8).filter(|i| !tuple.contains(i)).collect();
            let mut full: Vec<u8> = tuple.iter().map(|&i| rank[i as usize]).collect();
            full.extend(complement.iter().map(|&i| rank[i as usize]));
            let sign = perm_sign(&full);
            debug_assert!(sign != 0);
            let mut factor = sign as i64;
            for &i in tuple {
                factor *= cf.signature[i as usize] as i64;
            }
            out.accumulate(&complement, block.scale(&ScalarExpr::from_int(factor)));
        }
        Ok(out)
    }

    /// Re-express components through a basis substitution: source basis
    /// 1-form `i` maps to sum_j mat[i][j] * target basis 1-form `j`.
    fn reexpress(&self, mat: &ExprMat, target: FrameKind) -> Form {
        let n = self.chart.dim();
        let mut out = Form::zero(self.chart.clone(), target, self.degree, self.shape);
        for (tuple, block) in &self.comps {
            let mut assignment = vec![0u8; tuple.len()];
            expand_rec(
                mat,
                tuple,
                0,
                &mut assignment,
                &ScalarExpr::one(),
                block,
                &mut out,
                n,
            );
        }
        out.simplified()
    }

    /// Convert orthonormal-frame components to the coordinate frame.
    pub fn to_coordinate(&self, cf: &Coframe) -> Result<Form> {
        match self.frame {
            FrameKind::Coordinate => Ok(self.clone()),
            FrameKind::Orthonormal => Ok(self.reexpress(&cf.vielbein, FrameKind::Coordinate)),
        }
    }

    /// Convert coordinate-frame components to the orthonormal frame.
    pub fn to_orthonormal(&self, cf: &Coframe) -> Result<Form> {
        match self.frame {
            FrameKind::Orthonormal => Ok(self.clone()),
            FrameKind::Coordinate => Ok(self.reexpress(&cf.inverse, FrameKind::Orthonormal)),
        }
    }

    /// Numeric evaluation of every block.
    pub fn eval(&self, point: &Point) -> Result<BTreeMap<Vec<u8>, NumMat>> {
        let mut out = BTreeMap::new();
        for (t, b) in &self.comps {
            out.insert(t.clone(), b.eval(point)?);
        }
        Ok(out)
    }

    /// Largest entry magnitude over all components at a point.
    pub fn max_abs_at(&self, point: &Point) -> Result<f64> {
        let mut m = 0.0f64;
        for (_, b) in &self.comps {
            m = m.max(b.eval(point)?.norm_inf());
        }
        Ok(m)
    }

    /// Max entry magnitude of (self - rhs) at a point.
    pub fn residual_at(&self, rhs: &Form, point: &Point) -> Result<f64> {
        let diff = self.sub(rhs)?;
        diff.max_abs_at(point)
    }

    /// Move this form onto a product chart whose coordinates contain this
    /// chart's coordinates starting at `offset` (coordinate frame only).
    pub fn embed(&self, product: Arc<Chart>, offset: usize) -> Result<Form> {
        if self.frame != FrameKind::Coordinate {
            return Err(Error::FrameMismatch(
                "embedding is defined for coordinate-frame components".into(),
            ));
        }
        for (k, c) in self.chart.coords().iter().enumerate() {
            if product.coord(offset + k) != c {
                return Err(Error::ChartMismatch(format!(
                    "product chart does not contain `{c}` at position {}",
                    offset + k
                )));
            }
        }
        let mut out = Form::zero(product, FrameKind::Coordinate, self.degree, self.shape);
        for (t, b) in &self.comps {
            let nt: Vec<u8> = t.iter().map(|&i| i + offset as u8).collect();
            out.comps.insert(nt, b.clone());
        }
        Ok(out)
    }
}

fn block_mul_shape(a: (usize, usize), b: (usize, usize)) -> Result<(usize, usize)> {
    if a == (1, 1) {
        return Ok(b);
    }
    if b == (1, 1) {
        return Ok(a);
    }
    if a.1 != b.0 {
        return Err(Error::ShapeMismatch(format!("block product {a:?} x {b:?}")));
    }
    Ok((a.0, b.1))
}

#[allow(clippy::too_many_arguments)]
fn expand_rec(
    mat: &ExprMat,
    tuple: &[u8],
    depth: usize,
    assignment: &mut [u8],
    coeff: &ScalarExpr,
    block: &ExprMat,
    out: &mut Form,
    n: usize,
) {
    if depth == tuple.len() {
        out.accumulate(assignment, block.scale(coeff));
        return;
    }
    let src = tuple[depth] as usize;
    for j in 0..n {
        let entry = mat.get(src, j);
        if entry.is_zero() {
            continue;
        }
        assignment[depth] = j as u8;
        let c = coeff.clone() * entry.clone();
        expand_rec(mat, tuple, depth + 1, assignment, &c, block, out, n);
    }
}
