//! Exact-coefficient symbolic scalar expressions over named chart
//! coordinates: differentiation, numeric evaluation, normal-form
//! simplification and a plain-text s-expression serialization.

mod chart;
mod expr;
mod normal;
mod sexpr;

pub use chart::{Chart, Point};
pub use expr::ScalarExpr;
pub use normal::simplify;
pub use sexpr::{parse_sexpr, to_sexpr};

use crate::error::{Error, Result};

/// Exact partial derivative. The coordinate must belong to `chart`.
pub fn differentiate(e: &ScalarExpr, chart: &Chart, coord: &str) -> Result<ScalarExpr> {
    if !chart.has_coord(coord) {
        return Err(Error::UnknownCoordinate(coord.to_string()));
    }
    Ok(e.diff(coord))
}
