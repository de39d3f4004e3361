//! Graded exterior forms with matrix-valued symbolic coefficients.
//!
//! A form stores blocks only on strictly increasing index tuples, so
//! antisymmetry holds by construction. Components refer either to the
//! coordinate coframe dx^m or to a declared orthonormal coframe; the
//! Hodge map and interior products with orthonormal frame vectors act in
//! the orthonormal frame, the exterior derivative in the coordinate one.

mod coframe;
mod form;

pub use coframe::{sym_det, sym_inverse, Coframe, FrameVector};
pub use form::{Form, FrameKind};

#[cfg(test)]
mod tests;
