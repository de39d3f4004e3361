//! Clifford/spin algebra and exterior-calculus machinery for verifying
//! the Kaluza-Klein reduction of the six-dimensional Dirac equation on
//! the product of a three-dimensional Lorentzian spacetime with the
//! three-sphere carrying its SU(2) group structure.
//!
//! The crate is organized as:
//! - [`symexpr`]: exact-coefficient symbolic scalars with differentiation,
//!   normal-form simplification and numeric evaluation;
//! - [`clifford`]: exact gamma-matrix representations, tensor-product
//!   lifting, Lorentz generators and SU(2) Euler elements;
//! - [`exterior`]: graded forms with matrix-valued coefficients, wedge,
//!   exterior derivative, interior product and Hodge map;
//! - [`geometry`]: concrete models of the spacetime, the sphere and the
//!   Kaluza-Klein product, the algebraic Levi-Civita solver and the
//!   decomposition checks;
//! - [`reduction`]: Dirac operator assembly, the reduced equation system,
//!   the sphere eigenstate extraction and the mass spectrum;
//! - [`report`] and [`config`]: the JSON report schema and TOML configs
//!   consumed by the command-line front end.

pub mod clifford;
pub mod config;
pub mod error;
pub mod exact;
pub mod exterior;
pub mod geometry;
pub mod matrix;
pub mod perm;
pub mod reduction;
pub mod report;
pub mod symexpr;

pub use error::{Error, Result};
