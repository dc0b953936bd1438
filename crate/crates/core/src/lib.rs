//! Degree and genus of the central curve of linear, quadratic and
//! semidefinite programs.
//!
//! The degree of the central curve is computed along three independent routes
//! that check each other:
//!
//! - closed-form formulas ([`formulas`]),
//! - normalized volumes of Newton polytopes ([`polytope`]),
//! - numerical counting of the isolated solutions of the cleared KKT system or
//!   of the maximum-likelihood equations of the associated linear concentration
//!   model, by total-degree homotopy continuation ([`homotopy`], [`instances`]).
//!
//! [`centralpath`] follows the actual central path of random instances with a
//! barrier Newton method, and [`sos`] builds Gram-matrix programs for forms.
//! [`commands`] holds the logic behind the `centraldeg` binary.

pub mod algebra;
pub mod centralpath;
pub mod commands;
pub mod error;
pub mod formulas;
pub mod homotopy;
pub mod instances;
pub mod polytope;
pub mod rng;
pub mod sos;

pub use error::{Error, Result};
pub use num_complex::Complex64;
