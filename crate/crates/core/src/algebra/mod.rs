//! Exact combinatorics, sparse multivariate polynomials, packed symmetric
//! matrices and determinant/adjugate evaluation.

mod combinat;
mod linalg;
mod poly;
mod sym;

pub use combinat::{binomial, binomial_u64, factorial};
pub use linalg::{det_adj, small, ADJ_SINGULAR_THRESHOLD};
pub use poly::{system_jacobian, Monomial, Poly, PolySystem};
pub use sym::SymMatrix;

pub use num_complex::Complex64 as C64;
