//! Random generic program instances and the polynomial systems whose
//! isolated solutions count the degree of their central curves.
//!
//! - [`reduce_lp`] / [`reduce_qp`]: cleared KKT equations plus a generic
//!   hyperplane `e x = f`, with the affine constraints eliminated through
//!   `x = v_0 + t_1 v_1 + ... + t_k v_k`. Unknowns are ordered
//!   `(lambda, y_1..y_d, t_1..t_{m-d-1})`.
//! - [`build_ml_system`]: likelihood equations of the linear concentration
//!   model spanned by `C, A_1, ..., A_d`, in adjugate form.
//! - [`CovarianceSystem`]: the same equations in coordinates of
//!   `Sigma - S in L^perp`.

mod covariance;
mod json;
mod ml;
mod program;
mod reduce;

pub use covariance::{ml_degree, ml_path_counts, CovarianceSystem};
pub use json::Instance;
pub use ml::{build_ml_system, build_ml_system_from_parts, MlForm, MlSystem};
pub use program::{random_lp, random_qp, random_sdp, ClearedKkt, LpInstance, QpInstance, SdpInstance};
pub use reduce::{lift_duals, random_slice, reduce_lp, reduce_qp, DualLift, ReducedSystem, SliceSpec};
