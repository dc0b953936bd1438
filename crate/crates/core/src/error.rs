use thiserror::Error;

use crate::homotopy::CountReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),

    #[error("rank deficient: {0}")]
    RankDeficient(String),

    #[error("linearly dependent matrix basis")]
    DependentBasis,

    #[error("point is not on the central curve (relative residual {residual:.3e})")]
    OffCurve { residual: f64 },

    #[error("seed disagreement, counts per seed: {:?}", .0.per_seed_counts)]
    GenericityFailure(Box<CountReport>),

    #[error("homotopy needs {paths} paths per seed, budget is {budget}{}", reference_note(.reference))]
    BudgetExceeded {
        paths: u128,
        budget: u128,
        reference: Option<u64>,
    },

    #[error("polytope is lower dimensional (affine rank {rank}, ambient {ambient})")]
    Degenerate { rank: usize, ambient: usize },

    #[error("newton failed to converge at lambda = {lambda:e}")]
    NewtonFailure { lambda: f64 },

    #[error("not derivable from the closed-form propositions: {0}")]
    NotDerivable(String),

    #[error("cross-method mismatch: {0}")]
    Mismatch(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn reference_note(reference: &Option<u64>) -> String {
    match reference {
        Some(v) => format!("; reference-only value {v}"),
        None => String::new(),
    }
}
