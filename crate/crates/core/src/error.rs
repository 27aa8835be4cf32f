use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("table shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("evaluation at a lattice singularity ({y1}, {y2})")]
    Singularity { y1: f64, y2: f64 },

    #[error("integrand is not integrable: {0}")]
    NonIntegrable(String),

    #[error("moment violation: <f,1> = {m0:e}, <f,y2> = {m1:e}, tolerance {tol:e}")]
    MomentViolation { m0: f64, m1: f64, tol: f64 },

    #[error("undeclared growth: {0}")]
    UndeclaredGrowth(String),

    #[error("mode field is not conjugate symmetric (imaginary residue {0:e})")]
    NotConjugateSymmetric(f64),

    #[error("Gram matrix is ill-conditioned (condition number {0:e})")]
    IllConditioned(f64),

    #[error("cost guard: {points} grid points exceed the budget of {budget}")]
    CostBudget { points: usize, budget: usize },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable code used in CLI error reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidGrid(_) => "INVALID_GRID",
            Error::UnknownPreset(_) => "UNKNOWN_PRESET",
            Error::ShapeMismatch(_) => "SHAPE_MISMATCH",
            Error::InvalidArgument(_) => "INVALID_ARGUMENT",
            Error::Singularity { .. } => "SINGULARITY",
            Error::NonIntegrable(_) => "NON_INTEGRABLE",
            Error::MomentViolation { .. } => "MOMENT_VIOLATION",
            Error::UndeclaredGrowth(_) => "UNDECLARED_GROWTH",
            Error::NotConjugateSymmetric(_) => "NOT_CONJUGATE_SYMMETRIC",
            Error::IllConditioned(_) => "ILL_CONDITIONED",
            Error::CostBudget { .. } => "COST_BUDGET",
            Error::Config(_) => "CONFIG",
            Error::Io(_) => "IO",
            Error::Json(_) => "JSON",
        }
    }
}
