use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("assembly error: {0}")]
    Assembly(String),

    #[error("matrix is not positive definite: pivot {value:e} at row {row}")]
    Definiteness { row: usize, value: f64 },

    #[error("solver failed: relative residual {residual:e} exceeds {tolerance:e}")]
    SolverFailure { residual: f64, tolerance: f64 },

    #[error("ill-conditioned interface basis: Gram condition estimate {condition:e}")]
    IllConditionedBasis { condition: f64 },

    #[error("internal consistency error: {0}")]
    Consistency(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    /// True for violations of a numerical contract, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Definiteness { .. }
                | Error::SolverFailure { .. }
                | Error::IllConditionedBasis { .. }
                | Error::Consistency(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
