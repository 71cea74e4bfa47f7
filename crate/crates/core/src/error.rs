use thiserror::Error;

/// Errors raised by the workbench.
///
/// Failed axiom checks are not errors; they are reported as check records.
/// Errors signal malformed input or a violated precondition of an operation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: String,
        expected: usize,
        found: usize,
    },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("conditioning on a transformation with probability {probability:e}")]
    ZeroProbability { probability: f64 },

    #[error("bipartite form is not faithful: numerical rank {rank} < {dim}")]
    NotFaithful { rank: usize, dim: usize },

    #[error("state `{target}` cannot be prepared by a physical local transformation")]
    NotPreparable { target: String },

    #[error("Gram matrix is not positive semidefinite: eigenvalue {min_eigenvalue:e} (max {max_eigenvalue:e})")]
    PositivityViolation {
        min_eigenvalue: f64,
        max_eigenvalue: f64,
    },

    #[error("transformation is not identifiable: design rank {rank} < {dim}")]
    Identifiability { rank: usize, dim: usize },

    #[error("Kraus set increases trace by {excess:e}")]
    TraceIncreasing { excess: f64 },

    #[error("transformations are not coexistent: worst total probability {worst:.6}")]
    NotCoexistent { worst: f64 },

    #[error("negative outcome probability {probability:e}")]
    NegativeProbability { probability: f64 },

    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(what: &str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            what: what.to_string(),
            expected,
            found,
        })
    }
}
