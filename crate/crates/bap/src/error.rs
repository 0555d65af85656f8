use thiserror::Error;

/// A schema-validation failure, with a path into the offending field.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemaError {
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for SchemaError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("degenerate segment (coincident endpoints)")]
    DegenerateSegment,

    #[error("parameter {name} = {value} outside valid range {range}")]
    ParamOutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("point is not a member of the set")]
    NotAMember,

    #[error("solver requires the Euclidean norm; use the general-norm solver instead")]
    NonEuclideanNorm,

    #[error("grid budget exceeded: {points} points; try resolution >= {suggested_resolution}")]
    GridBudgetExceeded {
        points: u128,
        suggested_resolution: f64,
    },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("invalid problem spec:\n{}", .0.iter().map(|e| format!("  {e}")).collect::<Vec<_>>().join("\n"))]
    Schema(Vec<SchemaError>),

    #[error("malformed problem spec: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
