use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors shared across the crate. Input problems and resource guards are
/// kept distinct so the CLI can map them to different exit codes.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("malformed scalar literal `{0}`")]
    MalformedScalar(String),
    #[error("zero denominator in scalar literal `{0}`")]
    ZeroDenominator(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0}: ground-set sizes differ ({1} vs {2})")]
    GroundSetMismatch(&'static str, usize, usize),
    #[error("mark counts differ ({0} vs {1})")]
    MarkCountMismatch(usize, usize),
    #[error("{what}: size {got} exceeds limit {limit}")]
    SizeGuard {
        what: &'static str,
        got: u128,
        limit: u128,
    },
    #[error("invariant table has no entry for canonical key `{0}`")]
    MissingTableEntry(String),
    #[error("invariant table is missing {} required entries (first: `{}`)",
            .0.len(), .0.first().map(String::as_str).unwrap_or(""))]
    CoverageGap(Vec<String>),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// True for errors raised by size/resource guards rather than bad input.
    pub fn is_resource_guard(&self) -> bool {
        matches!(self, Error::SizeGuard { .. })
    }
}
