use thiserror::Error;

/// Which group axiom a Cayley table violated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxiomViolation {
    /// `table[row][col]` is outside `0..order`.
    Closure { row: usize, col: usize, value: usize },
    /// No element acts as a two-sided identity.
    NoIdentity,
    /// `s` has no two-sided inverse.
    NoInverse { element: usize },
    /// `(a·b)·c != a·(b·c)`.
    Associativity { a: usize, b: usize, c: usize },
}

impl std::fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AxiomViolation::Closure { row, col, value } => {
                write!(f, "closure fails: entry ({row}, {col}) = {value} is out of range")
            }
            AxiomViolation::NoIdentity => write!(f, "no two-sided identity element"),
            AxiomViolation::NoInverse { element } => {
                write!(f, "element {element} has no two-sided inverse")
            }
            AxiomViolation::Associativity { a, b, c } => {
                write!(f, "associativity fails for witness (a, b, c) = ({a}, {b}, {c})")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("cayley table syntax error at line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("not a group: {0}")]
    NotAGroup(AxiomViolation),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("eigenvalue clustering failed to isolate irreducible blocks (seed {seed})")]
    ClusteringFailure { seed: u64 },

    #[error("{what} deviates by {deviation:.3e}, above tolerance {tolerance:.1e}")]
    Tolerance {
        what: String,
        deviation: f64,
        tolerance: f64,
    },

    #[error("internal error: {0}")]
    Internal(String),

    #[error("unknown check id `{0}`")]
    UnknownCheck(String),

    #[error("invalid group spec `{spec}`: {reason}")]
    GroupSpec { spec: String, reason: String },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
