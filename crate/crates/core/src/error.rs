use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unsupported root system type `{0}` (expected G2 or D4)")]
    UnsupportedType(String),
    #[error("no diagram symmetry is defined for {0}")]
    SymmetryUndefined(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("A - I is singular; the twist matrix does not define a finite torus")]
    SingularTwist,
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(i64, i64),
    #[error("odd characteristic required (q = {0})")]
    CharacteristicTwo(u64),
    #[error("closure exceeded the cap of {cap} elements")]
    ClosureCap { cap: usize },
    #[error("generator {index} ({word}) is not fixed by the twisted Frobenius")]
    NotFixed { index: usize, word: String },
    #[error("unknown torus class {class} for family {family}")]
    UnknownClass { family: String, class: usize },
    #[error("invalid q = {q} for family {family}: {reason}")]
    InvalidQ {
        family: String,
        q: u64,
        reason: String,
    },
    #[error("malformed cycle data: {0}")]
    MalformedPartition(String),
    #[error("hypotheses not met: {0}")]
    HypothesesNotMet(String),
    #[error("matrix does not preserve the quadratic form")]
    NotOrthogonal,
    #[error("unknown group family `{0}`")]
    UnknownFamily(String),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
