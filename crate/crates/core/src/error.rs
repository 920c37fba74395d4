use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("unsupported extension degree {0} (must be even, 2..=32)")]
    BadDegree(u32),
    #[error("modulus {modulus:#x} is not a degree-{degree} polynomial with nonzero constant term")]
    MalformedModulus { degree: u32, modulus: u64 },
    #[error("modulus {modulus:#x} is reducible: divisible by {rendered} ({factor:#x})")]
    Reducible {
        modulus: u64,
        factor: u64,
        rendered: String,
    },
    #[error("malformed field spec `{0}` (expected gf2:<2m>:<hex> or F4/F16/F64/F256)")]
    BadSpec(String),
    #[error("malformed field element `{0}`")]
    BadElement(String),
    #[error("element {value:#x} outside a field of size {size}")]
    OutOfRange { value: u64, size: u64 },
    #[error("domain error: {0}")]
    ZeroDivisor(&'static str),
}

/// Refusal raised when a computation would exceed a size gate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{what} needs {estimate}, above the default limit of {limit}; pass the force flag to run anyway")]
pub struct GateError {
    pub what: &'static str,
    pub estimate: String,
    pub limit: String,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Gate(#[from] GateError),
    #[error("tuples belong to different fields ({0} and {1})")]
    MixedFields(String, String),
    #[error("variety system undefined: {0}")]
    DegenerateSystem(&'static str),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
