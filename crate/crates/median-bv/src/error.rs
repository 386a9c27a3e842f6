use std::fmt;

/// Errors surfaced by structure construction and the operations on top of it.
///
/// Every operation that can reject its input returns `Result<_, Error>`;
/// panics are reserved for broken internal invariants.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A point id does not exist in the structure.
    PointOutOfRange { point: usize, n: usize },
    /// Two arguments were required to be distinct.
    DistinctPointsRequired { point: usize },
    /// An exhaustive scan or enumeration would exceed the configured cap.
    SizeCapExceeded { what: &'static str, n: usize, cap: usize },
    /// A point set was required to be closed under the median but is not.
    /// `missing` holds points its closure adds, smallest ids first.
    NotASubalgebra { missing: Vec<usize> },
    /// A point set admits no compatible linear order.
    NotLinear,
    /// The operation only applies to a specific backend.
    WrongBackend { expected: &'static str, found: &'static str },
    /// An operation received an empty set or list where content is required.
    EmptyInput { what: &'static str },
    /// A function or map does not match the structure it is paired with.
    LengthMismatch { expected: usize, found: usize },
    /// A function value escapes its declared range.
    ValueOutOfRange { index: usize, value: f64 },
    /// A numeric argument was rejected (non-finite, non-positive, ...).
    BadNumeric { what: &'static str },
    /// Structure payload is malformed (bad table size, disconnected tree, ...).
    BadStructure(String),
    /// A family of open sets fails the closure laws of a topology.
    BadTopology(String),
    /// A claimed closed cover is not one.
    BadCover(String),
    /// A function source ran dry before a selection stage could certify a
    /// class of the requested length.
    SourceExhausted { stage: usize, needed: usize, have: usize },
    /// A property suite name that the runner does not know.
    UnknownSuite { name: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::PointOutOfRange { point, n } => {
                write!(f, "point {point} out of range for structure with {n} points")
            }
            Error::DistinctPointsRequired { point } => {
                write!(f, "arguments must be distinct, got {point} twice")
            }
            Error::SizeCapExceeded { what, n, cap } => {
                write!(f, "{what} rejected: n = {n} exceeds cap {cap}")
            }
            Error::NotASubalgebra { missing } => {
                write!(f, "not a subalgebra: median closure adds {missing:?}")
            }
            Error::NotLinear => write!(f, "point set admits no compatible linear order"),
            Error::WrongBackend { expected, found } => {
                write!(f, "operation needs a {expected} backend, structure is {found}")
            }
            Error::EmptyInput { what } => write!(f, "{what} must be nonempty"),
            Error::LengthMismatch { expected, found } => {
                write!(f, "expected {expected} values, got {found}")
            }
            Error::ValueOutOfRange { index, value } => {
                write!(f, "value {value} at index {index} escapes the declared range")
            }
            Error::BadNumeric { what } => write!(f, "bad numeric argument: {what}"),
            Error::BadStructure(msg) => write!(f, "bad structure: {msg}"),
            Error::BadTopology(msg) => write!(f, "bad topology: {msg}"),
            Error::BadCover(msg) => write!(f, "bad cover: {msg}"),
            Error::SourceExhausted { stage, needed, have } => {
                write!(
                    f,
                    "function source exhausted at stage {stage}: class has {have} of {needed} members"
                )
            }
            Error::UnknownSuite { name } => write!(f, "unknown suite {name:?}"),
        }
    }
}

impl std::error::Error for Error {}
