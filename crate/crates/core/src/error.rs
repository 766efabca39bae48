use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid dimension {0}")]
    InvalidDimension(usize),

    #[error("value out of domain: {0}")]
    OutOfDomain(String),

    #[error("below stability threshold: d = {d}, k = {k}, need k >= {threshold}")]
    BelowStabilityThreshold { d: usize, k: u64, threshold: u64 },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("zero direction")]
    ZeroDirection,

    #[error("nonconvergence after {iterations} iterations (lower {lower}, upper {upper})")]
    Nonconvergence { lower: f64, upper: f64, iterations: u64 },

    #[error("point outside frame: {0}")]
    OutsideFrame(String),

    #[error("spacing mismatch")]
    SpacingMismatch,

    #[error("grid frames differ")]
    FrameMismatch,

    #[error("cell cap exceeded: {requested} cells requested, cap {cap}")]
    CellCap { requested: u128, cap: u64 },

    #[error("empty set")]
    EmptySet,

    #[error("sandwich precondition violated: {0}")]
    SandwichViolated(String),

    #[error("boundary is disconnected ({components} components)")]
    DisconnectedBoundary { components: usize },

    #[error("bites {first} and {second} overlap")]
    OverlappingBites { first: usize, second: usize },

    #[error("too many boxes: {count} (cap {cap})")]
    TooManyBoxes { count: usize, cap: usize },

    #[error("degenerate ellipse: {0}")]
    DegenerateEllipse(String),

    #[error("invalid spec at {path}: {reason}")]
    InvalidSpec { path: String, reason: String },

    #[error("singular affine map: volume semantics unavailable")]
    SingularAffine,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("malformed grid stream: {0}")]
    MalformedStream(String),
}
