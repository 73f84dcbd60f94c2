use alloc::string::String;

/// Error type shared by the whole kernel.
///
/// Every variant carries a human-readable description; callers that need to
/// map errors to process exit codes can match on the variant alone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Dimension or arity mismatch between operands.
    Shape(String),
    /// Malformed input data (relation not a partial order, ragged matrix,
    /// invalid join table, ...).
    Input(String),
    /// Structurally valid input the algorithm cannot handle (for example a
    /// non-dismantlable index poset).
    Unsupported(String),
    /// A configured size cap was exceeded.
    Resource(String),
    /// Two composition paths of a diagram disagree.
    Coherence(String),
    /// An operation's stated hypothesis fails for the given arguments.
    Precondition(String),
    /// An internal exactness check failed. This indicates a bug, never bad
    /// input.
    Invariant(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl core::fmt::Display for Error {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Error::Shape(m) => write!(f, "shape error: {m}"),
            Error::Input(m) => write!(f, "invalid input: {m}"),
            Error::Unsupported(m) => write!(f, "unsupported input: {m}"),
            Error::Resource(m) => write!(f, "resource cap exceeded: {m}"),
            Error::Coherence(m) => write!(f, "coherence error: {m}"),
            Error::Precondition(m) => write!(f, "precondition violated: {m}"),
            Error::Invariant(m) => write!(f, "internal invariant violated: {m}"),
        }
    }
}

impl core::error::Error for Error {}
