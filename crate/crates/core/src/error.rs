use std::fmt;

/// Errors reported by constructors and operations across the crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// An element fell outside the set's universe `[1, universe_max]`.
    ElementOutOfRange { value: usize, universe_max: usize },
    /// An operation that requires a nonempty set was given an empty one.
    EmptySetInput(&'static str),
    /// Problem or family parameters violate a required hypothesis.
    InvalidParameters(String),
    /// A family document failed validation.
    InvalidFamilyFile(String),
    /// A witness did not satisfy its contract.
    InvalidWitness(String),
    /// The requested enumeration space exceeds the configured budget.
    BudgetExceeded { space: u128, budget: u64 },
    /// The requested search configuration is not supported.
    UnsupportedSearch(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ElementOutOfRange { value, universe_max } => {
                write!(f, "element {value} is outside the universe [1, {universe_max}]")
            }
            Error::EmptySetInput(op) => write!(f, "{op} requires a nonempty set"),
            Error::InvalidParameters(msg) => write!(f, "invalid parameters: {msg}"),
            Error::InvalidFamilyFile(msg) => write!(f, "invalid family file: {msg}"),
            Error::InvalidWitness(msg) => write!(f, "invalid witness: {msg}"),
            Error::BudgetExceeded { space, budget } => write!(
                f,
                "enumeration space has {space} candidates, exceeding the budget of {budget}; \
                 raise the budget to at least {space} to run this search"
            ),
            Error::UnsupportedSearch(msg) => write!(f, "unsupported search: {msg}"),
        }
    }
}

impl std::error::Error for Error {}
