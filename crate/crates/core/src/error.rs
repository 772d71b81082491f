use thiserror::Error;

/// Everything that can go wrong in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The available quotients (or floating precision) do not decide the question.
    #[error("undecidable at this precision: {0}")]
    Undecidable(String),

    #[error("jb_ladder window empty at step {step}: no quotient lands in [{lower}, {upper}]")]
    EmptyWindow {
        step: usize,
        lower: String,
        upper: String,
    },

    #[error("horizon {requested} exceeds tent validity {valid}")]
    HorizonBeyondValidity { requested: f64, valid: f64 },

    #[error("rational coordinate {index} rejected: divergence requires irrational coordinates")]
    RationalCoordinate { index: usize },

    #[error("enumeration budget exceeded: needed {needed}, budget {budget}")]
    BudgetExceeded { needed: String, budget: u64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A construction inequality failed; `inequality` names it and `step` is the generation.
    #[error("construction inequality `{inequality}` fails at step {step}: {detail}")]
    Inequality {
        inequality: &'static str,
        step: usize,
        detail: String,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable kebab-case name of the variant, used in machine-readable error bodies.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid-input",
            Error::Undecidable(_) => "undecidable",
            Error::EmptyWindow { .. } => "empty-window",
            Error::HorizonBeyondValidity { .. } => "horizon-beyond-validity",
            Error::RationalCoordinate { .. } => "rational-coordinate",
            Error::BudgetExceeded { .. } => "budget-exceeded",
            Error::Precondition(_) => "precondition",
            Error::Inequality { .. } => "inequality",
            Error::Parse(_) => "parse",
        }
    }
}
