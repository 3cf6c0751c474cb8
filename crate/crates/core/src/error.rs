use thiserror::Error;

/// Errors raised by constructions over finite sets and polynomials.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("duplicate element {0}")]
    DuplicateElement(String),

    #[error("ill-formed function: {0}")]
    IllFormedFunction(String),

    #[error("not composable: {0}")]
    NotComposable(String),

    #[error("not a commuting square: {0}")]
    NotASquare(String),

    #[error("not a pullback around (f, g): {0}")]
    NotAPullbackAround(String),

    /// A universal property was asked for a mediator that does not exist.
    #[error("no mediating map: {0}")]
    NoMediator(String),

    #[error("not a section: {0}")]
    NotASection(String),

    #[error("ill-formed polynomial: {0}")]
    IllFormedPolynomial(String),

    #[error("ill-formed subdivided composite: {0}")]
    IllFormedComposite(String),

    #[error("not a cartesian morphism: {0}")]
    NotCartesian(String),

    #[error("parse error at byte {pos}: {msg}")]
    ParseError { pos: usize, msg: String },

    #[error("boundary element {0} is not an atom and cannot name a variable")]
    NotNameable(String),

    #[error("assignment is missing variable {0}")]
    IncompleteAssignment(String),

    #[error("arithmetic overflow while evaluating")]
    Overflow,

    #[error("malformed JSON: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;
