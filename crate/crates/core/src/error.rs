use thiserror::Error;

use crate::monomial::Var;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("image of x must be a nonzero rational times x times a power of c when negative x powers occur")]
    NonInvertibleXImage,
    #[error("polynomial is not integral in x")]
    NotIntegral,
    #[error("division by the zero polynomial")]
    DivideByZero,
    #[error("no value assigned to variable {0}")]
    MissingAssignment(Var),
    #[error("evaluation at x = 0 of a polynomial with negative x powers")]
    ZeroAtPole,
    #[error("derivation not nilpotent on generators within {0} iterations")]
    NotNilpotentWithinBound(usize),
    #[error("maps are not mutually inverse")]
    NotInversePair,
    #[error("malformed Q2: {0}")]
    MalformedQ2(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("Q has a term v^0 w^0 x^{r}; absorb pure x-polynomial summands before calling")]
    ConstantTermUnsupported { r: u32 },
    #[error("moment system inconsistent for (a, b) = ({a}, {b})")]
    InconsistentMoments { a: u32, b: u32 },
    #[error("exact division by y failed while forming the mod-x correction")]
    ExactDivisionByYFailed,
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("unknown variable `{name}` at offset {offset}")]
    UnknownVariable { name: String, offset: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
