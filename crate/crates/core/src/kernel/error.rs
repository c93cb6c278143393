use thiserror::Error;

use super::coord::Coord;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { offset: usize, name: String },
    #[error("cyclic substitution through `{0}`")]
    CyclicBinding(Coord),
    #[error("division by an identically zero expression")]
    DivisionByZero,
    #[error("no numeric value bound for `{0}`")]
    Unbound(Coord),
    #[error("denominator {value:e} is below the evaluation threshold")]
    NearZeroDenominator { value: f64 },
    #[error("unsupported exponential argument: {0}")]
    UnsupportedExp(String),
    #[error("jet order {0} exceeds the supported maximum")]
    JetOrder(u32),
}
