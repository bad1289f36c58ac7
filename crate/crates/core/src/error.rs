use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("undeclared variable `{0}`")]
    UndeclaredVariable(String),

    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("not divisible: {0}")]
    NotDivisible(String),

    #[error("degree budget exceeded: {0}")]
    DegreeBudgetExceeded(String),

    #[error("not a unit: {0}")]
    NotUnit(String),

    #[error("morphism not well defined: relation `{relation}` maps to `{residual}`")]
    NotWellDefined { relation: String, residual: String },

    #[error("context mismatch: {0}")]
    ContextMismatch(String),

    #[error("system polynomial `{0}` is not in the relation ideal")]
    SystemNotInIdeal(String),

    #[error("congruence d = P mod I fails, normal form of d - P is `{0}`")]
    CongruenceFails(String),

    #[error("matrix identity fails: {0}")]
    IdentityFails(String),

    #[error("s' is not a unit in the target: {0}")]
    SPrimeNotUnit(String),

    #[error("no s'' witness found: {0}")]
    SDoublePrimeNotFound(String),

    #[error("cannot clear homogenization residual: {0}")]
    CannotClear(String),

    #[error("nilpotency of h_B is not certified: {0}")]
    NilpotencyUncertified(String),

    #[error("resolution chain is not increasing at iteration {iteration}: {detail}")]
    ChainNotIncreasing { iteration: usize, detail: String },

    #[error("invalid input: {0}")]
    Invalid(String),
}
