use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid modulus {0}: {1}")]
    InvalidModulus(u64, &'static str),

    #[error("modulus {0} is even; operation needs an odd group order")]
    EvenModulus(u64),

    #[error("secret shift {secret} is out of range for N = {modulus}")]
    SecretOutOfRange { secret: u64, modulus: u64 },

    #[error("secret is sealed: instance runs in benchmark mode")]
    SecretSealed,

    #[error("element belongs to instance {found}, expected {expected}")]
    ForeignElement { expected: u64, found: u64 },

    #[error("size guard: {what} = {value} exceeds limit {limit}")]
    SizeGuard { what: &'static str, value: u64, limit: u64 },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("operation budget of {budget} exhausted after {spent} operations")]
    BudgetExhausted { budget: u64, spent: u64 },

    #[error("retry budget exhausted at stage {stage} after {attempts} attempts")]
    RetryExhausted { stage: usize, attempts: u64 },

    #[error("recovered shift failed classical verification after {attempts} attempts")]
    VerificationFailed { attempts: u64 },

    #[error("wrong element labels: {0}")]
    WrongLabels(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
