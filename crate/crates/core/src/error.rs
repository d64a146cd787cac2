use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad parameter combination (e.g. a charging range shorter than the
    /// flight altitude, or a malformed config file).
    #[error("configuration error: {0}")]
    Config(String),

    /// A loaded or constructed value violates a structural invariant.
    #[error("validation error: {0}")]
    Validation(String),

    /// A caller broke an API contract (mismatched sizes, non-permutation
    /// tour, index out of range).
    #[error("contract violation: {0}")]
    Contract(String),

    /// An exact oracle was asked for an instance above its size guard.
    #[error("instance exceeds oracle guard: {0}")]
    Guard(String),

    /// An operation that requires a fully covering plan was given one that
    /// leaves nodes uncharged.
    #[error("infeasible plan: {0}")]
    Infeasible(String),

    #[error("parse error in {path}: {detail}")]
    Parse { path: String, detail: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 for user/config problems, 3 for
    /// filesystem and parse failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::Validation(_)
            | Error::Contract(_)
            | Error::Guard(_)
            | Error::Infeasible(_) => 2,
            Error::Parse { .. } | Error::Io(_) => 3,
        }
    }
}
