use thiserror::Error;

/// Errors surfaced by the engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("scalar is not real")]
    NotReal,

    #[error("mixed scalar backends in one container")]
    BackendMismatch,

    #[error("event references histories outside the space (n = {n})")]
    SpaceMismatch { n: usize },

    #[error("invalid history space: {0}")]
    InvalidSpace(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("functional is not normalized: sum of entries is {sum}")]
    NotNormalized { sum: String },

    #[error("functional fails validation: {}", diagnostics.join("; "))]
    InvalidFunctional { diagnostics: Vec<String> },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("partition is not consistent")]
    InconsistentPartition,

    #[error("empty event not allowed here")]
    EmptyEvent,

    #[error("{task} refused: n = {n} exceeds cap {cap} (roughly {estimate} candidates)")]
    CapExceeded {
        task: &'static str,
        n: usize,
        cap: usize,
        estimate: u128,
    },

    #[error("random generator exhausted retries on degenerate draws")]
    DegenerateDraw,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
