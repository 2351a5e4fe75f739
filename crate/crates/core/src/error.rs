use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("alphabet rank must be between 2 and 26, got {0}")]
    InvalidRank(usize),
    #[error("letter with generator index {index} out of range for rank {rank}")]
    LetterOutOfRange { index: usize, rank: usize },
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("word is not freely reduced at position {0} (pass --reduce to normalize)")]
    Unreduced(usize),
    #[error("word is not a member of the transversal")]
    NotInTransversal,
    #[error("word is not accepted by the ambient automaton")]
    NotInLanguage,
    #[error("the candidate set is not contained in the ambient set")]
    NotContained,
    #[error("language is empty: no accepting state exists")]
    EmptyLanguage,
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("evaluation point is outside the series' disc of convergence")]
    OutsideConvergence,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
