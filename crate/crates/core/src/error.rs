use thiserror::Error;

use crate::word::Letter;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("wrong level: letter {0} does not belong to this group")]
    WrongLevel(Letter),
    #[error("trivial element has no root data")]
    TrivialRootData,
    #[error("degenerate base: power base must be nontrivial")]
    DegenerateBase,
    #[error("undecided within bounds: {0}")]
    Undecided(String),
    #[error("invalid tower spec: {0}")]
    InvalidSpec(String),
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown letter `{0}`")]
    UnknownLetter(String),
    #[error("stage violation: {letter} is not available at stage {stage}")]
    StageViolation { letter: Letter, stage: u32 },
    #[error("stage {to} is below element stage {from}")]
    Demotion { from: u32, to: u32 },
    #[error("arithmetic overflow in exponent computation")]
    Overflow,
    #[error("cache error: {0}")]
    Cache(String),
    #[error("{0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, GroupError>;

impl GroupError {
    pub fn undecided(msg: impl Into<String>) -> GroupError {
        GroupError::Undecided(msg.into())
    }

    pub fn is_undecided(&self) -> bool {
        matches!(self, GroupError::Undecided(_))
    }
}
