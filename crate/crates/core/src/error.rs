use thiserror::Error;

use crate::coalition::Coalition;
use crate::decomposition::DSummary;

pub type Result<T, E = GameError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum GameError {
    #[error("player universe mismatch: {left} players vs {right} players")]
    UniverseMismatch { left: usize, right: usize },

    #[error("player count {0} outside the supported range 1..=32")]
    PlayerCount(usize),

    #[error("player index {index} out of range for {n} players")]
    PlayerIndex { index: usize, n: usize },

    #[error("invalid weighted game: {0}")]
    InvalidGame(String),

    #[error("invalid game expression: {0}")]
    InvalidExpr(String),

    #[error("containment violated: coalition {witness} wins in the target but loses in the candidate")]
    ContainmentViolated { witness: Coalition },

    #[error("union rewrite inapplicable: the common core of the gap set is empty ({} gap coalitions)", summary.member_count)]
    Inapplicable { summary: Box<DSummary> },

    #[error("coalition {coalition} is not losing")]
    NotLosing { coalition: Coalition },

    #[error("duplicate coalition {0}")]
    DuplicateCoalition(Coalition),

    #[error("symmetric difference of size {size} exceeds the search cap {cap}")]
    SearchCapExceeded { size: usize, cap: usize },

    #[error("population table: {0}")]
    Table(String),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("unknown country {0:?}")]
    UnknownCountry(String),

    #[error("coalition file line {line}: {message}")]
    CoalitionFile { line: usize, message: String },
}
