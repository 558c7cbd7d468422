use thiserror::Error;

use crate::geometry::Violation;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("general position has not been verified for this point set")]
    GeneralPositionUnverified,
    #[error("point set violates general position: {0}")]
    GeneralPosition(Violation),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error("size guard exceeded: {0}")]
    Guard(String),
    #[error("no eligible vertex in section {section}")]
    Infeasible { section: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
