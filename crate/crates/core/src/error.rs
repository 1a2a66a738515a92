use thiserror::Error;

use crate::spaces::Label;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid exponent {0}: must be finite and > 1")]
    InvalidExponent(f64),
    #[error("weight for label {label} is {weight}, must be finite and > 0")]
    NonPositiveWeight { label: Label, weight: f64 },
    #[error("empty set: {0}")]
    Empty(&'static str),
    #[error("exponent mismatch: {0}")]
    ExponentMismatch(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("ambient mismatch: {0}")]
    AmbientMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("overlapping blocks: label {0} appears in more than one block")]
    OverlappingBlocks(Label),
    #[error("exact solver refused: {count} candidate pairs exceed the enumeration limit {limit}")]
    EnumerationLimit { count: u128, limit: u64 },
    #[error("atoms are not orthonormal: {0}")]
    NonOrthonormalAtoms(String),
    #[error("centrality certificate failed: {0}")]
    CentralityCertificate(String),
    #[error("row and column partitions are misaligned: {0}")]
    MisalignedPartitions(String),
}

pub type Result<T> = std::result::Result<T, Error>;
