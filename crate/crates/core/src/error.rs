use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("resource cap exceeded: {what} = {value} > {cap}")]
    ResourceCap {
        what: &'static str,
        value: usize,
        cap: usize,
    },

    #[error(
        "polynomial has a root that is not a root of unity (residual degree {residual_degree})"
    )]
    NotRootsOfUnity { residual_degree: usize },

    #[error("numeric non-convergence at z = {re} + {im}i: {detail}")]
    NonConvergence { re: f64, im: f64, detail: String },

    #[error("insufficient terms: have {have}, need at least {need}")]
    InsufficientTerms { have: usize, need: usize },

    #[error(
        "phase unwrapping ambiguous near z = {z}: jump {jump} exceeds pi; densify the sampling"
    )]
    UnwrapAmbiguity { z: f64, jump: f64 },

    #[error("disjoint ranges: {0}")]
    DisjointRanges(String),
}

pub type Result<T> = std::result::Result<T, Error>;
