use thiserror::Error;

use crate::geometry::Point2;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("map {index} is singular (|det| = {det:e})")]
    SingularMap { index: usize, det: f64 },

    #[error("map {index} is not a strict contraction (factor {factor})")]
    NonContractive { index: usize, factor: f64 },

    #[error("an IFS needs at least one map")]
    EmptyIfs,

    #[error("bad probability vector: {0}")]
    BadProbabilities(String),

    #[error("viewport must have positive width and height")]
    BadViewport,

    #[error("pixel grid {width}x{height} is empty or too large")]
    BadGrid { width: usize, height: usize },

    #[error("source points are collinear")]
    CollinearSource,

    #[error("expected {expected} maps, found {found}")]
    MapCountMismatch { expected: usize, found: usize },

    #[error("grids differ")]
    GridMismatch,

    #[error("render needs {required:e} composed points (budget {budget:e}); pixel convergence needs depth {converged_depth}")]
    BudgetExceeded {
        required: f64,
        budget: f64,
        converged_depth: u32,
    },

    #[error("mask is empty")]
    EmptyMask,

    #[error("point ({}, {}) is not on the attractor", .0.x, .0.y)]
    OffAttractor(Point2),

    #[error("backwards-orbit enumeration exceeded {limit} branches")]
    BranchExplosion { limit: usize },

    #[error("region does not meet the attractor")]
    EmptyRegion,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
