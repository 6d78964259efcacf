//! Semi-invariants of Dynkin quivers.
//!
//! The pipeline runs from a quiver and a dimension vector to the generic
//! decomposition, the perpendicular simples that index the fundamental
//! semi-invariants, the irreducible components of their zero sets, the
//! multi-variable b-function, and finally a certificate that every point of
//! the associated zero locus Z(B̃) is good.

pub mod analyzer;
pub mod bfunction;
pub mod generic;
pub mod linalg;
pub mod lp;
pub mod orbit;
pub mod quiver;
pub mod roots;

pub use quiver::{Classification, DimVector, Quiver, QuiverType};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid quiver: {0}")]
    InvalidQuiver(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("quiver is not of Dynkin type")]
    NonDynkin,
    #[error("{0:?} is not a positive root")]
    NotARoot(Vec<i64>),
    #[error("d^V_W is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("representations live on different quivers")]
    QuiverMismatch,
    #[error("reflection precondition failed at vertex {0}")]
    PreconditionFailed(usize),
    #[error("no sink reflection applies; partial product {partial}")]
    TerminalRuleInapplicable { partial: String },
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
