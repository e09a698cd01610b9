//! Classical pseudodifferential symbols on the circle.

pub mod classical;
pub mod product;
pub mod weight;

use thiserror::Error;

pub use classical::{commutator, compose, deg_add, ClassicalSymbol, HomTerm, NEG_INF};
pub use product::{materialize, Factor, Materializer};
pub use weight::{EigenvalueLaw, Weight};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymbolError {
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("floor {requested} unreachable, operands certify only degrees above {certified}")]
    FloorUnreachable { requested: i64, certified: i64 },
    #[error("degree -1 not certified (valid down to {valid_down_to})")]
    InsufficientDepth { valid_down_to: i64 },
    #[error("not elliptic: {0}")]
    NotElliptic(String),
    #[error("eigenvalue law inconsistent with weight symbol: {0}")]
    LawMismatch(String),
}
