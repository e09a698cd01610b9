//! Residue formulas for weighted trace cochains and their anomalies.

pub mod cochain;
pub mod family;
pub mod multiindex;

use thiserror::Error;

use crate::oracle::OracleError;
use crate::symbol::SymbolError;

pub use cochain::{
    coboundary_anomaly, correction_sum, hochschild_b, mellin_residue, weighted_cochain, CochainField, CochainValue,
    Evaluation, OracleTrace, Operand, TermRow, TraceProvider,
};
pub use family::{family_derivative, interpolation_difference, richardson_derivative, FamilySpec};
pub use multiindex::{iterated_simplex_integral, simplex_constant, CoefficientConvention, MultiIndex, SimplexConstant};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnomalyError {
    #[error(transparent)]
    Symbol(#[from] SymbolError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("weight has no eigenvalue law; the oracle needs a diagonal weight")]
    NoLaw,
    #[error("parameter {0} outside the family range")]
    OutOfRange(String),
    #[error("arity: {0}")]
    Arity(String),
}
