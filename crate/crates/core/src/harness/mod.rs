//! Acceptance suites, JSON scenarios and reports.

pub mod criteria;
pub mod fixtures;
pub mod run;
pub mod scenario;

use thiserror::Error;

use crate::anomaly::AnomalyError;
use crate::oracle::OracleError;
use crate::symbol::SymbolError;

pub use criteria::{run_suite, suite, CriterionResult, CRITERIA, SUITES};
pub use run::{run_scenario, run_scenario_file, Report, TaskReport};
pub use scenario::{Scenario, TaskKind};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Anomaly(#[from] AnomalyError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("unknown name: {0}")]
    Resolution(String),
    #[error("invalid task: {0}")]
    Task(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
