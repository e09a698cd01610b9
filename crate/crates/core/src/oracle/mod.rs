//! Independent spectral realization: banded Fourier matrices, heat and JLO traces,
//! zeta-regularized traces for diagonal weights.

pub mod checks;
pub mod heat;
pub mod operator;
pub mod ratfn;
pub mod zeta;

use thiserror::Error;

pub use heat::{heat_trace, jlo_value, simplex_heat_kernel, HeatValue};
pub use operator::{Band, SpectralOperator};
pub use ratfn::{Poly, RatFn};
pub use zeta::{weighted_trace, zeta_trace_germ, ZetaGerm};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("operator has no rational tail rule")]
    TailNotRational,
    #[error("tail rule has a pole at m = {0}")]
    TailPole(i64),
    #[error("rank mismatch")]
    RankMismatch,
    #[error("radius {radius} too small for total bandwidth {bandwidth}")]
    RadiusTooSmall { radius: i64, bandwidth: i64 },
    #[error("heat parameter must be positive")]
    NonPositiveTime,
}
