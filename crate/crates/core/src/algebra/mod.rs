//! Exact arithmetic substrate.
//!
//! Everything in the rational layer (`CRational`, `FourierPoly`, `Mat`) is exact.
//! Floating point only enters through [`germ::LaurentGerm`] and the special
//! functions in [`special`].

pub mod crational;
pub mod fourier;
pub mod germ;
pub mod matrix;
pub mod quadrature;
pub mod special;

pub use crational::{rat, rat_from_f64, rat_int, rat_to_f64, CRational};
pub use fourier::FourierPoly;
pub use germ::{GermError, LaurentGerm};
pub use matrix::Mat;
pub use special::{hurwitz_zeta_germ, SpecialError};

/// Minimal commutative-ring-with-identity interface shared by the coefficient
/// types (matrix entries need not commute with each other).
pub trait Ring: Clone + PartialEq + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add_ref(&self, o: &Self) -> Self;
    fn sub_ref(&self, o: &Self) -> Self;
    fn mul_ref(&self, o: &Self) -> Self;
    fn neg_ref(&self) -> Self;
}
