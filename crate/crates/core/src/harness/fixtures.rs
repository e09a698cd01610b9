//! Fixture symbols and seeded random generators used by the suites.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{CRational, FourierPoly, Mat};
use crate::symbol::{ClassicalSymbol, HomTerm};

pub fn e(m: i64) -> FourierPoly {
    FourierPoly::monomial(m, CRational::from_int(1))
}

pub fn one() -> FourierPoly {
    e(0)
}

/// `f(x)·ξ^d` (sign-odd extension for odd `d`).
pub fn xi_term(d: i64, f: FourierPoly) -> ClassicalSymbol {
    let minus = if d.rem_euclid(2) == 0 { f.clone() } else { f.scale(&CRational::from_int(-1)) };
    ClassicalSymbol::monomial(d, f, minus)
}

/// `f(x)·|ξ|^d`.
pub fn abs_term(d: i64, f: FourierPoly) -> ClassicalSymbol {
    ClassicalSymbol::monomial(d, f.clone(), f)
}

pub fn sum(parts: &[ClassicalSymbol]) -> ClassicalSymbol {
    let rank = parts.first().map(|p| p.rank()).unwrap_or(1);
    parts
        .iter()
        .fold(ClassicalSymbol::zero(rank), |acc, p| acc.add(p).expect("ranks agree"))
}

fn small_rational(rng: &mut ChaCha8Rng) -> CRational {
    let re = rng.gen_range(-4..=4);
    let den = rng.gen_range(1..=3);
    let im = if rng.gen_bool(0.3) { rng.gen_range(-2..=2) } else { 0 };
    CRational::from_parts(re, den, im, 1)
}

fn random_fourier(rng: &mut ChaCha8Rng, support: i64) -> FourierPoly {
    let mut f = FourierPoly::zero();
    for m in -support..=support {
        if rng.gen_bool(0.5) {
            f.add_term(m, &small_rational(rng));
        }
    }
    if f.is_zero() {
        f.add_term(rng.gen_range(-support..=support), &CRational::from_int(1));
    }
    f
}

/// A rank-1 symbol of the given order with random x-dependent branches on
/// `depth` consecutive degrees, exact down to `order − depth`.
pub fn random_symbol(rng: &mut ChaCha8Rng, order: i64, depth: i64, support: i64) -> ClassicalSymbol {
    let mut terms = Vec::new();
    for d in (order - depth + 1..=order).rev() {
        if d != order && rng.gen_bool(0.4) {
            continue;
        }
        let plus = random_fourier(rng, support);
        let minus = random_fourier(rng, support);
        terms.push(HomTerm::new(d, Mat::scalar(1, plus), Mat::scalar(1, minus)));
    }
    ClassicalSymbol::from_terms(1, terms, order - depth).expect("rank 1")
}

/// Like [`random_symbol`] but with only non-negative degrees, so the symbol is
/// exact (polynomial on each branch).
pub fn random_polynomial_symbol(rng: &mut ChaCha8Rng, order: i64, support: i64) -> ClassicalSymbol {
    let mut terms = Vec::new();
    for d in (0..=order).rev() {
        if d != order && rng.gen_bool(0.4) {
            continue;
        }
        let plus = random_fourier(rng, support);
        let minus = random_fourier(rng, support);
        terms.push(HomTerm::new(d, Mat::scalar(1, plus), Mat::scalar(1, minus)));
    }
    ClassicalSymbol::from_terms(1, terms, crate::symbol::NEG_INF).expect("rank 1")
}
