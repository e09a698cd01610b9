//! Bernoulli numbers, Hurwitz zeta, digamma and the first Stieltjes constant.
//!
//! Floats are `f64`; Euler–Maclaurin is applied after shifting the argument
//! far enough right that the asymptotic tail converges to below `1e-16`
//! relative. Values at non-positive integers are available exactly through
//! Bernoulli polynomials.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::crational::{rat_int, rat_to_f64};
use super::LaurentGerm;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const BERNOULLI_CACHE: usize = 160;
const EM_TERMS: usize = 40;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecialError {
    #[error("Hurwitz parameter must be positive, got {0}")]
    NonPositiveParameter(String),
    #[error("scale must be positive")]
    ZeroScale,
}

fn bernoulli_table() -> &'static [BigRational] {
    static TABLE: OnceLock<Vec<BigRational>> = OnceLock::new();
    TABLE.get_or_init(|| {
        // Σ_{k<m} C(m+1,k) B_k = −(m+1) B_m, with B_1 = −1/2.
        let mut b: Vec<BigRational> = Vec::with_capacity(BERNOULLI_CACHE + 1);
        b.push(BigRational::one());
        for m in 1..=BERNOULLI_CACHE {
            let mut acc = BigRational::zero();
            let mut binom = BigInt::one();
            for (k, bk) in b.iter().enumerate() {
                acc += BigRational::from_integer(binom.clone()) * bk;
                binom = binom * BigInt::from(m + 1 - k) / BigInt::from(k + 1);
            }
            b.push(-acc / rat_int(m as i64 + 1));
        }
        b
    })
}

/// `B_n` with `B_1 = −1/2`.
pub fn bernoulli(n: usize) -> BigRational {
    assert!(n <= BERNOULLI_CACHE, "Bernoulli index {n} beyond cache");
    bernoulli_table()[n].clone()
}

/// Bernoulli polynomial `B_n(x) = Σ_k C(n,k) B_k x^{n−k}`.
pub fn bernoulli_poly(n: usize, x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    let mut binom = BigInt::one();
    for k in 0..=n {
        let term = BigRational::from_integer(binom.clone()) * bernoulli(k) * pow_rat(x, n - k);
        acc += term;
        binom = binom * BigInt::from(n - k) / BigInt::from(k + 1);
    }
    acc
}

fn pow_rat(x: &BigRational, e: usize) -> BigRational {
    let mut out = BigRational::one();
    for _ in 0..e {
        out *= x;
    }
    out
}

/// `H_n = Σ_{j=1}^n 1/j`.
pub fn harmonic(n: u64) -> BigRational {
    let mut h = BigRational::zero();
    for j in 1..=n {
        h += BigRational::new(BigInt::one(), BigInt::from(j));
    }
    h
}

/// Exact `ζ_H(−n, a) = −B_{n+1}(a)/(n+1)` for `n ≥ 0`.
pub fn hurwitz_zeta_nonpositive(n: u32, a: &BigRational) -> BigRational {
    -bernoulli_poly(n as usize + 1, a) / rat_int(n as i64 + 1)
}

/// Neumaier-compensated running sum.
#[derive(Default, Clone, Copy)]
struct Compensated {
    sum: f64,
    c: f64,
}

impl Compensated {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.c += (self.sum - t) + v;
        } else {
            self.c += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.c
    }
}

fn em_shift(s: f64, a: f64) -> usize {
    let target = 10.0 + s.abs();
    if a >= target {
        0
    } else {
        (target - a).ceil() as usize
    }
}

/// `s(s+1)···(s+m−1)` and its derivative in `s`.
fn poch_with_derivative(s: f64, m: usize) -> (f64, f64) {
    let mut p = 1.0;
    let mut dp = 0.0;
    for i in 0..m {
        let f = s + i as f64;
        dp = dp * f + p;
        p *= f;
    }
    (p, dp)
}

fn b2k_over_fact(k: usize) -> f64 {
    let mut f = BigInt::one();
    for i in 1..=(2 * k) {
        f *= BigInt::from(i);
    }
    rat_to_f64(&(bernoulli(2 * k) / BigRational::from_integer(f)))
}

/// `ζ_H(s, a)` and `∂_s ζ_H(s, a)` for real `s ≠ 1`, `a > 0`, with an
/// estimate of the absolute error.
pub fn hurwitz_zeta_with_derivative(s: f64, a: f64) -> (f64, f64, f64) {
    let n = em_shift(s, a);
    let mut z = Compensated::default();
    let mut dz = Compensated::default();
    let mut scale: f64 = 0.0;
    for j in 0..n {
        let x = a + j as f64;
        let t = x.powf(-s);
        z.add(t);
        dz.add(-x.ln() * t);
        scale += t.abs() * (1.0 + x.ln());
    }
    let x = a + n as f64;
    let lx = x.ln();
    let xs = x.powf(-s);
    let x1s = x.powf(1.0 - s);
    z.add(x1s / (s - 1.0));
    z.add(0.5 * xs);
    dz.add(-lx * x1s / (s - 1.0));
    dz.add(-x1s / ((s - 1.0) * (s - 1.0)));
    dz.add(-0.5 * lx * xs);
    scale += (x1s / (s - 1.0)).abs() * (1.0 + lx) + xs.abs() * (1.0 + lx);
    let mut tail = 0.0;
    for k in 1..=EM_TERMS {
        let (p, dp) = poch_with_derivative(s, 2 * k - 1);
        let c = b2k_over_fact(k);
        let xp = x.powf(-s - (2 * k) as f64 + 1.0);
        let t = c * p * xp;
        let dt = c * (dp - lx * p) * xp;
        z.add(t);
        dz.add(dt);
        tail = t.abs() + dt.abs();
        if tail < 1e-18 * (z.value().abs() + dz.value().abs() + 1e-300) && k > 2 {
            break;
        }
    }
    let err = 2.0 * f64::EPSILON * scale + 2.0 * tail;
    (z.value(), dz.value(), err)
}

pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    hurwitz_zeta_with_derivative(s, a).0
}

/// Digamma for `x > 0`: upward recurrence then the asymptotic series.
pub fn digamma(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 20.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let mut s = x.ln() - 0.5 / x;
    let x2 = 1.0 / (x * x);
    let mut xp = x2;
    for k in 1..=12 {
        let b = rat_to_f64(&bernoulli(2 * k));
        s -= b / (2.0 * k as f64) * xp;
        xp *= x2;
    }
    acc + s
}

/// Generalized Stieltjes constant `γ₁(a)`, defined by
/// `ζ_H(s,a) = 1/(s−1) − ψ(a) − γ₁(a)(s−1) + O((s−1)²)`.
pub fn stieltjes1(a: f64) -> f64 {
    let n = em_shift(1.0, a);
    let f = |x: f64| x.ln() / x;
    let mut s = 0.0;
    for j in 0..n {
        s += f(a + j as f64);
    }
    let x = a + n as f64;
    let lx = x.ln();
    s += -0.5 * lx * lx + 0.5 * f(x);
    // f^{(m)}(x) = (−1)^m m! x^{−m−1} (ln x − H_m)
    let mut h = 1.0;
    let mut fact = 1.0;
    for m in 1..=(2 * EM_TERMS - 1) {
        if m > 1 {
            h += 1.0 / m as f64;
            fact *= m as f64;
        }
        if m % 2 == 1 {
            let k = (m + 1) / 2;
            let deriv = -fact * x.powi(-(m as i32) - 1) * (lx - h);
            let t = b2k_over_fact(k) * deriv;
            s -= t;
            if t.abs() < 1e-18 && k > 2 {
                break;
            }
        }
    }
    s
}

/// Germ at `z = 0` of `z ↦ ζ_H(s0 + scale·z, a)`.
pub fn hurwitz_zeta_germ(s0: i64, a: &BigRational, scale: u32) -> Result<LaurentGerm, SpecialError> {
    if !a.is_positive() {
        return Err(SpecialError::NonPositiveParameter(a.to_string()));
    }
    if scale == 0 {
        return Err(SpecialError::ZeroScale);
    }
    let af = rat_to_f64(a);
    let sc = f64::from(scale);
    let re = |v: f64| Complex64::new(v, 0.0);
    if s0 == 1 {
        let psi = digamma(af);
        let g1 = stieltjes1(af);
        let err = 1e-14 * (1.0 + psi.abs() + g1.abs());
        return Ok(LaurentGerm::new(re(1.0 / sc), re(-psi), Some(re(-sc * g1)), err));
    }
    let (z, dz, err) = hurwitz_zeta_with_derivative(s0 as f64, af);
    let z = if s0 <= 0 {
        rat_to_f64(&hurwitz_zeta_nonpositive((-s0) as u32, a))
    } else {
        z
    };
    Ok(LaurentGerm::new(re(0.0), re(z), Some(re(sc * dz)), err * (1.0 + sc)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;
    use std::f64::consts::PI;

    #[test]
    fn bernoulli_numbers() {
        assert_eq!(bernoulli(1), rat(-1, 2));
        assert_eq!(bernoulli(2), rat(1, 6));
        assert_eq!(bernoulli(3), BigRational::zero());
        assert_eq!(bernoulli(12), rat(-691, 2730));
        assert_eq!(bernoulli_poly(2, &rat(1, 1)), rat(1, 6));
    }

    #[test]
    fn riemann_values() {
        assert!((hurwitz_zeta(0.0, 1.0) + 0.5).abs() < 1e-12);
        assert!((hurwitz_zeta(-1.0, 1.0) + 1.0 / 12.0).abs() < 1e-12);
        assert!((hurwitz_zeta(2.0, 1.0) - PI * PI / 6.0).abs() < 1e-12);
        assert!((hurwitz_zeta(2.0, 0.5) - PI * PI / 2.0).abs() < 1e-12);
        assert_eq!(hurwitz_zeta_nonpositive(1, &rat(1, 1)), rat(-1, 12));
    }

    #[test]
    fn germ_at_zero() {
        let g = hurwitz_zeta_germ(0, &rat(1, 1), 2).unwrap();
        assert!((g.const_.re + 0.5).abs() < 1e-13);
        assert!((g.linear.unwrap().re + (2.0 * PI).ln()).abs() < 1e-13);
        assert_eq!(g.pole.re, 0.0);
    }

    #[test]
    fn germ_at_pole() {
        let g = hurwitz_zeta_germ(1, &rat(1, 1), 2).unwrap();
        assert_eq!(g.pole.re, 0.5);
        assert!((g.const_.re - EULER_GAMMA).abs() < 1e-13);
        // γ₁ = −0.0728158454836767...
        assert!((g.linear.unwrap().re - 2.0 * 0.072_815_845_483_676_72).abs() < 1e-13);
    }

    #[test]
    fn germ_at_minus_one() {
        let g = hurwitz_zeta_germ(-1, &rat(1, 1), 2).unwrap();
        assert!((g.const_.re + 1.0 / 12.0).abs() < 1e-13);
        // ζ'(−1) = 1/12 − ln A
        assert!((g.linear.unwrap().re - 2.0 * -0.165_421_143_700_450_9).abs() < 1e-13);
    }

    #[test]
    fn rejects_nonpositive_parameter() {
        assert!(hurwitz_zeta_germ(0, &rat(0, 1), 1).is_err());
        assert!(hurwitz_zeta_germ(2, &rat(-1, 2), 1).is_err());
    }

    #[test]
    fn digamma_and_shifted_parameters() {
        assert!((digamma(1.0) + EULER_GAMMA).abs() < 1e-14);
        assert!((digamma(0.5) + EULER_GAMMA + 2.0 * 2f64.ln()).abs() < 1e-14);
        // ζ_H(s, a+1) = ζ_H(s, a) − a^{−s}
        for &s in &[3.0, -2.0, 0.5] {
            let a = 0.75;
            let lhs = hurwitz_zeta(s, a + 1.0);
            let rhs = hurwitz_zeta(s, a) - a.powf(-s);
            assert!((lhs - rhs).abs() < 1e-12, "s = {s}");
        }
        let g = stieltjes1(2.0) - (stieltjes1(1.0) - 0.0);
        // γ₁(a+1) = γ₁(a) − ln(a)/a, and ln(1)/1 = 0
        assert!(g.abs() < 1e-14);
        assert!((stieltjes1(3.0) - (stieltjes1(2.0) - 2f64.ln() / 2.0)).abs() < 1e-14);
    }
}
