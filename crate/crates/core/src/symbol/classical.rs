//! Truncated classical symbols on the circle.
//!
//! A homogeneous term of degree `d` is stored as the pair `(f⁺, f⁻)` meaning
//! `f⁺(x)·ξ^d` on `ξ > 0` and `f⁻(x)·|ξ|^d` on `ξ < 0`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::SymbolError;
use crate::algebra::{CRational, FourierPoly, Mat};

/// Degree sentinel for "exact to all depths" and for the order of the zero symbol.
pub const NEG_INF: i64 = i64::MIN / 4;

/// Degree sum that keeps `NEG_INF` absorbing.
pub fn deg_add(a: i64, b: i64) -> i64 {
    if a <= NEG_INF || b <= NEG_INF {
        NEG_INF
    } else {
        a + b
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HomTerm {
    pub degree: i64,
    pub plus: Mat<FourierPoly>,
    pub minus: Mat<FourierPoly>,
}

impl HomTerm {
    pub fn new(degree: i64, plus: Mat<FourierPoly>, minus: Mat<FourierPoly>) -> Self {
        assert_eq!(plus.dim(), minus.dim(), "branch ranks differ");
        HomTerm {
            degree,
            plus,
            minus,
        }
    }

    pub fn scalar(degree: i64, plus: FourierPoly, minus: FourierPoly) -> Self {
        HomTerm::new(degree, Mat::from_rows(1, vec![plus]), Mat::from_rows(1, vec![minus]))
    }

    pub fn rank(&self) -> usize {
        self.plus.dim()
    }

    pub fn is_zero(&self) -> bool {
        self.plus.is_zero() && self.minus.is_zero()
    }

    /// `∂_ξ`: `(f⁺, f⁻)` at degree `d` becomes `(d·f⁺, −d·f⁻)` at degree `d−1`.
    pub fn derivative_xi(&self) -> HomTerm {
        let d = CRational::from_int(self.degree);
        let scale = |m: &Mat<FourierPoly>, c: &CRational| m.map(|f| f.scale(c));
        HomTerm {
            degree: self.degree - 1,
            plus: scale(&self.plus, &d),
            minus: scale(&self.minus, &-&d),
        }
    }

    pub fn derivative_x(&self) -> HomTerm {
        HomTerm {
            degree: self.degree,
            plus: self.plus.map(FourierPoly::derivative_x),
            minus: self.minus.map(FourierPoly::derivative_x),
        }
    }

    fn map_both<F: Fn(&FourierPoly) -> FourierPoly>(&self, f: F) -> HomTerm {
        HomTerm {
            degree: self.degree,
            plus: self.plus.map(&f),
            minus: self.minus.map(&f),
        }
    }

    fn is_x_independent(&self) -> bool {
        self.plus
            .entries()
            .iter()
            .chain(self.minus.entries())
            .all(|f| f.as_constant().is_some())
    }

    fn max_frequency(&self) -> u64 {
        self.plus
            .entries()
            .iter()
            .chain(self.minus.entries())
            .map(FourierPoly::support_bound)
            .max()
            .unwrap_or(0)
    }
}

/// Classical symbol known exactly on all degrees `> valid_down_to`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalSymbol {
    rank: usize,
    terms: BTreeMap<i64, HomTerm>,
    valid_down_to: i64,
}

fn falling_factorial(d: i64, k: u32) -> BigInt {
    (0..k as i64).fold(BigInt::one(), |acc, i| acc * BigInt::from(d - i))
}

fn factorial(k: u32) -> BigInt {
    (1..=k as u64).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

impl ClassicalSymbol {
    /// Builds a symbol from terms; zero terms and terms at or below the floor are dropped,
    /// repeated degrees are summed.
    pub fn from_terms(rank: usize, terms: Vec<HomTerm>, valid_down_to: i64) -> Result<Self, SymbolError> {
        let mut out = ClassicalSymbol::zero(rank);
        out.valid_down_to = valid_down_to;
        for t in terms {
            if t.rank() != rank {
                return Err(SymbolError::RankMismatch(rank, t.rank()));
            }
            if t.degree > valid_down_to {
                out.accumulate(t);
            }
        }
        Ok(out)
    }

    pub fn zero(rank: usize) -> Self {
        ClassicalSymbol {
            rank,
            terms: BTreeMap::new(),
            valid_down_to: NEG_INF,
        }
    }

    pub fn identity(rank: usize) -> Self {
        let id = Mat::identity(rank);
        ClassicalSymbol::zero(rank).with_term(HomTerm::new(0, id.clone(), id))
    }

    /// Scalar `f⁺ξ^d` / `f⁻|ξ|^d`.
    pub fn monomial(degree: i64, plus: FourierPoly, minus: FourierPoly) -> Self {
        ClassicalSymbol::zero(1).with_term(HomTerm::scalar(degree, plus, minus))
    }

    /// `ξ^d` (the minus branch picks up `(−1)^d`).
    pub fn xi_power(d: i64) -> Self {
        let sign = if d.rem_euclid(2) == 0 { 1 } else { -1 };
        Self::monomial(
            d,
            FourierPoly::constant(CRational::from_int(1)),
            FourierPoly::constant(CRational::from_int(sign)),
        )
    }

    /// `|ξ|^d`.
    pub fn abs_xi_power(d: i64) -> Self {
        let one = FourierPoly::constant(CRational::from_int(1));
        Self::monomial(d, one.clone(), one)
    }

    /// Multiplication operator by `f(x)`.
    pub fn multiplier(f: FourierPoly) -> Self {
        Self::monomial(0, f.clone(), f)
    }

    fn with_term(mut self, t: HomTerm) -> Self {
        self.accumulate(t);
        self
    }

    fn accumulate(&mut self, t: HomTerm) {
        let d = t.degree;
        let merged = match self.terms.remove(&d) {
            Some(old) => HomTerm {
                degree: d,
                plus: old.plus.add(&t.plus),
                minus: old.minus.add(&t.minus),
            },
            None => t,
        };
        if !merged.is_zero() {
            self.terms.insert(d, merged);
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Top degree with a nonzero term, `NEG_INF` for the zero symbol.
    pub fn order(&self) -> i64 {
        self.terms.keys().next_back().copied().unwrap_or(NEG_INF)
    }

    pub fn valid_down_to(&self) -> i64 {
        self.valid_down_to
    }

    pub fn is_exact(&self) -> bool {
        self.valid_down_to <= NEG_INF
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term(&self, degree: i64) -> Option<&HomTerm> {
        self.terms.get(&degree)
    }

    /// Terms in descending degree.
    pub fn terms(&self) -> impl Iterator<Item = &HomTerm> {
        self.terms.values().rev()
    }

    pub fn is_x_independent(&self) -> bool {
        self.terms.values().all(HomTerm::is_x_independent)
    }

    /// Largest Fourier frequency over all coefficients.
    pub fn max_frequency(&self) -> u64 {
        self.terms.values().map(HomTerm::max_frequency).max().unwrap_or(0)
    }

    /// Forgets every degree `≤ floor`.
    pub fn truncate(&self, floor: i64) -> Self {
        let mut out = self.clone();
        if floor > out.valid_down_to {
            out.valid_down_to = floor;
            out.terms.retain(|d, _| *d > floor);
        }
        out
    }

    fn check_rank(&self, o: &Self) -> Result<(), SymbolError> {
        if self.rank != o.rank {
            return Err(SymbolError::RankMismatch(self.rank, o.rank));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self, SymbolError> {
        self.check_rank(o)?;
        let floor = self.valid_down_to.max(o.valid_down_to);
        let mut out = self.truncate(floor);
        for t in o.terms.values() {
            if t.degree > floor {
                out.accumulate(t.clone());
            }
        }
        Ok(out)
    }

    pub fn sub(&self, o: &Self) -> Result<Self, SymbolError> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&CRational::from_int(-1))
    }

    pub fn scale(&self, c: &CRational) -> Self {
        let mut out = ClassicalSymbol::zero(self.rank);
        out.valid_down_to = self.valid_down_to;
        for t in self.terms.values() {
            out.accumulate(t.map_both(|f| f.scale(c)));
        }
        out
    }

    pub fn derivative_xi(&self) -> Self {
        let mut out = ClassicalSymbol::zero(self.rank);
        out.valid_down_to = deg_add(self.valid_down_to, -1);
        for t in self.terms.values() {
            out.accumulate(t.derivative_xi());
        }
        out
    }

    pub fn derivative_x(&self) -> Self {
        let mut out = ClassicalSymbol::zero(self.rank);
        out.valid_down_to = self.valid_down_to;
        for t in self.terms.values() {
            out.accumulate(t.derivative_x());
        }
        out
    }

    /// Wodzicki residue: the mean of `tr(f⁺₋₁ + f⁻₋₁)`.
    pub fn residue(&self) -> Result<CRational, SymbolError> {
        if self.valid_down_to >= -1 {
            return Err(SymbolError::InsufficientDepth {
                valid_down_to: self.valid_down_to,
            });
        }
        Ok(match self.terms.get(&-1) {
            Some(t) => {
                let mut acc = CRational::default();
                for i in 0..self.rank {
                    acc += &t.plus.get(i, i).mean();
                    acc += &t.minus.get(i, i).mean();
                }
                acc
            }
            None => CRational::default(),
        })
    }

    /// Coefficient of `ξ^d` on the given branch as an x-independent rational;
    /// `None` when x-dependent or non-scalar.
    pub fn constant_scalar_coefficient(&self, degree: i64, plus_branch: bool) -> Option<CRational> {
        match self.terms.get(&degree) {
            None => Some(CRational::default()),
            Some(t) => {
                let m = if plus_branch { &t.plus } else { &t.minus };
                m.as_scalar().and_then(|f| f.as_constant())
            }
        }
    }
}

/// Exact-to-floor composition `σ(AB) = Σ_α (1/α!) ∂_ξ^α σ_A · D_x^α σ_B`.
///
/// The result carries every degree `> floor`. Fails when the operands'
/// truncations do not determine those degrees, or when `floor = NEG_INF`
/// and the expansion does not terminate.
pub fn compose(a: &ClassicalSymbol, b: &ClassicalSymbol, floor: i64) -> Result<ClassicalSymbol, SymbolError> {
    a.check_rank(b)?;
    let certified = deg_add(a.valid_down_to, b.order()).max(deg_add(a.order(), b.valid_down_to));
    if floor < certified {
        return Err(SymbolError::FloorUnreachable {
            requested: floor,
            certified,
        });
    }
    let mut out = ClassicalSymbol::zero(a.rank);
    out.valid_down_to = floor;
    if a.is_zero() || b.is_zero() {
        return Ok(out);
    }
    let b_const = b.is_x_independent();
    let a_polynomial = a.terms.keys().all(|d| *d >= 0);
    if floor <= NEG_INF && !(b_const || a_polynomial) {
        return Err(SymbolError::FloorUnreachable {
            requested: floor,
            certified: NEG_INF + 1,
        });
    }
    let top = a.order() + b.order();
    let a_max = a.order();
    let mut db = b.clone();
    let mut alpha: u32 = 0;
    loop {
        if floor > NEG_INF && top - i64::from(alpha) <= floor {
            break;
        }
        if alpha > 0 && b_const {
            break;
        }
        if a_polynomial && i64::from(alpha) > a_max {
            break;
        }
        if db.is_zero() {
            break;
        }
        let fact = BigRational::from_integer(factorial(alpha));
        let minus_sign = if alpha % 2 == 0 { 1 } else { -1 };
        for ta in a.terms.values() {
            let ff = falling_factorial(ta.degree, alpha);
            if ff.is_zero() {
                continue;
            }
            let coef = CRational::real(BigRational::from_integer(ff) / &fact);
            let coef_minus = coef.scale(&BigRational::from_integer(BigInt::from(minus_sign)));
            for tb in db.terms.values() {
                let d = ta.degree + tb.degree - i64::from(alpha);
                if d <= floor {
                    continue;
                }
                let plus = ta.plus.mul(&tb.plus).map(|f| f.scale(&coef));
                let minus = ta.minus.mul(&tb.minus).map(|f| f.scale(&coef_minus));
                out.accumulate(HomTerm::new(d, plus, minus));
            }
        }
        db = db.derivative_x();
        alpha += 1;
    }
    Ok(out)
}

/// `[a, b] = ab − ba` to the given floor.
pub fn commutator(a: &ClassicalSymbol, b: &ClassicalSymbol, floor: i64) -> Result<ClassicalSymbol, SymbolError> {
    compose(a, b, floor)?.sub(&compose(b, a, floor)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(m: i64) -> FourierPoly {
        FourierPoly::monomial(m, CRational::from_int(1))
    }

    #[test]
    fn leibniz_example() {
        // ξ ∘ e^{ix} = e^{ix}(ξ + 1)
        let r = compose(&ClassicalSymbol::xi_power(1), &ClassicalSymbol::multiplier(e(1)), NEG_INF).unwrap();
        let expect = ClassicalSymbol::monomial(1, e(1), e(1).scale(&CRational::from_int(-1)))
            .add(&ClassicalSymbol::multiplier(e(1)))
            .unwrap();
        assert_eq!(r, expect);
        assert!(r.is_exact());
    }

    #[test]
    fn identity_is_neutral() {
        let a = ClassicalSymbol::monomial(2, e(1), e(-2)).add(&ClassicalSymbol::abs_xi_power(-1)).unwrap();
        let id = ClassicalSymbol::identity(1);
        assert_eq!(compose(&id, &a, NEG_INF).unwrap(), a);
        assert_eq!(compose(&a, &id, NEG_INF).unwrap(), a);
    }

    #[test]
    fn residue_examples() {
        assert_eq!(ClassicalSymbol::abs_xi_power(-1).residue().unwrap(), CRational::from_int(2));
        assert_eq!(ClassicalSymbol::xi_power(-1).residue().unwrap(), CRational::default());
        assert_eq!(ClassicalSymbol::abs_xi_power(-3).residue().unwrap(), CRational::default());
        let shallow = ClassicalSymbol::abs_xi_power(0).truncate(-1);
        assert!(matches!(shallow.residue(), Err(SymbolError::InsufficientDepth { .. })));
    }

    #[test]
    fn branch_derivative_sign() {
        let t = ClassicalSymbol::abs_xi_power(2).derivative_xi();
        // ∂_ξ|ξ|² = 2ξ: +2 on ξ>0, −2|ξ| on ξ<0
        let h = t.term(1).unwrap();
        assert_eq!(h.plus.get(0, 0).mean(), CRational::from_int(2));
        assert_eq!(h.minus.get(0, 0).mean(), CRational::from_int(-2));
        assert_eq!(t, ClassicalSymbol::xi_power(1).scale(&CRational::from_int(2)));
    }

    #[test]
    fn unreachable_floor() {
        let a = ClassicalSymbol::abs_xi_power(1).truncate(-2);
        let b = ClassicalSymbol::multiplier(e(1));
        assert!(compose(&a, &b, -2).is_ok());
        assert!(matches!(compose(&a, &b, -3), Err(SymbolError::FloorUnreachable { .. })));
        // negative degrees against x-dependence never terminate
        let c = ClassicalSymbol::abs_xi_power(-1);
        assert!(compose(&c, &b, NEG_INF).is_err());
        assert!(compose(&c, &b, -6).is_ok());
    }
}
