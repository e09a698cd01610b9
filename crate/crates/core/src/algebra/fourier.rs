//! Finitely supported Fourier polynomials `x ↦ Σ_m c_m e^{imx}` on the circle.

use std::collections::BTreeMap;

use num_rational::BigRational;

use super::{CRational, Ring};

/// Finitely supported Fourier polynomial; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FourierPoly {
    coeffs: BTreeMap<i64, CRational>,
}

impl FourierPoly {
    pub fn zero() -> Self {
        FourierPoly::default()
    }

    pub fn constant(c: CRational) -> Self {
        Self::monomial(0, c)
    }

    /// `c·e^{imx}`.
    pub fn monomial(m: i64, c: CRational) -> Self {
        let mut coeffs = BTreeMap::new();
        if !num_traits::Zero::is_zero(&c) {
            coeffs.insert(m, c);
        }
        FourierPoly { coeffs }
    }

    pub fn from_coeffs<I: IntoIterator<Item = (i64, CRational)>>(it: I) -> Self {
        let mut p = FourierPoly::zero();
        for (m, c) in it {
            p.add_term(m, &c);
        }
        p
    }

    pub fn add_term(&mut self, m: i64, c: &CRational) {
        let entry = self.coeffs.entry(m).or_default();
        *entry += c;
        if num_traits::Zero::is_zero(entry) {
            self.coeffs.remove(&m);
        }
    }

    pub fn coeff(&self, m: i64) -> CRational {
        self.coeffs.get(&m).cloned().unwrap_or_default()
    }

    /// Mean value over the circle, `(1/2π)∫ f`.
    pub fn mean(&self) -> CRational {
        self.coeff(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &CRational)> {
        self.coeffs.iter().map(|(m, c)| (*m, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `Some(c)` when the polynomial is x-independent.
    pub fn as_constant(&self) -> Option<CRational> {
        match self.coeffs.len() {
            0 => Some(CRational::default()),
            1 => self.coeffs.get(&0).cloned(),
            _ => None,
        }
    }

    /// Largest `|m|` with a nonzero coefficient (0 for the zero polynomial).
    pub fn support_bound(&self) -> u64 {
        self.coeffs.keys().map(|m| m.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &CRational) -> Self {
        if num_traits::Zero::is_zero(c) {
            return FourierPoly::zero();
        }
        FourierPoly {
            coeffs: self.coeffs.iter().map(|(m, v)| (*m, v * c)).collect(),
        }
    }

    pub fn scale_rational(&self, r: &BigRational) -> Self {
        self.scale(&CRational::real(r.clone()))
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &o.coeffs {
            out.add_term(*m, c);
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &o.coeffs {
            out.add_term(*m, &-c);
        }
        out
    }

    /// Pointwise product, i.e. the discrete convolution of coefficients.
    pub fn convolve(&self, o: &Self) -> Self {
        let mut out = FourierPoly::zero();
        for (m, a) in &self.coeffs {
            for (n, b) in &o.coeffs {
                out.add_term(m + n, &(a * b));
            }
        }
        out
    }

    /// `D_x = -i d/dx`, so `D_x e^{imx} = m e^{imx}`.
    pub fn derivative_x(&self) -> Self {
        self.derivative_x_pow(1)
    }

    pub fn derivative_x_pow(&self, k: u32) -> Self {
        if k == 0 {
            return self.clone();
        }
        let mut out = FourierPoly::zero();
        for (m, c) in &self.coeffs {
            let f = CRational::from_int(m.pow(k));
            out.add_term(*m, &(c * &f));
        }
        out
    }

    pub fn conj_reflect(&self) -> Self {
        FourierPoly {
            coeffs: self.coeffs.iter().map(|(m, c)| (-m, c.conj())).collect(),
        }
    }
}

impl Ring for FourierPoly {
    fn zero() -> Self {
        FourierPoly::zero()
    }
    fn one() -> Self {
        FourierPoly::constant(CRational::from_int(1))
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn add_ref(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self.convolve(o)
    }
    fn neg_ref(&self) -> Self {
        self.scale(&CRational::from_int(-1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e(m: i64) -> FourierPoly {
        FourierPoly::monomial(m, CRational::from_int(1))
    }

    fn poly_strategy() -> impl Strategy<Value = FourierPoly> {
        prop::collection::vec((-3i64..=3, -5i64..=5, 1i64..=4, -5i64..=5), 0..5).prop_map(|v| {
            FourierPoly::from_coeffs(
                v.into_iter()
                    .map(|(m, a, d, b)| (m, CRational::from_parts(a, d, b, d))),
            )
        })
    }

    /// Coefficient-level triple sum, independent of `convolve`.
    fn triple_product(f: &FourierPoly, g: &FourierPoly, h: &FourierPoly) -> FourierPoly {
        let mut out = FourierPoly::zero();
        for (a, x) in f.iter() {
            for (b, y) in g.iter() {
                for (c, z) in h.iter() {
                    out.add_term(a + b + c, &(&(x * y) * z));
                }
            }
        }
        out
    }

    #[test]
    fn frequencies_cancel() {
        assert_eq!(e(1).convolve(&e(-1)), FourierPoly::one());
        assert!(e(4).convolve(&FourierPoly::zero()).is_zero());
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(e(3).derivative_x(), e(3).scale(&CRational::from_int(3)));
        assert!(FourierPoly::constant(CRational::from_int(5)).derivative_x().is_zero());
    }

    #[test]
    fn support_bound_is_additive_for_products() {
        let f = e(2).add(&e(-1));
        let g = e(3);
        assert_eq!(f.convolve(&g).support_bound(), 5);
    }

    proptest! {
        #[test]
        fn convolution_is_associative(f in poly_strategy(), g in poly_strategy(), h in poly_strategy()) {
            let lhs = f.convolve(&g).convolve(&h);
            let rhs = f.convolve(&g.convolve(&h));
            prop_assert_eq!(&lhs, &rhs);
            prop_assert_eq!(lhs, triple_product(&f, &g, &h));
        }

        #[test]
        fn leibniz_rule(f in poly_strategy(), g in poly_strategy()) {
            let lhs = f.convolve(&g).derivative_x();
            let rhs = f.derivative_x().convolve(&g).add(&f.convolve(&g.derivative_x()));
            prop_assert_eq!(lhs, rhs);
        }
    }
}
