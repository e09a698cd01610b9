//! Weights: elliptic symbols with positive scalar leading term, their parametrix
//! powers, and iterated commutators `ad_Q^j`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::classical::{commutator, compose, deg_add, ClassicalSymbol, HomTerm, NEG_INF};
use super::SymbolError;
use crate::algebra::{rat_to_f64, CRational, FourierPoly, Mat};

/// Diagonal spectral model `λ(n) = Σᵢ pᵢ|n|ⁱ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenvalueLaw {
    coeffs: Vec<BigRational>,
}

impl EigenvalueLaw {
    pub fn new(coeffs: Vec<BigRational>) -> Result<Self, SymbolError> {
        let mut coeffs = coeffs;
        while coeffs.len() > 1 && coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        let law = EigenvalueLaw { coeffs };
        let lead = law.coeffs.last().cloned().unwrap_or_default();
        if law.order() == 0 || !lead.is_positive() {
            return Err(SymbolError::NotElliptic(format!(
                "eigenvalue law needs positive order and positive leading coefficient, got {:?}",
                law.coeffs.iter().map(ToString::to_string).collect::<Vec<_>>()
            )));
        }
        // Beyond the Cauchy bound the leading term dominates.
        let bound = law
            .coeffs
            .iter()
            .map(|c| (c / &lead).abs())
            .fold(BigRational::zero(), |a, b| if b > a { b } else { a });
        let limit = rat_to_f64(&bound).ceil() as i64 + 1;
        for n in 0..=limit {
            if !law.eval_exact(n).is_positive() {
                return Err(SymbolError::NotElliptic(format!("λ({n}) is not positive")));
            }
        }
        Ok(law)
    }

    pub fn from_ints(p: &[i64]) -> Result<Self, SymbolError> {
        Self::new(p.iter().map(|&v| BigRational::from_integer(BigInt::from(v))).collect())
    }

    /// A law increment for affine families; no positivity is required.
    pub fn direction(coeffs: Vec<BigRational>) -> Self {
        EigenvalueLaw { coeffs }
    }

    /// `1 − Δ`, i.e. `λ(n) = 1 + n²`.
    pub fn laplacian() -> Self {
        Self::from_ints(&[1, 0, 1]).expect("valid law")
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn order(&self) -> u32 {
        (self.coeffs.len() - 1) as u32
    }

    pub fn leading(&self) -> &BigRational {
        self.coeffs.last().expect("nonempty")
    }

    pub fn eval_exact(&self, n: i64) -> BigRational {
        let m = BigRational::from_integer(BigInt::from(n.abs()));
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * &m + c;
        }
        acc
    }

    pub fn eval(&self, n: i64) -> f64 {
        let m = n.unsigned_abs() as f64;
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * m + c.to_f64().unwrap_or_else(|| rat_to_f64(c)))
    }

    /// `λ + t·μ` coefficientwise.
    pub fn affine(&self, direction: &EigenvalueLaw, t: &BigRational) -> Result<Self, SymbolError> {
        let len = self.coeffs.len().max(direction.coeffs.len());
        let get = |v: &[BigRational], i: usize| v.get(i).cloned().unwrap_or_default();
        Self::new(
            (0..len)
                .map(|i| get(&self.coeffs, i) + t * get(&direction.coeffs, i))
                .collect(),
        )
    }

    /// Symbol `Σ pᵢ|ξ|ⁱ` of rank `r`.
    pub fn symbol(&self, rank: usize) -> ClassicalSymbol {
        let terms = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let m = Mat::scalar(rank, FourierPoly::constant(CRational::real(p.clone())));
                HomTerm::new(i as i64, m.clone(), m)
            })
            .collect();
        ClassicalSymbol::from_terms(rank, terms, NEG_INF).expect("ranks agree")
    }
}

/// Elliptic weight `Q` of order `q > 0` with positive, x-independent scalar leading term.
#[derive(Clone, Debug, PartialEq)]
pub struct Weight {
    symbol: ClassicalSymbol,
    q: u32,
    law: Option<EigenvalueLaw>,
    lead_plus: CRational,
    lead_minus: CRational,
}

impl Weight {
    pub fn new(symbol: ClassicalSymbol, law: Option<EigenvalueLaw>) -> Result<Self, SymbolError> {
        let order = symbol.order();
        if order <= 0 {
            return Err(SymbolError::NotElliptic(format!("weight order {order} is not positive")));
        }
        let q = order as u32;
        let lead = |plus| symbol.constant_scalar_coefficient(order, plus);
        let (lead_plus, lead_minus) = match (lead(true), lead(false)) {
            (Some(p), Some(m)) if p.is_real() && m.is_real() && p.re.is_positive() && m.re.is_positive() => (p, m),
            _ => {
                return Err(SymbolError::NotElliptic(
                    "leading term must be a positive rational multiple of the identity, independent of x".into(),
                ))
            }
        };
        if let Some(l) = &law {
            if l.symbol(symbol.rank()) != symbol {
                return Err(SymbolError::LawMismatch(
                    "weight symbol must equal Σ pᵢ|ξ|ⁱ for its eigenvalue law".into(),
                ));
            }
        }
        Ok(Weight {
            symbol,
            q,
            law,
            lead_plus,
            lead_minus,
        })
    }

    pub fn from_law(law: EigenvalueLaw, rank: usize) -> Self {
        let symbol = law.symbol(rank);
        Weight::new(symbol, Some(law)).expect("law symbols are elliptic")
    }

    /// `1 − Δ` on the trivial line bundle.
    pub fn laplacian() -> Self {
        Self::from_law(EigenvalueLaw::laplacian(), 1)
    }

    pub fn symbol(&self) -> &ClassicalSymbol {
        &self.symbol
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn law(&self) -> Option<&EigenvalueLaw> {
        self.law.as_ref()
    }

    pub fn rank(&self) -> usize {
        self.symbol.rank()
    }

    /// Parametrix `Q^{-1}` exact on degrees `> floor`.
    pub fn inverse(&self, floor: i64) -> Result<ClassicalSymbol, SymbolError> {
        let q = i64::from(self.q);
        let certified = deg_add(self.symbol.valid_down_to(), -2 * q);
        if floor < certified || floor <= NEG_INF {
            return Err(SymbolError::FloorUnreachable {
                requested: floor,
                certified: certified.max(NEG_INF + 1),
            });
        }
        let r = self.rank();
        let inv_plus = self.lead_plus.inv().expect("positive");
        let inv_minus = self.lead_minus.inv().expect("positive");
        let zero = Mat::<FourierPoly>::zeros(r);
        let q_term = |j: i64| -> HomTerm {
            self.symbol
                .term(q - j)
                .cloned()
                .unwrap_or_else(|| HomTerm::new(q - j, zero.clone(), zero.clone()))
        };
        let mut b: Vec<HomTerm> = Vec::new();
        let mut m: i64 = 0;
        while -q - m > floor {
            let mut plus = Mat::zeros(r);
            let mut minus = Mat::zeros(r);
            if m == 0 {
                plus = Mat::identity(r);
                minus = Mat::identity(r);
            }
            for (l, bl) in b.iter().enumerate() {
                let l = l as i64;
                let mut db = bl.clone();
                let mut fact = BigRational::from_integer(BigInt::from(1));
                for alpha in 0..=(m - l) {
                    if alpha > 0 {
                        db = db.derivative_x();
                        fact *= BigRational::from_integer(BigInt::from(alpha));
                    }
                    let mut qa = q_term(m - l - alpha);
                    for _ in 0..alpha {
                        qa = qa.derivative_xi();
                    }
                    if qa.is_zero() || db.is_zero() {
                        continue;
                    }
                    let c = CRational::real(fact.recip());
                    plus = plus.sub(&qa.plus.mul(&db.plus).map(|f| f.scale(&c)));
                    minus = minus.sub(&qa.minus.mul(&db.minus).map(|f| f.scale(&c)));
                }
            }
            let plus = plus.map(|f| f.scale(&inv_plus));
            let minus = minus.map(|f| f.scale(&inv_minus));
            b.push(HomTerm::new(-q - m, plus, minus));
            m += 1;
        }
        ClassicalSymbol::from_terms(r, b, floor)
    }

    /// `Q^{-k}` exact on degrees `> floor`; `k = 0` gives the identity.
    pub fn power_neg(&self, k: u32, floor: i64) -> Result<ClassicalSymbol, SymbolError> {
        if k == 0 {
            return Ok(ClassicalSymbol::identity(self.rank()));
        }
        let q = i64::from(self.q);
        let k = i64::from(k);
        let inv = self.inverse(floor + (k - 1) * q)?;
        let mut p = inv.clone();
        for j in 2..=k {
            p = compose(&inv, &p, floor + (k - j) * q)?;
        }
        Ok(p)
    }

    /// `A^{(j)} = ad_Q^j(A)` exact on degrees `> floor`.
    pub fn ad_power(&self, a: &ClassicalSymbol, j: u32, floor: i64) -> Result<ClassicalSymbol, SymbolError> {
        let q = i64::from(self.q);
        let mut floors: Vec<i64> = (0..=j).map(|i| floor - i64::from(j - i) * q).collect();
        if floor <= NEG_INF {
            floors.iter_mut().for_each(|f| *f = NEG_INF);
        }
        let mut x = a.clone();
        if x.valid_down_to() > floors[0] {
            return Err(SymbolError::FloorUnreachable {
                requested: floors[0],
                certified: x.valid_down_to(),
            });
        }
        if j == 0 {
            return Ok(x.truncate(floor));
        }
        x = x.truncate(floors[0]);
        for f in floors.iter().skip(1) {
            if x.is_zero() && x.is_exact() {
                return Ok(x);
            }
            x = commutator(&self.symbol, &x, *f)?;
        }
        Ok(x)
    }

    /// `Q + t·direction`.
    pub fn affine(&self, direction: &ClassicalSymbol, direction_law: Option<&EigenvalueLaw>, t: &BigRational) -> Result<Weight, SymbolError> {
        let sym = self.symbol.add(&direction.scale(&CRational::real(t.clone())))?;
        let law = match (&self.law, direction_law) {
            (Some(l), Some(d)) => Some(l.affine(d, t)?),
            (Some(_), None) if direction.is_zero() => self.law.clone(),
            _ => None,
        };
        Weight::new(sym, law)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(m: i64) -> FourierPoly {
        FourierPoly::monomial(m, CRational::from_int(1))
    }

    fn q() -> Weight {
        Weight::laplacian()
    }

    #[test]
    fn parametrix_series() {
        // (1+ξ²)^{-1} = |ξ|^{-2} − |ξ|^{-4} + |ξ|^{-6} − …
        let inv = q().inverse(-9).unwrap();
        let expect = ClassicalSymbol::abs_xi_power(-2)
            .sub(&ClassicalSymbol::abs_xi_power(-4))
            .unwrap()
            .add(&ClassicalSymbol::abs_xi_power(-6))
            .unwrap()
            .sub(&ClassicalSymbol::abs_xi_power(-8))
            .unwrap()
            .truncate(-9);
        assert_eq!(inv, expect);
        let id = compose(q().symbol(), &inv, -7).unwrap();
        assert_eq!(id, ClassicalSymbol::identity(1).truncate(-7));
    }

    #[test]
    fn parametrix_with_x_dependence() {
        let sym = q()
            .symbol()
            .add(&ClassicalSymbol::monomial(1, e(1), e(-1)))
            .unwrap()
            .add(&ClassicalSymbol::multiplier(e(2).scale(&CRational::from_frac(1, 3))))
            .unwrap();
        let w = Weight::new(sym.clone(), None).unwrap();
        let inv = w.inverse(-8).unwrap();
        assert_eq!(compose(&sym, &inv, -6).unwrap(), ClassicalSymbol::identity(1).truncate(-6));
        assert_eq!(compose(&inv, &sym, -6).unwrap(), ClassicalSymbol::identity(1).truncate(-6));
    }

    #[test]
    fn square_of_parametrix() {
        let p = q().power_neg(2, -7).unwrap();
        let expect = ClassicalSymbol::abs_xi_power(-4)
            .sub(&ClassicalSymbol::abs_xi_power(-6).scale(&CRational::from_int(2)))
            .unwrap()
            .truncate(-7);
        assert_eq!(p, expect);
        let back = compose(&compose(q().symbol(), q().symbol(), NEG_INF).unwrap(), &p, -3).unwrap();
        assert_eq!(back, ClassicalSymbol::identity(1).truncate(-3));
        assert_eq!(q().power_neg(1, -7).unwrap(), q().inverse(-7).unwrap());
    }

    #[test]
    fn commutator_examples() {
        let a = ClassicalSymbol::multiplier(e(1));
        let ad = q().ad_power(&a, 1, NEG_INF).unwrap();
        // [1+ξ², e^{ix}] = e^{ix}(2ξ + 1)
        let expect = ClassicalSymbol::monomial(1, e(1).scale(&CRational::from_int(2)), e(1).scale(&CRational::from_int(-2)))
            .add(&a)
            .unwrap();
        assert_eq!(ad, expect);
        assert_eq!(q().ad_power(&a, 0, NEG_INF).unwrap(), a);
        for j in 1..4 {
            assert!(q().ad_power(&ClassicalSymbol::abs_xi_power(1), j, -5).unwrap().is_zero());
        }
        let a2 = q().ad_power(&a, 3, NEG_INF).unwrap();
        assert!(a2.order() <= 3);
    }

    #[test]
    fn rejects_bad_weights() {
        assert!(Weight::new(ClassicalSymbol::xi_power(1), None).is_err());
        assert!(Weight::new(ClassicalSymbol::monomial(2, e(1), e(1)), None).is_err());
        assert!(EigenvalueLaw::from_ints(&[-1, 0, 1]).is_err());
        assert!(EigenvalueLaw::from_ints(&[1, -3, 1]).is_err());
        assert!(EigenvalueLaw::from_ints(&[3, -3, 1]).is_ok());
        let law = EigenvalueLaw::laplacian();
        assert!(Weight::new(ClassicalSymbol::abs_xi_power(2), Some(law)).is_err());
    }
}
