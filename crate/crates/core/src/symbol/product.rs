//! Products of operands, their iterated commutators and negative weight powers,
//! materialized to a requested floor with per-factor floors chosen automatically.

use std::collections::HashMap;

use super::classical::{compose, ClassicalSymbol, NEG_INF};
use super::weight::Weight;
use super::SymbolError;
use crate::algebra::CRational;

/// One factor of a product: operand `idx` under `ad_Q^j`, or `Q^{-k}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Factor {
    Op(usize, u32),
    WeightNeg(u32),
}

/// Caches `ad_Q^j(A_i)` and `Q^{-k}` across many products over a fixed operand list.
pub struct Materializer<'a> {
    weight: &'a Weight,
    operands: &'a [ClassicalSymbol],
    cache: HashMap<Factor, ClassicalSymbol>,
}

impl<'a> Materializer<'a> {
    pub fn new(weight: &'a Weight, operands: &'a [ClassicalSymbol]) -> Self {
        Materializer {
            weight,
            operands,
            cache: HashMap::new(),
        }
    }

    pub fn weight(&self) -> &Weight {
        self.weight
    }

    /// Upper bound on the order of a factor (`NEG_INF` when known to vanish).
    pub fn order_bound(&self, f: Factor) -> i64 {
        let q = i64::from(self.weight.order());
        match f {
            Factor::Op(i, j) => {
                let a = &self.operands[i];
                if a.is_zero() {
                    return NEG_INF;
                }
                if let Some(s) = self.cache.get(&f) {
                    if s.is_zero() && s.is_exact() {
                        return NEG_INF;
                    }
                }
                a.order() + i64::from(j) * (q - 1)
            }
            Factor::WeightNeg(k) => -i64::from(k) * q,
        }
    }

    /// The factor exact on degrees `> floor`.
    pub fn factor(&mut self, f: Factor, floor: i64) -> Result<ClassicalSymbol, SymbolError> {
        if let Some(s) = self.cache.get(&f) {
            if s.valid_down_to() <= floor {
                return Ok(s.truncate(floor));
            }
        }
        let s = match f {
            Factor::Op(i, j) => self.weight.ad_power(&self.operands[i], j, floor)?,
            Factor::WeightNeg(k) => self.weight.power_neg(k, floor)?,
        };
        self.cache.insert(f, s.clone());
        Ok(s)
    }

    /// Product of the factors, exact on degrees `> floor`.
    pub fn product(&mut self, factors: &[Factor], floor: i64) -> Result<ClassicalSymbol, SymbolError> {
        let rank = self.weight.rank();
        let bounds: Vec<i64> = factors.iter().map(|f| self.order_bound(*f)).collect();
        if bounds.iter().any(|b| *b <= NEG_INF) {
            return Ok(ClassicalSymbol::zero(rank).truncate(floor));
        }
        let total: i64 = bounds.iter().sum();
        let mut syms = Vec::with_capacity(factors.len());
        for (f, b) in factors.iter().zip(&bounds) {
            let s = self.factor(*f, floor - (total - b))?;
            if s.is_zero() && s.is_exact() {
                return Ok(ClassicalSymbol::zero(rank).truncate(floor));
            }
            syms.push(s);
        }
        let mut acc = ClassicalSymbol::identity(rank);
        let mut remaining = total;
        for (s, b) in syms.iter().zip(&bounds) {
            remaining -= b;
            acc = compose(&acc, s, floor - remaining)?;
        }
        Ok(acc)
    }

    /// Wodzicki residue of the product.
    pub fn residue(&mut self, factors: &[Factor]) -> Result<CRational, SymbolError> {
        let bounds: i64 = factors
            .iter()
            .map(|f| self.order_bound(*f))
            .fold(0, |a, b| if a <= NEG_INF || b <= NEG_INF { NEG_INF } else { a + b });
        if bounds < -1 {
            return Ok(CRational::default());
        }
        self.product(factors, -2)?.residue()
    }

    /// Residue computed from the materialized product even when the order bound
    /// already forces zero.
    pub fn residue_materialized(&mut self, factors: &[Factor]) -> Result<CRational, SymbolError> {
        self.product(factors, -2)?.residue()
    }
}

/// One-shot product of operand factors against a weight.
pub fn materialize(
    weight: &Weight,
    operands: &[ClassicalSymbol],
    factors: &[Factor],
    floor: i64,
) -> Result<ClassicalSymbol, SymbolError> {
    Materializer::new(weight, operands).product(factors, floor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FourierPoly;
    use crate::symbol::commutator;

    fn e(m: i64) -> FourierPoly {
        FourierPoly::monomial(m, CRational::from_int(1))
    }

    #[test]
    fn residue_of_abs_xi_times_inverse() {
        let q = Weight::laplacian();
        let ops = vec![ClassicalSymbol::abs_xi_power(1)];
        let mut m = Materializer::new(&q, &ops);
        let r = m.residue(&[Factor::Op(0, 0), Factor::WeightNeg(1)]).unwrap();
        assert_eq!(r, CRational::from_int(2));
    }

    #[test]
    fn product_matches_manual_composition() {
        let q = Weight::laplacian();
        let a = ClassicalSymbol::monomial(1, e(1), e(1).scale(&CRational::from_int(-1)));
        let b = ClassicalSymbol::multiplier(e(-1).add(&e(2)));
        let ops = vec![a.clone(), b.clone()];
        let p = materialize(&q, &ops, &[Factor::Op(0, 1), Factor::Op(1, 0), Factor::WeightNeg(2)], -4).unwrap();
        let a1 = commutator(q.symbol(), &a, NEG_INF).unwrap();
        let manual = compose(&compose(&a1, &b, NEG_INF).unwrap(), &q.power_neg(2, -10).unwrap(), -4).unwrap();
        assert_eq!(p, manual);
    }
}
