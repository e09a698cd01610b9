//! Weighted trace cochains `χ_n^Q`, their residue corrections, the coboundary
//! anomaly of even cochains and the Hochschild coboundary.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use serde::Serialize;

use super::multiindex::{simplex_constant, CoefficientConvention, MultiIndex};
use super::AnomalyError;
use crate::algebra::{rat_to_f64, CRational};
use crate::oracle::{weighted_trace, SpectralOperator};
use crate::symbol::{compose, ClassicalSymbol, Factor, Materializer, Weight, NEG_INF};

/// Floor used when an exact product symbol cannot be formed.
const PRODUCT_FLOOR: i64 = -60;

/// One row of an audit table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TermRow {
    pub k: Vec<u32>,
    pub j: Option<usize>,
    pub coefficient: String,
    pub residue: String,
    pub contribution: String,
}

/// An exact residue sum together with its term table.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub value: CRational,
    pub terms: Vec<TermRow>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CochainValue {
    pub value: Complex64,
    pub err: f64,
    pub exact_part: Option<CRational>,
}

impl CochainValue {
    pub fn exact(v: CRational) -> Self {
        CochainValue {
            value: v.to_c64(),
            err: 0.0,
            exact_part: Some(v),
        }
    }
}

/// Values a cochain may take: enough structure for alternating sums.
pub trait CochainField: Clone {
    fn zero() -> Self;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
}

impl CochainField for CRational {
    fn zero() -> Self {
        CRational::default()
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
}

impl CochainField for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
}

impl CochainField for CochainValue {
    fn zero() -> Self {
        CochainValue::exact(CRational::default())
    }
    fn plus(&self, o: &Self) -> Self {
        CochainValue {
            value: self.value + o.value,
            err: self.err + o.err,
            exact_part: self.exact_part.as_ref().zip(o.exact_part.as_ref()).map(|(a, b)| a + b),
        }
    }
    fn minus(&self, o: &Self) -> Self {
        CochainValue {
            value: self.value - o.value,
            err: self.err + o.err,
            exact_part: self.exact_part.as_ref().zip(o.exact_part.as_ref()).map(|(a, b)| a - b),
        }
    }
}

/// `bχ(A₀,…,A_{n+1}) = Σ_j (−1)^j χ(…, A_jA_{j+1}, …) + (−1)^{n+1} χ(A_{n+1}A₀, A₁, …, A_n)`.
pub fn hochschild_b<T: Clone, V: CochainField, E>(
    chi: &dyn Fn(&[T]) -> Result<V, E>,
    args: &[T],
    mul: &dyn Fn(&T, &T) -> Result<T, E>,
) -> Result<V, E> {
    let m = args.len();
    if m < 2 {
        return Ok(V::zero());
    }
    let n = m - 2;
    let mut acc = V::zero();
    for j in 0..=n {
        let mut a: Vec<T> = Vec::with_capacity(m - 1);
        a.extend_from_slice(&args[..j]);
        a.push(mul(&args[j], &args[j + 1])?);
        a.extend_from_slice(&args[j + 2..]);
        let v = chi(&a)?;
        acc = if j % 2 == 0 { acc.plus(&v) } else { acc.minus(&v) };
    }
    let mut a: Vec<T> = Vec::with_capacity(m - 1);
    a.push(mul(&args[n + 1], &args[0])?);
    a.extend_from_slice(&args[1..=n]);
    let v = chi(&a)?;
    Ok(if (n + 1) % 2 == 0 { acc.plus(&v) } else { acc.minus(&v) })
}

/// An operator kept both as a symbol and as its Fourier-basis matrix, so that
/// products stay consistent on both sides (matrix products differ from the
/// quantized symbol product by smoothing terms near `n = 0`).
#[derive(Clone, Debug, PartialEq)]
pub struct Operand {
    pub symbol: ClassicalSymbol,
    pub matrix: SpectralOperator,
}

impl Operand {
    pub fn new(symbol: ClassicalSymbol) -> Self {
        let matrix = SpectralOperator::quantize(&symbol);
        Operand { symbol, matrix }
    }

    pub fn mul(&self, o: &Self) -> Result<Self, AnomalyError> {
        let symbol = match compose(&self.symbol, &o.symbol, NEG_INF) {
            Ok(s) => s,
            Err(_) => compose(&self.symbol, &o.symbol, PRODUCT_FLOOR.max(crate::symbol::deg_add(
                self.symbol.valid_down_to(),
                o.symbol.order(),
            ).max(crate::symbol::deg_add(self.symbol.order(), o.symbol.valid_down_to()))))?,
        };
        Ok(Operand {
            symbol,
            matrix: self.matrix.mul(&o.matrix)?,
        })
    }

    pub fn product(ops: &[Operand]) -> Result<Operand, AnomalyError> {
        let rank = ops.first().map(|o| o.symbol.rank()).unwrap_or(1);
        let mut acc = Operand::new(ClassicalSymbol::identity(rank));
        for o in ops {
            acc = acc.mul(o)?;
        }
        Ok(acc)
    }
}

/// Supplies the finite part `tr^Q` of an operator.
pub trait TraceProvider {
    fn weighted_trace(&self, weight: &Weight, op: &Operand) -> Result<(Complex64, f64), AnomalyError>;
}

/// `tr^Q` from the zeta oracle; needs a weight with an eigenvalue law.
pub struct OracleTrace;

impl TraceProvider for OracleTrace {
    fn weighted_trace(&self, weight: &Weight, op: &Operand) -> Result<(Complex64, f64), AnomalyError> {
        let law = weight.law().ok_or(AnomalyError::NoLaw)?;
        Ok(weighted_trace(law, &op.matrix)?)
    }
}

fn sum_of_orders(ops: &[ClassicalSymbol]) -> Option<i64> {
    if ops.iter().any(|a| a.is_zero()) {
        None
    } else {
        Some(ops.iter().map(|a| a.order()).sum())
    }
}

fn rational(r: BigRational) -> CRational {
    CRational::real(r)
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::from(1), |a, b| a * BigInt::from(b))
}

fn sign(e: u32) -> BigInt {
    if e % 2 == 0 {
        BigInt::from(1)
    } else {
        BigInt::from(-1)
    }
}

fn row(k: &MultiIndex, j: Option<usize>, coef: &CRational, res: &CRational) -> TermRow {
    TermRow {
        k: k.0.clone(),
        j,
        coefficient: coef.to_exact_string(),
        residue: res.to_exact_string(),
        contribution: (coef * res).to_exact_string(),
    }
}

/// `(1/q)·res(A₀A₁⋯A_n)`.
pub fn mellin_residue(weight: &Weight, ops: &[ClassicalSymbol]) -> Result<CRational, AnomalyError> {
    let mut m = Materializer::new(weight, ops);
    let factors: Vec<Factor> = (0..ops.len()).map(|i| Factor::Op(i, 0)).collect();
    let r = m.residue(&factors)?;
    Ok(r.checked_div(&CRational::from_int(i64::from(weight.order()))).expect("q > 0"))
}

/// `(1/q) Σ_{|k|=1}^{|a|+1+extra} (−1)^{|k|}(|k|−1)!·D(k)·res(A₀A₁^{(k₁)}⋯A_n^{(k_n)}Q^{−|k|})`.
pub fn correction_sum(
    weight: &Weight,
    ops: &[ClassicalSymbol],
    conv: CoefficientConvention,
    extra_shells: u32,
) -> Result<Evaluation, AnomalyError> {
    let mut out = Evaluation {
        value: CRational::default(),
        terms: Vec::new(),
    };
    if ops.len() < 2 {
        return Ok(out);
    }
    let Some(a) = sum_of_orders(ops) else {
        return Ok(out);
    };
    let top = a + 1 + i64::from(extra_shells);
    if top < 1 {
        return Ok(out);
    }
    let qinv = rational(BigRational::new(BigInt::from(1), BigInt::from(weight.order())));
    let mut m = Materializer::new(weight, ops);
    let slots = ops.len() - 1;
    for total in 1..=top as u32 {
        for k in MultiIndex::with_total(slots, total) {
            let d = simplex_constant(&k).coefficient(conv);
            let c = rational(BigRational::from_integer(sign(total) * factorial(total - 1)) * d);
            let coef = &c * &qinv;
            let mut factors = vec![Factor::Op(0, 0)];
            factors.extend(k.0.iter().enumerate().map(|(i, ki)| Factor::Op(i + 1, *ki)));
            factors.push(Factor::WeightNeg(total));
            let res = if i64::from(total) > a + 1 {
                m.residue_materialized(&factors)?
            } else {
                m.residue(&factors)?
            };
            out.value += &(&coef * &res);
            out.terms.push(row(&k, None, &coef, &res));
        }
    }
    Ok(out)
}

/// `χ_n^Q(A₀,…,A_n) = D(0,…,0)·tr^Q(A₀⋯A_n) + correction_sum`.
///
/// The `|k| = 0` weight is 1 in the PAPER convention and `1/n!` (the simplex
/// volume) in the EXACT one, which keeps the cochain equal to the finite part of
/// the Mellin transform of the heat-kernel cochain.
pub fn weighted_cochain(
    weight: &Weight,
    ops: &[Operand],
    provider: &dyn TraceProvider,
    conv: CoefficientConvention,
) -> Result<CochainValue, AnomalyError> {
    let product = Operand::product(ops)?;
    let (tr, err) = provider.weighted_trace(weight, &product)?;
    let syms: Vec<ClassicalSymbol> = ops.iter().map(|o| o.symbol.clone()).collect();
    let corr = correction_sum(weight, &syms, conv, 0)?;
    let d0 = if ops.len() < 2 {
        1.0
    } else {
        rat_to_f64(&simplex_constant(&MultiIndex::new(vec![0; ops.len() - 1])).coefficient(conv))
    };
    Ok(CochainValue {
        value: tr * d0 + corr.value.to_c64(),
        err: err * d0,
        exact_part: None,
    })
}

/// `bχ_{2p}^Q(A₀,…,A_{2p+1}) = (1/q) Σ_{|k|=0}^{|a|+extra} (−1)^{|k|}|k|!·D(k)
/// Σ_{j=0}^{p} res(A₀A₁^{(k₁)}⋯A_{2j+1}^{(k_{2j+1}+1)}⋯A_{2p+1}^{(k_{2p+1})}Q^{−|k|−1})`.
pub fn coboundary_anomaly(
    weight: &Weight,
    ops: &[ClassicalSymbol],
    conv: CoefficientConvention,
    extra_shells: u32,
) -> Result<Evaluation, AnomalyError> {
    if ops.len() < 2 || ops.len() % 2 != 0 {
        return Err(AnomalyError::Arity(format!(
            "coboundary of an even cochain takes an even number of operators, got {}",
            ops.len()
        )));
    }
    let mut out = Evaluation {
        value: CRational::default(),
        terms: Vec::new(),
    };
    let Some(a) = sum_of_orders(ops) else {
        return Ok(out);
    };
    let top = a + i64::from(extra_shells);
    if top < 0 {
        return Ok(out);
    }
    let p = (ops.len() - 2) / 2;
    let slots = ops.len() - 1;
    let qinv = rational(BigRational::new(BigInt::from(1), BigInt::from(weight.order())));
    let mut m = Materializer::new(weight, ops);
    for total in 0..=top as u32 {
        for k in MultiIndex::with_total(slots, total) {
            let d = simplex_constant(&k).coefficient(conv);
            let c = rational(BigRational::from_integer(sign(total) * factorial(total)) * d);
            let coef = &c * &qinv;
            for j in 0..=p {
                let mut factors = vec![Factor::Op(0, 0)];
                factors.extend(k.0.iter().enumerate().map(|(i, ki)| {
                    let bump = u32::from(i + 1 == 2 * j + 1);
                    Factor::Op(i + 1, ki + bump)
                }));
                factors.push(Factor::WeightNeg(total + 1));
                let res = if i64::from(total) > a {
                    m.residue_materialized(&factors)?
                } else {
                    m.residue(&factors)?
                };
                out.value += &(&coef * &res);
                out.terms.push(row(&k, Some(j), &coef, &res));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FourierPoly;

    fn e(m: i64) -> FourierPoly {
        FourierPoly::monomial(m, CRational::from_int(1))
    }

    fn q() -> Weight {
        Weight::laplacian()
    }

    #[test]
    fn mellin_residue_examples() {
        let id = ClassicalSymbol::identity(1);
        assert_eq!(mellin_residue(&q(), &[id.clone(), id.clone()]).unwrap(), CRational::default());
        let inv = q().inverse(-12).unwrap();
        let r = mellin_residue(&q(), &[ClassicalSymbol::abs_xi_power(1), inv]).unwrap();
        assert_eq!(r, CRational::from_int(1));
        let low = ClassicalSymbol::abs_xi_power(-3);
        assert_eq!(mellin_residue(&q(), &[low.clone(), id]).unwrap(), CRational::default());
    }

    #[test]
    fn correction_sum_examples() {
        let a = ClassicalSymbol::abs_xi_power(1);
        let conv = CoefficientConvention::Exact;
        assert_eq!(correction_sum(&q(), &[a.clone()], conv, 0).unwrap().value, CRational::default());
        assert_eq!(correction_sum(&q(), &[a.clone(), a.clone()], conv, 0).unwrap().value, CRational::default());
        let b = ClassicalSymbol::monomial(1, e(1), e(1).scale(&CRational::from_int(-1)));
        let ev = correction_sum(&q(), &[a.clone(), b.clone()], conv, 0).unwrap();
        // |a| = 2, so shells |k| = 1, 2, 3
        assert_eq!(ev.terms.len(), 3);
        let paper = correction_sum(&q(), &[a, b], CoefficientConvention::Paper, 0).unwrap();
        assert_eq!(ev.value, paper.value);
    }

    #[test]
    fn coboundary_examples() {
        let conv = CoefficientConvention::Exact;
        let a = ClassicalSymbol::multiplier(e(1));
        let id = ClassicalSymbol::identity(1);
        assert_eq!(coboundary_anomaly(&q(), &[a.clone(), id], conv, 0).unwrap().value, CRational::default());
        let b = ClassicalSymbol::monomial(1, e(-1), e(-1));
        let v = coboundary_anomaly(&q(), &[a.clone(), b], conv, 0).unwrap().value;
        assert_eq!(v, CRational::from_int(-1));
        let low = ClassicalSymbol::monomial(-2, e(-1), e(2));
        assert_eq!(coboundary_anomaly(&q(), &[a, low], conv, 0).unwrap().value, CRational::default());
        assert!(coboundary_anomaly(&q(), &[ClassicalSymbol::identity(1)], conv, 0).is_err());
    }

    #[test]
    fn weighted_cochain_examples() {
        let id = Operand::new(ClassicalSymbol::identity(1));
        let v = weighted_cochain(&q(), &[id.clone(), id.clone()], &OracleTrace, CoefficientConvention::Exact).unwrap();
        assert_eq!(v.value, Complex64::new(0.0, 0.0));
        // χ̃₂(I, I, C)(t) = ½·tr(C e^{−tQ}), so the EXACT cochain halves tr^Q(C)
        let c = Operand::new(ClassicalSymbol::abs_xi_power(1));
        let ops = [id.clone(), id, c];
        let ex = weighted_cochain(&q(), &ops, &OracleTrace, CoefficientConvention::Exact).unwrap();
        let pa = weighted_cochain(&q(), &ops, &OracleTrace, CoefficientConvention::Paper).unwrap();
        assert!((ex.value.re + 7.0 / 12.0).abs() < 1e-12);
        assert!((pa.value.re + 7.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn hochschild_b_of_a_trace_on_matrices() {
        use crate::algebra::Mat;
        let m = |v: [i64; 4]| Mat::from_rows(2, v.iter().map(|x| CRational::from_int(*x)).collect());
        let tr = |a: &[Mat<CRational>]| -> Result<CRational, ()> { Ok(a[0].trace()) };
        let mul = |a: &Mat<CRational>, b: &Mat<CRational>| -> Result<Mat<CRational>, ()> { Ok(a.mul(b)) };
        let args = [m([1, 2, -3, 4]), m([0, 5, 7, -1])];
        assert_eq!(hochschild_b(&tr, &args, &mul).unwrap(), CRational::default());
        let same = [args[0].clone(), args[0].clone()];
        assert_eq!(hochschild_b(&tr, &same, &mul).unwrap(), CRational::default());
    }
}
