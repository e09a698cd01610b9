//! Affine weight families `Q_t = Q₀ + t·Q̇` and the variation of weighted cochains.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::cochain::{CochainValue, Evaluation, TermRow};
use super::multiindex::{simplex_constant, CoefficientConvention, MultiIndex};
use super::AnomalyError;
use crate::algebra::quadrature::gauss_legendre;
use crate::algebra::{rat_from_f64, CRational};
use crate::symbol::{ClassicalSymbol, EigenvalueLaw, Factor, Materializer, Weight};

#[derive(Clone, Debug, PartialEq)]
pub struct FamilySpec {
    base: Weight,
    direction: ClassicalSymbol,
    eigen_direction: Option<EigenvalueLaw>,
    t_range: (BigRational, BigRational),
}

impl FamilySpec {
    /// Checks that both endpoints are weights; positivity of the affine leading
    /// coefficient in between follows from convexity.
    pub fn new(
        base: Weight,
        direction: ClassicalSymbol,
        eigen_direction: Option<EigenvalueLaw>,
        t_range: (BigRational, BigRational),
    ) -> Result<Self, AnomalyError> {
        if t_range.0 > t_range.1 {
            return Err(AnomalyError::OutOfRange(format!("empty range [{}, {}]", t_range.0, t_range.1)));
        }
        if direction.order() > i64::from(base.order()) {
            return Err(AnomalyError::Arity(format!(
                "direction order {} exceeds weight order {}",
                direction.order(),
                base.order()
            )));
        }
        let f = FamilySpec {
            base,
            direction,
            eigen_direction,
            t_range,
        };
        f.at(&f.t_range.0.clone())?;
        f.at(&f.t_range.1.clone())?;
        Ok(f)
    }

    pub fn base(&self) -> &Weight {
        &self.base
    }

    pub fn direction(&self) -> &ClassicalSymbol {
        &self.direction
    }

    pub fn t_range(&self) -> &(BigRational, BigRational) {
        &self.t_range
    }

    /// The weight `Q_t`.
    pub fn at(&self, t: &BigRational) -> Result<Weight, AnomalyError> {
        if t < &self.t_range.0 || t > &self.t_range.1 {
            return Err(AnomalyError::OutOfRange(t.to_string()));
        }
        Ok(self.base.affine(&self.direction, self.eigen_direction.as_ref(), t)?)
    }
}

/// `(1/q) Σ_{|k|=0}^{|a|+1} (−1)^{|k|+1}|k|!·D(k) Σ_{j=1}^{n+1}
/// res(A₀A₁^{(k₁)}⋯A_{j−1}^{(k_{j−1})} Q̇^{(k_j)} A_j^{(k_{j+1})}⋯A_n^{(k_{n+1})} Q_t^{−|k|−1})`.
pub fn family_derivative(
    family: &FamilySpec,
    t: &BigRational,
    ops: &[ClassicalSymbol],
    conv: CoefficientConvention,
) -> Result<Evaluation, AnomalyError> {
    let weight = family.at(t)?;
    let mut out = Evaluation {
        value: CRational::default(),
        terms: Vec::new(),
    };
    if ops.is_empty() {
        return Err(AnomalyError::Arity("family derivative needs at least one operator".into()));
    }
    if family.direction.is_zero() || ops.iter().any(|a| a.is_zero()) {
        return Ok(out);
    }
    let a: i64 = ops.iter().map(|x| x.order()).sum();
    let top = a + 1;
    if top < 0 {
        return Ok(out);
    }
    let n = ops.len() - 1;
    let dir = ops.len();
    let mut operands = ops.to_vec();
    operands.push(family.direction.clone());
    let qinv = CRational::real(BigRational::new(BigInt::from(1), BigInt::from(weight.order())));
    let mut m = Materializer::new(&weight, &operands);
    for total in 0..=top as u32 {
        let fact = (1..=total).fold(BigInt::from(1), |x, y| x * BigInt::from(y));
        let sign = if total % 2 == 1 { 1 } else { -1 };
        for k in MultiIndex::with_total(n + 1, total) {
            let d = simplex_constant(&k).coefficient(conv);
            let coef = &CRational::real(BigRational::from_integer(fact.clone() * sign) * d) * &qinv;
            for j in 1..=n + 1 {
                // slots 1..=n+1 run over A₁,…,A_{j−1}, Q̇, A_j,…,A_n
                let mut factors = vec![Factor::Op(0, 0)];
                for (slot, ks) in k.0.iter().enumerate() {
                    let pos = slot + 1;
                    let idx = match pos.cmp(&j) {
                        std::cmp::Ordering::Less => pos,
                        std::cmp::Ordering::Equal => dir,
                        std::cmp::Ordering::Greater => pos - 1,
                    };
                    factors.push(Factor::Op(idx, *ks));
                }
                factors.push(Factor::WeightNeg(total + 1));
                let res = m.residue(&factors)?;
                out.value += &(&coef * &res);
                out.terms.push(TermRow {
                    k: k.0.clone(),
                    j: Some(j),
                    coefficient: coef.to_exact_string(),
                    residue: res.to_exact_string(),
                    contribution: (&coef * &res).to_exact_string(),
                });
            }
        }
    }
    Ok(out)
}

/// `∫₀¹ family_derivative dt` by Gauss–Legendre with `nodes` points; the error is
/// the change against `2·nodes` points. Nodes are converted to exact binary rationals.
pub fn interpolation_difference(
    family: &FamilySpec,
    ops: &[ClassicalSymbol],
    nodes: usize,
    conv: CoefficientConvention,
) -> Result<CochainValue, AnomalyError> {
    let (lo, hi) = family.t_range.clone();
    let zero = BigRational::from_integer(BigInt::from(0));
    let one = BigRational::from_integer(BigInt::from(1));
    if lo > zero || hi < one {
        return Err(AnomalyError::OutOfRange("interpolation needs [0, 1] inside the family range".into()));
    }
    let rule = |n: usize| -> Result<Complex64, AnomalyError> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, w) in gauss_legendre(n, 0.0, 1.0) {
            let t = rat_from_f64(x);
            acc += family_derivative(family, &t, ops, conv)?.value.to_c64() * w;
        }
        Ok(acc)
    };
    let a = rule(nodes)?;
    let b = rule(2 * nodes)?;
    Ok(CochainValue {
        value: b,
        err: (a - b).norm() + 4.0 * f64::EPSILON * b.norm(),
        exact_part: None,
    })
}

/// Richardson-extrapolated central difference of `f` at `t`, with step `h`
/// halved `levels` times. Returns the estimate and the last correction size.
pub fn richardson_derivative<F>(f: F, t: &BigRational, h: &BigRational, levels: usize) -> Result<(Complex64, f64), AnomalyError>
where
    F: Fn(&BigRational) -> Result<Complex64, AnomalyError>,
{
    let two = BigRational::from_integer(BigInt::from(2));
    let mut table: Vec<Vec<Complex64>> = Vec::new();
    let mut step = h.clone();
    for i in 0..=levels {
        let fp = f(&(t + &step))?;
        let fm = f(&(t - &step))?;
        let hs = step.to_f64().expect("finite step");
        let mut row = vec![(fp - fm) / (2.0 * hs)];
        for j in 1..=i {
            let factor = 4f64.powi(j as i32);
            let prev = table[i - 1][j - 1];
            let v = row[j - 1] + (row[j - 1] - prev) / (factor - 1.0);
            row.push(v);
        }
        table.push(row);
        step = &step / &two;
    }
    let last = table.last().expect("at least one level");
    let best = *last.last().expect("nonempty row");
    let err = if table.len() > 1 {
        let prev = table[table.len() - 2].last().copied().expect("nonempty row");
        (best - prev).norm()
    } else {
        f64::INFINITY
    };
    Ok((best, err))
}
