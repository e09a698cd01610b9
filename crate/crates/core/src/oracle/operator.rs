//! Banded Fourier-basis operators with an exact head block and exact rational tails.
//!
//! Entry `(row, col)` with offset `l = row − col`: for `|col| ≤ crossover` it is
//! stored explicitly; for `col > crossover` it is `plus[l](col)` and for
//! `col < −crossover` it is `minus[l](−col)`, both exact rational functions.

use num_complex::Complex64;

use super::ratfn::{Poly, RatFn};
use super::OracleError;
use crate::algebra::{CRational, Mat};
use crate::symbol::{ClassicalSymbol, EigenvalueLaw};

#[derive(Clone, Debug, PartialEq)]
pub struct Tail {
    pub plus: Vec<Mat<RatFn>>,
    pub minus: Vec<Mat<RatFn>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralOperator {
    rank: usize,
    bandwidth: i64,
    crossover: i64,
    head: Vec<Vec<Mat<CRational>>>,
    tail: Option<Tail>,
}

fn eval_mat(m: &Mat<RatFn>, x: i64) -> Result<Mat<CRational>, OracleError> {
    let vals: Option<Vec<CRational>> = m.entries().iter().map(|r| r.eval(x)).collect();
    vals.map(|v| Mat::from_rows(m.dim(), v))
        .ok_or(OracleError::TailPole(x))
}

impl SpectralOperator {
    fn empty(rank: usize, bandwidth: i64, crossover: i64, tail: Option<Tail>) -> Self {
        let width = (2 * bandwidth + 1) as usize;
        SpectralOperator {
            rank,
            bandwidth,
            crossover,
            head: vec![vec![Mat::zeros(rank); width]; (2 * crossover + 1) as usize],
            tail,
        }
    }

    fn zero_tail(rank: usize, bandwidth: i64) -> Tail {
        let width = (2 * bandwidth + 1) as usize;
        Tail {
            plus: vec![Mat::zeros(rank); width],
            minus: vec![Mat::zeros(rank); width],
        }
    }

    /// Toroidal quantization `A_{mn} = â_{m−n}(n)`. At `n = 0` negative-degree
    /// terms vanish and the degree-0 term is the branch average.
    pub fn quantize(a: &ClassicalSymbol) -> Self {
        let r = a.rank();
        let w = a.max_frequency() as i64;
        let mut op = Self::empty(r, w, 0, Some(Self::zero_tail(r, w)));
        let half = CRational::from_frac(1, 2);
        for t in a.terms() {
            for i in 0..r {
                for j in 0..r {
                    for (plus_branch, f) in [(true, t.plus.get(i, j)), (false, t.minus.get(i, j))] {
                        for (freq, c) in f.iter() {
                            let l = (freq + w) as usize;
                            if t.degree == 0 {
                                let cell = op.head[0][l].get(i, j) + &(c * &half);
                                op.head[0][l].set(i, j, cell);
                            }
                            let tail = op.tail.as_mut().expect("tail");
                            let slot = if plus_branch { &mut tail.plus[l] } else { &mut tail.minus[l] };
                            let v = slot.get(i, j).add(&RatFn::power(t.degree, c.clone()));
                            slot.set(i, j, v);
                        }
                    }
                }
            }
        }
        op
    }

    /// Diagonal `λ(n)^k · I`.
    pub fn weight_power(law: &EigenvalueLaw, rank: usize, k: i64) -> Self {
        let p = Poly::from_rationals(law.coeffs());
        let r = RatFn::poly_power(&p, k);
        let lam0 = CRational::real(law.eval_exact(0));
        let v0 = if k >= 0 {
            (0..k).fold(CRational::from_int(1), |acc, _| &acc * &lam0)
        } else {
            let inv = lam0.inv().expect("positive");
            (0..-k).fold(CRational::from_int(1), |acc, _| &acc * &inv)
        };
        let mut op = Self::empty(
            rank,
            0,
            0,
            Some(Tail {
                plus: vec![Mat::scalar(rank, r.clone())],
                minus: vec![Mat::scalar(rank, r)],
            }),
        );
        op.head[0][0] = Mat::scalar(rank, v0);
        op
    }

    pub fn identity(rank: usize) -> Self {
        Self::quantize(&ClassicalSymbol::identity(rank))
    }

    /// Finite scalar diagonal operator supported on the given frequencies.
    pub fn finite_diagonal(entries: &[(i64, CRational)]) -> Self {
        let c = entries.iter().map(|(n, _)| n.abs()).max().unwrap_or(0);
        let mut op = Self::empty(1, 0, c, Some(Self::zero_tail(1, 0)));
        for (n, v) in entries {
            op.head[(n + c) as usize][0] = Mat::from_rows(1, vec![v.clone()]);
        }
        op
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn bandwidth(&self) -> i64 {
        self.bandwidth
    }

    pub fn crossover(&self) -> i64 {
        self.crossover
    }

    pub fn tail(&self) -> Option<&Tail> {
        self.tail.as_ref()
    }

    pub fn entry(&self, row: i64, col: i64) -> Result<Mat<CRational>, OracleError> {
        let l = row - col;
        if l.abs() > self.bandwidth {
            return Ok(Mat::zeros(self.rank));
        }
        let li = (l + self.bandwidth) as usize;
        if col.abs() <= self.crossover {
            return Ok(self.head[(col + self.crossover) as usize][li].clone());
        }
        let tail = self.tail.as_ref().ok_or(OracleError::TailNotRational)?;
        if col > 0 {
            eval_mat(&tail.plus[li], col)
        } else {
            eval_mat(&tail.minus[li], -col)
        }
    }

    /// Extends the explicit head block to `|col| ≤ c`.
    pub fn with_crossover(&self, c: i64) -> Result<Self, OracleError> {
        if c <= self.crossover {
            return Ok(self.clone());
        }
        let mut op = Self::empty(self.rank, self.bandwidth, c, self.tail.clone());
        for col in -c..=c {
            for l in -self.bandwidth..=self.bandwidth {
                op.head[(col + c) as usize][(l + self.bandwidth) as usize] = self.entry(col + l, col)?;
            }
        }
        Ok(op)
    }

    fn check_rank(&self, o: &Self) -> Result<(), OracleError> {
        if self.rank != o.rank {
            return Err(OracleError::RankMismatch);
        }
        Ok(())
    }

    /// Exact infinite-matrix product.
    pub fn mul(&self, o: &Self) -> Result<Self, OracleError> {
        self.check_rank(o)?;
        let (wa, wb) = (self.bandwidth, o.bandwidth);
        let w = wa + wb;
        let c = o.crossover.max(self.crossover + wb);
        let tail = match (&self.tail, &o.tail) {
            (Some(ta), Some(tb)) => {
                let mut out = Self::zero_tail(self.rank, w);
                for l2 in -wb..=wb {
                    for l1 in -wa..=wa {
                        let li = (l1 + l2 + w) as usize;
                        let ia = (l1 + wa) as usize;
                        let ib = (l2 + wb) as usize;
                        let ap = ta.plus[ia].map(|r| r.shift(l2));
                        let am = ta.minus[ia].map(|r| r.shift(-l2));
                        out.plus[li] = out.plus[li].add(&ap.mul(&tb.plus[ib]));
                        out.minus[li] = out.minus[li].add(&am.mul(&tb.minus[ib]));
                    }
                }
                Some(out)
            }
            _ => None,
        };
        let mut op = Self::empty(self.rank, w, c, tail);
        for col in -c..=c {
            for l2 in -wb..=wb {
                let b = o.entry(col + l2, col)?;
                if b.is_zero() {
                    continue;
                }
                for l1 in -wa..=wa {
                    let a = self.entry(col + l2 + l1, col + l2)?;
                    if a.is_zero() {
                        continue;
                    }
                    let slot = &mut op.head[(col + c) as usize][(l1 + l2 + w) as usize];
                    *slot = slot.add(&a.mul(&b));
                }
            }
        }
        Ok(op)
    }

    fn combine(&self, o: &Self, sign: i64) -> Result<Self, OracleError> {
        self.check_rank(o)?;
        let w = self.bandwidth.max(o.bandwidth);
        let c = self.crossover.max(o.crossover);
        let s = CRational::from_int(sign);
        let tail = match (&self.tail, &o.tail) {
            (Some(ta), Some(tb)) => {
                let mut out = Self::zero_tail(self.rank, w);
                for l in -w..=w {
                    let li = (l + w) as usize;
                    if l.abs() <= self.bandwidth {
                        let ia = (l + self.bandwidth) as usize;
                        out.plus[li] = out.plus[li].add(&ta.plus[ia]);
                        out.minus[li] = out.minus[li].add(&ta.minus[ia]);
                    }
                    if l.abs() <= o.bandwidth {
                        let ib = (l + o.bandwidth) as usize;
                        out.plus[li] = out.plus[li].add(&tb.plus[ib].map(|r| r.scale(&s)));
                        out.minus[li] = out.minus[li].add(&tb.minus[ib].map(|r| r.scale(&s)));
                    }
                }
                Some(out)
            }
            _ => None,
        };
        let mut op = Self::empty(self.rank, w, c, tail);
        for col in -c..=c {
            for l in -w..=w {
                let v = self.entry(col + l, col)?.add(&o.entry(col + l, col)?.map(|x| x * &s));
                op.head[(col + c) as usize][(l + w) as usize] = v;
            }
        }
        Ok(op)
    }

    pub fn add(&self, o: &Self) -> Result<Self, OracleError> {
        self.combine(o, 1)
    }

    pub fn sub(&self, o: &Self) -> Result<Self, OracleError> {
        self.combine(o, -1)
    }

    pub fn scale(&self, s: &CRational) -> Self {
        let mut op = self.clone();
        for col in op.head.iter_mut() {
            for m in col.iter_mut() {
                *m = m.map(|x| x * s);
            }
        }
        if let Some(t) = op.tail.as_mut() {
            for m in t.plus.iter_mut().chain(t.minus.iter_mut()) {
                *m = m.map(|r| r.scale(s));
            }
        }
        op
    }

    pub fn commutator(&self, o: &Self) -> Result<Self, OracleError> {
        self.mul(o)?.sub(&o.mul(self)?)
    }

    /// `ad_Q^j` with `Q` the diagonal weight of the law.
    pub fn ad_power(&self, law: &EigenvalueLaw, j: u32) -> Result<Self, OracleError> {
        let q = Self::weight_power(law, self.rank, 1);
        let mut x = self.clone();
        for _ in 0..j {
            x = q.commutator(&x)?;
        }
        Ok(x)
    }

    /// Float band of all entries with `|row|, |col| ≤ radius`.
    pub fn band(&self, radius: i64) -> Result<Band, OracleError> {
        let w = self.bandwidth;
        let r = self.rank;
        let width = (2 * w + 1) as usize;
        let mut data = vec![Complex64::new(0.0, 0.0); (2 * radius + 1) as usize * width * r * r];
        for col in -radius..=radius {
            for l in -w..=w {
                let row = col + l;
                if row.abs() > radius {
                    continue;
                }
                let e = self.entry(row, col)?;
                let base = (((col + radius) as usize) * width + (l + w) as usize) * r * r;
                for (k, v) in e.entries().iter().enumerate() {
                    data[base + k] = v.to_c64();
                }
            }
        }
        Ok(Band {
            radius,
            bandwidth: w,
            rank: r,
            data,
        })
    }
}

/// Float snapshot of a truncated banded operator.
#[derive(Clone, Debug)]
pub struct Band {
    pub radius: i64,
    pub bandwidth: i64,
    pub rank: usize,
    data: Vec<Complex64>,
}

impl Band {
    /// Row-major `rank × rank` block at `(row, col)`; zero outside the band or radius.
    pub fn block(&self, row: i64, col: i64) -> &[Complex64] {
        const ZERO: [Complex64; 0] = [];
        let l = row - col;
        if l.abs() > self.bandwidth || row.abs() > self.radius || col.abs() > self.radius {
            return &ZERO;
        }
        let width = (2 * self.bandwidth + 1) as usize;
        let rr = self.rank * self.rank;
        let base = (((col + self.radius) as usize) * width + (l + self.bandwidth) as usize) * rr;
        &self.data[base..base + rr]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FourierPoly;
    use crate::symbol::compose;

    fn e(m: i64) -> FourierPoly {
        FourierPoly::monomial(m, CRational::from_int(1))
    }

    fn scalar(op: &SpectralOperator, row: i64, col: i64) -> CRational {
        op.entry(row, col).unwrap().get(0, 0).clone()
    }

    #[test]
    fn quantization_examples() {
        let xi = SpectralOperator::quantize(&ClassicalSymbol::xi_power(1));
        for n in -4..=4 {
            assert_eq!(scalar(&xi, n, n), CRational::from_int(n));
        }
        let shift = SpectralOperator::quantize(&ClassicalSymbol::multiplier(e(1)));
        assert_eq!(scalar(&shift, 3, 2), CRational::from_int(1));
        assert_eq!(scalar(&shift, 2, 3), CRational::default());
        let sym = ClassicalSymbol::monomial(1, e(1), e(1).scale(&CRational::from_int(-1)));
        let op = SpectralOperator::quantize(&sym);
        for n in -4..=4 {
            assert_eq!(scalar(&op, n + 1, n), CRational::from_int(n));
        }
    }

    #[test]
    fn product_tail_matches_head() {
        let a = SpectralOperator::quantize(&ClassicalSymbol::monomial(-1, e(1), e(2)));
        let b = SpectralOperator::quantize(&ClassicalSymbol::multiplier(e(-1).add(&e(1))).add(&ClassicalSymbol::abs_xi_power(1)).unwrap());
        let p = a.mul(&b).unwrap();
        let wide = p.with_crossover(p.crossover() + 6).unwrap();
        for col in -(p.crossover() + 6)..=(p.crossover() + 6) {
            for l in -p.bandwidth()..=p.bandwidth() {
                // direct sum over the intermediate index
                let mut direct = CRational::default();
                for k in (col - 3)..=(col + 3) {
                    direct += &(&scalar(&a, col + l, k) * &scalar(&b, k, col));
                }
                assert_eq!(scalar(&wide, col + l, col), direct);
                assert_eq!(scalar(&p, col + l, col), direct);
            }
        }
    }

    #[test]
    fn symbolic_and_matrix_products_share_asymptotics() {
        let s1 = ClassicalSymbol::monomial(1, e(1), e(-1));
        let s2 = ClassicalSymbol::abs_xi_power(-1).add(&ClassicalSymbol::multiplier(e(1))).unwrap();
        let m = SpectralOperator::quantize(&s1).mul(&SpectralOperator::quantize(&s2)).unwrap();
        let q = SpectralOperator::quantize(&compose(&s1, &s2, -6).unwrap());
        let t1 = &m.tail().unwrap().plus;
        let t2 = &q.tail().unwrap().plus;
        for l in -m.bandwidth()..=m.bandwidth() {
            let x = t1[(l + m.bandwidth()) as usize].get(0, 0).series_at_infinity(8);
            let y = if l.abs() <= q.bandwidth() {
                t2[(l + q.bandwidth()) as usize].get(0, 0).series_at_infinity(8)
            } else {
                None
            };
            // both agree on exponents > −6
            let coeffs = |s: Option<(i64, Vec<CRational>)>| -> Vec<(i64, CRational)> {
                s.map(|(e, c)| {
                    c.into_iter()
                        .enumerate()
                        .map(|(j, v)| (e - j as i64, v))
                        .filter(|(d, v)| *d > -6 && !num_traits::Zero::is_zero(v))
                        .collect()
                })
                .unwrap_or_default()
            };
            assert_eq!(coeffs(x), coeffs(y), "offset {l}");
        }
    }

    #[test]
    fn weight_diagonal() {
        let law = EigenvalueLaw::laplacian();
        let q = SpectralOperator::weight_power(&law, 1, 1);
        let qi = SpectralOperator::weight_power(&law, 1, -1);
        let id = q.mul(&qi).unwrap();
        for n in -5..=5 {
            assert_eq!(scalar(&q, n, n), CRational::from_int(1 + n * n));
            assert_eq!(scalar(&id, n, n), CRational::from_int(1));
        }
    }
}
