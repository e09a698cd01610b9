//! Exact univariate polynomials and rational functions in the tail variable `m = |n|`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::algebra::{CRational, Ring};

/// Dense polynomial, ascending coefficients, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    c: Vec<CRational>,
}

fn czero(c: &CRational) -> bool {
    num_traits::Zero::is_zero(c)
}

impl Poly {
    pub fn new(mut c: Vec<CRational>) -> Self {
        while c.last().is_some_and(czero) {
            c.pop();
        }
        Poly { c }
    }

    pub fn constant(v: CRational) -> Self {
        Poly::new(vec![v])
    }

    /// `m^k`.
    pub fn monomial(k: usize, v: CRational) -> Self {
        let mut c = vec![CRational::default(); k + 1];
        c[k] = v;
        Poly::new(c)
    }

    pub fn from_rationals(c: &[BigRational]) -> Self {
        Poly::new(c.iter().cloned().map(CRational::real).collect())
    }

    pub fn coeffs(&self) -> &[CRational] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Poly::new(
            (0..n)
                .map(|i| match (self.c.get(i), o.c.get(i)) {
                    (Some(a), Some(b)) => a + b,
                    (Some(a), None) => a.clone(),
                    (None, Some(b)) => b.clone(),
                    (None, None) => unreachable!(),
                })
                .collect(),
        )
    }

    pub fn neg(&self) -> Self {
        Poly {
            c: self.c.iter().map(|v| -v).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: &CRational) -> Self {
        Poly::new(self.c.iter().map(|v| v * s).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Poly::default();
        }
        let mut out = vec![CRational::default(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if czero(a) {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        Poly::new(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Poly::constant(CRational::from_int(1));
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// `p(m + l)`.
    pub fn shift(&self, l: i64) -> Self {
        let lin = Poly::new(vec![CRational::from_int(l), CRational::from_int(1)]);
        let mut out = Poly::default();
        for a in self.c.iter().rev() {
            out = out.mul(&lin).add(&Poly::constant(a.clone()));
        }
        out
    }

    pub fn eval(&self, m: &BigRational) -> CRational {
        let mut acc = CRational::default();
        for a in self.c.iter().rev() {
            acc = &acc.scale(m) + a;
        }
        acc
    }

    /// Exact division; `None` when the remainder is nonzero.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let dd = d.degree()?;
        let lead_inv = d.c[dd].inv()?;
        let mut rem = self.c.clone();
        if rem.len() <= dd {
            return if self.is_zero() { Some(Poly::default()) } else { None };
        }
        let mut q = vec![CRational::default(); rem.len() - dd];
        for i in (0..q.len()).rev() {
            let coef = &rem[i + dd] * &lead_inv;
            if !czero(&coef) {
                for (j, dj) in d.c.iter().enumerate() {
                    rem[i + j] -= &(&coef * dj);
                }
            }
            q[i] = coef;
        }
        if rem.iter().all(czero) {
            Some(Poly::new(q))
        } else {
            None
        }
    }

    fn make_monic(&self) -> (CRational, Poly) {
        let lead = self.c.last().cloned().expect("nonzero polynomial");
        let inv = lead.inv().expect("nonzero");
        (lead, self.scale(&inv))
    }
}

/// Key of a monic real denominator factor (ascending coefficients).
type FactorKey = Vec<BigRational>;

fn key_of(p: &Poly) -> FactorKey {
    p.c.iter().map(|v| v.re.clone()).collect()
}

fn poly_of(k: &FactorKey) -> Poly {
    Poly::from_rationals(k)
}

/// `num(m) / Π fᵢ(m)^{eᵢ}` with monic real factors `fᵢ`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct RatFn {
    num: Poly,
    den: BTreeMap<FactorKey, u32>,
}

impl RatFn {
    pub fn from_poly(p: Poly) -> Self {
        RatFn {
            num: p,
            den: BTreeMap::new(),
        }
    }

    pub fn constant(v: CRational) -> Self {
        Self::from_poly(Poly::constant(v))
    }

    /// `c · m^d` for any integer `d`.
    pub fn power(d: i64, c: CRational) -> Self {
        if d >= 0 {
            return Self::from_poly(Poly::monomial(d as usize, c));
        }
        let mut den = BTreeMap::new();
        den.insert(key_of(&Poly::monomial(1, CRational::from_int(1))), (-d) as u32);
        RatFn {
            num: Poly::constant(c),
            den,
        }
    }

    /// `p(m)^e` for integer `e` (negative powers go to the denominator);
    /// `p` must have real coefficients.
    pub fn poly_power(p: &Poly, e: i64) -> Self {
        if e >= 0 {
            return Self::from_poly(p.pow(e as u32));
        }
        let (lead, monic) = p.make_monic();
        let mut den = BTreeMap::new();
        if monic.degree().unwrap_or(0) > 0 {
            den.insert(key_of(&monic), (-e) as u32);
        }
        let scale = lead.inv().expect("nonzero");
        let mut num = Poly::constant(CRational::from_int(1));
        for _ in 0..(-e) {
            num = num.scale(&scale);
        }
        RatFn { num, den }.normalized()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> Poly {
        self.den
            .iter()
            .fold(Poly::constant(CRational::from_int(1)), |acc, (k, e)| acc.mul(&poly_of(k).pow(*e)))
    }

    /// Cancels denominator factors that divide the numerator.
    fn normalized(mut self) -> Self {
        if self.num.is_zero() {
            self.den.clear();
            return self;
        }
        let keys: Vec<FactorKey> = self.den.keys().cloned().collect();
        for k in keys {
            let f = poly_of(&k);
            while let Some(e) = self.den.get(&k).copied() {
                match self.num.div_exact(&f) {
                    Some(q) => {
                        self.num = q;
                        if e == 1 {
                            self.den.remove(&k);
                        } else {
                            self.den.insert(k.clone(), e - 1);
                        }
                    }
                    None => break,
                }
            }
        }
        self
    }

    pub fn add(&self, o: &Self) -> Self {
        if o.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return o.clone();
        }
        let mut common = self.den.clone();
        for (k, e) in &o.den {
            let v = common.entry(k.clone()).or_insert(0);
            *v = (*v).max(*e);
        }
        let lift = |r: &RatFn| {
            let mut n = r.num.clone();
            for (k, e) in &common {
                let have = r.den.get(k).copied().unwrap_or(0);
                if *e > have {
                    n = n.mul(&poly_of(k).pow(e - have));
                }
            }
            n
        };
        RatFn {
            num: lift(self).add(&lift(o)),
            den: common,
        }
        .normalized()
    }

    pub fn neg(&self) -> Self {
        RatFn {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: &CRational) -> Self {
        RatFn {
            num: self.num.scale(s),
            den: if czero(s) { BTreeMap::new() } else { self.den.clone() },
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return RatFn::default();
        }
        let mut den = self.den.clone();
        for (k, e) in &o.den {
            *den.entry(k.clone()).or_insert(0) += e;
        }
        RatFn {
            num: self.num.mul(&o.num),
            den,
        }
        .normalized()
    }

    /// `r(m + l)`.
    pub fn shift(&self, l: i64) -> Self {
        if l == 0 {
            return self.clone();
        }
        let mut den = BTreeMap::new();
        for (k, e) in &self.den {
            *den.entry(key_of(&poly_of(k).shift(l))).or_insert(0) += e;
        }
        RatFn {
            num: self.num.shift(l),
            den,
        }
    }

    /// Exact value at an integer; `None` at a pole.
    pub fn eval(&self, m: i64) -> Option<CRational> {
        let x = BigRational::from_integer(BigInt::from(m));
        let mut d = BigRational::one();
        for (k, e) in &self.den {
            let v = poly_of(k).eval(&x).re;
            for _ in 0..*e {
                d *= &v;
            }
        }
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(&x).scale(&d.recip()))
    }

    /// Largest real root modulus bound of the denominator (Cauchy), so that
    /// evaluation is pole-free for `m` beyond it.
    pub fn pole_bound(&self) -> BigRational {
        let mut best = BigRational::zero();
        for k in self.den.keys() {
            let mut b = BigRational::one();
            for c in &k[..k.len() - 1] {
                let a = if c < &BigRational::zero() { -c.clone() } else { c.clone() };
                b = b.max(BigRational::one() + a);
            }
            best = best.max(b);
        }
        best
    }

    /// Expansion at infinity: `(e, c)` with `r(m) = Σ_j c_j m^{e−j}` truncated to
    /// `depth` coefficients; `None` for the zero function.
    pub fn series_at_infinity(&self, depth: usize) -> Option<(i64, Vec<CRational>)> {
        let dn = self.num.degree()?;
        let den = self.denominator();
        let dd = den.degree().expect("nonzero denominator");
        // In w = 1/m: num = m^dn Ñ(w), den = m^dd D̃(w), Ñ_i = num_{dn−i}.
        let nt: Vec<CRational> = (0..depth)
            .map(|i| if i <= dn { self.num.c[dn - i].clone() } else { CRational::default() })
            .collect();
        let dt: Vec<CRational> = (0..depth)
            .map(|i| if i <= dd { den.c[dd - i].clone() } else { CRational::default() })
            .collect();
        let d0inv = dt[0].inv().expect("leading coefficient");
        let mut out: Vec<CRational> = Vec::with_capacity(depth);
        for i in 0..depth {
            let mut acc = nt[i].clone();
            for j in 1..=i {
                if !czero(&dt[j]) {
                    acc -= &(&dt[j] * &out[i - j]);
                }
            }
            out.push(&acc * &d0inv);
        }
        Some((dn as i64 - dd as i64, out))
    }
}

impl Ring for RatFn {
    fn zero() -> Self {
        RatFn::default()
    }
    fn one() -> Self {
        RatFn::constant(CRational::from_int(1))
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn add_ref(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn neg_ref(&self) -> Self {
        self.neg()
    }
}
