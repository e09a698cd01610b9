//! Laurent germs at `z = 0` truncated after the `z¹` coefficient.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GermError {
    #[error("product of two germs with poles has a double pole")]
    PoleProduct,
    #[error("finite part of the product needs the linear coefficient, which is unknown")]
    MissingLinear,
}

/// `pole/z + const_ + linear·z + O(z²)`, each coefficient known to within `err`.
///
/// `linear` is `None` when it was not determined, e.g. after multiplying by a
/// germ with a pole (that would require the `z²` coefficient).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LaurentGerm {
    pub pole: Complex64,
    pub const_: Complex64,
    pub linear: Option<Complex64>,
    pub err: f64,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

impl LaurentGerm {
    pub fn new(pole: Complex64, const_: Complex64, linear: Option<Complex64>, err: f64) -> Self {
        LaurentGerm {
            pole,
            const_,
            linear,
            err,
        }
    }

    pub fn zero() -> Self {
        Self::constant(c(0.0))
    }

    pub fn constant(v: Complex64) -> Self {
        LaurentGerm::new(c(0.0), v, Some(c(0.0)), 0.0)
    }

    /// Germ of `exp(a·z)` truncated at `z¹`.
    pub fn exp_linear(a: Complex64) -> Self {
        LaurentGerm::new(c(0.0), c(1.0), Some(a), 0.0)
    }

    /// Germ of `Γ(z+k)/Γ(z) = z(z+1)···(z+k−1)`: zero constant term and
    /// linear coefficient `(k−1)!` for `k ≥ 1`; the constant 1 for `k = 0`.
    pub fn gamma_ratio(k: u32) -> Self {
        if k == 0 {
            return Self::constant(c(1.0));
        }
        let fact: f64 = (1..k).map(f64::from).product();
        LaurentGerm::new(c(0.0), c(0.0), Some(c(fact)), 0.0)
    }

    pub fn has_pole(&self) -> bool {
        self.pole != c(0.0)
    }

    /// Largest coefficient modulus, counting an unknown linear term as 0.
    fn magnitude(&self) -> f64 {
        self.pole.norm() + self.const_.norm() + self.linear.map_or(0.0, |l| l.norm())
    }

    pub fn add(&self, o: &Self) -> Self {
        LaurentGerm {
            pole: self.pole + o.pole,
            const_: self.const_ + o.const_,
            linear: self.linear.zip(o.linear).map(|(a, b)| a + b),
            err: self.err + o.err,
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(c(-1.0))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        LaurentGerm {
            pole: self.pole * s,
            const_: self.const_ * s,
            linear: self.linear.map(|l| l * s),
            err: self.err * s.norm(),
        }
    }

    /// Truncated product. Rejects pole×pole; the result's linear term is
    /// dropped whenever either factor has a pole.
    pub fn mul(&self, o: &Self) -> Result<Self, GermError> {
        if self.has_pole() && o.has_pole() {
            return Err(GermError::PoleProduct);
        }
        let pole = self.pole * o.const_ + self.const_ * o.pole;
        let mut const_ = self.const_ * o.const_;
        if self.has_pole() {
            const_ += self.pole * o.linear.ok_or(GermError::MissingLinear)?;
        }
        if o.has_pole() {
            const_ += o.pole * self.linear.ok_or(GermError::MissingLinear)?;
        }
        let linear = if self.has_pole() || o.has_pole() {
            None
        } else {
            self.linear
                .zip(o.linear)
                .map(|(a, b)| self.const_ * b + a * o.const_)
        };
        // Each output coefficient is a sum of at most two products of inputs.
        let err = self.err * o.magnitude() + o.err * self.magnitude() + 2.0 * self.err * o.err;
        Ok(LaurentGerm {
            pole,
            const_,
            linear,
            err,
        })
    }

    /// Finite part (the `z⁰` coefficient).
    pub fn finite_part(&self) -> Complex64 {
        self.const_
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cz(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_double_pole() {
        let g = LaurentGerm::new(cz(1.0, 0.0), cz(0.0, 0.0), Some(cz(0.0, 0.0)), 0.0);
        assert_eq!(g.mul(&g), Err(GermError::PoleProduct));
    }

    #[test]
    fn pole_times_gamma_ratio() {
        // (1/(2z) + 3) · z(z+1)···  with k = 3 has finite part (1/2)·2! = 1.
        let zeta = LaurentGerm::new(cz(0.5, 0.0), cz(3.0, 0.0), None, 0.0);
        let p = zeta.mul(&LaurentGerm::gamma_ratio(3)).unwrap();
        assert_eq!(p.pole, cz(0.0, 0.0));
        assert_eq!(p.const_, cz(1.0, 0.0));
        assert!(p.linear.is_none());
    }

    #[test]
    fn missing_linear_is_reported() {
        let pole = LaurentGerm::new(cz(1.0, 0.0), cz(0.0, 0.0), None, 0.0);
        let unknown = LaurentGerm::new(cz(0.0, 0.0), cz(2.0, 0.0), None, 0.0);
        assert_eq!(pole.mul(&unknown), Err(GermError::MissingLinear));
    }

    fn germ_strategy(with_pole: bool) -> impl Strategy<Value = LaurentGerm> {
        (
            prop::array::uniform6(-3.0f64..3.0),
            0.0f64..0.1,
        )
            .prop_map(move |(v, e)| {
                let pole = if with_pole { cz(v[0], v[1]) } else { cz(0.0, 0.0) };
                LaurentGerm::new(pole, cz(v[2], v[3]), Some(cz(v[4], v[5])), e)
            })
    }

    fn perturb(g: &LaurentGerm, rng: &mut ChaCha8Rng) -> LaurentGerm {
        let mut jitter = |v: Complex64, keep_zero: bool| {
            if keep_zero && v == cz(0.0, 0.0) {
                return v;
            }
            let r = g.err * rng.gen::<f64>().sqrt();
            let th = rng.gen::<f64>() * std::f64::consts::TAU;
            v + Complex64::from_polar(r, th)
        };
        LaurentGerm::new(
            jitter(g.pole, true),
            jitter(g.const_, false),
            g.linear.map(|l| jitter(l, false)),
            0.0,
        )
    }

    fn max_dev(a: &LaurentGerm, b: &LaurentGerm) -> f64 {
        let mut d = (a.pole - b.pole).norm().max((a.const_ - b.const_).norm());
        if let (Some(x), Some(y)) = (a.linear, b.linear) {
            d = d.max((x - y).norm());
        }
        d
    }

    proptest! {
        #[test]
        fn product_matches_truncated_expansion(a in germ_strategy(true), b in germ_strategy(false)) {
            let p = a.mul(&b).unwrap();
            let bl = b.linear.unwrap();
            let al = a.linear.unwrap();
            prop_assert!((p.pole - a.pole * b.const_).norm() < 1e-12);
            prop_assert!((p.const_ - (a.const_ * b.const_ + a.pole * bl)).norm() < 1e-12);
            let q = b.mul(&b).unwrap();
            prop_assert!((q.linear.unwrap() - 2.0 * b.const_ * bl).norm() < 1e-12);
            let s = a.add(&b);
            prop_assert!((s.linear.unwrap() - (al + bl)).norm() < 1e-12);
        }

        #[test]
        fn error_bounds_dominate_sampled_perturbations(a in germ_strategy(true), b in germ_strategy(false), seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let prod = a.mul(&b).unwrap();
            let sum = a.add(&b);
            for _ in 0..16 {
                let pa = perturb(&a, &mut rng);
                let pb = perturb(&b, &mut rng);
                prop_assert!(max_dev(&pa.mul(&pb).unwrap(), &prod) <= prod.err + 1e-12);
                prop_assert!(max_dev(&pa.add(&pb), &sum) <= sum.err + 1e-12);
            }
        }
    }
}
