//! Multiindices and the simplex constants `D(k)` of the small-time expansion.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<u32>);

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, b| a * BigInt::from(b))
}

impl MultiIndex {
    pub fn new(k: Vec<u32>) -> Self {
        MultiIndex(k)
    }

    pub fn slots(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `k! = Π kⱼ!`
    pub fn factorial(&self) -> BigInt {
        self.0.iter().map(|k| factorial(*k)).product()
    }

    /// `(k+1)! = Π (kⱼ+1)!`
    pub fn factorial_plus_one(&self) -> BigInt {
        self.0.iter().map(|k| factorial(k + 1)).product()
    }

    /// Partial sums `Kⱼ = k₁ + … + kⱼ`.
    pub fn partial_sums(&self) -> Vec<u32> {
        self.0
            .iter()
            .scan(0, |acc, k| {
                *acc += k;
                Some(*acc)
            })
            .collect()
    }

    /// All multiindices with `slots` entries and `|k| = total`, in lexicographic order.
    pub fn with_total(slots: usize, total: u32) -> Vec<MultiIndex> {
        fn rec(slots: usize, total: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if slots == 0 {
                if total == 0 {
                    out.push(MultiIndex(prefix.clone()));
                }
                return;
            }
            if slots == 1 {
                prefix.push(total);
                out.push(MultiIndex(prefix.clone()));
                prefix.pop();
                return;
            }
            for k in 0..=total {
                prefix.push(k);
                rec(slots - 1, total - k, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        rec(slots, total, &mut Vec::new(), &mut out);
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "UPPERCASE")]
pub enum CoefficientConvention {
    /// `D(k) = Π 1/(Kⱼ+j) / k!`, from integrating over the simplex.
    #[default]
    Exact,
    /// `D(k) = 1/(k+1)!`, the printed constant.
    Paper,
}

impl CoefficientConvention {
    pub fn name(self) -> &'static str {
        match self {
            CoefficientConvention::Exact => "EXACT",
            CoefficientConvention::Paper => "PAPER",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplexConstant {
    pub k: MultiIndex,
    pub value_exact: BigRational,
    pub value_paper: BigRational,
}

impl SimplexConstant {
    /// Expansion coefficient `D(k)` under a convention.
    pub fn coefficient(&self, conv: CoefficientConvention) -> BigRational {
        match conv {
            CoefficientConvention::Exact => &self.value_exact / BigRational::from_integer(self.k.factorial()),
            CoefficientConvention::Paper => BigRational::new(BigInt::one(), self.k.factorial_plus_one()),
        }
    }
}

/// `∫_{0≤v₁≤…≤v_s≤1} Π vⱼ^{kⱼ} dv` in closed form.
fn closed_form(k: &MultiIndex) -> BigRational {
    k.partial_sums()
        .iter()
        .enumerate()
        .map(|(j, kj)| BigRational::new(BigInt::one(), BigInt::from(kj + j as u32 + 1)))
        .fold(BigRational::one(), |a, b| a * b)
}

/// The same integral by exact iterated integration of polynomials: integrate
/// `v₁` from 0 to `v₂`, then `v₂` from 0 to `v₃`, and so on.
pub fn iterated_simplex_integral(k: &MultiIndex) -> BigRational {
    // polynomial in the current upper variable, coefficients by power
    let mut poly: Vec<BigRational> = vec![BigRational::one()];
    for kj in &k.0 {
        let mut shifted = vec![BigRational::zero(); poly.len() + *kj as usize];
        for (i, c) in poly.iter().enumerate() {
            shifted[i + *kj as usize] = c.clone();
        }
        let mut integ = vec![BigRational::zero(); shifted.len() + 1];
        for (i, c) in shifted.iter().enumerate() {
            integ[i + 1] = c / BigRational::from_integer(BigInt::from(i + 1));
        }
        poly = integ;
    }
    poly.iter().fold(BigRational::zero(), |a, c| a + c)
}

pub fn simplex_constant(k: &MultiIndex) -> SimplexConstant {
    SimplexConstant {
        k: k.clone(),
        value_exact: closed_form(k),
        value_paper: BigRational::new(k.factorial(), k.factorial_plus_one()),
    }
}
