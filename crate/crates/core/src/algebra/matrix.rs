//! Small dense square matrices over a [`Ring`], used for rank-r bundle coefficients.

use super::Ring;

#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Ring> Mat<T> {
    pub fn zeros(dim: usize) -> Self {
        Mat {
            dim,
            data: vec![T::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar(dim, T::one())
    }

    pub fn scalar(dim: usize, c: T) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = c.clone();
        }
        m
    }

    /// Row-major construction; panics when `data.len() != dim²`.
    pub fn from_rows(dim: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), dim * dim, "matrix data has wrong length");
        Mat { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.dim + j] = v;
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Ring::is_zero)
    }

    /// `Some(c)` when the matrix is `c·I`.
    pub fn as_scalar(&self) -> Option<T> {
        let c = self.get(0, 0).clone();
        for i in 0..self.dim {
            for j in 0..self.dim {
                let v = self.get(i, j);
                if i == j && *v != c || i != j && !v.is_zero() {
                    return None;
                }
            }
        }
        Some(c)
    }

    pub fn trace(&self) -> T {
        let mut acc = T::zero();
        for i in 0..self.dim {
            acc = acc.add_ref(self.get(i, i));
        }
        acc
    }

    pub fn map<U, F: Fn(&T) -> U>(&self, f: F) -> Mat<U> {
        Mat {
            dim: self.dim,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn zip_with<F: Fn(&T, &T) -> T>(&self, o: &Self, f: F) -> Self {
        assert_eq!(self.dim, o.dim, "matrix rank mismatch");
        Mat {
            dim: self.dim,
            data: self.data.iter().zip(&o.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip_with(o, T::add_ref)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip_with(o, T::sub_ref)
    }

    pub fn neg(&self) -> Self {
        self.map(T::neg_ref)
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|v| c.mul_ref(v))
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.dim, o.dim, "matrix rank mismatch");
        let n = self.dim;
        if n == 1 {
            return Mat {
                dim: 1,
                data: vec![self.data[0].mul_ref(&o.data[0])],
            };
        }
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = o.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * n + j;
                    out.data[idx] = out.data[idx].add_ref(&a.mul_ref(b));
                }
            }
        }
        out
    }
}
