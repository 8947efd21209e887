//! Quaternion scalars and dense quaternion matrices, with the complex
//! 2x2-block embedding used to reduce spectral questions to `C`.
//!
//! A quaternion `q = re + i*i + j*j + k*k` splits as `alpha + beta j` with
//! `alpha = re + i i` and `beta = j + k i` acting from the left, which makes
//! every quaternion vector space a left `C`-module. The embedding
//!
//! ```text
//! q -> [ alpha        beta      ]
//!      [ -conj(beta)  conj(alpha) ]
//! ```
//!
//! is a ring homomorphism commuting with conjugate transposition, so a
//! self-adjoint quaternion matrix is positive definite exactly when its
//! embedded Hermitian matrix is.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::DMatrix;

use crate::form::Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Quaternion {
    pub re: f64,
    pub i: f64,
    pub j: f64,
    pub k: f64,
}

impl Quaternion {
    pub const ZERO: Self = Self { re: 0.0, i: 0.0, j: 0.0, k: 0.0 };
    pub const ONE: Self = Self { re: 1.0, i: 0.0, j: 0.0, k: 0.0 };
    pub const I: Self = Self { re: 0.0, i: 1.0, j: 0.0, k: 0.0 };
    pub const J: Self = Self { re: 0.0, i: 0.0, j: 1.0, k: 0.0 };
    pub const K: Self = Self { re: 0.0, i: 0.0, j: 0.0, k: 1.0 };

    pub fn new(re: f64, i: f64, j: f64, k: f64) -> Self {
        Self { re, i, j, k }
    }

    pub fn from_real(re: f64) -> Self {
        Self { re, ..Self::ZERO }
    }

    pub fn from_complex(c: Complex64) -> Self {
        Self { re: c.re, i: c.im, j: 0.0, k: 0.0 }
    }

    /// The left-module coordinates `(alpha, beta)` with `q = alpha + beta j`.
    pub fn complex_pair(self) -> (Complex64, Complex64) {
        (Complex64::new(self.re, self.i), Complex64::new(self.j, self.k))
    }

    pub fn from_complex_pair(alpha: Complex64, beta: Complex64) -> Self {
        Self { re: alpha.re, i: alpha.im, j: beta.re, k: beta.im }
    }

    pub fn conj(self) -> Self {
        Self { re: self.re, i: -self.i, j: -self.j, k: -self.k }
    }

    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.i * self.i + self.j * self.j + self.k * self.k
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Whether the `j` and `k` components vanish, i.e. the value lies in the
    /// complex subfield.
    pub fn is_complex(self, tol: f64) -> bool {
        self.j.abs() <= tol && self.k.abs() <= tol
    }

    pub fn scale(self, s: f64) -> Self {
        Self { re: self.re * s, i: self.i * s, j: self.j * s, k: self.k * s }
    }

    /// Left multiplication by a complex scalar (the left `C`-module action).
    pub fn complex_left_mul(self, c: Complex64) -> Self {
        Quaternion::from_complex(c) * self
    }
}

impl Add for Quaternion {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            re: self.re + rhs.re,
            i: self.i + rhs.i,
            j: self.j + rhs.j,
            k: self.k + rhs.k,
        }
    }
}

impl Sub for Quaternion {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self {
            re: self.re - rhs.re,
            i: self.i - rhs.i,
            j: self.j - rhs.j,
            k: self.k - rhs.k,
        }
    }
}

impl Neg for Quaternion {
    type Output = Self;
    fn neg(self) -> Self {
        Self { re: -self.re, i: -self.i, j: -self.j, k: -self.k }
    }
}

impl Mul for Quaternion {
    type Output = Self;
    fn mul(self, r: Self) -> Self {
        Self {
            re: self.re * r.re - self.i * r.i - self.j * r.j - self.k * r.k,
            i: self.re * r.i + self.i * r.re + self.j * r.k - self.k * r.j,
            j: self.re * r.j - self.i * r.k + self.j * r.re + self.k * r.i,
            k: self.re * r.k + self.i * r.j - self.j * r.i + self.k * r.re,
        }
    }
}

/// Dense row-major quaternion matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct QuaternionMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Quaternion>,
}

impl QuaternionMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Quaternion::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for d in 0..n {
            m[(d, d)] = Quaternion::ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Quaternion) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "inner dimensions must agree");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for c in 0..rhs.cols {
                let mut acc = Quaternion::ZERO;
                for t in 0..self.cols {
                    acc = acc + self[(r, t)] * rhs[(t, c)];
                }
                out[(r, c)] = acc;
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| *a + *b).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| *a - *b).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, s: f64) -> Self {
        let data = self.data.iter().map(|q| q.scale(s)).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    /// Entrywise left multiplication by the quaternion unit `i` (the complex
    /// structure of a quaternionic coordinate space).
    pub fn left_mul_i(&self) -> Self {
        let data = self.data.iter().map(|q| Quaternion::I * *q).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    /// Largest entrywise quaternion norm, used for residuals.
    pub fn max_entry_norm(&self) -> f64 {
        self.data.iter().map(|q| q.norm()).fold(0.0, f64::max)
    }

    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        self.rows == self.cols && self.sub(&self.adjoint()).max_entry_norm() <= tol
    }

    /// The complex `2 rows x 2 cols` block embedding.
    pub fn embed(&self) -> DMatrix<Complex64> {
        let mut out = DMatrix::zeros(2 * self.rows, 2 * self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                let (alpha, beta) = self[(r, c)].complex_pair();
                out[(2 * r, 2 * c)] = alpha;
                out[(2 * r, 2 * c + 1)] = beta;
                out[(2 * r + 1, 2 * c)] = -beta.conj();
                out[(2 * r + 1, 2 * c + 1)] = alpha.conj();
            }
        }
        out
    }

    /// Smallest eigenvalue of the embedded Hermitian matrix; requires a
    /// self-adjoint input.
    pub fn min_eigenvalue(&self) -> f64 {
        assert_eq!(self.rows, self.cols, "eigenvalues need a square matrix");
        let e = self.embed().symmetric_eigen();
        e.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

impl Index<(usize, usize)> for QuaternionMatrix {
    type Output = Quaternion;
    fn index(&self, (r, c): (usize, usize)) -> &Quaternion {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for QuaternionMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Quaternion {
        &mut self.data[r * self.cols + c]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hamilton_table() {
        assert_eq!(Quaternion::I * Quaternion::J, Quaternion::K);
        assert_eq!(Quaternion::J * Quaternion::K, Quaternion::I);
        assert_eq!(Quaternion::K * Quaternion::I, Quaternion::J);
        assert_eq!(Quaternion::J * Quaternion::I, -Quaternion::K);
        assert_eq!(Quaternion::I * Quaternion::I, -Quaternion::ONE);
    }

    #[test]
    fn conjugation_reverses_products() {
        let p = Quaternion::new(1.0, -2.0, 0.5, 3.0);
        let q = Quaternion::new(-0.3, 1.1, 2.0, -0.7);
        let lhs = (p * q).conj();
        let rhs = q.conj() * p.conj();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn complex_pair_round_trip() {
        let q = Quaternion::new(1.0, 2.0, 3.0, 4.0);
        let (a, b) = q.complex_pair();
        assert_eq!(Quaternion::from_complex_pair(a, b), q);
        // q = alpha + beta * j with beta acting from the left.
        let rebuilt = Quaternion::from_complex(a)
            + Quaternion::from_complex(b) * Quaternion::J;
        assert!((rebuilt - q).norm() < 1e-15);
    }

    #[test]
    fn embedding_is_multiplicative() {
        let p = Quaternion::new(0.2, -1.0, 0.8, 0.4);
        let q = Quaternion::new(1.5, 0.3, -0.6, 2.0);
        let a = QuaternionMatrix::from_fn(1, 1, |_, _| p);
        let b = QuaternionMatrix::from_fn(1, 1, |_, _| q);
        let lhs = a.matmul(&b).embed();
        let rhs = a.embed() * b.embed();
        let diff = (lhs - rhs).iter().map(|c| c.norm()).fold(0.0, f64::max);
        assert!(diff < 1e-12);
    }

    #[test]
    fn embedding_of_units_matches_hand_values() {
        let i = QuaternionMatrix::from_fn(1, 1, |_, _| Quaternion::I).embed();
        assert_eq!(i[(0, 0)], Complex64::new(0.0, 1.0));
        assert_eq!(i[(1, 1)], Complex64::new(0.0, -1.0));
        let j = QuaternionMatrix::from_fn(1, 1, |_, _| Quaternion::J).embed();
        assert_eq!(j[(0, 1)], Complex64::new(1.0, 0.0));
        assert_eq!(j[(1, 0)], Complex64::new(-1.0, 0.0));
        let k = QuaternionMatrix::from_fn(1, 1, |_, _| Quaternion::K).embed();
        assert_eq!(k[(0, 1)], Complex64::new(0.0, 1.0));
        assert_eq!(k[(1, 0)], Complex64::new(0.0, 1.0));
    }

    #[test]
    fn embedding_commutes_with_adjoint() {
        let m = QuaternionMatrix::from_fn(2, 3, |r, c| {
            Quaternion::new(r as f64, c as f64, (r * c) as f64, 1.0)
        });
        let lhs = m.adjoint().embed();
        let rhs = m.embed().adjoint();
        let diff = (lhs - rhs).iter().map(|c| c.norm()).fold(0.0, f64::max);
        assert!(diff < 1e-14);
    }

    #[test]
    fn min_eigenvalue_detects_definiteness() {
        let mut h = QuaternionMatrix::identity(2);
        h[(0, 1)] = Quaternion::new(0.0, 0.0, 0.3, 0.0);
        h[(1, 0)] = h[(0, 1)].conj();
        assert!(h.min_eigenvalue() > 0.0);
        h[(0, 0)] = Quaternion::from_real(-1.0);
        assert!(h.min_eigenvalue() < 0.0);
    }
}
