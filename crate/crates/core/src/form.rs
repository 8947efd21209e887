//! Vector-valued Hermitian forms and the nilpotent group structures they
//! induce on the ambient space and on the quadric manifold.
//!
//! A form is a tuple of Hermitian matrices `A_1, ..., A_m` on `C^n`. It
//! evaluates sesquilinearly, linear in the first argument and conjugate
//! linear in the second:
//!
//! ```text
//! Phi(zeta, zeta')_k = zeta'^* A_k zeta
//! ```
//!
//! The ambient space `C^n x C^m` carries the product
//! `(zeta, z)(zeta', z') = (zeta + zeta', z + z' + 2i Phi(zeta', zeta))`,
//! which restricts to the quadric `{ Im z = Phi(zeta) }`. The manifold
//! coordinates `C^n x R^m` carry the isomorphic product
//! `(zeta, x)(zeta', x') = (zeta + zeta', x + x' + 2 Im Phi(zeta, zeta'))`.

use nalgebra::DMatrix;
use thiserror::Error;

pub type Complex64 = num_complex::Complex<f64>;

/// Validation failures when constructing a [`HermitianForm`].
#[derive(Debug, Error)]
pub enum FormError {
    #[error("form requires at least one coefficient matrix")]
    Empty,
    #[error("coefficient matrix {index} is {rows}x{cols}, expected square of size {expected}")]
    NotSquare {
        index: usize,
        rows: usize,
        cols: usize,
        expected: usize,
    },
    #[error("coefficient matrix {index} deviates from Hermitian symmetry by {deviation:.3e}")]
    NotHermitian { index: usize, deviation: f64 },
    #[error("argument has {got} components, form expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// A tuple of Hermitian `n x n` matrices defining an `R^m`-valued form on `C^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianForm {
    n: usize,
    m: usize,
    matrices: Vec<DMatrix<Complex64>>,
}

/// A point `(zeta, z)` of the ambient space `C^n x C^m`.
#[derive(Clone, Debug, PartialEq)]
pub struct AmbientPoint {
    pub zeta: Vec<Complex64>,
    pub z: Vec<Complex64>,
}

/// A point `(zeta, x)` of the manifold coordinates `C^n x R^m`.
#[derive(Clone, Debug, PartialEq)]
pub struct NPoint {
    pub zeta: Vec<Complex64>,
    pub x: Vec<f64>,
}

impl HermitianForm {
    /// Builds a form from coefficient matrices, validating that each is
    /// square of a common size and Hermitian to within `crate::tol::HERMITIAN`.
    pub fn new(matrices: Vec<DMatrix<Complex64>>) -> Result<Self, FormError> {
        let m = matrices.len();
        if m == 0 {
            return Err(FormError::Empty);
        }
        let n = matrices[0].nrows();
        for (index, a) in matrices.iter().enumerate() {
            if a.nrows() != n || a.ncols() != n {
                return Err(FormError::NotSquare {
                    index,
                    rows: a.nrows(),
                    cols: a.ncols(),
                    expected: n,
                });
            }
            let deviation = (a - a.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max);
            if deviation > crate::tol::HERMITIAN {
                return Err(FormError::NotHermitian { index, deviation });
            }
        }
        Ok(Self { n, m, matrices })
    }

    /// The form on `C^n` with the single coefficient matrix `I_n`, so that
    /// `Phi(zeta) = |zeta|^2`.
    pub fn heisenberg(n: usize) -> Self {
        Self::new(vec![DMatrix::identity(n, n)]).expect("identity matrix is Hermitian")
    }

    /// Builds a form from its diagonal restriction `q(zeta) = Phi(zeta, zeta)`
    /// by polarisation. The closure must return `m` real components and be a
    /// genuine Hermitian diagonal; the result is validated by [`Self::new`].
    pub fn from_diagonal_map<Q>(n: usize, m: usize, q: Q) -> Result<Self, FormError>
    where
        Q: Fn(&[Complex64]) -> Vec<f64>,
    {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let eval = |zeta: &[Complex64]| -> Vec<f64> {
            let out = q(zeta);
            assert_eq!(out.len(), m, "diagonal map returned wrong dimension");
            out
        };
        let mut basis_values = Vec::with_capacity(n);
        for u in 0..n {
            let mut e = vec![zero; n];
            e[u] = one;
            basis_values.push(eval(&e));
        }
        let mut matrices = vec![DMatrix::zeros(n, n); m];
        for u in 0..n {
            for k in 0..m {
                matrices[k][(u, u)] = Complex64::new(basis_values[u][k], 0.0);
            }
            for v in (u + 1)..n {
                let mut sum = vec![zero; n];
                sum[u] = one;
                sum[v] = one;
                let q_sum = eval(&sum);
                sum[v] = i;
                let q_twist = eval(&sum);
                for k in 0..m {
                    let re = 0.5 * (q_sum[k] - basis_values[u][k] - basis_values[v][k]);
                    let im = -0.5 * (q_twist[k] - basis_values[u][k] - basis_values[v][k]);
                    matrices[k][(u, v)] = Complex64::new(re, im);
                    matrices[k][(v, u)] = Complex64::new(re, -im);
                }
            }
        }
        Self::new(matrices)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn matrices(&self) -> &[DMatrix<Complex64>] {
        &self.matrices
    }

    /// Sesquilinear evaluation `Phi(zeta, zeta2)_k = zeta2^* A_k zeta`,
    /// linear in `zeta` and conjugate linear in `zeta2`.
    pub fn eval(&self, zeta: &[Complex64], zeta2: &[Complex64]) -> Result<Vec<Complex64>, FormError> {
        if zeta.len() != self.n {
            return Err(FormError::DimensionMismatch {
                expected: self.n,
                got: zeta.len(),
            });
        }
        if zeta2.len() != self.n {
            return Err(FormError::DimensionMismatch {
                expected: self.n,
                got: zeta2.len(),
            });
        }
        let mut out = Vec::with_capacity(self.m);
        for a in &self.matrices {
            let mut acc = Complex64::new(0.0, 0.0);
            for row in 0..self.n {
                let mut inner = Complex64::new(0.0, 0.0);
                for col in 0..self.n {
                    inner += a[(row, col)] * zeta[col];
                }
                acc += zeta2[row].conj() * inner;
            }
            out.push(acc);
        }
        Ok(out)
    }

    /// The real diagonal `Phi(zeta) = Phi(zeta, zeta)`, written into `out`.
    /// Panics if dimensions disagree; this is the hot path for sampling.
    pub fn diag_into(&self, zeta: &[Complex64], out: &mut [f64]) {
        assert_eq!(zeta.len(), self.n, "zeta has wrong dimension");
        assert_eq!(out.len(), self.m, "output has wrong dimension");
        for (k, a) in self.matrices.iter().enumerate() {
            let mut acc = 0.0;
            for row in 0..self.n {
                let mut inner = Complex64::new(0.0, 0.0);
                for col in 0..self.n {
                    inner += a[(row, col)] * zeta[col];
                }
                acc += (zeta[row].conj() * inner).re;
            }
            out[k] = acc;
        }
    }

    /// The real diagonal `Phi(zeta)` as a fresh vector.
    pub fn diag(&self, zeta: &[Complex64]) -> Vec<f64> {
        let mut out = vec![0.0; self.m];
        self.diag_into(zeta, &mut out);
        out
    }

    /// The real matrix pencil `sum_k lambda_k A_k`.
    pub fn pencil(&self, lambda: &[f64]) -> DMatrix<Complex64> {
        assert_eq!(lambda.len(), self.m, "lambda has wrong dimension");
        let mut out = DMatrix::zeros(self.n, self.n);
        for (l, a) in lambda.iter().zip(&self.matrices) {
            out += a * Complex64::new(*l, 0.0);
        }
        out
    }

    /// Defining data `rho(zeta, z) = Im z - Phi(zeta)`. The quadric manifold
    /// is `rho = 0`; the Siegel domain over a cone `Omega` is `rho in Omega`.
    pub fn rho(&self, p: &AmbientPoint) -> Vec<f64> {
        let phi = self.diag(&p.zeta);
        assert_eq!(p.z.len(), self.m, "z has wrong dimension");
        p.z.iter().zip(phi).map(|(z, f)| z.im - f).collect()
    }

    /// Ambient product `(zeta, z)(zeta', z') = (zeta + zeta', z + z' + 2i Phi(zeta', zeta))`.
    pub fn mul_ambient(&self, p: &AmbientPoint, q: &AmbientPoint) -> AmbientPoint {
        let twist = self.eval(&q.zeta, &p.zeta).expect("operand dimensions must match the form");
        assert_eq!(p.z.len(), self.m, "z has wrong dimension");
        assert_eq!(q.z.len(), self.m, "z has wrong dimension");
        let two_i = Complex64::new(0.0, 2.0);
        AmbientPoint {
            zeta: p.zeta.iter().zip(&q.zeta).map(|(a, b)| a + b).collect(),
            z: p
                .z
                .iter()
                .zip(&q.z)
                .zip(twist)
                .map(|((a, b), t)| a + b + two_i * t)
                .collect(),
        }
    }

    /// Ambient inverse `(zeta, z)^{-1} = (-zeta, -z + 2i Phi(zeta))`.
    pub fn inv_ambient(&self, p: &AmbientPoint) -> AmbientPoint {
        let phi = self.diag(&p.zeta);
        assert_eq!(p.z.len(), self.m, "z has wrong dimension");
        AmbientPoint {
            zeta: p.zeta.iter().map(|c| -c).collect(),
            z: p
                .z
                .iter()
                .zip(phi)
                .map(|(z, f)| -z + Complex64::new(0.0, 2.0 * f))
                .collect(),
        }
    }

    /// Manifold product `(zeta, x)(zeta', x') = (zeta + zeta', x + x' + 2 Im Phi(zeta, zeta'))`.
    pub fn mul_n(&self, a: &NPoint, b: &NPoint) -> NPoint {
        let twist = self.eval(&a.zeta, &b.zeta).expect("operand dimensions must match the form");
        assert_eq!(a.x.len(), self.m, "x has wrong dimension");
        assert_eq!(b.x.len(), self.m, "x has wrong dimension");
        NPoint {
            zeta: a.zeta.iter().zip(&b.zeta).map(|(u, v)| u + v).collect(),
            x: a
                .x
                .iter()
                .zip(&b.x)
                .zip(twist)
                .map(|((u, v), t)| u + v + 2.0 * t.im)
                .collect(),
        }
    }

    /// Manifold inverse `(zeta, x)^{-1} = (-zeta, -x)`.
    pub fn inv_n(&self, a: &NPoint) -> NPoint {
        NPoint {
            zeta: a.zeta.iter().map(|c| -c).collect(),
            x: a.x.iter().map(|v| -v).collect(),
        }
    }

    /// Embedding of the manifold group onto the quadric:
    /// `iota(zeta, x) = (zeta, x + i Phi(zeta))`. A group homomorphism onto
    /// `{ rho = 0 }` with inverse [`project_pi`] on its image.
    pub fn iota(&self, a: &NPoint) -> AmbientPoint {
        let phi = self.diag(&a.zeta);
        assert_eq!(a.x.len(), self.m, "x has wrong dimension");
        AmbientPoint {
            zeta: a.zeta.clone(),
            z: a.x.iter().zip(phi).map(|(x, f)| Complex64::new(*x, f)).collect(),
        }
    }

    /// Vertical translate `iota(a) + (0, ih)`, the point of the domain that
    /// projects to `a` with height `rho = h`.
    pub fn slice_point(&self, a: &NPoint, h: &[f64]) -> AmbientPoint {
        assert_eq!(h.len(), self.m, "h has wrong dimension");
        let mut p = self.iota(a);
        for (z, dh) in p.z.iter_mut().zip(h) {
            *z += Complex64::new(0.0, *dh);
        }
        p
    }
}

/// Projection `(zeta, z) -> (zeta, Re z)`, inverse to `iota` on the quadric
/// and constant along vertical translates.
pub fn project_pi(p: &AmbientPoint) -> NPoint {
    NPoint {
        zeta: p.zeta.clone(),
        x: p.z.iter().map(|z| z.re).collect(),
    }
}
