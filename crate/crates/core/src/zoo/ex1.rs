//! Matrix domains: `E` is the space of `k x r` matrices over `C` or the
//! quaternions whose columns beyond `p` vanish, `F` the self-adjoint `r x r`
//! matrices, `Omega` the positive definite cone, and
//!
//! ```text
//! Phi(zeta, zeta') = 1/2 [ (zeta'^* zeta + zeta^* zeta')
//!                          + I (zeta^* i zeta' - zeta'^* i zeta) ]
//! ```
//!
//! where `i` is the quaternion unit acting from the left and `I` the formal
//! complexification unit (values in `F_C` are stored as a pair of
//! `F`-elements). The diagonal is `Phi(zeta) = zeta^* zeta`. The upper
//! triangular group with positive diagonal acts by `t . h = t h t^*` and the
//! action is equivariant: `t . Phi(zeta) = Phi(zeta t^*)`.

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rand::SeedableRng;

use crate::form::{Complex64, FormError, HermitianForm};
use crate::zoo::quaternion::{Quaternion, QuaternionMatrix};
use crate::zoo::{FieldKind, ZooError};

const E_UNITS: [Quaternion; 2] = [Quaternion::ONE, Quaternion::J];
const F_UNITS: [Quaternion; 4] = [Quaternion::ONE, Quaternion::I, Quaternion::J, Quaternion::K];

/// Sizes of a matrix domain; immutable after construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MatrixDomainSpec {
    field: FieldKind,
    r: usize,
    k: usize,
    p: usize,
}

/// Upper triangular matrix over the domain's field with strictly positive
/// real diagonal; an element of the simply transitive group on `Omega`.
#[derive(Clone, Debug)]
pub struct Triangular {
    mat: QuaternionMatrix,
}

impl Triangular {
    pub fn new(spec: &MatrixDomainSpec, mat: QuaternionMatrix) -> Result<Self, ZooError> {
        let r = spec.r;
        if mat.nrows() != r || mat.ncols() != r {
            return Err(ZooError::InvalidTriangular {
                detail: format!("expected {r}x{r}, got {}x{}", mat.nrows(), mat.ncols()),
            });
        }
        for row in 0..r {
            for col in 0..r {
                let q = mat[(row, col)];
                if row > col && q.norm() > 0.0 {
                    return Err(ZooError::InvalidTriangular {
                        detail: format!("entry ({row},{col}) below the diagonal is nonzero"),
                    });
                }
                if row == col && !(q.i == 0.0 && q.j == 0.0 && q.k == 0.0 && q.re > 0.0) {
                    return Err(ZooError::InvalidTriangular {
                        detail: format!("diagonal entry {row} must be real and positive"),
                    });
                }
                if spec.field == FieldKind::Complex && !q.is_complex(0.0) {
                    return Err(ZooError::InvalidTriangular {
                        detail: format!("entry ({row},{col}) has quaternionic parts over C"),
                    });
                }
            }
        }
        Ok(Self { mat })
    }

    pub fn identity(spec: &MatrixDomainSpec) -> Self {
        Self { mat: QuaternionMatrix::identity(spec.r) }
    }

    pub fn mat(&self) -> &QuaternionMatrix {
        &self.mat
    }

    /// Group product; upper triangular structure and positive diagonals are
    /// preserved because diagonals multiply entrywise.
    pub fn compose(&self, rhs: &Self) -> Self {
        Self { mat: self.mat.matmul(&rhs.mat) }
    }
}

impl MatrixDomainSpec {
    pub fn new(field: FieldKind, r: usize, k: usize, p: usize) -> Result<Self, ZooError> {
        if r == 0 || k == 0 || p == 0 || p > r {
            return Err(ZooError::InvalidSizes {
                detail: format!("need r >= 1, k >= 1, 1 <= p <= r; got r={r}, k={k}, p={p}"),
            });
        }
        Ok(Self { field, r, k, p })
    }

    pub fn field(&self) -> FieldKind {
        self.field
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Complex dimension of `E`.
    pub fn n(&self) -> usize {
        self.k * self.p * self.field.dim_complex()
    }

    /// Real dimension of `F`.
    pub fn m(&self) -> usize {
        let dim = self.field.dim_complex();
        self.r + self.r * (self.r - 1) * dim
    }

    fn e_units(&self) -> &'static [Quaternion] {
        &E_UNITS[..self.field.dim_complex()]
    }

    fn f_units(&self) -> &'static [Quaternion] {
        &F_UNITS[..2 * self.field.dim_complex()]
    }

    /// Rebuilds a `k x r` element of `E` from its complex coordinates. The
    /// layout runs over rows, then active columns, then the left-module
    /// units (1, then j for quaternions). Panics if the length is not `n`.
    pub fn zeta_from_coords(&self, coords: &[Complex64]) -> QuaternionMatrix {
        assert_eq!(coords.len(), self.n(), "coordinate length must be n");
        let units = self.e_units();
        let mut zeta = QuaternionMatrix::zeros(self.k, self.r);
        let mut idx = 0;
        for row in 0..self.k {
            for col in 0..self.p {
                let mut entry = Quaternion::ZERO;
                for unit in units {
                    entry = entry + unit.complex_left_mul(coords[idx]);
                    idx += 1;
                }
                zeta[(row, col)] = entry;
            }
        }
        zeta
    }

    /// Complex coordinates of an element of `E`; errors if the argument does
    /// not respect the shape, the zero columns, or the field constraint.
    pub fn coords_from_zeta(&self, zeta: &QuaternionMatrix) -> Result<Vec<Complex64>, ZooError> {
        self.validate_zeta(zeta)?;
        let mut coords = Vec::with_capacity(self.n());
        for row in 0..self.k {
            for col in 0..self.p {
                let (alpha, beta) = zeta[(row, col)].complex_pair();
                coords.push(alpha);
                if self.field == FieldKind::Quaternionic {
                    coords.push(beta);
                }
            }
        }
        Ok(coords)
    }

    pub fn validate_zeta(&self, zeta: &QuaternionMatrix) -> Result<(), ZooError> {
        if zeta.nrows() != self.k || zeta.ncols() != self.r {
            return Err(ZooError::ShapeMismatch {
                detail: format!(
                    "zeta is {}x{}, expected {}x{}",
                    zeta.nrows(),
                    zeta.ncols(),
                    self.k,
                    self.r
                ),
            });
        }
        for row in 0..self.k {
            for col in 0..self.r {
                let q = zeta[(row, col)];
                if col >= self.p && q.norm() > 0.0 {
                    return Err(ZooError::ShapeMismatch {
                        detail: format!("column {col} must vanish (p = {})", self.p),
                    });
                }
                if self.field == FieldKind::Complex && !q.is_complex(0.0) {
                    return Err(ZooError::ShapeMismatch {
                        detail: format!("entry ({row},{col}) has quaternionic parts over C"),
                    });
                }
            }
        }
        Ok(())
    }

    /// The full sesquilinear form as a pair `(P, Q)` of self-adjoint
    /// matrices representing `P + I Q` in the formal complexification.
    pub fn phi_pair(
        &self,
        zeta: &QuaternionMatrix,
        zeta2: &QuaternionMatrix,
    ) -> Result<(QuaternionMatrix, QuaternionMatrix), ZooError> {
        self.validate_zeta(zeta)?;
        self.validate_zeta(zeta2)?;
        let za = zeta.adjoint();
        let z2a = zeta2.adjoint();
        let p = z2a.matmul(zeta).add(&za.matmul(zeta2)).scale(0.5);
        let q = za
            .matmul(&zeta2.left_mul_i())
            .sub(&z2a.matmul(&zeta.left_mul_i()))
            .scale(0.5);
        Ok((p, q))
    }

    /// The diagonal `Phi(zeta) = zeta^* zeta`.
    pub fn phi_diag(&self, zeta: &QuaternionMatrix) -> Result<QuaternionMatrix, ZooError> {
        self.validate_zeta(zeta)?;
        Ok(zeta.adjoint().matmul(zeta))
    }

    /// Real coordinates of a self-adjoint matrix in the orthonormal basis
    /// `{E_jj}` and `{(E_jl u + E_lj u*) / sqrt(2)}` over the field units.
    pub fn f_coords(&self, h: &QuaternionMatrix) -> Result<Vec<f64>, ZooError> {
        let r = self.r;
        if h.nrows() != r || h.ncols() != r {
            return Err(ZooError::ShapeMismatch {
                detail: format!("h is {}x{}, expected {r}x{r}", h.nrows(), h.ncols()),
            });
        }
        let scale = 1.0 + h.max_entry_norm();
        if !h.is_self_adjoint(1e-8 * scale) {
            return Err(ZooError::ShapeMismatch {
                detail: "h is not self-adjoint".into(),
            });
        }
        let mut coords = Vec::with_capacity(self.m());
        for j in 0..r {
            coords.push(h[(j, j)].re);
        }
        let sqrt2 = 2f64.sqrt();
        for j in 0..r {
            for l in (j + 1)..r {
                for unit in self.f_units() {
                    coords.push(sqrt2 * (unit.conj() * h[(j, l)]).re);
                }
            }
        }
        Ok(coords)
    }

    pub fn f_from_coords(&self, coords: &[f64]) -> QuaternionMatrix {
        assert_eq!(coords.len(), self.m(), "coordinate length must be m");
        let r = self.r;
        let mut h = QuaternionMatrix::zeros(r, r);
        for j in 0..r {
            h[(j, j)] = Quaternion::from_real(coords[j]);
        }
        let inv_sqrt2 = 1.0 / 2f64.sqrt();
        let mut idx = r;
        for j in 0..r {
            for l in (j + 1)..r {
                let mut entry = Quaternion::ZERO;
                for unit in self.f_units() {
                    entry = entry + unit.scale(coords[idx] * inv_sqrt2);
                    idx += 1;
                }
                h[(j, l)] = entry;
                h[(l, j)] = entry.conj();
            }
        }
        h
    }

    pub fn base_point(&self) -> QuaternionMatrix {
        QuaternionMatrix::identity(self.r)
    }

    pub fn base_point_coords(&self) -> Vec<f64> {
        self.f_coords(&self.base_point()).expect("identity is self-adjoint")
    }

    /// The congruence action `t . h = t h t^*`.
    pub fn action(&self, t: &Triangular, h: &QuaternionMatrix) -> QuaternionMatrix {
        t.mat.matmul(h).matmul(&t.mat.adjoint())
    }

    /// `zeta t^*`; stays in `E` because `t^*` is lower triangular.
    pub fn zeta_t_star(&self, zeta: &QuaternionMatrix, t: &Triangular) -> QuaternionMatrix {
        zeta.matmul(&t.mat.adjoint())
    }

    /// `max |t . Phi(zeta) - Phi(zeta t^*)|`; zero in exact arithmetic.
    pub fn equivariance_residual(
        &self,
        t: &Triangular,
        zeta: &QuaternionMatrix,
    ) -> Result<f64, ZooError> {
        let lhs = self.action(t, &self.phi_diag(zeta)?);
        let rhs = self.phi_diag(&self.zeta_t_star(zeta, t))?;
        Ok(lhs.sub(&rhs).max_entry_norm())
    }

    /// The character tuple, with the squared-diagonal normalisation
    /// `Delta_j(t) = t_jj^2` that makes the calibration identity
    /// `Delta^{-b}(t) = |det_C g(t)|^2` exact.
    pub fn delta(&self, t: &Triangular) -> Vec<f64> {
        (0..self.r).map(|j| t.mat[(j, j)].re.powi(2)).collect()
    }

    /// `Delta^s(t) = prod_j Delta_j(t)^{s_j}` for complex exponents.
    pub fn delta_power(&self, t: &Triangular, s: &[Complex64]) -> Complex64 {
        assert_eq!(s.len(), self.r, "exponent tuple must have length r");
        let mut out = Complex64::new(1.0, 0.0);
        for (j, sj) in s.iter().enumerate() {
            let d = t.mat[(j, j)].re.powi(2);
            out *= (sj * d.ln()).exp();
        }
        out
    }

    /// Factors `h = t t^*` with `t` upper triangular and positive diagonal.
    /// This is the inverse of `t -> t . identity`, so it exists and is
    /// unique exactly on the open cone.
    pub fn factor_upper(&self, h: &QuaternionMatrix) -> Result<Triangular, ZooError> {
        let r = self.r;
        if h.nrows() != r || h.ncols() != r {
            return Err(ZooError::ShapeMismatch {
                detail: format!("h is {}x{}, expected {r}x{r}", h.nrows(), h.ncols()),
            });
        }
        let scale = 1.0 + h.max_entry_norm();
        if !h.is_self_adjoint(1e-8 * scale) {
            return Err(ZooError::ShapeMismatch {
                detail: "h is not self-adjoint".into(),
            });
        }
        let mut u = QuaternionMatrix::zeros(r, r);
        for j in (0..r).rev() {
            let mut pivot = h[(j, j)].re;
            for l in (j + 1)..r {
                pivot -= u[(j, l)].norm_sqr();
            }
            if pivot <= 1e-12 * scale {
                return Err(ZooError::NotPositiveDefinite { pivot, index: j });
            }
            let ujj = pivot.sqrt();
            u[(j, j)] = Quaternion::from_real(ujj);
            for i in 0..j {
                let mut acc = h[(i, j)];
                for l in (j + 1)..r {
                    acc = acc - u[(i, l)] * u[(j, l)].conj();
                }
                u[(i, j)] = acc.scale(1.0 / ujj);
            }
        }
        Triangular::new(self, u)
    }

    /// The power function on the cone: factor `h = t t^*` and evaluate
    /// `Delta^s(t)`. Satisfies the cocycle relation
    /// `Delta_Omega^s(t' . h) = Delta^s(t') Delta_Omega^s(h)`.
    pub fn delta_omega_power(
        &self,
        h: &QuaternionMatrix,
        s: &[Complex64],
    ) -> Result<Complex64, ZooError> {
        let t = self.factor_upper(h)?;
        Ok(self.delta_power(&t, s))
    }

    /// The closed-form exponent tuple: `-k dim_C K` on the first `p` slots,
    /// zero afterwards.
    pub fn b_vector(&self) -> Vec<f64> {
        let value = -((self.k * self.field.dim_complex()) as f64);
        (0..self.r).map(|j| if j < self.p { value } else { 0.0 }).collect()
    }

    /// The complex matrix of `g(t): zeta -> zeta t^*` in the coordinates of
    /// `E`; right multiplication commutes with the left module structure, so
    /// the map is `C`-linear.
    pub fn g_matrix(&self, t: &Triangular) -> DMatrix<Complex64> {
        let n = self.n();
        let mut g = DMatrix::zeros(n, n);
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        for u in 0..n {
            let mut coords = vec![zero; n];
            coords[u] = one;
            let image = self.zeta_t_star(&self.zeta_from_coords(&coords), t);
            let image_coords = self
                .coords_from_zeta(&image)
                .expect("right multiplication by t^* preserves E");
            for (row, value) in image_coords.into_iter().enumerate() {
                g[(row, u)] = value;
            }
        }
        g
    }

    /// Checks `Delta^{-b}(t) = |det_C g(t)|^2` on random group elements and
    /// returns the largest relative error; errors beyond `1e-9`.
    pub fn calibrate_b(&self, trials: usize, seed: u64) -> Result<f64, ZooError> {
        let b = self.b_vector();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..trials {
            let t = self.random_triangular(&mut rng);
            let mut lhs = 1.0;
            for (j, bj) in b.iter().enumerate() {
                lhs *= t.mat[(j, j)].re.powi(2).powf(-bj);
            }
            let det = self.g_matrix(&t).determinant();
            let rhs = det.norm_sqr();
            let rel = (lhs - rhs).abs() / lhs.abs();
            worst = worst.max(rel);
        }
        let limit = 1e-9;
        if worst > limit {
            return Err(ZooError::Calibration {
                rel_err: worst,
                limit,
                field: self.field,
                r: self.r,
                k: self.k,
                p: self.p,
            });
        }
        Ok(worst)
    }

    /// Membership in the open cone of positive definite matrices, decided on
    /// the complex embedding.
    pub fn omega_contains(&self, h: &QuaternionMatrix) -> bool {
        h.nrows() == self.r
            && h.ncols() == self.r
            && h.is_self_adjoint(1e-8 * (1.0 + h.max_entry_norm()))
            && h.min_eigenvalue() > 0.0
    }

    /// The coefficient-matrix realisation of `Phi` on the coordinates of `E`
    /// and `F`, via polarisation of the diagonal.
    pub fn materialize(&self) -> Result<HermitianForm, FormError> {
        HermitianForm::from_diagonal_map(self.n(), self.m(), |coords| {
            let zeta = self.zeta_from_coords(coords);
            let phi = self.phi_diag(&zeta).expect("coordinates produce a valid element");
            self.f_coords(&phi).expect("the diagonal is self-adjoint")
        })
    }

    pub fn random_zeta<R: Rng>(&self, rng: &mut R) -> QuaternionMatrix {
        let coords: Vec<Complex64> = (0..self.n())
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(0.7 * re, 0.7 * im)
            })
            .collect();
        self.zeta_from_coords(&coords)
    }

    pub fn random_triangular<R: Rng>(&self, rng: &mut R) -> Triangular {
        let mut mat = QuaternionMatrix::zeros(self.r, self.r);
        for j in 0..self.r {
            let g: f64 = rng.sample(StandardNormal);
            mat[(j, j)] = Quaternion::from_real((0.3 * g).exp());
        }
        let dim = self.field.dim_complex();
        for i in 0..self.r {
            for j in (i + 1)..self.r {
                let mut q = Quaternion::ZERO;
                for unit in F_UNITS.iter().take(2 * dim) {
                    let g: f64 = rng.sample(StandardNormal);
                    q = q + unit.scale(0.4 * g);
                }
                mat[(i, j)] = q;
            }
        }
        Triangular::new(self, mat).expect("construction respects the triangular contract")
    }

    pub fn random_omega_interior<R: Rng>(&self, rng: &mut R) -> QuaternionMatrix {
        let t = self.random_triangular(rng);
        self.action(&t, &self.base_point())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn dimension_bookkeeping() {
        let s = MatrixDomainSpec::new(FieldKind::Complex, 2, 1, 2).unwrap();
        assert_eq!((s.n(), s.m()), (2, 4));
        let s = MatrixDomainSpec::new(FieldKind::Quaternionic, 1, 1, 1).unwrap();
        assert_eq!((s.n(), s.m()), (2, 1));
        let s = MatrixDomainSpec::new(FieldKind::Quaternionic, 3, 2, 2).unwrap();
        assert_eq!((s.n(), s.m()), (8, 15));
        assert!(MatrixDomainSpec::new(FieldKind::Complex, 2, 1, 3).is_err());
    }

    #[test]
    fn diagonal_of_phi_is_the_gram_matrix() {
        let s = MatrixDomainSpec::new(FieldKind::Quaternionic, 1, 1, 1).unwrap();
        let zeta = QuaternionMatrix::from_fn(1, 1, |_, _| Quaternion::J);
        let phi = s.phi_diag(&zeta).unwrap();
        assert!((phi[(0, 0)] - Quaternion::ONE).norm() < 1e-15);
        let s = MatrixDomainSpec::new(FieldKind::Complex, 1, 1, 1).unwrap();
        let zeta = s.zeta_from_coords(&[c(1.0, 1.0)]);
        let phi = s.phi_diag(&zeta).unwrap();
        assert!((phi[(0, 0)].re - 2.0).abs() < 1e-15);
    }

    #[test]
    fn pair_form_has_zero_formal_imaginary_diagonal() {
        let s = MatrixDomainSpec::new(FieldKind::Quaternionic, 2, 2, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let zeta = s.random_zeta(&mut rng);
        let (p, q) = s.phi_pair(&zeta, &zeta).unwrap();
        assert!(p.is_self_adjoint(1e-12));
        assert!(q.max_entry_norm() < 1e-12);
        let diff = p.sub(&s.phi_diag(&zeta).unwrap()).max_entry_norm();
        assert!(diff < 1e-12);
    }

    #[test]
    fn pair_form_is_linear_under_the_complex_structure() {
        let s = MatrixDomainSpec::new(FieldKind::Quaternionic, 2, 1, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let zeta = s.random_zeta(&mut rng);
        let zeta2 = s.random_zeta(&mut rng);
        let (p, q) = s.phi_pair(&zeta, &zeta2).unwrap();
        let (pi, qi) = s.phi_pair(&zeta.left_mul_i(), &zeta2).unwrap();
        // Multiplying the first slot by i multiplies the value by the formal
        // unit: (P, Q) -> (-Q, P).
        assert!(pi.add(&q).max_entry_norm() < 1e-12);
        assert!(qi.sub(&p).max_entry_norm() < 1e-12);
    }

    #[test]
    fn equivariance_is_exact_algebra() {
        for field in [FieldKind::Complex, FieldKind::Quaternionic] {
            let s = MatrixDomainSpec::new(field, 3, 2, 2).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            for _ in 0..20 {
                let t = s.random_triangular(&mut rng);
                let zeta = s.random_zeta(&mut rng);
                assert!(s.equivariance_residual(&t, &zeta).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn delta_uses_squared_diagonals() {
        let s = MatrixDomainSpec::new(FieldKind::Complex, 2, 1, 2).unwrap();
        let mut mat = QuaternionMatrix::identity(2);
        mat[(0, 0)] = Quaternion::from_real(2.0);
        mat[(1, 1)] = Quaternion::from_real(3.0);
        let t = Triangular::new(&s, mat).unwrap();
        assert_eq!(s.delta(&t), vec![4.0, 9.0]);
        let one = c(1.0, 0.0);
        let value = s.delta_power(&t, &[one, one]);
        assert!((value.re - 36.0).abs() < 1e-12 && value.im.abs() < 1e-15);
    }

    #[test]
    fn delta_power_is_a_character() {
        let s = MatrixDomainSpec::new(FieldKind::Quaternionic, 3, 1, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let t1 = s.random_triangular(&mut rng);
        let t2 = s.random_triangular(&mut rng);
        let sexp = [c(0.5, 1.0), c(-1.0, 0.2), c(2.0, 0.0)];
        let lhs = s.delta_power(&t1.compose(&t2), &sexp);
        let rhs = s.delta_power(&t1, &sexp) * s.delta_power(&t2, &sexp);
        assert!((lhs - rhs).norm() < 1e-12 * rhs.norm());
    }

    #[test]
    fn factorization_round_trips() {
        for field in [FieldKind::Complex, FieldKind::Quaternionic] {
            let s = MatrixDomainSpec::new(field, 3, 1, 3).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(9);
            for _ in 0..20 {
                let t = s.random_triangular(&mut rng);
                let h = s.action(&t, &s.base_point());
                let back = s.factor_upper(&h).unwrap();
                let diff = back.mat().sub(t.mat()).max_entry_norm();
                assert!(diff < 1e-9, "factorization not unique: {diff}");
            }
        }
    }

    #[test]
    fn factorization_rejects_indefinite_input() {
        let s = MatrixDomainSpec::new(FieldKind::Complex, 2, 1, 2).unwrap();
        let mut h = QuaternionMatrix::identity(2);
        h[(1, 1)] = Quaternion::from_real(-1.0);
        assert!(matches!(
            s.factor_upper(&h),
            Err(ZooError::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn power_function_on_diagonal_matrices() {
        let s = MatrixDomainSpec::new(FieldKind::Complex, 2, 1, 2).unwrap();
        let mut h = QuaternionMatrix::identity(2);
        h[(0, 0)] = Quaternion::from_real(4.0);
        h[(1, 1)] = Quaternion::from_real(9.0);
        let one = c(1.0, 0.0);
        let v = s.delta_omega_power(&h, &[one, one]).unwrap();
        assert!((v.re - 36.0).abs() < 1e-10);
        let e = s.delta_omega_power(&s.base_point(), &[one, one]).unwrap();
        assert!((e.re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn power_function_cocycle() {
        let s = MatrixDomainSpec::new(FieldKind::Quaternionic, 2, 1, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let sexp = [c(0.7, -0.3), c(1.2, 0.5)];
        for _ in 0..10 {
            let tp = s.random_triangular(&mut rng);
            let h = s.random_omega_interior(&mut rng);
            let lhs = s.delta_omega_power(&s.action(&tp, &h), &sexp).unwrap();
            let rhs = s.delta_power(&tp, &sexp) * s.delta_omega_power(&h, &sexp).unwrap();
            assert!((lhs - rhs).norm() < 1e-10 * rhs.norm());
        }
    }

    #[test]
    fn b_vector_closed_forms() {
        let s = MatrixDomainSpec::new(FieldKind::Complex, 1, 1, 1).unwrap();
        assert_eq!(s.b_vector(), vec![-1.0]);
        let s = MatrixDomainSpec::new(FieldKind::Quaternionic, 2, 2, 2).unwrap();
        assert_eq!(s.b_vector(), vec![-4.0, -4.0]);
        let s = MatrixDomainSpec::new(FieldKind::Complex, 2, 3, 1).unwrap();
        assert_eq!(s.b_vector(), vec![-3.0, 0.0]);
    }

    #[test]
    fn b_calibration_on_small_configurations() {
        for (field, r, k, p) in [
            (FieldKind::Complex, 1, 1, 1),
            (FieldKind::Complex, 2, 1, 2),
            (FieldKind::Quaternionic, 1, 1, 1),
            (FieldKind::Quaternionic, 2, 1, 1),
        ] {
            let s = MatrixDomainSpec::new(field, r, k, p).unwrap();
            let worst = s.calibrate_b(25, 11).unwrap();
            assert!(worst <= 1e-9);
        }
    }

    #[test]
    fn f_coordinates_round_trip() {
        let s = MatrixDomainSpec::new(FieldKind::Quaternionic, 3, 1, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let h = s.random_omega_interior(&mut rng);
        let coords = s.f_coords(&h).unwrap();
        assert_eq!(coords.len(), s.m());
        let back = s.f_from_coords(&coords);
        assert!(back.sub(&h).max_entry_norm() < 1e-12);
    }

    #[test]
    fn quaternionic_line_materializes_to_the_identity_form() {
        let s = MatrixDomainSpec::new(FieldKind::Quaternionic, 1, 1, 1).unwrap();
        let form = s.materialize().unwrap();
        assert_eq!((form.n(), form.m()), (2, 1));
        let a = &form.matrices()[0];
        let id = DMatrix::<Complex64>::identity(2, 2);
        let diff = (a - id).iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(diff < 1e-12);
    }

    #[test]
    fn materialized_form_matches_structured_pairs() {
        for field in [FieldKind::Complex, FieldKind::Quaternionic] {
            let s = MatrixDomainSpec::new(field, 2, 1, 2).unwrap();
            let form = s.materialize().unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(13);
            for _ in 0..20 {
                let zeta = s.random_zeta(&mut rng);
                let zeta2 = s.random_zeta(&mut rng);
                let via_matrix = form
                    .eval(
                        &s.coords_from_zeta(&zeta).unwrap(),
                        &s.coords_from_zeta(&zeta2).unwrap(),
                    )
                    .unwrap();
                let (p, q) = s.phi_pair(&zeta, &zeta2).unwrap();
                let pc = s.f_coords(&p).unwrap();
                let qc = s.f_coords(&q).unwrap();
                for k in 0..s.m() {
                    let structured = Complex64::new(pc[k], qc[k]);
                    assert!(
                        (via_matrix[k] - structured).norm() < 1e-10,
                        "component {k} differs"
                    );
                }
            }
        }
    }

    #[test]
    fn omega_membership_via_embedding() {
        let s = MatrixDomainSpec::new(FieldKind::Quaternionic, 2, 1, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..10 {
            let h = s.random_omega_interior(&mut rng);
            assert!(s.omega_contains(&h));
        }
        let mut neg = s.base_point();
        neg[(0, 0)] = Quaternion::from_real(-1.0);
        assert!(!s.omega_contains(&neg));
    }
}
