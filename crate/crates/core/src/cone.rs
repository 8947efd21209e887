//! The closed convex cone generated by the image of the form's diagonal, with
//! two-sided membership certificates.
//!
//! Since `Phi(t zeta) = t^2 Phi(zeta)`, the image of the diagonal map is
//! scale invariant and its closed convex hull `C` is the closed cone
//! generated by `{ Phi(zeta) : |zeta| = 1 }`. Membership of a vector `h` is
//! decided by alternating two certificates:
//!
//! * an inner certificate: nonnegative weights over finitely many generators
//!   whose combination reproduces `h` within tolerance;
//! * an outer certificate: a functional `lambda` whose matrix pencil
//!   `sum_k lambda_k A_k` is positive semidefinite (so `lambda` pairs
//!   nonnegatively with every `Phi(zeta)`, hence with all of `C`) while
//!   `<lambda, h> < 0`.
//!
//! The loop fits `h` over the current generators by nonnegative least
//! squares. A small residual yields the inner certificate. Otherwise the
//! normalised residual `lambda` pairs nonnegatively with every current
//! generator and strictly negatively with `h`; if its pencil is positive
//! semidefinite it is an outer certificate, and if not, the most negative
//! eigenvector produces a new generator that strictly improves the fit.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::form::{Complex64, FormError, HermitianForm};

#[derive(Debug, Error)]
pub enum ConeError {
    #[error(transparent)]
    Form(#[from] FormError),
    #[error("vector has {got} components, cone lives in dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("generator count must be positive")]
    EmptyGenerators,
    #[error("decomposition requires an inner certificate, membership returned {status:?}")]
    NotCertifiedInside { status: MembershipStatus },
}

/// Outcome of a membership query.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MembershipStatus {
    Inside,
    Outside,
    Undetermined,
}

/// A generator of the cone together with its weight in an inner certificate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeightedGenerator {
    pub zeta: Vec<Complex64>,
    pub value: Vec<f64>,
    pub weight: f64,
}

/// Self-contained evidence for a [`MembershipStatus`]; can be rechecked
/// against the form without access to the model that produced it.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// `h ~ sum_i weight_i * value_i` with `value_i = Phi(zeta_i)`.
    Weights { generators: Vec<WeightedGenerator> },
    /// `lambda` pairs nonnegatively with the cone (pencil PSD) and
    /// negatively with `h`.
    Separator {
        lambda: Vec<f64>,
        pencil_min_eig: f64,
        pairing: f64,
    },
    /// No certificate; the search was exhausted.
    None,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MembershipVerdict {
    pub status: MembershipStatus,
    pub certificate: Certificate,
    /// Euclidean distance between `h` and the fitted combination at the last
    /// nonnegative least-squares solve.
    pub residual: f64,
}

impl MembershipVerdict {
    /// Recomputes the certificate against `form` and `h`, returning whether
    /// it supports the claimed status within `tol` (scaled by `max(1, |h|)`).
    pub fn recheck(&self, form: &HermitianForm, h: &[f64], tol: f64) -> bool {
        let scale = 1.0_f64.max(norm(h));
        match (&self.status, &self.certificate) {
            (MembershipStatus::Inside, Certificate::Weights { generators }) => {
                let mut fit = vec![0.0; h.len()];
                for g in generators {
                    if g.weight < 0.0 {
                        return false;
                    }
                    let value = form.diag(&g.zeta);
                    if value
                        .iter()
                        .zip(&g.value)
                        .any(|(a, b)| (a - b).abs() > tol * scale)
                    {
                        return false;
                    }
                    for (f, v) in fit.iter_mut().zip(&value) {
                        *f += g.weight * v;
                    }
                }
                let err: f64 = fit
                    .iter()
                    .zip(h)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                err <= 10.0 * tol * scale
            }
            (MembershipStatus::Outside, Certificate::Separator { lambda, .. }) => {
                if lambda.len() != h.len() {
                    return false;
                }
                let pencil = form.pencil(lambda);
                let min_eig = min_eigenpair(&pencil).0;
                let pairing: f64 = lambda.iter().zip(h).map(|(l, v)| l * v).sum();
                min_eig >= -tol && pairing < -tol * scale
            }
            (MembershipStatus::Undetermined, Certificate::None) => true,
            _ => false,
        }
    }
}

/// The cone generated by the image of the diagonal of a Hermitian form,
/// represented by finitely many sampled generators. Immutable after
/// construction; membership queries extend a local working set only.
#[derive(Clone, Debug)]
pub struct ConeModel {
    form: HermitianForm,
    zetas: Vec<Vec<Complex64>>,
    values: Vec<Vec<f64>>,
}

impl ConeModel {
    /// Builds a model with `generator_count` generators `Phi(zeta)` at
    /// deterministic low-discrepancy unit directions `zeta`.
    pub fn new(form: HermitianForm, generator_count: usize) -> Result<Self, ConeError> {
        if generator_count == 0 {
            return Err(ConeError::EmptyGenerators);
        }
        let zetas = unit_directions(form.n(), generator_count);
        let values = zetas.iter().map(|z| form.diag(z)).collect();
        Ok(Self { form, zetas, values })
    }

    /// Builds a model with the default generator budget `64 * m`.
    pub fn with_default_generators(form: HermitianForm) -> Result<Self, ConeError> {
        let count = 64 * form.m();
        Self::new(form, count)
    }

    pub fn form(&self) -> &HermitianForm {
        &self.form
    }

    pub fn generator_count(&self) -> usize {
        self.zetas.len()
    }

    /// Whether the generators span all of `R^m`; a prerequisite for the cone
    /// to have interior points.
    pub fn spans_f(&self) -> bool {
        let m = self.form.m();
        let g = DMatrix::from_fn(m, self.values.len(), |r, c| self.values[c][r]);
        let sv = g.svd(false, false).singular_values;
        let max = sv.iter().cloned().fold(0.0, f64::max);
        if max == 0.0 {
            return false;
        }
        sv.iter().filter(|s| **s > 1e-9 * max).count() == m
    }

    /// Decides membership of `h` in the closed cone, with a certificate.
    /// `tol` is relative to `max(1, |h|)`; pass `crate::tol::MEMBERSHIP` for
    /// the default behaviour.
    pub fn membership(&self, h: &[f64], tol: f64) -> Result<MembershipVerdict, ConeError> {
        let m = self.form.m();
        if h.len() != m {
            return Err(ConeError::DimensionMismatch {
                expected: m,
                got: h.len(),
            });
        }
        let scale = 1.0_f64.max(norm(h));
        let target = DVector::from_row_slice(h);
        let mut zetas = self.zetas.clone();
        let mut values = self.values.clone();
        let max_rounds = 60;
        let mut residual = f64::INFINITY;
        for _ in 0..max_rounds {
            let g = DMatrix::from_fn(m, values.len(), |r, c| values[c][r]);
            let w = nnls(&g, &target);
            let r = &g * &w - &target;
            residual = r.norm();
            if residual <= tol * scale {
                let mut generators = Vec::new();
                for (i, wi) in w.iter().enumerate() {
                    if *wi > 0.0 {
                        generators.push(WeightedGenerator {
                            zeta: zetas[i].clone(),
                            value: values[i].clone(),
                            weight: *wi,
                        });
                    }
                }
                return Ok(MembershipVerdict {
                    status: MembershipStatus::Inside,
                    certificate: Certificate::Weights { generators },
                    residual,
                });
            }
            let lambda: Vec<f64> = r.iter().map(|v| v / residual).collect();
            let pencil = self.form.pencil(&lambda);
            let (min_eig, eigvec) = min_eigenpair(&pencil);
            if min_eig >= -1e-10 {
                let pairing: f64 = lambda.iter().zip(h).map(|(l, v)| l * v).sum();
                return Ok(MembershipVerdict {
                    status: MembershipStatus::Outside,
                    certificate: Certificate::Separator {
                        lambda,
                        pencil_min_eig: min_eig,
                        pairing,
                    },
                    residual,
                });
            }
            let value = self.form.diag(&eigvec);
            zetas.push(eigvec);
            values.push(value);
        }
        Ok(MembershipVerdict {
            status: MembershipStatus::Undetermined,
            certificate: Certificate::None,
            residual,
        })
    }

    /// Writes `h` with an inner certificate as `h = sum_j Phi(v_j)` and
    /// returns the tuple `(v_j)`, scaling each certified generator by the
    /// square root of its weight. Errors unless membership is `Inside`.
    pub fn decompose(&self, h: &[f64], tol: f64) -> Result<Vec<Vec<Complex64>>, ConeError> {
        let verdict = self.membership(h, tol)?;
        match verdict.certificate {
            Certificate::Weights { generators } => Ok(generators
                .into_iter()
                .filter(|g| g.weight > 0.0)
                .map(|g| {
                    let s = g.weight.sqrt();
                    g.zeta.into_iter().map(|c| c * s).collect()
                })
                .collect()),
            _ => Err(ConeError::NotCertifiedInside {
                status: verdict.status,
            }),
        }
    }
}

/// The sum `psi(v) = sum_j Phi(v_j)`, the height at the centre of the
/// analytic disc with coefficients `v`. Always lies in the closed cone.
pub fn psi(form: &HermitianForm, v: &[Vec<Complex64>]) -> Result<Vec<f64>, ConeError> {
    let mut out = vec![0.0; form.m()];
    let mut buf = vec![0.0; form.m()];
    for vj in v {
        if vj.len() != form.n() {
            return Err(ConeError::Form(FormError::DimensionMismatch {
                expected: form.n(),
                got: vj.len(),
            }));
        }
        form.diag_into(vj, &mut buf);
        for (o, b) in out.iter_mut().zip(&buf) {
            *o += b;
        }
    }
    Ok(out)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Smallest eigenvalue of a Hermitian matrix and a unit eigenvector for it.
pub(crate) fn min_eigenpair(a: &DMatrix<Complex64>) -> (f64, Vec<Complex64>) {
    let eig = a.clone().symmetric_eigen();
    let mut best = 0;
    for i in 1..eig.eigenvalues.len() {
        if eig.eigenvalues[i] < eig.eigenvalues[best] {
            best = i;
        }
    }
    let v = eig.eigenvectors.column(best);
    (eig.eigenvalues[best], v.iter().cloned().collect())
}

/// Lawson-Hanson active-set nonnegative least squares: minimises `|G w - h|`
/// subject to `w >= 0`. Dimensions here are tiny, so subproblems are solved
/// by SVD.
fn nnls(g: &DMatrix<f64>, h: &DVector<f64>) -> DVector<f64> {
    let cols = g.ncols();
    let mut w = DVector::zeros(cols);
    let mut passive = vec![false; cols];
    let eps = 1e-12 * (1.0 + h.norm());
    let max_outer = 3 * cols + 30;
    for _ in 0..max_outer {
        let resid = h - g * &w;
        let grad = g.transpose() * &resid;
        let mut best: Option<(usize, f64)> = None;
        for i in 0..cols {
            if !passive[i] && grad[i] > eps {
                if best.map_or(true, |(_, v)| grad[i] > v) {
                    best = Some((i, grad[i]));
                }
            }
        }
        let Some((enter, _)) = best else {
            break;
        };
        passive[enter] = true;
        loop {
            let active: Vec<usize> = (0..cols).filter(|i| passive[*i]).collect();
            let sub = g.select_columns(active.iter());
            let svd = sub.svd(true, true);
            let s = svd.solve(h, 1e-12).expect("SVD least squares");
            if s.iter().all(|v| *v > 0.0) {
                w.fill(0.0);
                for (k, i) in active.iter().enumerate() {
                    w[*i] = s[k];
                }
                break;
            }
            let mut alpha = f64::INFINITY;
            for (k, i) in active.iter().enumerate() {
                if s[k] <= 0.0 {
                    let denom = w[*i] - s[k];
                    if denom > 0.0 {
                        alpha = alpha.min(w[*i] / denom);
                    }
                }
            }
            if !alpha.is_finite() {
                alpha = 0.0;
            }
            for (k, i) in active.iter().enumerate() {
                w[*i] += alpha * (s[k] - w[*i]);
            }
            for (k, i) in active.iter().enumerate() {
                if s[k] <= 0.0 && w[*i] <= eps {
                    w[*i] = 0.0;
                    passive[*i] = false;
                }
            }
            if active.iter().all(|i| !passive[*i]) {
                break;
            }
        }
    }
    w
}

fn halton(mut index: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while index > 0 {
        f /= base as f64;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

fn first_primes(count: usize) -> Vec<u64> {
    let mut primes = Vec::with_capacity(count);
    let mut candidate = 2u64;
    while primes.len() < count {
        if primes.iter().all(|p| candidate % p != 0) {
            primes.push(candidate);
        }
        candidate += 1;
    }
    primes
}

/// Deterministic low-discrepancy unit vectors in `C^n`: Halton points mapped
/// through Box-Muller pairs to isotropic directions, then normalised.
pub fn unit_directions(n: usize, count: usize) -> Vec<Vec<Complex64>> {
    let dim = 2 * n;
    let primes = first_primes(dim);
    let mut out = Vec::with_capacity(count);
    let mut index = 1u64;
    while out.len() < count {
        let u: Vec<f64> = primes.iter().map(|p| halton(index, *p)).collect();
        index += 1;
        let mut g = vec![0.0; dim];
        for pair in 0..n {
            let u1 = u[2 * pair].max(1e-12);
            let u2 = u[2 * pair + 1];
            let radius = (-2.0 * u1.ln()).sqrt();
            let angle = std::f64::consts::TAU * u2;
            g[2 * pair] = radius * angle.cos();
            g[2 * pair + 1] = radius * angle.sin();
        }
        let nrm = norm(&g);
        if nrm < 1e-9 {
            continue;
        }
        out.push(
            (0..n)
                .map(|j| Complex64::new(g[2 * j] / nrm, g[2 * j + 1] / nrm))
                .collect(),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn heis_model(n: usize) -> ConeModel {
        ConeModel::with_default_generators(HermitianForm::heisenberg(n)).unwrap()
    }

    #[test]
    fn scalar_cone_is_the_nonnegative_half_line() {
        let model = heis_model(1);
        let inside = model.membership(&[2.5], crate::tol::MEMBERSHIP).unwrap();
        assert_eq!(inside.status, MembershipStatus::Inside);
        assert!(inside.recheck(model.form(), &[2.5], crate::tol::MEMBERSHIP));
        let outside = model.membership(&[-1.0], crate::tol::MEMBERSHIP).unwrap();
        assert_eq!(outside.status, MembershipStatus::Outside);
        assert!(outside.recheck(model.form(), &[-1.0], crate::tol::MEMBERSHIP));
    }

    #[test]
    fn zero_vector_is_inside() {
        let model = heis_model(2);
        let v = model.membership(&[0.0], crate::tol::MEMBERSHIP).unwrap();
        assert_eq!(v.status, MembershipStatus::Inside);
    }

    #[test]
    fn psi_sums_diagonal_values() {
        let form = HermitianForm::heisenberg(2);
        let v = vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 1.0), c(1.0, 1.0)]];
        let h = psi(&form, &v).unwrap();
        assert!((h[0] - 4.0).abs() < 1e-14);
    }

    #[test]
    fn psi_image_is_never_outside() {
        let form = HermitianForm::new(vec![
            DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]),
            DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]),
            DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]),
        ])
        .unwrap();
        let model = ConeModel::with_default_generators(form.clone()).unwrap();
        let v = vec![vec![c(0.8, -0.1), c(0.3, 0.4)], vec![c(-0.2, 0.5), c(1.0, 0.0)]];
        let h = psi(&form, &v).unwrap();
        let verdict = model.membership(&h, crate::tol::MEMBERSHIP).unwrap();
        assert_eq!(verdict.status, MembershipStatus::Inside);
    }

    #[test]
    fn psd_cone_membership_matches_eigenvalues() {
        // Phi(zeta) = coordinates of the rank-one matrix zeta zeta^* in the
        // basis {E11, E22, (E12 + E21)/sqrt(2), (iE12 - iE21)/sqrt(2)}; the
        // cone is the positive semidefinite 2x2 Hermitian matrices.
        let s = 1.0 / 2f64.sqrt();
        let form = HermitianForm::new(vec![
            DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]),
            DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]),
            DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(s, 0.0), c(s, 0.0), c(0.0, 0.0)]),
            DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, s), c(0.0, -s), c(0.0, 0.0)]),
        ])
        .unwrap();
        let model = ConeModel::with_default_generators(form).unwrap();
        // diag(1, 2) is positive definite.
        let inside = model
            .membership(&[1.0, 2.0, 0.0, 0.0], crate::tol::MEMBERSHIP)
            .unwrap();
        assert_eq!(inside.status, MembershipStatus::Inside);
        // Off-diagonal 3, diagonal 1: eigenvalues 1 +- 3/sqrt(2).
        let outside = model
            .membership(&[1.0, 1.0, 3.0, 0.0], crate::tol::MEMBERSHIP)
            .unwrap();
        assert_eq!(outside.status, MembershipStatus::Outside);
        assert!(outside.recheck(model.form(), &[1.0, 1.0, 3.0, 0.0], crate::tol::MEMBERSHIP));
    }

    #[test]
    fn decompose_reproduces_the_target() {
        let model = heis_model(3);
        let h = [1.75];
        let v = model.decompose(&h, crate::tol::MEMBERSHIP).unwrap();
        let back = psi(model.form(), &v).unwrap();
        assert!((back[0] - h[0]).abs() < 1e-8);
    }

    #[test]
    fn decompose_refuses_outside_points() {
        let model = heis_model(1);
        assert!(matches!(
            model.decompose(&[-1.0], crate::tol::MEMBERSHIP),
            Err(ConeError::NotCertifiedInside { .. })
        ));
    }

    #[test]
    fn generators_span_the_target_space() {
        let model = heis_model(2);
        assert!(model.spans_f());
    }

    #[test]
    fn unit_directions_are_unit_and_distinct() {
        let dirs = unit_directions(3, 32);
        assert_eq!(dirs.len(), 32);
        for d in &dirs {
            let n: f64 = d.iter().map(|c| c.norm_sqr()).sum();
            assert!((n - 1.0).abs() < 1e-12);
        }
        let a = &dirs[0];
        let b = &dirs[1];
        let dist: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
        assert!(dist > 1e-6);
    }

    #[test]
    fn nnls_matches_hand_solved_problem() {
        // Fit (1, 1) over columns (1, 0) and (0, 1): exact weights (1, 1).
        let g = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let h = DVector::from_row_slice(&[1.0, 1.0]);
        let w = nnls(&g, &h);
        assert!((w[0] - 1.0).abs() < 1e-12);
        assert!((w[1] - 1.0).abs() < 1e-12);
        // Fit -1 over the single column (1): constrained optimum is w = 0.
        let g = DMatrix::from_row_slice(1, 1, &[1.0]);
        let h = DVector::from_row_slice(&[-1.0]);
        let w = nnls(&g, &h);
        assert_eq!(w[0], 0.0);
    }
}
