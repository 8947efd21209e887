//! Siegel domains `D = { (zeta, z) : Im z - Phi(zeta) in Omega }` over an
//! open convex cone `Omega` satisfying `Omega = Omega + closure(C)`, where
//! `C` is the cone generated by the image of `Phi`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cone::{ConeError, ConeModel, MembershipStatus};
use crate::form::{AmbientPoint, FormError, HermitianForm, NPoint};
use crate::zoo::ex1::MatrixDomainSpec;
use crate::zoo::ex2::SpinDomainSpec;
use crate::zoo::{FieldKind, ZooError};

#[derive(Debug, Error)]
pub enum DomainError {
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Zoo(#[from] ZooError),
    #[error("base point has {got} components, expected {expected}")]
    BasePointDimension { expected: usize, got: usize },
    #[error("base point fails the cone membership test for Omega")]
    BasePointOutside,
    #[error("Omega predicate {predicate} expects dimension {expected}, form has m = {got}")]
    OmegaDimension {
        predicate: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("sampled invariance Omega = Omega + closure(C) failed at trial {trial}")]
    InvarianceFailure { trial: usize },
}

/// The membership predicate for the cone `Omega` over which the domain sits.
#[derive(Clone, Debug)]
pub enum OmegaKind {
    /// `m = 1`, `h > 0`.
    HalfLine,
    /// Positive definite self-adjoint `r x r` matrices over the field,
    /// decided on the complex embedding of the coordinate reconstruction.
    MatrixPd { field: FieldKind, r: usize },
    /// The rank-two cone `a, c > 0`, `ac - |b|^2 > 0` with `b` in `C^q`.
    Spin { q: usize },
    /// Fallback for inline domains: the interior of the generated cone,
    /// probed by membership of small axis perturbations.
    ConeInterior,
}

impl OmegaKind {
    fn expected_m(&self) -> Option<(&'static str, usize)> {
        match self {
            OmegaKind::HalfLine => Some(("half-line", 1)),
            OmegaKind::MatrixPd { field, r } => {
                let dim = field.dim_complex();
                Some(("matrix-pd", r + r * (r - 1) * dim))
            }
            OmegaKind::Spin { q } => Some(("spin", 2 + 2 * q)),
            OmegaKind::ConeInterior => None,
        }
    }
}

/// A Siegel domain specification: the form, the generated-cone model, the
/// `Omega` predicate, and a distinguished interior base point.
#[derive(Clone, Debug)]
pub struct SiegelSpec {
    form: HermitianForm,
    cone: ConeModel,
    omega: OmegaKind,
    base_point: Vec<f64>,
}

impl SiegelSpec {
    pub fn new(
        form: HermitianForm,
        omega: OmegaKind,
        base_point: Vec<f64>,
        generator_count: Option<usize>,
    ) -> Result<Self, DomainError> {
        if let Some((predicate, expected)) = omega.expected_m() {
            if expected != form.m() {
                return Err(DomainError::OmegaDimension {
                    predicate,
                    expected,
                    got: form.m(),
                });
            }
        }
        if base_point.len() != form.m() {
            return Err(DomainError::BasePointDimension {
                expected: form.m(),
                got: base_point.len(),
            });
        }
        let cone = match generator_count {
            Some(count) => ConeModel::new(form.clone(), count)?,
            None => ConeModel::with_default_generators(form.clone())?,
        };
        let spec = Self { form, cone, omega, base_point };
        if !spec.omega_contains(&spec.base_point) {
            return Err(DomainError::BasePointOutside);
        }
        Ok(spec)
    }

    /// The half-plane-over-half-line domain on `C^n x C`: `Phi = |zeta|^2`.
    pub fn heisenberg(n: usize) -> Self {
        Self::new(
            HermitianForm::heisenberg(n),
            OmegaKind::HalfLine,
            vec![1.0],
            None,
        )
        .expect("the half-line setup is always valid")
    }

    pub fn form(&self) -> &HermitianForm {
        &self.form
    }

    pub fn cone(&self) -> &ConeModel {
        &self.cone
    }

    pub fn omega(&self) -> &OmegaKind {
        &self.omega
    }

    pub fn base_point(&self) -> &[f64] {
        &self.base_point
    }

    /// Whether `h` lies in the open cone `Omega`.
    pub fn omega_contains(&self, h: &[f64]) -> bool {
        if h.len() != self.form.m() {
            return false;
        }
        match &self.omega {
            OmegaKind::HalfLine => h[0] > 0.0,
            OmegaKind::MatrixPd { field, r } => {
                let helper = MatrixDomainSpec::new(*field, *r, 1, 1)
                    .expect("r >= 1 by construction");
                helper.omega_contains(&helper.f_from_coords(h))
            }
            OmegaKind::Spin { q } => {
                let helper = SpinDomainSpec::new(1, 2, *q).expect("q >= 1 by construction");
                helper.omega_contains(&helper.f_from_coords(h))
            }
            OmegaKind::ConeInterior => {
                let tol = crate::tol::MEMBERSHIP;
                let delta = 1e-5 * (1.0 + h.iter().map(|v| v * v).sum::<f64>().sqrt());
                let mut probe = h.to_vec();
                for k in 0..h.len() {
                    for sign in [-1.0, 1.0] {
                        probe[k] = h[k] + sign * delta;
                        let status = self
                            .cone
                            .membership(&probe, tol)
                            .map(|v| v.status)
                            .unwrap_or(MembershipStatus::Outside);
                        if status != MembershipStatus::Inside {
                            return false;
                        }
                    }
                    probe[k] = h[k];
                }
                true
            }
        }
    }

    /// Whether the ambient point lies in the open domain `D`.
    pub fn contains(&self, p: &AmbientPoint) -> bool {
        self.omega_contains(&self.form.rho(p))
    }

    pub fn rho(&self, p: &AmbientPoint) -> Vec<f64> {
        self.form.rho(p)
    }

    pub fn iota(&self, a: &NPoint) -> AmbientPoint {
        self.form.iota(a)
    }

    pub fn slice_point(&self, a: &NPoint, h: &[f64]) -> AmbientPoint {
        self.form.slice_point(a, h)
    }

    /// Sampled check of the invariance `Omega = Omega + closure(C)`:
    /// perturbed multiples of the base point stay in `Omega` after adding
    /// values of `Phi`.
    pub fn check_invariance(&self, trials: usize, seed: u64) -> Result<(), DomainError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.form.n();
        for trial in 0..trials {
            let scale: f64 = 0.2 + 3.0 * rng.random::<f64>();
            let h: Vec<f64> = self.base_point.iter().map(|v| v * scale).collect();
            if !self.omega_contains(&h) {
                return Err(DomainError::InvarianceFailure { trial });
            }
            let zeta: Vec<crate::form::Complex64> = (0..n)
                .map(|_| {
                    crate::form::Complex64::new(
                        rng.random::<f64>() * 2.0 - 1.0,
                        rng.random::<f64>() * 2.0 - 1.0,
                    )
                })
                .collect();
            let shifted: Vec<f64> = h
                .iter()
                .zip(self.form.diag(&zeta))
                .map(|(a, b)| a + b)
                .collect();
            if !self.omega_contains(&shifted) {
                return Err(DomainError::InvarianceFailure { trial });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::Complex64;

    #[test]
    fn heisenberg_domain_basics() {
        let spec = SiegelSpec::heisenberg(1);
        assert!(spec.omega_contains(&[0.5]));
        assert!(!spec.omega_contains(&[0.0]));
        assert!(!spec.omega_contains(&[-1.0]));
        let p = AmbientPoint {
            zeta: vec![Complex64::new(1.0, 0.0)],
            z: vec![Complex64::new(0.0, 2.0)],
        };
        assert!(spec.contains(&p));
        spec.check_invariance(64, 3).unwrap();
    }

    #[test]
    fn base_point_must_lie_inside() {
        let form = HermitianForm::heisenberg(1);
        let err = SiegelSpec::new(form, OmegaKind::HalfLine, vec![-1.0], None);
        assert!(matches!(err, Err(DomainError::BasePointOutside)));
    }

    #[test]
    fn omega_dimension_is_validated() {
        let form = HermitianForm::heisenberg(1);
        let err = SiegelSpec::new(form, OmegaKind::Spin { q: 1 }, vec![1.0], None);
        assert!(matches!(err, Err(DomainError::OmegaDimension { .. })));
    }

    #[test]
    fn cone_interior_fallback_on_the_half_line() {
        let spec = SiegelSpec::new(
            HermitianForm::heisenberg(1),
            OmegaKind::ConeInterior,
            vec![1.0],
            None,
        )
        .unwrap();
        assert!(spec.omega_contains(&[0.5]));
        assert!(!spec.omega_contains(&[-0.3]));
    }
}
