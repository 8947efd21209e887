//! Analytic discs attached to the boundary of a Siegel domain.
//!
//! A coefficient tuple `v = (v_1, ..., v_d)` in `(C^n)^d` determines the map
//!
//! ```text
//! A_v(w) = ( sum_j v_j w^j ,  i psi(v) + 2i sum_{k<j} Phi(v_j, v_k) w^{j-k} )
//! ```
//!
//! whose image for `|w| = 1` lies on the Shilov-type boundary `rho = 0`, and
//! whose center `A_v(0) = (0, i psi(v))` sits over the cone point
//! `psi(v) = sum_j Phi(v_j, v_j)`.  Translating by a group element and
//! lifting by a height `h''` produces closed discs inside the domain along
//! which moduli of holomorphic functions satisfy a sub-mean-value bound.

use num_complex::Complex;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cone::{ConeError, MembershipStatus};
use crate::domain::{DomainError, SiegelSpec};
use crate::form::{AmbientPoint, Complex64, FormError, NPoint};

/// Default number of boundary nodes used by residual and sub-mean checks.
pub const DEFAULT_NODES: usize = 256;

#[derive(Debug, Error)]
pub enum DiscError {
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("a disc needs at least one coefficient vector")]
    EmptyCoefficients,
    #[error("coefficient {index} has {got} components, expected {expected}")]
    CoefficientDimension {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("the cone engine rejected psi(v) as lying outside the closed cone")]
    PsiOutside,
    #[error("the lift height was rejected as lying outside the closed cone")]
    HeightOutside,
    #[error("sub-mean checks need a finite exponent p > 0, got {0}")]
    InvalidExponent(f64),
    #[error("boundary sampling needs at least 8 nodes, got {0}")]
    InvalidNodeCount(usize),
    #[error("function evaluation failed on a disc node: {0}")]
    Evaluation(String),
}

/// An analytic disc given by polynomial coefficients in the first slot.
#[derive(Clone, Debug)]
pub struct DiscCoefficients {
    spec: SiegelSpec,
    coefficients: Vec<Vec<Complex64>>,
    psi: Vec<f64>,
    cross: Vec<Vec<Complex64>>,
}

/// Both sides of the sub-mean-value inequality
/// `|f(center)|^s <= mean_l |f(node_l)|^s` with `s = min(1, p)`.
#[derive(Clone, Debug)]
pub struct SubmeanOutcome {
    pub lhs: f64,
    pub rhs: f64,
    pub exponent: f64,
    pub center: AmbientPoint,
}

impl DiscCoefficients {
    /// Validates shapes and checks that `psi(v)` is not certified outside
    /// the closed cone, which would indicate broken form data.
    pub fn new(spec: &SiegelSpec, coefficients: Vec<Vec<Complex64>>) -> Result<Self, DiscError> {
        if coefficients.is_empty() {
            return Err(DiscError::EmptyCoefficients);
        }
        let n = spec.form().n();
        for (index, v) in coefficients.iter().enumerate() {
            if v.len() != n {
                return Err(DiscError::CoefficientDimension {
                    index,
                    expected: n,
                    got: v.len(),
                });
            }
        }
        let psi = crate::cone::psi(spec.form(), &coefficients)?;
        let verdict = spec.cone().membership(&psi, crate::tol::MEMBERSHIP)?;
        if verdict.status == MembershipStatus::Outside {
            return Err(DiscError::PsiOutside);
        }
        let degree = coefficients.len();
        let m = spec.form().m();
        let two_i = Complex64::new(0.0, 2.0);
        let mut cross = vec![vec![Complex64::new(0.0, 0.0); m]; degree.saturating_sub(1)];
        for j in 1..degree {
            for k in 0..j {
                let val = spec.form().eval(&coefficients[j], &coefficients[k])?;
                let d = j - k;
                for (slot, comp) in cross[d - 1].iter_mut().zip(val) {
                    *slot += two_i * comp;
                }
            }
        }
        Ok(Self {
            spec: spec.clone(),
            coefficients,
            psi,
            cross,
        })
    }

    /// Random coefficients with entries uniform in the centered square of the
    /// given half-width, one vector per power `1..=degree`.
    pub fn random(
        spec: &SiegelSpec,
        degree: usize,
        scale: f64,
        seed: u64,
    ) -> Result<Self, DiscError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = spec.form().n();
        let coefficients = (0..degree.max(1))
            .map(|_| {
                (0..n)
                    .map(|_| {
                        Complex64::new(
                            scale * (2.0 * rng.random::<f64>() - 1.0),
                            scale * (2.0 * rng.random::<f64>() - 1.0),
                        )
                    })
                    .collect()
            })
            .collect();
        Self::new(spec, coefficients)
    }

    pub fn spec(&self) -> &SiegelSpec {
        &self.spec
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len()
    }

    /// `psi(v)`, the cone point under the disc center.
    pub fn psi(&self) -> &[f64] {
        &self.psi
    }

    /// Evaluates `A_v(w)`.
    pub fn eval(&self, w: Complex64) -> AmbientPoint {
        let n = self.spec.form().n();
        let m = self.spec.form().m();
        let mut zeta = vec![Complex64::new(0.0, 0.0); n];
        for v in self.coefficients.iter().rev() {
            for (acc, c) in zeta.iter_mut().zip(v) {
                *acc = (*acc + c) * w;
            }
        }
        let mut z = vec![Complex64::new(0.0, 0.0); m];
        for c in self.cross.iter().rev() {
            for (acc, comp) in z.iter_mut().zip(c) {
                *acc = (*acc + comp) * w;
            }
        }
        for (acc, h) in z.iter_mut().zip(&self.psi) {
            *acc += Complex64::new(0.0, *h);
        }
        AmbientPoint { zeta, z }
    }

    /// Largest sup-norm of `rho` over uniformly spaced boundary nodes.
    pub fn boundary_residual(&self, n_theta: usize) -> Result<f64, DiscError> {
        if n_theta < 8 {
            return Err(DiscError::InvalidNodeCount(n_theta));
        }
        let mut worst: f64 = 0.0;
        for w in unit_roots(n_theta) {
            let p = self.eval(w);
            let r = self.spec.rho(&p);
            for comp in r {
                worst = worst.max(comp.abs());
            }
        }
        Ok(worst)
    }

    /// Boundary nodes of the disc translated by `base` and lifted by `hpp`:
    /// `iota(base) * (A_v(w_l) + (0, i hpp))`.
    pub fn translated_nodes(
        &self,
        base: &NPoint,
        hpp: &[f64],
        n_theta: usize,
    ) -> Result<Vec<AmbientPoint>, DiscError> {
        if n_theta < 8 {
            return Err(DiscError::InvalidNodeCount(n_theta));
        }
        self.check_height(hpp)?;
        let anchor = self.spec.iota(base);
        let nodes = unit_roots(n_theta)
            .map(|w| {
                let mut p = self.eval(w);
                for (acc, h) in p.z.iter_mut().zip(hpp) {
                    *acc += Complex64::new(0.0, *h);
                }
                self.spec.form().mul_ambient(&anchor, &p)
            })
            .collect();
        Ok(nodes)
    }

    /// Center of the translated and lifted disc, which is the slice point of
    /// `base` at height `psi(v) + hpp`.
    pub fn translated_center(&self, base: &NPoint, hpp: &[f64]) -> AmbientPoint {
        let h: Vec<f64> = self.psi.iter().zip(hpp).map(|(a, b)| a + b).collect();
        self.spec.slice_point(base, &h)
    }

    /// Evaluates both sides of the sub-mean-value inequality for a function
    /// holomorphic on a neighborhood of the closed translated disc.
    pub fn submean_check<F>(
        &self,
        base: &NPoint,
        hpp: &[f64],
        p: f64,
        n_theta: usize,
        mut f: F,
    ) -> Result<SubmeanOutcome, DiscError>
    where
        F: FnMut(&AmbientPoint) -> Result<Complex64, DiscError>,
    {
        if !(p.is_finite() && p > 0.0) {
            return Err(DiscError::InvalidExponent(p));
        }
        let nodes = self.translated_nodes(base, hpp, n_theta)?;
        let center = self.translated_center(base, hpp);
        let s = p.min(1.0);
        let lhs = f(&center)?.norm().powf(s);
        let mut sum = 0.0;
        for node in &nodes {
            sum += f(node)?.norm().powf(s);
        }
        let rhs = sum / nodes.len() as f64;
        Ok(SubmeanOutcome {
            lhs,
            rhs,
            exponent: s,
            center,
        })
    }

    fn check_height(&self, hpp: &[f64]) -> Result<(), DiscError> {
        let verdict = self.spec.cone().membership(hpp, crate::tol::MEMBERSHIP)?;
        if verdict.status == MembershipStatus::Outside {
            return Err(DiscError::HeightOutside);
        }
        Ok(())
    }
}

/// The `n`-th roots of unity in counterclockwise order.
pub fn unit_roots(n: usize) -> impl Iterator<Item = Complex64> {
    let step = std::f64::consts::TAU / n as f64;
    (0..n).map(move |l| Complex::from_polar(1.0, step * l as f64))
}
