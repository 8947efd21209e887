//! Monte-Carlo estimation of slice norms over a Siegel domain.
//!
//! A function on the domain restricts to each horizontal slice at height
//! `h` in `Omega`, giving a function on the underlying group that is
//! integrated against Haar measure (Lebesgue measure on the coordinates).
//! This module estimates the resulting `L^p` norms with a fixed-seed
//! importance sampler, reuses one set of common random numbers across all
//! heights of a grid so that monotone integrands produce monotone estimate
//! sequences, and reports three-sigma violations of the expected decrease
//! along cone directions.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cone::{ConeError, MembershipStatus};
use crate::domain::{DomainError, OmegaKind, SiegelSpec};
use crate::form::{AmbientPoint, Complex64, FormError, HermitianForm, NPoint};
use crate::zoo::ex1::MatrixDomainSpec;
use crate::zoo::ex2::SpinDomainSpec;

/// Default scale multiples used for the approach-to-zero leg of the
/// supremum comparison.  The smallest entry is shared with
/// [`DEFAULT_GLOBAL_SCALES`] so both legs reuse the same estimate there.
pub const DEFAULT_TO_ZERO_SCALES: [f64; 4] = [0.3, 0.1, 0.03, 0.005];

/// Default scale multiples for the global leg of the supremum comparison.
pub const DEFAULT_GLOBAL_SCALES: [f64; 6] = [0.005, 0.02, 0.1, 0.5, 2.0, 5.0];

/// Default power for kernel-type test functions.
pub const DEFAULT_KERNEL_POWER: u32 = 8;

#[derive(Debug, Error)]
pub enum HardyError {
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("kernel construction failed: {0}")]
    DualFrame(String),
    #[error("need exactly {expected} lambda rows, got {got}")]
    LambdaCount { expected: usize, got: usize },
    #[error("lambda row {index} has {got} entries, expected {expected}")]
    LambdaDimension {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("lambda row {index} is not strictly inside the dual cone")]
    LambdaNotDualInterior { index: usize },
    #[error("the lambda rows are numerically rank deficient")]
    LambdaRankDeficient,
    #[error(
        "slice integrals diverge: need m (N p - 1) > n, got m = {m}, n = {n}, N = {power}, p = {p}"
    )]
    NonIntegrable { m: usize, n: usize, power: u32, p: f64 },
    #[error("a nonzero constant has divergent slice integrals for finite p")]
    ConstantNotIntegrable,
    #[error("exponent must be positive and finite or infinity, got {0}")]
    InvalidExponent(f64),
    #[error("grid is invalid: {0}")]
    InvalidGrid(String),
    #[error("height vector has {got} entries, expected {expected}")]
    HeightDimension { expected: usize, got: usize },
    #[error("base height lies outside Omega")]
    BaseHeightOutside,
    #[error("grid height at index {index} leaves Omega")]
    HeightOutsideOmega { index: usize },
    #[error("scan direction is certified outside the closed cone")]
    DirectionOutsideCone,
    #[error("scale direction must lie inside Omega")]
    DirectionOutsideOmega,
    #[error("evaluation hit a pole of the kernel")]
    PoleProximity,
    #[error("sampler configuration invalid: {0}")]
    InvalidSampler(String),
}

/// An integrability exponent, either a positive finite value or infinity.
///
/// Serialized as a plain number, with infinity written as the string
/// `"inf"` so that JSON round trips.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ExponentRepr", into = "ExponentRepr")]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn is_finite(&self) -> bool {
        matches!(self, Exponent::Finite(_))
    }

    pub fn finite_value(&self) -> Option<f64> {
        match self {
            Exponent::Finite(v) => Some(*v),
            Exponent::Infinity => None,
        }
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            Exponent::Finite(v) => *v,
            Exponent::Infinity => f64::INFINITY,
        }
    }

    fn validate(&self) -> Result<(), HardyError> {
        match self {
            Exponent::Finite(v) if v.is_finite() && *v > 0.0 => Ok(()),
            Exponent::Finite(v) => Err(HardyError::InvalidExponent(*v)),
            Exponent::Infinity => Ok(()),
        }
    }
}

impl std::fmt::Display for Exponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Exponent::Finite(v) => write!(f, "{v}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ExponentRepr {
    Number(f64),
    Text(String),
}

impl TryFrom<ExponentRepr> for Exponent {
    type Error = String;

    fn try_from(repr: ExponentRepr) -> Result<Self, String> {
        match repr {
            ExponentRepr::Number(v) if v.is_finite() && v > 0.0 => Ok(Exponent::Finite(v)),
            ExponentRepr::Number(v) if v == f64::INFINITY => Ok(Exponent::Infinity),
            ExponentRepr::Number(v) => Err(format!("exponent must be positive, got {v}")),
            ExponentRepr::Text(s) => match s.trim().to_ascii_lowercase().as_str() {
                "inf" | "infinity" | "∞" => Ok(Exponent::Infinity),
                other => Err(format!("unrecognized exponent {other:?}")),
            },
        }
    }
}

impl From<Exponent> for ExponentRepr {
    fn from(e: Exponent) -> Self {
        match e {
            Exponent::Finite(v) => ExponentRepr::Number(v),
            Exponent::Infinity => ExponentRepr::Text("inf".into()),
        }
    }
}

/// What a test function computes on ambient points.
#[derive(Clone, Debug)]
pub enum FunctionKind {
    /// `prod_i (<lambda_i, z> + i)^(-N)`, holomorphic and bounded on the
    /// domain whenever every `lambda_i` is strictly inside the dual cone.
    DualConeKernel { lambdas: Vec<Vec<f64>>, power: u32 },
    /// A dual-cone kernel times `exp(strength * <direction, rho>)`.  The
    /// extra factor is not holomorphic and breaks norm monotonicity once
    /// the growth beats the kernel decay, which makes it a useful control.
    ScaledControl {
        lambdas: Vec<Vec<f64>>,
        power: u32,
        strength: f64,
        direction: Vec<f64>,
    },
    /// A constant.  Finite-exponent slice norms diverge unless it is zero.
    Constant { value: Complex64 },
}

/// A function on a Siegel domain whose slice norms can be estimated.
#[derive(Clone, Debug)]
pub struct TestFunction {
    spec: SiegelSpec,
    kind: FunctionKind,
}

impl TestFunction {
    /// Kernel with automatically constructed dual-interior lambda rows.
    pub fn dual_cone_kernel(spec: &SiegelSpec, power: u32) -> Result<Self, HardyError> {
        let lambdas = dual_frame(spec)?;
        Self::dual_cone_kernel_with(spec, lambdas, power)
    }

    /// Kernel with caller-supplied lambda rows, validated for dual
    /// interiority and joint invertibility.
    pub fn dual_cone_kernel_with(
        spec: &SiegelSpec,
        lambdas: Vec<Vec<f64>>,
        power: u32,
    ) -> Result<Self, HardyError> {
        validate_lambdas(spec, &lambdas)?;
        if power == 0 {
            return Err(HardyError::InvalidSampler("kernel power must be positive".into()));
        }
        Ok(Self {
            spec: spec.clone(),
            kind: FunctionKind::DualConeKernel { lambdas, power },
        })
    }

    /// Scaled control with automatically constructed lambda rows.
    pub fn scaled_control(
        spec: &SiegelSpec,
        power: u32,
        strength: f64,
        direction: Vec<f64>,
    ) -> Result<Self, HardyError> {
        let lambdas = dual_frame(spec)?;
        Self::scaled_control_with(spec, lambdas, power, strength, direction)
    }

    /// Scaled control with caller-supplied lambda rows.
    pub fn scaled_control_with(
        spec: &SiegelSpec,
        lambdas: Vec<Vec<f64>>,
        power: u32,
        strength: f64,
        direction: Vec<f64>,
    ) -> Result<Self, HardyError> {
        validate_lambdas(spec, &lambdas)?;
        if power == 0 {
            return Err(HardyError::InvalidSampler("kernel power must be positive".into()));
        }
        if direction.len() != spec.form().m() {
            return Err(HardyError::HeightDimension {
                expected: spec.form().m(),
                got: direction.len(),
            });
        }
        if !strength.is_finite() {
            return Err(HardyError::InvalidSampler("scale strength must be finite".into()));
        }
        Ok(Self {
            spec: spec.clone(),
            kind: FunctionKind::ScaledControl {
                lambdas,
                power,
                strength,
                direction,
            },
        })
    }

    pub fn constant(spec: &SiegelSpec, value: Complex64) -> Self {
        Self {
            spec: spec.clone(),
            kind: FunctionKind::Constant { value },
        }
    }

    pub fn spec(&self) -> &SiegelSpec {
        &self.spec
    }

    pub fn kind(&self) -> &FunctionKind {
        &self.kind
    }

    /// Short human-readable label used in reports.
    pub fn label(&self) -> String {
        match &self.kind {
            FunctionKind::DualConeKernel { power, .. } => {
                format!("dual_cone_kernel(N={power})")
            }
            FunctionKind::ScaledControl { power, strength, .. } => {
                format!("scaled_control(N={power},s={strength})")
            }
            FunctionKind::Constant { value } => {
                format!("constant({}+{}i)", value.re, value.im)
            }
        }
    }

    /// Pointwise evaluation at an ambient point.
    pub fn eval(&self, p: &AmbientPoint) -> Result<Complex64, HardyError> {
        match &self.kind {
            FunctionKind::Constant { value } => Ok(*value),
            FunctionKind::DualConeKernel { lambdas, power } => {
                kernel_eval(lambdas, *power, &p.z)
            }
            FunctionKind::ScaledControl {
                lambdas,
                power,
                strength,
                direction,
            } => {
                let base = kernel_eval(lambdas, *power, &p.z)?;
                let rho = self.spec.rho(p);
                let dot: f64 = direction.iter().zip(&rho).map(|(u, r)| u * r).sum();
                Ok(base * (strength * dot).exp())
            }
        }
    }

    /// Evaluation on the slice at height `h` over the group point `a`.
    pub fn slice_eval(&self, a: &NPoint, h: &[f64]) -> Result<Complex64, HardyError> {
        self.eval(&self.spec.slice_point(a, h))
    }
}

fn kernel_eval(lambdas: &[Vec<f64>], power: u32, z: &[Complex64]) -> Result<Complex64, HardyError> {
    let mut acc = Complex64::new(1.0, 0.0);
    for lam in lambdas {
        let mut d = Complex64::i();
        for (lk, zk) in lam.iter().zip(z) {
            d += zk * *lk;
        }
        if d.norm() < 1e-12 {
            return Err(HardyError::PoleProximity);
        }
        acc *= d.inv().powu(power);
    }
    Ok(acc)
}

/// Sampler size, block structure, and master seed.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub samples: u64,
    pub blocks: u32,
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            samples: 200_000,
            blocks: 64,
            seed: 7,
        }
    }
}

impl SamplerConfig {
    fn validate(&self) -> Result<(), HardyError> {
        if self.blocks < 2 {
            return Err(HardyError::InvalidSampler("need at least 2 blocks".into()));
        }
        if self.samples < self.blocks as u64 {
            return Err(HardyError::InvalidSampler(
                "need at least one sample per block".into(),
            ));
        }
        Ok(())
    }

    fn block_counts(&self) -> Vec<u64> {
        let b = self.blocks as u64;
        let base = self.samples / b;
        let rem = self.samples % b;
        (0..b).map(|i| base + u64::from(i < rem)).collect()
    }
}

/// One estimated slice norm.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormEstimate {
    pub p: Exponent,
    pub height: Vec<f64>,
    pub value: f64,
    pub std_error: f64,
    pub samples: u64,
    /// True when the value is a sampled supremum and therefore only a
    /// lower bound on the essential supremum.
    pub lower_bound: bool,
}

/// A three-sigma increase between consecutive grid points.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Violation {
    pub index: usize,
    pub t_before: f64,
    pub t_after: f64,
    pub increase: f64,
    pub sigma: f64,
}

/// Result of a monotonicity scan along `h0 + t * hdir`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub function: String,
    pub p: Exponent,
    pub h0: Vec<f64>,
    pub hdir: Vec<f64>,
    pub ts: Vec<f64>,
    pub estimates: Vec<NormEstimate>,
    pub violations: Vec<Violation>,
    pub seed: u64,
    pub samples: u64,
}

/// Result of comparing the global supremum of slice norms with the
/// estimate at the smallest height approaching the cone vertex.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CorollaryReport {
    pub function: String,
    pub p: Exponent,
    pub direction: Vec<f64>,
    pub to_zero_scales: Vec<f64>,
    pub global_scales: Vec<f64>,
    pub to_zero_estimates: Vec<NormEstimate>,
    pub global_estimates: Vec<NormEstimate>,
    pub sup_scale: f64,
    pub sup_value: f64,
    pub sup_std_error: f64,
    pub liminf_scale: f64,
    pub liminf_value: f64,
    pub liminf_std_error: f64,
    pub gap: f64,
    pub sigma: f64,
    pub compatible: bool,
    pub seed: u64,
    pub samples: u64,
}

/// Builds `m` lambda rows strictly inside the dual cone whose matrix is
/// invertible: a least-squares center fitted to the identity pencil (falling
/// back to the domain base point), plus a shrinking axis perturbation.
pub fn dual_frame(spec: &SiegelSpec) -> Result<Vec<Vec<f64>>, HardyError> {
    let form = spec.form();
    let n = form.n();
    let m = form.m();
    let mut sys = DMatrix::<f64>::zeros(2 * n * n, m);
    for (k, a) in form.matrices().iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                sys[(i * n + j, k)] = a[(i, j)].re;
                sys[(n * n + i * n + j, k)] = a[(i, j)].im;
            }
        }
    }
    let mut rhs = DVector::<f64>::zeros(2 * n * n);
    for i in 0..n {
        rhs[i * n + i] = 1.0;
    }
    let svd = sys.svd(true, true);
    let lsq: Vec<f64> = svd
        .solve(&rhs, 1e-12)
        .map_err(|e| HardyError::DualFrame(e.to_string()))?
        .iter()
        .copied()
        .collect();
    let center = [lsq, spec.base_point().to_vec()]
        .into_iter()
        .find(|cand| dual_interior_ok(spec, cand))
        .ok_or_else(|| HardyError::DualFrame("no dual-interior center found".into()))?;

    let mut eps = 1.0 + center.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    for _ in 0..80 {
        let lambdas: Vec<Vec<f64>> = (0..m)
            .map(|i| {
                let mut row = center.clone();
                row[i] += eps;
                row
            })
            .collect();
        if lambdas.iter().all(|row| dual_interior_ok(spec, row)) && rank_ok(&lambdas) {
            return Ok(lambdas);
        }
        eps *= 0.5;
    }
    Err(HardyError::DualFrame(
        "perturbation size search failed".into(),
    ))
}

/// Whether `lam` is strictly inside the dual cone of `Omega`, with the
/// pencil positivity needed for the sampler's decay estimates.
pub fn dual_interior_ok(spec: &SiegelSpec, lam: &[f64]) -> bool {
    let form = spec.form();
    if lam.len() != form.m() {
        return false;
    }
    let pencil = form.pencil(lam);
    let scale = pencil.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let (min_eig, _) = crate::cone::min_eigenpair(&pencil);
    if min_eig <= 1e-9 * (1.0 + scale) {
        return false;
    }
    let margin = 1e-9 * (1.0 + lam.iter().fold(0.0f64, |acc, v| acc.max(v.abs())));
    match spec.omega() {
        OmegaKind::HalfLine => lam[0] > margin,
        OmegaKind::MatrixPd { field, r } => {
            let helper = match MatrixDomainSpec::new(*field, *r, 1, 1) {
                Ok(h) => h,
                Err(_) => return false,
            };
            let mat = helper.f_from_coords(lam);
            mat.min_eigenvalue() > margin
        }
        OmegaKind::Spin { q } => {
            let helper = match SpinDomainSpec::new(1, 2, *q) {
                Ok(h) => h,
                Err(_) => return false,
            };
            let f = helper.f_from_coords(lam);
            let b2: f64 = f.b.iter().map(|v| v.norm_sqr()).sum();
            f.a > margin && f.c > margin && f.a * f.c - b2 > margin
        }
        OmegaKind::ConeInterior => true,
    }
}

fn rank_ok(lambdas: &[Vec<f64>]) -> bool {
    let m = lambdas.len();
    let mat = DMatrix::from_fn(m, m, |i, j| lambdas[i][j]);
    let sv = mat.svd(false, false).singular_values;
    let max = sv.iter().fold(0.0f64, |a, b| a.max(*b));
    if max == 0.0 {
        return false;
    }
    sv.iter().all(|s| *s > 1e-10 * max)
}

fn validate_lambdas(spec: &SiegelSpec, lambdas: &[Vec<f64>]) -> Result<(), HardyError> {
    let m = spec.form().m();
    if lambdas.len() != m {
        return Err(HardyError::LambdaCount {
            expected: m,
            got: lambdas.len(),
        });
    }
    for (index, row) in lambdas.iter().enumerate() {
        if row.len() != m {
            return Err(HardyError::LambdaDimension {
                index,
                expected: m,
                got: row.len(),
            });
        }
        if !dual_interior_ok(spec, row) {
            return Err(HardyError::LambdaNotDualInterior { index });
        }
    }
    if !rank_ok(lambdas) {
        return Err(HardyError::LambdaRankDeficient);
    }
    Ok(())
}

fn check_integrability(
    spec: &SiegelSpec,
    power: u32,
    p: f64,
) -> Result<(), HardyError> {
    let n = spec.form().n();
    let m = spec.form().m();
    if (m as f64) * (f64::from(power) * p - 1.0) <= n as f64 {
        return Err(HardyError::NonIntegrable { m, n, power, p });
    }
    Ok(())
}

/// splitmix64-style mix of the master seed and a block index.
fn mix_seed(master: u64, block: u64) -> u64 {
    let mut z = master ^ block.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Importance-sampling proposal shared by all heights of a grid.
///
/// The `x` marginal is pushed through the lambda rows: `y_i = <lambda_i, x>`
/// are independent Cauchy draws with scales matched to the kernel at the
/// reference height, so the kernel factors can be evaluated from `y`
/// directly and `x` never needs to be materialized.  The `zeta` marginal is
/// a radial Student-t with two degrees of freedom, whose tails dominate any
/// kernel power.
struct Proposal {
    c: Vec<f64>,
    ln_qx_const: f64,
    sigma: f64,
    ln_qz_const: f64,
    nf: f64,
}

impl Proposal {
    fn new(lambdas: &[Vec<f64>], n: usize, h_ref: &[f64]) -> Result<Self, HardyError> {
        let m = lambdas.len();
        let mat = DMatrix::from_fn(m, m, |i, j| lambdas[i][j]);
        let det = mat.lu().determinant();
        if det == 0.0 || !det.is_finite() {
            return Err(HardyError::LambdaRankDeficient);
        }
        let c: Vec<f64> = lambdas
            .iter()
            .map(|row| {
                let dot: f64 = row.iter().zip(h_ref).map(|(a, b)| a * b).sum();
                (1.0 + dot).abs().max(0.05)
            })
            .collect();
        let sigma: f64 = 1.0;
        let ln_qx_const = det.abs().ln() + c.iter().map(|v| v.ln()).sum::<f64>()
            - m as f64 * std::f64::consts::PI.ln();
        let nf = n as f64;
        let ln_qz_const = ln_factorial(n)
            - nf * (2.0 * std::f64::consts::PI).ln()
            - 2.0 * nf * sigma.ln();
        Ok(Self {
            c,
            ln_qx_const,
            sigma,
            ln_qz_const,
            nf,
        })
    }
}

struct HeightData {
    ch: Vec<f64>,
    ln_scale: f64,
}

struct KernelJob<'a> {
    form: &'a HermitianForm,
    lambdas: &'a [Vec<f64>],
    prop: Proposal,
    heights: Vec<HeightData>,
    exponent_half: f64,
    sup: bool,
    seed: u64,
}

fn kernel_block(job: &KernelJob<'_>, block: u64, count: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(job.seed, block));
    let n = job.form.n();
    let mlam = job.lambdas.len();
    let init = if job.sup { f64::NEG_INFINITY } else { 0.0 };
    let mut out = vec![init; job.heights.len()];
    let mut y = vec![0.0f64; mlam];
    let mut zeta = vec![Complex64::new(0.0, 0.0); n];
    let mut phi = vec![0.0f64; job.form.m()];
    let mut dphi = vec![0.0f64; mlam];
    let two_sigma_sq = 2.0 * job.prop.sigma * job.prop.sigma;
    for _ in 0..count {
        let mut ln_q = job.prop.ln_qx_const + job.prop.ln_qz_const;
        for (yi, ci) in y.iter_mut().zip(&job.prop.c) {
            let u: f64 = rng.random();
            let draw = ci * (std::f64::consts::PI * (u - 0.5)).tan();
            *yi = draw;
            ln_q -= (ci * ci + draw * draw).ln();
        }
        for slot in zeta.iter_mut() {
            let g1: f64 = rng.sample(StandardNormal);
            let g2: f64 = rng.sample(StandardNormal);
            *slot = Complex64::new(g1, g2);
        }
        let u2: f64 = rng.random();
        let chi = (-2.0 * (1.0 - u2).ln()).max(1e-280);
        let radial = job.prop.sigma * (2.0 / chi).sqrt();
        let mut xi2 = 0.0;
        for slot in zeta.iter_mut() {
            *slot *= radial;
            xi2 += slot.norm_sqr();
        }
        ln_q -= (job.prop.nf + 1.0) * (1.0 + xi2 / two_sigma_sq).ln();
        job.form.diag_into(&zeta, &mut phi);
        for (d, lam) in dphi.iter_mut().zip(job.lambdas) {
            *d = lam.iter().zip(&phi).map(|(a, b)| a * b).sum();
        }
        for (acc, hd) in out.iter_mut().zip(&job.heights) {
            let mut lnf2 = 0.0;
            for i in 0..mlam {
                let im = dphi[i] + hd.ch[i];
                lnf2 += (y[i] * y[i] + im * im).ln();
            }
            if job.sup {
                let lnv = -job.exponent_half * lnf2 + hd.ln_scale;
                if lnv > *acc {
                    *acc = lnv;
                }
            } else {
                *acc += (-job.exponent_half * lnf2 + hd.ln_scale - ln_q).exp();
            }
        }
    }
    out
}

/// Estimates the slice norms of `func` at the given heights with one shared
/// set of common random numbers, so estimates across heights are directly
/// comparable.  The proposal is tuned at `h_ref`.
pub fn slice_norms(
    func: &TestFunction,
    p: Exponent,
    heights: &[Vec<f64>],
    h_ref: &[f64],
    cfg: &SamplerConfig,
) -> Result<Vec<NormEstimate>, HardyError> {
    p.validate()?;
    cfg.validate()?;
    let form = func.spec().form();
    let m = form.m();
    if heights.is_empty() {
        return Err(HardyError::InvalidGrid("no heights given".into()));
    }
    for h in heights {
        if h.len() != m {
            return Err(HardyError::HeightDimension {
                expected: m,
                got: h.len(),
            });
        }
    }
    if h_ref.len() != m {
        return Err(HardyError::HeightDimension {
            expected: m,
            got: h_ref.len(),
        });
    }

    let (lambdas, power, scale_part): (&[Vec<f64>], u32, Option<(f64, &[f64])>) =
        match func.kind() {
            FunctionKind::Constant { value } => {
                return constant_norms(*value, p, heights, cfg.samples);
            }
            FunctionKind::DualConeKernel { lambdas, power } => (lambdas, *power, None),
            FunctionKind::ScaledControl {
                lambdas,
                power,
                strength,
                direction,
            } => (lambdas, *power, Some((*strength, direction.as_slice()))),
        };

    let sup = !p.is_finite();
    let pval = p.finite_value().unwrap_or(1.0);
    if let Some(v) = p.finite_value() {
        check_integrability(func.spec(), power, v)?;
    }
    let exponent_half = if sup {
        f64::from(power) / 2.0
    } else {
        f64::from(power) * pval / 2.0
    };
    let height_data: Vec<HeightData> = heights
        .iter()
        .map(|h| {
            let ch = lambdas
                .iter()
                .map(|row| 1.0 + row.iter().zip(h).map(|(a, b)| a * b).sum::<f64>())
                .collect();
            let ln_scale = match scale_part {
                Some((strength, dir)) => {
                    let dot: f64 = dir.iter().zip(h).map(|(u, r)| u * r).sum();
                    if sup {
                        strength * dot
                    } else {
                        pval * strength * dot
                    }
                }
                None => 0.0,
            };
            HeightData { ch, ln_scale }
        })
        .collect();

    let job = KernelJob {
        form,
        lambdas,
        prop: Proposal::new(lambdas, form.n(), h_ref)?,
        heights: height_data,
        exponent_half,
        sup,
        seed: cfg.seed,
    };
    let counts = cfg.block_counts();
    let blocks_out: Vec<Vec<f64>> = (0..counts.len())
        .into_par_iter()
        .map(|b| kernel_block(&job, b as u64, counts[b]))
        .collect();

    let total_samples = cfg.samples;
    let bcount = counts.len();
    let mut estimates = Vec::with_capacity(heights.len());
    for (hi, h) in heights.iter().enumerate() {
        let (value, std_error, lower_bound) = if sup {
            let best = blocks_out
                .iter()
                .map(|v| v[hi])
                .fold(f64::NEG_INFINITY, f64::max);
            (best.exp(), 0.0, true)
        } else {
            let total: f64 = blocks_out.iter().map(|v| v[hi]).sum();
            let mean_i = total / total_samples as f64;
            if !mean_i.is_finite() {
                (f64::INFINITY, f64::INFINITY, false)
            } else if mean_i <= 0.0 {
                (0.0, 0.0, false)
            } else {
                let block_means: Vec<f64> = blocks_out
                    .iter()
                    .zip(&counts)
                    .map(|(v, c)| v[hi] / *c as f64)
                    .collect();
                let grand = block_means.iter().sum::<f64>() / bcount as f64;
                let var = block_means
                    .iter()
                    .map(|bm| (bm - grand).powi(2))
                    .sum::<f64>()
                    / ((bcount - 1) as f64 * bcount as f64);
                let se_i = var.sqrt();
                let value = mean_i.powf(1.0 / pval);
                (value, se_i * value / (pval * mean_i), false)
            }
        };
        estimates.push(NormEstimate {
            p,
            height: h.clone(),
            value,
            std_error,
            samples: total_samples,
            lower_bound,
        });
    }
    Ok(estimates)
}

fn constant_norms(
    value: Complex64,
    p: Exponent,
    heights: &[Vec<f64>],
    samples: u64,
) -> Result<Vec<NormEstimate>, HardyError> {
    let modulus = value.norm();
    let single = match p {
        Exponent::Finite(_) if modulus > 0.0 => return Err(HardyError::ConstantNotIntegrable),
        Exponent::Finite(_) => 0.0,
        Exponent::Infinity => modulus,
    };
    Ok(heights
        .iter()
        .map(|h| NormEstimate {
            p,
            height: h.clone(),
            value: single,
            std_error: 0.0,
            samples,
            lower_bound: false,
        })
        .collect())
}

/// Convenience wrapper estimating a single slice norm with the proposal
/// tuned at the same height.
pub fn lp_norm(
    func: &TestFunction,
    p: Exponent,
    h: &[f64],
    cfg: &SamplerConfig,
) -> Result<NormEstimate, HardyError> {
    let mut v = slice_norms(func, p, &[h.to_vec()], h, cfg)?;
    Ok(v.pop().expect("one height yields one estimate"))
}

/// Flags pairs of consecutive estimates where the later one exceeds the
/// earlier one by more than three combined standard errors.
pub fn detect_violations(ts: &[f64], estimates: &[NormEstimate]) -> Vec<Violation> {
    let mut out = Vec::new();
    for j in 0..estimates.len().saturating_sub(1) {
        let lo = &estimates[j];
        let hi = &estimates[j + 1];
        let sigma = (lo.std_error.powi(2) + hi.std_error.powi(2)).sqrt();
        let bad = if hi.value.is_nan() || lo.value.is_nan() {
            true
        } else if hi.value.is_infinite() {
            lo.value.is_finite()
        } else {
            hi.value > lo.value + 3.0 * sigma
        };
        if bad {
            out.push(Violation {
                index: j,
                t_before: ts[j],
                t_after: ts[j + 1],
                increase: hi.value - lo.value,
                sigma,
            });
        }
    }
    out
}

/// Estimates slice norms along `h0 + t * hdir` for an increasing grid of
/// `t` values and reports any statistically significant increases.
///
/// `h0` must lie in `Omega` and `hdir` must not be certified outside the
/// closed generated cone; under those hypotheses the norms of holomorphic
/// functions are non-increasing in `t`.
pub fn monotonicity_scan(
    func: &TestFunction,
    p: Exponent,
    h0: &[f64],
    hdir: &[f64],
    ts: &[f64],
    cfg: &SamplerConfig,
) -> Result<MonotonicityReport, HardyError> {
    let spec = func.spec();
    let m = spec.form().m();
    if h0.len() != m {
        return Err(HardyError::HeightDimension { expected: m, got: h0.len() });
    }
    if hdir.len() != m {
        return Err(HardyError::HeightDimension { expected: m, got: hdir.len() });
    }
    if ts.is_empty() {
        return Err(HardyError::InvalidGrid("empty t grid".into()));
    }
    if !ts.iter().all(|t| t.is_finite()) || ts[0] < 0.0 {
        return Err(HardyError::InvalidGrid(
            "t grid must be finite and start at t >= 0".into(),
        ));
    }
    if ts.windows(2).any(|w| w[1] <= w[0]) {
        return Err(HardyError::InvalidGrid(
            "t grid must be strictly increasing".into(),
        ));
    }
    if !spec.omega_contains(h0) {
        return Err(HardyError::BaseHeightOutside);
    }
    if hdir.iter().all(|v| *v == 0.0) {
        return Err(HardyError::InvalidGrid("direction is zero".into()));
    }
    let verdict = spec.cone().membership(hdir, crate::tol::MEMBERSHIP)?;
    if verdict.status == MembershipStatus::Outside {
        return Err(HardyError::DirectionOutsideCone);
    }
    let heights: Vec<Vec<f64>> = ts
        .iter()
        .map(|t| h0.iter().zip(hdir).map(|(a, b)| a + t * b).collect())
        .collect();
    for (index, h) in heights.iter().enumerate() {
        if !spec.omega_contains(h) {
            return Err(HardyError::HeightOutsideOmega { index });
        }
    }
    let estimates = slice_norms(func, p, &heights, h0, cfg)?;
    let violations = detect_violations(ts, &estimates);
    Ok(MonotonicityReport {
        function: func.label(),
        p,
        h0: h0.to_vec(),
        hdir: hdir.to_vec(),
        ts: ts.to_vec(),
        estimates,
        violations,
        seed: cfg.seed,
        samples: cfg.samples,
    })
}

/// Compares the supremum of slice norms over a global grid of scale
/// multiples of `direction` with the estimate at the smallest multiple
/// approaching the cone vertex.  For norms that are non-increasing along
/// the ray the two agree, and common random numbers make the comparison
/// exact when the grids share their smallest scale.
pub fn sup_vs_liminf(
    func: &TestFunction,
    p: Exponent,
    direction: &[f64],
    to_zero_scales: &[f64],
    global_scales: &[f64],
    cfg: &SamplerConfig,
) -> Result<CorollaryReport, HardyError> {
    let spec = func.spec();
    let m = spec.form().m();
    if direction.len() != m {
        return Err(HardyError::HeightDimension { expected: m, got: direction.len() });
    }
    if !spec.omega_contains(direction) {
        return Err(HardyError::DirectionOutsideOmega);
    }
    if to_zero_scales.is_empty() || global_scales.is_empty() {
        return Err(HardyError::InvalidGrid("scale grids must be non-empty".into()));
    }
    for s in to_zero_scales.iter().chain(global_scales) {
        if !(s.is_finite() && *s > 0.0) {
            return Err(HardyError::InvalidGrid("scales must be positive".into()));
        }
    }
    let min_scale = to_zero_scales
        .iter()
        .chain(global_scales)
        .fold(f64::INFINITY, |a, b| a.min(*b));
    let scale_height =
        |s: f64| -> Vec<f64> { direction.iter().map(|d| d * s).collect() };
    let heights: Vec<Vec<f64>> = to_zero_scales
        .iter()
        .chain(global_scales)
        .map(|s| scale_height(*s))
        .collect();
    let h_ref = scale_height(min_scale);
    let estimates = slice_norms(func, p, &heights, &h_ref, cfg)?;
    let (to_zero_estimates, global_estimates) = {
        let (a, b) = estimates.split_at(to_zero_scales.len());
        (a.to_vec(), b.to_vec())
    };

    let (li_idx, _) = to_zero_scales
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, bs), (i, s)| {
            if *s < bs {
                (i, *s)
            } else {
                (bi, bs)
            }
        });
    let (liminf_value, liminf_se) = (
        to_zero_estimates[li_idx].value,
        to_zero_estimates[li_idx].std_error,
    );
    let (sup_idx, _) = global_estimates
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, e)| {
            if e.value > bv {
                (i, e.value)
            } else {
                (bi, bv)
            }
        });
    let (sup_value, sup_se) = (
        global_estimates[sup_idx].value,
        global_estimates[sup_idx].std_error,
    );
    let gap = sup_value - liminf_value;
    let sigma = (sup_se.powi(2) + liminf_se.powi(2)).sqrt();
    let compatible = gap.abs() <= 3.0 * sigma + 1e-12 * (1.0 + liminf_value.abs());
    Ok(CorollaryReport {
        function: func.label(),
        p,
        direction: direction.to_vec(),
        to_zero_scales: to_zero_scales.to_vec(),
        global_scales: global_scales.to_vec(),
        to_zero_estimates,
        global_estimates,
        sup_scale: global_scales[sup_idx],
        sup_value,
        sup_std_error: sup_se,
        liminf_scale: to_zero_scales[li_idx],
        liminf_value,
        liminf_std_error: liminf_se,
        gap,
        sigma,
        compatible,
        seed: cfg.seed,
        samples: cfg.samples,
    })
}
