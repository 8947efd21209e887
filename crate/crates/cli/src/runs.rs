//! Subcommand implementations.
//!
//! Every run returns either an [`Outcome`] (how many violations were
//! observed, plus a one-line summary) or a [`Failure`] carrying the exit
//! code: 2 for config parse problems, 3 for precondition failures.

use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use quadric::cone::{Certificate, ConeError, MembershipStatus};
use quadric::config::{ConfigError, ExperimentConfig};
use quadric::disc::{DiscCoefficients, DiscError};
use quadric::domain::{DomainError, SiegelSpec};
use quadric::form::{Complex64, FormError, NPoint};
use quadric::hardy::{
    monotonicity_scan, sup_vs_liminf, CorollaryReport, Exponent, HardyError, MonotonicityReport,
};
use quadric::registry::{self, RegistryError};
use quadric::report::{self, ConeAuditRow, DiscCheckRow};

pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn config(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    pub fn precondition(message: impl Into<String>) -> Self {
        Self { code: 3, message: message.into() }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Io(_)
            | ConfigError::Toml(_)
            | ConfigError::Json(_)
            | ConfigError::Invalid(_) => Failure::config(e.to_string()),
            _ => Failure::precondition(e.to_string()),
        }
    }
}

impl From<HardyError> for Failure {
    fn from(e: HardyError) -> Self {
        Failure::precondition(e.to_string())
    }
}

impl From<DiscError> for Failure {
    fn from(e: DiscError) -> Self {
        Failure::precondition(e.to_string())
    }
}

impl From<ConeError> for Failure {
    fn from(e: ConeError) -> Self {
        Failure::precondition(e.to_string())
    }
}

impl From<DomainError> for Failure {
    fn from(e: DomainError) -> Self {
        Failure::precondition(e.to_string())
    }
}

impl From<RegistryError> for Failure {
    fn from(e: RegistryError) -> Self {
        Failure::precondition(e.to_string())
    }
}

impl From<FormError> for Failure {
    fn from(e: FormError) -> Self {
        Failure::precondition(e.to_string())
    }
}

pub struct Outcome {
    pub violations: usize,
    pub summary: String,
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

/// Writes `content` to `<out>/<stem>.<ext>` when an output directory is
/// given, otherwise prints it to stdout.
fn emit(
    out: Option<&Path>,
    stem: &str,
    format: OutputFormat,
    content: &str,
) -> Result<Option<PathBuf>, Failure> {
    match out {
        Some(dir) => {
            fs::create_dir_all(dir)
                .map_err(|e| Failure::precondition(format!("cannot create {dir:?}: {e}")))?;
            let path = dir.join(format!("{stem}.{}", format.extension()));
            fs::write(&path, content)
                .map_err(|e| Failure::precondition(format!("cannot write {path:?}: {e}")))?;
            Ok(Some(path))
        }
        None => {
            print!("{content}");
            Ok(None)
        }
    }
}

fn build_domain(cfg: &ExperimentConfig) -> Result<(String, SiegelSpec), Failure> {
    Ok(cfg.domain.build()?)
}

fn csv_rows_only(full: &str) -> &str {
    full.split_once('\n').map(|(_, rows)| rows).unwrap_or("")
}

pub fn verify_monotonicity(
    cfg: &ExperimentConfig,
    out: Option<&Path>,
    format: OutputFormat,
) -> Result<Outcome, Failure> {
    let (label, spec) = build_domain(cfg)?;
    let func = cfg.function.build(&spec)?;
    let sampler = cfg.sampler.to_config();
    let (h0, hdir, ts) = cfg.grid.resolve(&spec);
    let mut reports: Vec<MonotonicityReport> = Vec::with_capacity(cfg.p.len());
    for p in &cfg.p {
        reports.push(monotonicity_scan(&func, *p, &h0, &hdir, &ts, &sampler)?);
    }
    let violations: usize = reports.iter().map(|r| r.violations.len()).sum();
    let content = match format {
        OutputFormat::Csv => {
            let mut s = String::from(report::NORM_CSV_HEADER);
            s.push('\n');
            for r in &reports {
                s.push_str(csv_rows_only(&report::monotonicity_csv(&label, r)));
            }
            s
        }
        OutputFormat::Json => report::to_json(&reports),
    };
    emit(out, "verify-monotonicity", format, &content)?;
    Ok(Outcome {
        violations,
        summary: format!(
            "verify-monotonicity: domain={label} exponents={} grid_points={} violations={violations}",
            cfg.p.len(),
            ts.len()
        ),
    })
}

pub fn corollary_check(
    cfg: &ExperimentConfig,
    out: Option<&Path>,
    format: OutputFormat,
) -> Result<Outcome, Failure> {
    let (label, spec) = build_domain(cfg)?;
    let func = cfg.function.build(&spec)?;
    let sampler = cfg.sampler.to_config();
    let direction = cfg
        .corollary
        .direction
        .clone()
        .unwrap_or_else(|| spec.base_point().to_vec());
    let mut reports: Vec<CorollaryReport> = Vec::with_capacity(cfg.p.len());
    for p in &cfg.p {
        reports.push(sup_vs_liminf(
            &func,
            *p,
            &direction,
            &cfg.corollary.to_zero,
            &cfg.corollary.global,
            &sampler,
        )?);
    }
    let incompatible = reports.iter().filter(|r| !r.compatible).count();
    let content = match format {
        OutputFormat::Csv => {
            let mut s = String::from(report::NORM_CSV_HEADER);
            s.push('\n');
            for r in &reports {
                s.push_str(csv_rows_only(&report::corollary_csv(&label, r)));
            }
            s
        }
        OutputFormat::Json => report::to_json(&reports),
    };
    emit(out, "corollary-check", format, &content)?;
    Ok(Outcome {
        violations: incompatible,
        summary: format!(
            "corollary-check: domain={label} exponents={} incompatible={incompatible}",
            cfg.p.len()
        ),
    })
}

#[derive(Serialize)]
struct DiscCheckReport {
    domain: String,
    rows: Vec<DiscCheckRow>,
    worst_residual: f64,
    residual_limit: f64,
    center_failures: usize,
    submean_checked: usize,
    submean_failures: usize,
}

pub fn disc_check(
    cfg: &ExperimentConfig,
    out: Option<&Path>,
    format: OutputFormat,
) -> Result<Outcome, Failure> {
    let (label, spec) = build_domain(cfg)?;
    let d = &cfg.disc;
    let residual_limit = 1e-9;
    let mut rows = Vec::with_capacity(d.count);
    let mut worst: f64 = 0.0;
    let mut residual_failures = 0usize;
    let mut center_failures = 0usize;
    for i in 0..d.count {
        let seed = cfg.sampler.seed.wrapping_add(i as u64);
        let disc = DiscCoefficients::random(&spec, d.degree, d.scale, seed)?;
        let res = disc.boundary_residual(d.n_theta)?;
        worst = worst.max(res);
        if res > residual_limit {
            residual_failures += 1;
        }
        let center = disc.eval(Complex64::new(0.0, 0.0));
        let center_ok = center.zeta.iter().all(|c| c.norm() <= 1e-12)
            && center
                .z
                .iter()
                .zip(disc.psi())
                .all(|(z, h)| z.re.abs() <= 1e-12 && (z.im - h).abs() <= 1e-12);
        if !center_ok {
            center_failures += 1;
        }
        rows.push(DiscCheckRow {
            seed,
            domain: label.clone(),
            max_residual: res,
            n_theta: d.n_theta,
        });
    }

    let func = cfg.function.build(&spec)?;
    let p_sub = cfg
        .p
        .iter()
        .find_map(Exponent::finite_value)
        .unwrap_or(1.0);
    let mut submean_failures = 0usize;
    let n = spec.form().n();
    let m = spec.form().m();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.sampler.seed.wrapping_mul(0x9E37_79B9));
    for i in 0..d.submean {
        let seed = cfg.sampler.seed.wrapping_add(10_000 + i as u64);
        let disc = DiscCoefficients::random(&spec, d.degree, d.scale, seed)?;
        let base = NPoint {
            zeta: (0..n)
                .map(|_| {
                    Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
                })
                .collect(),
            x: (0..m).map(|_| 2.0 * rng.random::<f64>() - 1.0).collect(),
        };
        // Heights must stay in the closed cone: combine the disc's own cone
        // point with a fresh form value, both cone members by construction.
        let w: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let shift = spec.form().diag(&w);
        let hpp: Vec<f64> = disc
            .psi()
            .iter()
            .zip(&shift)
            .map(|(v, s)| 0.5 * v + s)
            .collect();
        let outcome = disc.submean_check(&base, &hpp, p_sub, d.n_theta, |q| {
            func.eval(q).map_err(|e| DiscError::Evaluation(e.to_string()))
        })?;
        if outcome.lhs > outcome.rhs + 1e-8 {
            submean_failures += 1;
        }
    }

    let violations = residual_failures + center_failures + submean_failures;
    let content = match format {
        OutputFormat::Csv => report::disc_csv(&rows),
        OutputFormat::Json => report::to_json(&DiscCheckReport {
            domain: label.clone(),
            rows,
            worst_residual: worst,
            residual_limit,
            center_failures,
            submean_checked: d.submean,
            submean_failures,
        }),
    };
    emit(out, "disc-check", format, &content)?;
    Ok(Outcome {
        violations,
        summary: format!(
            "disc-check: domain={label} discs={} worst_residual={:.3e} submean_failures={submean_failures}",
            d.count, worst
        ),
    })
}

#[derive(Serialize)]
struct ConeReport {
    domain: String,
    trials: usize,
    inside: usize,
    outside: usize,
    undetermined: usize,
    conflicts: usize,
    rows: Vec<ConeAuditRow>,
}

pub fn cone_report(
    cfg: &ExperimentConfig,
    out: Option<&Path>,
    format: OutputFormat,
) -> Result<Outcome, Failure> {
    let (label, spec) = build_domain(cfg)?;
    let form = spec.form();
    let cone = spec.cone();
    let n = form.n();
    let m = form.m();
    let tol = quadric::tol::MEMBERSHIP;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.sampler.seed);
    let mut rows = Vec::with_capacity(cfg.cone.trials);
    let (mut inside, mut outside, mut undetermined, mut conflicts) = (0, 0, 0, 0);
    for trial in 0..cfg.cone.trials {
        let (case, h): (&str, Vec<f64>) = match trial % 3 {
            0 => {
                let tuples = 1 + trial / 3 % 2;
                let v: Vec<Vec<Complex64>> = (0..tuples)
                    .map(|_| {
                        (0..n)
                            .map(|_| {
                                Complex64::new(
                                    2.0 * rng.random::<f64>() - 1.0,
                                    2.0 * rng.random::<f64>() - 1.0,
                                )
                            })
                            .collect()
                    })
                    .collect();
                ("psi", quadric::cone::psi(form, &v)?)
            }
            1 => {
                let scale = 0.2 + 2.8 * rng.random::<f64>();
                (
                    "scaled_base",
                    spec.base_point().iter().map(|v| v * scale).collect(),
                )
            }
            _ => (
                "uniform",
                (0..m).map(|_| 2.0 * rng.random::<f64>() - 1.0).collect(),
            ),
        };
        let verdict = cone.membership(&h, tol)?;
        let mut conflict = !verdict.recheck(form, &h, tol);
        match verdict.status {
            MembershipStatus::Inside => inside += 1,
            MembershipStatus::Outside => {
                outside += 1;
                // A value of the form certified outside its own cone, or a
                // separator that pairs negatively with fresh form values,
                // disproves the certificate.
                if case == "psi" {
                    conflict = true;
                }
                if let Certificate::Separator { lambda, .. } = &verdict.certificate {
                    let scale = 1.0 + h.iter().map(|v| v * v).sum::<f64>().sqrt();
                    for _ in 0..200 {
                        let zeta: Vec<Complex64> = (0..n)
                            .map(|_| {
                                Complex64::new(
                                    2.0 * rng.random::<f64>() - 1.0,
                                    2.0 * rng.random::<f64>() - 1.0,
                                )
                            })
                            .collect();
                        let value = form.diag(&zeta);
                        let pairing: f64 =
                            lambda.iter().zip(&value).map(|(a, b)| a * b).sum();
                        if pairing < -1e-9 * scale {
                            conflict = true;
                            break;
                        }
                    }
                }
            }
            MembershipStatus::Undetermined => undetermined += 1,
        }
        if conflict {
            conflicts += 1;
        }
        let status = match verdict.status {
            MembershipStatus::Inside => "inside",
            MembershipStatus::Outside => "outside",
            MembershipStatus::Undetermined => "undetermined",
        };
        rows.push(ConeAuditRow {
            domain: label.clone(),
            case: case.to_string(),
            h,
            status: status.to_string(),
            residual: verdict.residual,
        });
    }
    let content = match format {
        OutputFormat::Csv => report::cone_csv(&rows),
        OutputFormat::Json => report::to_json(&ConeReport {
            domain: label.clone(),
            trials: cfg.cone.trials,
            inside,
            outside,
            undetermined,
            conflicts,
            rows,
        }),
    };
    emit(out, "cone-report", format, &content)?;
    Ok(Outcome {
        violations: conflicts,
        summary: format!(
            "cone-report: domain={label} trials={} inside={inside} outside={outside} undetermined={undetermined} conflicts={conflicts}",
            cfg.cone.trials
        ),
    })
}

pub fn example_catalog(out: Option<&Path>) -> Result<Outcome, Failure> {
    let entries = registry::catalog()?;
    let content = report::to_json(&entries);
    emit(out, "example-catalog", OutputFormat::Json, &content)?;
    Ok(Outcome {
        violations: 0,
        summary: format!("example-catalog: {} domains", entries.len()),
    })
}
