//! Builtin domain registry.
//!
//! Domains are addressed by compact keys so reports can reference them
//! reproducibly:
//!
//! * `heisenberg(n)` for the half-line domain over `C^n x C`,
//! * `ex1(field,r,k,p)` for the positive-definite matrix cone families,
//! * `ex2(k,p,q)` for the rank-two spin cone families.
//!
//! `field` is `C` or `H` (Unicode forms are accepted on input).

use serde::Serialize;
use thiserror::Error;

use crate::domain::{DomainError, OmegaKind, SiegelSpec};
use crate::form::{FormError, HermitianForm};
use crate::zoo::ex1::MatrixDomainSpec;
use crate::zoo::ex2::SpinDomainSpec;
use crate::zoo::{FieldKind, ZooError};

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("cannot parse domain key {0:?}: {1}")]
    Parse(String, String),
    #[error(transparent)]
    Zoo(#[from] ZooError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Form(#[from] FormError),
}

/// A parsed builtin domain key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DomainKey {
    Heisenberg { n: usize },
    Ex1 { field: FieldKind, r: usize, k: usize, p: usize },
    Ex2 { k: usize, p: usize, q: usize },
}

impl DomainKey {
    pub fn parse(key: &str) -> Result<Self, RegistryError> {
        let err = |msg: &str| RegistryError::Parse(key.to_string(), msg.to_string());
        let trimmed = key.trim();
        let open = trimmed.find('(').ok_or_else(|| err("missing '('"))?;
        if !trimmed.ends_with(')') {
            return Err(err("missing closing ')'"));
        }
        let name = trimmed[..open].trim();
        let args: Vec<&str> = trimmed[open + 1..trimmed.len() - 1]
            .split(',')
            .map(str::trim)
            .collect();
        let parse_usize = |s: &str| -> Result<usize, RegistryError> {
            s.parse::<usize>()
                .map_err(|_| err(&format!("expected an integer, got {s:?}")))
        };
        match name {
            "heisenberg" => {
                if args.len() != 1 {
                    return Err(err("heisenberg takes one argument"));
                }
                let n = parse_usize(args[0])?;
                if n == 0 {
                    return Err(err("n must be positive"));
                }
                Ok(DomainKey::Heisenberg { n })
            }
            "ex1" => {
                if args.len() != 4 {
                    return Err(err("ex1 takes (field, r, k, p)"));
                }
                let field = FieldKind::parse(args[0])
                    .ok_or_else(|| err(&format!("unknown field {:?}", args[0])))?;
                Ok(DomainKey::Ex1 {
                    field,
                    r: parse_usize(args[1])?,
                    k: parse_usize(args[2])?,
                    p: parse_usize(args[3])?,
                })
            }
            "ex2" => {
                if args.len() != 3 {
                    return Err(err("ex2 takes (k, p, q)"));
                }
                Ok(DomainKey::Ex2 {
                    k: parse_usize(args[0])?,
                    p: parse_usize(args[1])?,
                    q: parse_usize(args[2])?,
                })
            }
            other => Err(err(&format!("unknown family {other:?}"))),
        }
    }

    /// Canonical rendering, inverse to `parse`.
    pub fn canonical(&self) -> String {
        match self {
            DomainKey::Heisenberg { n } => format!("heisenberg({n})"),
            DomainKey::Ex1 { field, r, k, p } => {
                format!("ex1({},{r},{k},{p})", field.short_name())
            }
            DomainKey::Ex2 { k, p, q } => format!("ex2({k},{p},{q})"),
        }
    }

    /// Builds the Siegel domain for this key.
    pub fn build(&self, generator_count: Option<usize>) -> Result<SiegelSpec, RegistryError> {
        match self {
            DomainKey::Heisenberg { n } => Ok(SiegelSpec::new(
                HermitianForm::heisenberg(*n),
                OmegaKind::HalfLine,
                vec![1.0],
                generator_count,
            )?),
            DomainKey::Ex1 { field, r, k, p } => {
                let mspec = MatrixDomainSpec::new(*field, *r, *k, *p)?;
                let form = mspec.materialize()?;
                Ok(SiegelSpec::new(
                    form,
                    OmegaKind::MatrixPd { field: *field, r: *r },
                    mspec.base_point_coords(),
                    generator_count,
                )?)
            }
            DomainKey::Ex2 { k, p, q } => {
                let sspec = SpinDomainSpec::new(*k, *p, *q)?;
                let form = sspec.materialize()?;
                let base = sspec.f_coords(&sspec.base_point());
                Ok(SiegelSpec::new(
                    form,
                    OmegaKind::Spin { q: *q },
                    base,
                    generator_count,
                )?)
            }
        }
    }
}

impl std::fmt::Display for DomainKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.canonical())
    }
}

/// Parses a key and builds its domain in one step.
pub fn builtin(key: &str) -> Result<SiegelSpec, RegistryError> {
    DomainKey::parse(key)?.build(None)
}

/// The keys exercised by the standard verification suite.
pub fn standard_keys() -> Vec<&'static str> {
    vec![
        "heisenberg(1)",
        "heisenberg(2)",
        "ex1(C,2,1,2)",
        "ex1(H,1,1,1)",
        "ex2(1,2,1)",
    ]
}

/// Computed metadata for one builtin domain.
#[derive(Clone, Debug, Serialize)]
pub struct CatalogEntry {
    pub key: String,
    pub n: usize,
    pub m: usize,
    /// Cone rank of the underlying tube factor, when the family has one.
    pub rank: Option<usize>,
    /// Exponent vector for the calibrated power functions, when defined.
    pub b: Option<Vec<f64>>,
    pub spans_f: bool,
    pub base_point: Vec<f64>,
}

/// Builds catalog metadata for one key.
pub fn catalog_entry(key: &str) -> Result<CatalogEntry, RegistryError> {
    let parsed = DomainKey::parse(key)?;
    let spec = parsed.build(None)?;
    let (rank, b) = match &parsed {
        DomainKey::Heisenberg { .. } => (Some(1), None),
        DomainKey::Ex1 { field, r, k, p } => {
            let mspec = MatrixDomainSpec::new(*field, *r, *k, *p)?;
            (Some(*r), Some(mspec.b_vector()))
        }
        DomainKey::Ex2 { .. } => (Some(2), None),
    };
    Ok(CatalogEntry {
        key: parsed.canonical(),
        n: spec.form().n(),
        m: spec.form().m(),
        rank,
        b,
        spans_f: spec.cone().spans_f(),
        base_point: spec.base_point().to_vec(),
    })
}

/// Catalog of the standard keys.
pub fn catalog() -> Result<Vec<CatalogEntry>, RegistryError> {
    standard_keys().into_iter().map(catalog_entry).collect()
}
