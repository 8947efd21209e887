//! Concrete homogeneous example families: matrix domains over `C` or the
//! quaternions, and spin-factor domains, together with their triangular
//! group actions, characters, and calibration identities.

pub mod ex1;
pub mod ex2;
pub mod quaternion;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Base field of a matrix domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldKind {
    Complex,
    Quaternionic,
}

impl FieldKind {
    /// Complex dimension of the field as a left `C`-module.
    pub fn dim_complex(self) -> usize {
        match self {
            FieldKind::Complex => 1,
            FieldKind::Quaternionic => 2,
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            FieldKind::Complex => "C",
            FieldKind::Quaternionic => "H",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "C" | "c" | "\u{2102}" => Some(FieldKind::Complex),
            "H" | "h" | "\u{210d}" => Some(FieldKind::Quaternionic),
            _ => None,
        }
    }
}

impl std::fmt::Display for FieldKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.short_name())
    }
}

#[derive(Debug, Error)]
pub enum ZooError {
    #[error("invalid sizes: {detail}")]
    InvalidSizes { detail: String },
    #[error("shape mismatch: {detail}")]
    ShapeMismatch { detail: String },
    #[error("matrix is not in the open cone (pivot {pivot} at position {index})")]
    NotPositiveDefinite { pivot: f64, index: usize },
    #[error("triangular element invalid: {detail}")]
    InvalidTriangular { detail: String },
    #[error(
        "character calibration failed: relative error {rel_err:.3e} exceeds {limit:.1e} \
         (field {field}, r={r}, k={k}, p={p})"
    )]
    Calibration {
        rel_err: f64,
        limit: f64,
        field: FieldKind,
        r: usize,
        k: usize,
        p: usize,
    },
    #[error("precondition violated: {detail}")]
    Precondition { detail: String },
}
