//! Verification toolkit for quadric CR manifolds and Siegel domains.
//!
//! The library is organised around a Hermitian vector-valued form `Phi` on
//! `C^n` with values in `R^m`. From the form it derives:
//!
//! * the nilpotent group structures on the ambient space `C^n x C^m` and on
//!   the manifold coordinates `C^n x R^m` ([`form`]),
//! * the closed convex cone generated by the image of `Phi`, with two-sided
//!   membership certificates ([`cone`]),
//! * Siegel domains over an open cone and their defining function ([`domain`]),
//! * analytic discs attached to the boundary manifold ([`disc`]),
//! * a catalogue of homogeneous examples, including quaternionic matrix
//!   domains and spin-factor domains ([`zoo`] and [`registry`]),
//! * Monte-Carlo estimation of slice `L^p` norms of holomorphic test
//!   functions, with common-random-number monotonicity scans ([`hardy`]).
//!
//! Reports are serialisable to JSON and CSV ([`report`]); experiment inputs
//! are described by TOML or JSON configuration files ([`config`]).

pub mod cone;
pub mod config;
pub mod disc;
pub mod domain;
pub mod form;
pub mod hardy;
pub mod registry;
pub mod report;
pub mod zoo;

/// Default numeric tolerances used across the crate. Each operation that
/// takes an explicit tolerance parameter documents its own default; these
/// constants are the shared fallbacks.
pub mod tol {
    /// Hermitian-symmetry and algebraic-identity checks on exact formulas.
    pub const ALGEBRAIC: f64 = 1e-10;
    /// Validation of coefficient matrices at construction time.
    pub const HERMITIAN: f64 = 1e-12;
    /// Default cone-membership tolerance.
    pub const MEMBERSHIP: f64 = 1e-9;
    /// Default boundary-residual tolerance for analytic discs.
    pub const DISC_BOUNDARY: f64 = 1e-9;
}

pub use form::{AmbientPoint, Complex64, HermitianForm, NPoint};
