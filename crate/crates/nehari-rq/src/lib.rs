//! Nehari-manifold ground states via nonlinear generalized Rayleigh quotients.
//!
//! The crate computes, on finite-difference grids:
//!
//! * fibering maps `t -> Phi(t u)` and their classified critical points
//!   ([`fibering`]),
//! * the Rayleigh-quotient family attached to a parametric variational
//!   problem — level quotients, their fiber extrema in closed form, and the
//!   derived parameter-free quotients ([`quotients`]),
//! * extremal values of those quotients over the discrete function space by
//!   normalized multi-start projected descent ([`extremal`]),
//! * Nehari-manifold minimizers, branch continuation in the parameter, and
//!   the numerical applicability limit ([`nehari`]),
//! * prescribed-energy solutions of the whole-space zero-mass equation on a
//!   truncated radial grid ([`zeromass`]).
//!
//! All operations are deterministic given a seed; multi-start descents may
//! run their starts in parallel without changing the result.

// Validation guards use the `!(x > 0.0)` form on purpose: it rejects NaN,
// which `x <= 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod extremal;
pub mod fibering;
pub mod gridfield;
mod linalg;
pub mod nehari;
mod polish;
pub mod quotients;
pub mod zeromass;

use thiserror::Error;

/// Errors shared across the solver modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("non-finite value at node {index}")]
    NonFinite { index: usize },

    #[error("exponent ordering violated: {0}")]
    BadExponents(String),

    #[error("fiber coefficients must be positive: {0}")]
    BadCoefficients(String),

    #[error("fiber scale t must be positive, got {0}")]
    NonPositiveT(f64),

    #[error("dilation overflows truncation radius: support {support} * sigma {sigma} exceeds R = {radius}")]
    DilationOverflow { support: f64, sigma: f64, radius: f64 },

    #[error("no fiber roots: lambda = {lambda} is outside (0, {lambda_max})")]
    NoRoots { lambda: f64, lambda_max: f64 },

    #[error("degenerate quotient: lambda = {lambda} is at the fiber maximum {lambda_max} within tolerance")]
    DegenerateQuotient { lambda: f64, lambda_max: f64 },

    #[error("projection does not exist: lambda = {lambda} > lambda(u) = {lambda_u}")]
    ProjectionNonexistent { lambda: f64, lambda_u: f64 },

    #[error("degenerate projection: lambda = {lambda} equals lambda(u) within tolerance")]
    DegenerateProjection { lambda: f64 },

    #[error("quotient is not 0-homogeneous: relative drift {drift} under u -> 2u")]
    NotHomogeneous { drift: f64 },

    #[error("objective infeasible at every start for lambda = {lambda}")]
    InfeasibleParameter { lambda: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no solution regime: p = {p} < q = {q}; the fiber map is strictly increasing (see the nonexistence certificate)")]
    NoSolutionRegime { p: f64, q: f64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
