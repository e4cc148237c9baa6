//! Two-layered elastodynamic Green's tensors and a rough-interface scattering solver.
//!
//! The library evaluates the Green's tensor of the time-harmonic Navier equation
//! `Δ*u + ρω²u = 0`, `Δ* = μΔ + (λ+μ)∇div`, for a medium whose mass density jumps
//! across a flat interface (`ρ₊` above, `ρ₋` below, identical Lamé constants).
//! Everything is built from explicit spectral (Sommerfeld / Hankel-transform)
//! representations:
//!
//! * [`medium`] — physical parameters, wavenumbers, branch functions, and the
//!   scalar reflection/transmission factors of the flat interface,
//! * [`specfun`] — Bessel/Hankel functions of orders 0–2 for complex arguments,
//! * [`quadrature`] — adaptive contour quadrature for the oscillatory spectral
//!   integrals (indented real line and the Hankel-transform path),
//! * [`elastic_fields`] — free-space fundamental solutions, generalized stress
//!   operators, Helmholtz decomposition, and radiation-condition probes,
//! * [`green2d`] / [`green3d`] — the two-layered Green's tensor in two and three
//!   dimensions, with closed-form far-field patterns,
//! * [`bie2d`] — the 2D transmission scattering solver for a locally perturbed
//!   interface, coupling quadratic finite elements on a disk to boundary
//!   integral operators on its circle.

pub mod bie2d;
pub mod elastic_fields;
pub mod green2d;
pub mod green3d;
mod lapack;
pub mod medium;
pub mod quadrature;
pub mod specfun;
pub mod verify;

use thiserror::Error;

/// Error type shared by the whole library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid medium: {0}")]
    InvalidMedium(String),
    #[error("spectral point {xi:?} lies within {dist:.3e} of a branch cut (limit {eps:.3e})")]
    BranchCut { xi: num_complex::Complex64, dist: f64, eps: f64 },
    #[error("degenerate reflection/transmission denominator at beta_p={0:?}, beta_m={1:?}")]
    DegenerateDenominator(num_complex::Complex64, num_complex::Complex64),
    #[error("coincident or near-coincident points (separation {0:.3e})")]
    CoincidentPoints(f64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("quadrature node budget {budget} exhausted (error estimate {estimate:.3e} > tol {tol:.3e})")]
    BudgetExceeded { budget: usize, estimate: f64, tol: f64 },
    #[error("kernel decay rate {rate:.3e} below minimum {min:.3e}; use the near-interface splitting")]
    SlowDecay { rate: f64, min: f64 },
    #[error("observation direction within {0:.3e} rad of grazing")]
    GrazingDirection(f64),
    #[error("invalid spectral coefficient key: {0}")]
    InvalidKey(String),
    #[error("singular linear system: {0}")]
    SingularSystem(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
