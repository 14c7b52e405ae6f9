//! Spectral simulator and verification library for the abstract dissipative
//! wave equation
//!
//! ```text
//! u'' + c(t)^2 A u + b(t) u' = 0
//! ```
//!
//! with a time-dependent propagation speed `c(t)` of bounded variation and an
//! integrable damping `b(t)`. The operator `A` is modeled by a finite list of
//! positive eigenvalues, so every field of the theory (energy, diagonalized
//! profiles, time averages) is a finite sum that can be evaluated and checked
//! exactly.
//!
//! The library computes asymptotic scattering profiles of solutions,
//! reconstructs the limiting free wave, and certifies numerically both
//! directions of the freeness criterion: the solution approaches a free wave
//! with speed `c_inf = lim c(t)` exactly when the drift
//! `f(t) = integral of (c(s) - c_inf)` converges as `t -> infinity`.
//!
//! Modules:
//! - [`spectrum`]: finite eigenvalue model, states, unitary phase shifts,
//!   weighted norms, spectral projections.
//! - [`coefficients`]: closed-form coefficient families with exact variation,
//!   integrals, drift classification, and mollification.
//! - [`dynamics`]: adaptive Runge-Kutta integration of the decoupled per-mode
//!   system, energy functionals, and the a-priori bounds used as runtime
//!   certificates.
//! - [`scattering`]: diagonalization, profile extraction, free-wave
//!   reconstruction, discrepancies, time averages, equipartition, and
//!   wave-speed identification.
//! - [`experiments`]: scenario configs, the deterministic runner, parameter
//!   sweeps, CSV output, and the self-verification harness.

pub mod coefficients;
pub mod dynamics;
pub mod experiments;
pub mod quad;
pub mod scattering;
pub mod spectrum;

pub(crate) mod par;

pub use coefficients::{CoefficientProfile, DriftClassification, MollifiedProfile};
pub use dynamics::{IntegratorConfig, Trajectory};
pub use scattering::{FreeSolution, ScatteringProfile};
pub use spectrum::{Component, SpectrumModel, StateVector};
