//! Uncertainty-limited joint measurements of the qubit observables X and Y,
//! the outcome statistics they produce on one and two qubits, and the
//! positivity bound those statistics impose on non-local correlations.
//!
//! The crate is organised bottom-up:
//!
//! - [`matrix`]: dense complex 2×2 / 4×4 linear algebra with a cyclic Jacobi
//!   Hermitian eigensolver.
//! - [`joint`]: the single-qubit joint measurement (POVM, outcome
//!   distribution, moments, visibility and Bloch-disk bounds).
//! - [`pair`]: two-qubit states and the 16-outcome statistics of two local
//!   joint measurements.
//! - [`bounds`]: the outcome-wise bound, its angle form, the tight bound on
//!   the four correlations, the simplified and CHSH corollaries and the
//!   coherence form.
//! - [`sampling`]: seeded random states, Monte Carlo shots, finite-sample
//!   estimators and the experimental CHSH optima at the bound.
//! - [`suite`]: named verification criteria, shared by the CLI and the
//!   acceptance tests.
//! - [`cli`]: run configuration, reports and their JSON / CSV encodings.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod joint;
pub mod matrix;
pub mod optimize;
pub mod pair;
pub mod sampling;
pub mod suite;

pub use error::{Error, Result};
