//! Numerical toolkit for simultaneous correlations in mutually unbiased bases
//! (C₁, Q₂, Q₃), quantum discord, correlation rank, steering feasibility
//! (1SDI and dimension-bounded 1SSDI), Schrödinger strength, and quantum
//! steering ellipsoid geometry of bipartite quantum states.
//!
//! The crate is organized around a small set of value types:
//!
//! - [`DensityMatrix`] — validated bipartite state,
//! - [`PauliRepresentation`] — Bloch vectors and spin correlation matrix of a
//!   two-qubit state,
//! - [`assemblage::Assemblage`] / [`assemblage::NoSignalingBox`] —
//!   conditional-state and joint-probability descriptions of a steering
//!   experiment,
//! - [`qse::SteeringEllipsoid`] — the geometry of the steered-state set.
//!
//! All information quantities are in bits (base-2 logarithms). All solvers
//! and samplers take explicit 64-bit seeds and are deterministic for a fixed
//! `(input, seed)` pair.

pub mod assemblage;
pub mod bell;
pub mod catalog;
pub mod measures;
pub mod optimize;
pub mod io;
pub mod qse;
pub mod report;
pub mod steering;
pub mod verification;
pub mod error;
pub mod linalg;
pub mod state;

pub use error::Error;
pub use state::{DensityMatrix, PauliRepresentation, PovmElement, QubitBasis};

/// Default seed for all stochastic searches.
pub const DEFAULT_SEED: u64 = 0xC0FFEE;
