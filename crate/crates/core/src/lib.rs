//! Solvers and evaluators for max-min (polarization / Chebyshev) problems:
//! place `N` charges so that the minimum of their summed potential over a
//! compact target set is as large as possible.
//!
//! The crate covers discrete configurations (constrained, unconstrained and
//! two-plate variants), the continuous measure version of the problem, best
//! covering of circles and spheres, large-`N` normalization constants and a
//! couple of constructive geometric procedures used to audit optimizer
//! output. Everything is deterministic given a seed.

pub mod asymptotics;
pub mod continuous;
pub mod covering;
pub mod domain;
pub mod error;
pub mod geom;
pub mod kernel;
pub mod polarization;
pub mod procedures;
pub mod solver;

mod special;

pub use domain::Domain;
pub use error::{Error, Result};
pub use kernel::KernelSpec;
pub use polarization::{Configuration, PolarizationReport};
pub use solver::{SolveMode, SolveOptions};
