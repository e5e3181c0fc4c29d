//! Numerical laboratory for counting bound states of fractional
//! Schrödinger operators `H_s = (-Delta)^s - V` on `R^d` (d = 1, 2) and
//! for stress-testing the counting bounds that control `N_{<0}(H_s)`:
//! Birman-Schwinger counting, low/high-frequency splitting, weak trace
//! ideal quasinorms, and the lattice (Cwikel/Simon) machinery.
//!
//! The domain is a truncated torus `[-L, L)^d` discretized by plane
//! waves, so `(-Delta)^s` is an exact Fourier multiplier and the
//! Birman-Schwinger correspondence holds exactly at the discrete level.

pub mod birman_schwinger;
pub mod bounds;
pub mod cwikel;
pub mod direct_solver;
pub mod error;
pub mod norms;
pub mod numgrid;
pub mod potentials;
pub mod runner;
pub mod spectra;

pub use error::{Error, Result};
