//! Energy-dissipating, bound-preserving time integrators for the periodic
//! 2D Allen-Cahn equation `u_t = eps^2 lap u + f(u)`.
//!
//! The crate provides the stabilized exponential scalar-auxiliary-variable
//! schemes (sESAV1, sESAV2) next to the classic SAV and ESAV baselines, the
//! finite difference and FFT machinery they run on, diagnostics for the
//! maximum bound principle and energy dissipation, and experiment drivers.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod harness;
pub mod helmholtz;
pub mod potential;
pub mod schemes;
mod selftest;

pub use error::{Error, Result};
pub use grid::{Field, Grid};
pub use potential::Potential;
pub use schemes::{SchemeId, SchemeParams, SchemeState};
