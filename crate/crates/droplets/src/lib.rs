//! Reduced variational model of two-dimensional quaternary inhibitory
//! systems: exact planar bubble-cluster geometry, the leading-order droplet
//! energy `e0`, global mass partitioning, and the torus-level Green's
//! function placement problem.
//!
//! The crate is organized around four subsystems:
//!
//! * [`geometry`] — single/double/triple bubble solvers and their invariants;
//! * [`energy`] — the per-bubble energy `e0` and configuration energies;
//! * [`partition`] — global minimization of the total energy over bubble
//!   configurations, analytic mass bounds, and coexistence constructions;
//! * [`torus`] — the periodic Green's function, bubble placement on the unit
//!   torus, and the finite-scale energy assembly.

pub mod energy;
pub mod error;
pub mod geometry;
pub mod partition;
pub mod torus;

mod linalg;
pub mod vec2;

pub use error::{Error, Result};
