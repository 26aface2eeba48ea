//! Linear thermoacoustics in a closed one-dimensional pipe.
//!
//! Pulse heating at one wall launches temperature and pressure waves through
//! a fluid whose equation of state is linearized around a reference point.
//! The crate provides the dimensionless parameter calculator, a staggered
//! finite-difference grid, a reversible/irreversible splitting integrator
//! with an RK4 baseline, and a harness for runs and numerical studies.

pub mod error;
pub mod excitation;
pub mod grid;
pub mod harness;
pub mod integrators;
pub mod io;
pub mod params;

pub use error::{Error, Result};
pub use excitation::{pulse_flux, ClosedPipe, HeatPulse};
pub use grid::{init_equilibrium, FieldState, Probe, ProbeField, ProbeLocation, StaggeredGrid};
pub use integrators::{Rk4Integrator, SplittingIntegrator};
pub use params::{derive_dimensionless, DimensionlessParams, MaterialState, ViscosityPolicy};
