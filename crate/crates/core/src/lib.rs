//! Periodic orbits and relative capacities on `A_R × T^{2n}`.
//!
//! The crate builds the radial profile families and product Hamiltonians,
//! enumerates their periodic-orbit families analytically, finds orbits
//! numerically by shooting, and evaluates the capacity formula together
//! with the homology dimension tables behind the orbit counts.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod capacity;
pub mod crosscheck;
pub mod error;
pub mod hamiltonians;
pub mod homology;
pub mod numeric;
pub mod orbit_analysis;
pub mod phase_space;
pub mod profiles;
pub mod report;
pub mod svg;

pub use error::{Error, Result};
pub use phase_space::{HomotopyClass, LiftedState, LoopSample, PhasePoint, PhaseSpaceConfig};
pub use profiles::{ProfileFamilySpec, RadialProfile, SlopeRoots};
