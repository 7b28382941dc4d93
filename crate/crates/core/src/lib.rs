//! Simulation of single-photon emission from a one-sided leaky Fabry-Perot
//! cavity containing a laser-driven three-level Λ-atom.
//!
//! The crate provides three cross-validated descriptions of the same physics:
//!
//! * **true-mode**: the atom couples to the exact continuum of the
//!   semi-infinite space through a structured coupling `η(ω)` built from the
//!   single-layer mirror response function,
//! * **inside-outside**: a perfect cavity mode coupled to an external
//!   reservoir through a sinc-shaped coupling `κ_c(ω)`,
//! * **pseudo-mode**: a non-Hermitian three-level model where the reservoir
//!   is folded into the cavity decay rate `Γ_c`.
//!
//! On top of these it implements the 4-level Lindblad master equation, photon
//! flux / spectrum observables, and the inverse design of the drive `Ω(t)`
//! producing a prescribed photon shape.
//!
//! All quantities are in scaled units: rates are stored as `rate × T`,
//! lengths as `L / (c T)`, with the reference pulse duration `T = 1` and
//! `c = 1`.

pub mod couplings;
pub mod dynamics;
pub mod error;
pub mod grid;
pub mod master;
pub mod mirror;
pub mod observables;
pub mod rk4;
pub mod shaping;
pub mod units;
pub mod verify;

pub use error::{Error, Result};
