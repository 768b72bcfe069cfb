//! Sideband cooling of a mechanical resonator in an optomechanical cavity
//! that also holds an ensemble of three-level (Λ) atoms.
//!
//! The crate covers the analytic theory (noise spectrum, cooling
//! coefficients, optimal detunings), a closed linear system for the twenty
//! second moments of the linearized dynamics, a truncated Fock-space master
//! equation used as an independent check, and the classical mean-field
//! amplitudes that fix the effective couplings.
//!
//! All rates are in units of the mechanical frequency ω_m.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod amplitudes;
pub mod cooling;
pub mod detunings;
pub mod error;
pub mod fock;
pub mod moments;
pub mod par;
pub mod params;
pub mod presets;
pub mod spectrum;
pub mod sweep;

pub use error::{Error, Result};
pub use params::{ModelParams, OMEGA_M};
