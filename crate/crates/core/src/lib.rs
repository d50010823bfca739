//! Petz recovery maps for single-qubit decoherence channels.
//!
//! The crate builds the recovery map of a channel for a chosen reference
//! state, dilates it to a unitary on system ⊗ ancilla, compiles that unitary
//! into single-qubit rotations and entangling gates, and simulates the
//! compiled circuit under a trapped-ion geometric-phase-gate noise model.

pub mod channels;
pub mod dilation;
pub mod error;
pub mod ionnoise;
pub mod numerics;
pub mod petz;
pub mod synth;

pub use error::{Error, Result};
