//! Simulation and verification of bias-preserving fault-tolerant gadgets on
//! the distance-3 bit-flip repetition code.
//!
//! # Qubit ordering
//!
//! Qubit indices are little-endian everywhere: qubit 0 is the least
//! significant bit of a basis-state index, so `|q2 q1 q0>` has index
//! `4·q2 + 2·q1 + q0`. This is the only place the convention is stated; all
//! backends, Pauli masks and decoders follow it.

pub mod circuit;
pub mod error;
pub mod experiments;
pub mod gadgets;
pub mod gate;
pub mod noise;
pub mod oracle;
pub mod pauli;
pub mod repcode;
pub mod sim;

pub use circuit::{Circuit, Cond, FaultSite, Instruction};
pub use error::{Error, Result};
pub use gate::Gate;
pub use noise::NoiseSpec;
pub use pauli::{Pauli, PauliString, Phase};
