//! Compilation and noisy simulation of circuits distributed across multiple
//! QPUs connected by optical entanglement links.
//!
//! The pipeline turns a monolithic circuit into a deployable distributed
//! program in four stages, then estimates its output quality:
//!
//! 1. [`constructor`] — partition qubits across QPUs, route entanglement
//!    through the network and expand cross-QPU gates into teleportation
//!    primitives over shared EPR pairs.
//! 2. [`isolator`] — cut the distributed circuit at the EPR boundaries into
//!    per-QPU subcircuits, with virtual-gate placeholders marking where
//!    communication payloads were removed.
//! 3. [`transpiler`] — lower each subcircuit to its QPU's basis gates and
//!    coupling constraints.
//! 4. [`assembler`] — merge the transpiled subcircuits back into one
//!    executable circuit, re-inserting the communication payloads, and
//!    derive a deadlock-free execution trace.
//!
//! [`sim`] executes the result either exactly or as noisy Monte-Carlo
//! trajectories under the channel assignment built by [`noise`], and
//! [`pipeline`] wires everything into the end-to-end flow used by the CLI
//! and the examples.

pub mod arch;
pub mod assembler;
pub mod bench;
pub mod circuit;
pub mod constructor;
pub mod error;
pub mod isolator;
pub mod noise;
pub mod pipeline;
pub mod sim;
pub mod transpiler;

pub use error::{Error, Result};
