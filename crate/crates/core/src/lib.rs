//! Simulation and optimal control of the NV-center hybrid spin register.
//!
//! The crate models one NV electron spin coupled to a ¹⁴N nucleus and one or
//! more ¹³C nuclei, computes propagators of microwave pulse sequences that
//! drive only the electron, and searches for sequences that implement a target
//! unitary (Grover search, electron-controlled nuclear rotations) with a
//! seeded genetic algorithm.
//!
//! Module map:
//!
//! * [`spinsys`]: spin operators, Hamiltonians, quantization axes, propagators.
//! * [`pulse`]: pulse sequences, their unitaries, gate and robust fidelities.
//! * [`targets`]: ideal target unitaries (Grover circuits, controlled rotations).
//! * [`ga`]: the real-coded genetic algorithm and sequence objectives.
//! * [`catalog`]: the published pulse tables and the verification harness.
//! * [`lab`]: state-level simulations (search populations, ¹⁴N leakage, error budget).
//! * [`spectrum`]: free-induction-decay ESR spectrum simulation.
//! * [`parse`]: text/JSON entry points shared with the command-line front end.

pub mod catalog;
pub mod error;
pub mod ga;
pub mod lab;
pub mod parse;
pub mod pulse;
pub mod report;
pub mod spectrum;
pub mod spinsys;
pub mod targets;

pub use error::{Error, Result};
pub use spinsys::Operator;
