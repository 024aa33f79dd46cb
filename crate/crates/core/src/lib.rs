//! Machine-learned pairwise entanglement witness.
//!
//! The pipeline: a piecewise-constant all-to-all Hamiltonian
//! ([`hamiltonian`]) evolves a register for a fixed time; the squared
//! correlator `⟨Z_i Z_j⟩²` at the end serves as an entanglement witness
//! ([`witness`]). Each time chunk compiles to Ry/Rz/CNOT gates
//! ([`compiler`], [`qasm`]); the chunk parameters are trained by
//! finite-difference gradient descent and bootstrapped to larger registers
//! ([`trainer`]); finite-shot measurement statistics come from
//! [`shots`].
//!
//! Qubit 0 is the most significant bit of a basis index.

pub mod compiler;
pub mod error;
pub mod fixtures;
pub mod gates;
pub mod hamiltonian;
pub mod linalg;
pub mod par;
pub mod qasm;
pub mod schedule;
pub mod shots;
pub mod state;
pub mod trainer;
pub mod witness;

pub use compiler::{compile_schedule, verify_circuit, verify_equivalence, CompileOptions, EquivalenceReport};
pub use error::{Error, Result};
pub use gates::{circuit_unitary, rotation_matrix, Axis, Circuit, GateOp};
pub use hamiltonian::{propagate, Method};
pub use linalg::{frobenius_distance, ComplexMatrix};
pub use qasm::{export_qasm, parse_qasm};
pub use schedule::{ChunkParams, Schedule};
pub use shots::{ShotConfig, ShotStatistics};
pub use state::{expectation_zz, DensityMatrix, QuantumState, StateVector};
pub use trainer::{TrainResult, TrainerConfig};
pub use witness::{build_training_set, make_pair_state, witness_value, PairStateKind, TrainingSet};
