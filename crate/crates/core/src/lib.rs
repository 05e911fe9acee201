//! Simulation toolkit for entanglement-guided qubit pair selection: graph
//! states on device coupling maps, depolarizing noise, state tomography,
//! pairwise negativity, and one-time-pad keys carried by superdense coding.

pub mod entanglement;
pub mod error;
pub mod experiment;
pub mod graphstate;
pub mod linalg;
pub mod noise;
pub mod qsim;
pub mod rng;
pub mod supercrypt;
pub mod tomography;

pub use entanglement::{Chain, EntanglementScore};
pub use error::{Error, Result};
pub use experiment::{ExperimentConfig, ExperimentReport};
pub use graphstate::{Graph, Topology};
pub use linalg::{CMatrix, Complex64, Pauli};
pub use noise::{CalibrationProfile, NoiseModel};
pub use qsim::{Circuit, Counts, DensityMatrix, GateOp, StateVector};
pub use supercrypt::{Ciphertext, FidelityEstimate, KeyMaterial, TransmissionReport};
