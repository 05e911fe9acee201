//! Statevector simulation, exact small-register density-matrix evolution and
//! shot sampling.

mod circuit;
mod density;
mod gate;
mod sampling;
mod state;

pub use circuit::{run_circuit, Circuit};
pub use density::{
    exact_density_evolution, exact_density_evolution_capped, non_identity_paulis, projected_reduction,
    reduced_density_matrix, state_fidelity, DensityMatrix, EXACT_QUBIT_CAP, HERMITIAN_TOLERANCE, PSD_TOLERANCE,
    TRACE_TOLERANCE,
};
pub(crate) use density::{conjugate, scatter};
pub use gate::GateOp;
pub use sampling::{bitstring, marginal_probabilities, sample_measurements, Counts};
pub(crate) use sampling::sample_histogram;
pub use state::StateVector;
