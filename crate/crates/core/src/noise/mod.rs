//! Depolarizing noise model, trajectory sampling and the shipped
//! calibration profiles.

mod frame;
mod model;
mod trajectory;

pub use model::{
    default_profile_for, load_calibration, parse_profile, profile_from_document, shipped_profile_names,
    CalibrationProfile, NoiseModel, ProfileDocument,
};
pub use frame::{PauliFrame, MAX_FRAME_QUBITS};
pub use trajectory::{
    average_probes, average_probes_statevector, average_reduced_state, sample_frame, sample_noisy_circuit, NoiseSchedule,
    Probe,
};
