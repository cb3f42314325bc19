//! Shot-based expectation values and density-matrix simulation under a
//! calibration-driven noise model.

mod calibration;
mod channels;
mod density;
mod shots;

pub use calibration::{default_mapping, CouplingCalibration, NoiseModel, QubitCalibration, SIX_QUBIT_MAPPING};
pub use channels::{
    amplitude_damping, amplitude_damping_gamma, average_fidelity_tr, bit_flip, depolarization_probability,
    depolarizing, phase_damping, phase_damping_gamma, thermal_relaxation, KrausChannel,
};
pub use density::{run_noisy, DensityMatrix, NoisyCircuit};
pub use shots::{sample_expectation_z, sample_from_expectation, ShotConfig};
