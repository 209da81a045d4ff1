//! Monte Carlo model of the four-arm multi-core fiber interferometer.
//!
//! Alice sets per-arm transmissivities `τ` and phases `φ^A`, the photon
//! travels through the fiber to Bob, who applies phases `φ^B` and a
//! multi-port beam splitter whose four outputs feed the detectors. A weak
//! coherent source, lossy detectors, optional dark counts and phase drift
//! with an active stabilization loop complete the model.

mod config;
mod noise;
mod optics;
mod simulate;
mod source;
mod visibility;

use thiserror::Error;

pub use config::{InterferometerConfig, PhaseNoise, PhaseNoiseModel, StabilizationConfig};
pub use noise::{spd1_ceiling, spd1_probability, stabilize_phases, PhaseState};
pub use optics::{
    detection_probabilities, mbs_matrix, measurement_phase_for_input, measurement_unitary,
    prepare_state, settings_for_state, Amplitudes,
};
pub use simulate::{
    ideal_counts, ideal_setting_probabilities, simulate_counts, simulate_detections,
    simulate_pulses, SHARD_PULSES,
};
pub use source::{sample_source, PulseSource};
pub use visibility::{calibrate_drift_sigma, fringe_visibility, mean_fringe_visibility, ARM_PAIRS};

/// Number of interferometer arms (core modes).
pub const ARMS: usize = 4;

#[derive(Debug, Error)]
pub enum PhotonicsError {
    #[error("invalid interferometer configuration: {0}")]
    InvalidConfig(String),

    #[error("all arms are blocked")]
    AllArmsBlocked,

    #[error("measurement input must be 0 or 1, got {0}")]
    InvalidInput(usize),

    #[error("state has dimension {0}, expected {ARMS}")]
    DimensionMismatch(usize),

    #[error("invalid arm pair ({0}, {1})")]
    InvalidArmPair(usize, usize),

    #[error("mean photon number must be positive and finite, got {0}")]
    InvalidMu(f64),

    #[error("target visibility {0} is not reachable")]
    InvalidVisibilityTarget(f64),

    #[error("stabilization stopped at P(SPD1) = {probability} after {iterations} iterations")]
    StabilizationFailed { probability: f64, iterations: usize },

    #[error("no detection is possible: zero efficiency and no dark counts")]
    NoDetectionPossible,
}

pub type Result<T> = std::result::Result<T, PhotonicsError>;
